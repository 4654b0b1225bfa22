#pragma once

#include <Eigen/Dense>

namespace fieldcirc {

/// Piecewise-linear vector-valued time signal on a strictly increasing grid.
/// Evaluation between samples interpolates linearly; evaluation outside the
/// grid clamps to the nearest endpoint sample.
class Waveform {
public:
    Waveform() = default;
    Waveform(Eigen::VectorXd grid, Eigen::MatrixXd samples);

    /// Constant signal represented on the two-point grid {t0, t1}.
    static Waveform constant(double t0, double t1, const Eigen::VectorXd& value);

    const Eigen::VectorXd& grid() const { return t_; }
    const Eigen::MatrixXd& samples() const { return values_; }
    int dim() const { return static_cast<int>(values_.cols()); }
    int size() const { return static_cast<int>(t_.size()); }
    double t_start() const { return t_(0); }
    double t_end() const { return t_(t_.size() - 1); }

    Eigen::VectorXd eval(double time) const;
    Eigen::VectorXd last() const { return values_.row(values_.rows() - 1); }
    bool all_finite() const { return values_.allFinite(); }

    /// Appends `other` in time; its first grid point must coincide with this
    /// waveform's last one (the duplicate sample is dropped).
    void append(const Waveform& other);

private:
    Eigen::VectorXd t_;
    Eigen::MatrixXd values_;
};

/// max over the union of both grids of the infinity norm of the interpolated
/// difference. Signals must have the same dimension.
double sup_diff(const Waveform& a, const Waveform& b);

/// sup over the grid of the infinity norm of the samples.
double sup_abs(const Waveform& w);

/// Uniform time grid t0, t0+dt, ..., t1 (last point snapped to t1 exactly).
Eigen::VectorXd make_grid(double t0, double t1, double dt);

} // namespace fieldcirc
