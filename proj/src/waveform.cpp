#include "fieldcirc/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fieldcirc {

Waveform::Waveform(Eigen::VectorXd grid, Eigen::MatrixXd samples)
    : t_(std::move(grid)), values_(std::move(samples)) {
    if (t_.size() == 0) {
        throw std::invalid_argument("waveform: empty time grid");
    }
    if (values_.rows() != t_.size()) {
        throw std::invalid_argument("waveform: sample rows do not match grid size");
    }
    for (int i = 1; i < t_.size(); ++i) {
        if (!(t_(i) > t_(i - 1))) {
            throw std::invalid_argument("waveform: grid must be strictly increasing");
        }
    }
}

Waveform Waveform::constant(double t0, double t1, const Eigen::VectorXd& value) {
    Eigen::VectorXd t(2);
    t << t0, t1;
    Eigen::MatrixXd v(2, value.size());
    v.row(0) = value;
    v.row(1) = value;
    return Waveform(t, v);
}

Eigen::VectorXd Waveform::eval(double time) const {
    const int n = static_cast<int>(t_.size());
    if (time <= t_(0)) return values_.row(0);
    if (time >= t_(n - 1)) return values_.row(n - 1);
    // first grid point > time
    const double* begin = t_.data();
    const double* it = std::upper_bound(begin, begin + n, time);
    int hi = static_cast<int>(it - begin);
    int lo = hi - 1;
    double w = (time - t_(lo)) / (t_(hi) - t_(lo));
    return (1.0 - w) * values_.row(lo) + w * values_.row(hi);
}

void Waveform::append(const Waveform& other) {
    if (other.dim() != dim()) {
        throw std::invalid_argument("waveform append: dimension mismatch");
    }
    const int n = size();
    const int m = other.size();
    if (std::abs(other.t_(0) - t_(n - 1)) > 1e-14 * (1.0 + std::abs(t_(n - 1)))) {
        throw std::invalid_argument("waveform append: grids do not join");
    }
    Eigen::VectorXd t(n + m - 1);
    Eigen::MatrixXd v(n + m - 1, dim());
    t.head(n) = t_;
    v.topRows(n) = values_;
    t.tail(m - 1) = other.t_.tail(m - 1);
    v.bottomRows(m - 1) = other.values_.bottomRows(m - 1);
    t_ = std::move(t);
    values_ = std::move(v);
}

double sup_diff(const Waveform& a, const Waveform& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("sup_diff: dimension mismatch");
    }
    std::vector<double> times(a.grid().data(), a.grid().data() + a.grid().size());
    times.insert(times.end(), b.grid().data(), b.grid().data() + b.grid().size());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    double m = 0.0;
    for (double t : times) {
        double d = (a.eval(t) - b.eval(t)).lpNorm<Eigen::Infinity>();
        if (std::isnan(d)) return d;
        m = std::max(m, d);
    }
    return m;
}

double sup_abs(const Waveform& w) {
    if (w.samples().size() == 0) return 0.0;
    return w.samples().cwiseAbs().maxCoeff();
}

Eigen::VectorXd make_grid(double t0, double t1, double dt) {
    if (!(dt > 0.0) || !(t1 > t0)) {
        throw std::invalid_argument("make_grid: need t1 > t0 and dt > 0");
    }
    int n = static_cast<int>(std::llround((t1 - t0) / dt));
    n = std::max(n, 1);
    Eigen::VectorXd g(n + 1);
    for (int i = 0; i <= n; ++i) g(i) = t0 + i * dt;
    g(n) = t1;
    return g;
}

} // namespace fieldcirc
