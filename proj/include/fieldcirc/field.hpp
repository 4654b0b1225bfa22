#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fieldcirc/mesh.hpp"

namespace fieldcirc {

/// Vacuum reluctivity 1/mu0 in m/H.
inline constexpr double kNuVacuum = 1.0 / (4.0e-7 * 3.14159265358979323846);

/// Magnetic reluctivity as a function of b^2 = |B|^2. Either constant or the
/// Brauer exponential law nu(b2) = k1*exp(k2*b2) + k3, clamped at `cap` so
/// the law stays within the documented band; nu(b2)*b remains increasing.
struct ReluctivityLaw {
    bool linear = true;
    double nu = kNuVacuum;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    double cap = kNuVacuum;

    static ReluctivityLaw constant(double nu);
    static ReluctivityLaw brauer(double k1, double k2, double k3, double cap = kNuVacuum);
    double eval(double b2) const;
    double deriv(double b2) const; // d nu / d b2
};

struct Material {
    double sigma = 0.0; // S/m
    ReluctivityLaw nu;
};

/// Region tag -> material. Unlisted regions default to air (sigma 0, nu0).
struct MaterialTable {
    std::vector<Material> by_region;
    const Material& material(int region) const;
};

/// Stranded coil occupying a mesh region: winding density +-turns/area on the
/// coil triangles. Negative turns flip the winding direction. `coupled`
/// selects whether the coil contributes a column to X (non-coupled coils
/// carry an imposed zero current and drop out of the residual).
struct CoilSpec {
    int region = 0;
    double turns = 1.0;
    bool coupled = true;
    std::string name;
};

class FieldModel;

/// Assembly cache for P1 elements on the non-Dirichlet vertices: the unknown
/// is the nodal z-component of the magnetic vector potential.
class FeSystem {
public:
    FeSystem(Mesh2D mesh, MaterialTable materials);

    int n_dofs() const { return n_dofs_; }
    const Mesh2D& mesh() const { return mesh_; }
    const MaterialTable& materials() const { return materials_; }
    bool linear() const;

    Eigen::SparseMatrix<double> assemble_mass() const;
    Eigen::SparseMatrix<double> assemble_stiffness(const Eigen::VectorXd& a) const;
    /// d(K(a)a)/da, the Newton tangent of the reluctivity operator.
    Eigen::SparseMatrix<double> assemble_tangent(const Eigen::VectorXd& a) const;
    Eigen::VectorXd assemble_coil_column(const CoilSpec& coil) const;
    double region_area(int region) const;

private:
    Mesh2D mesh_;
    MaterialTable materials_;
    int n_dofs_ = 0;
    std::vector<int> dof_of_vertex_; // -1 on Dirichlet vertices
    struct TriData {
        int dof[3];
        double gx[3], gy[3]; // P1 shape gradients
        double area;
        int region;
    };
    std::vector<TriData> tris_;
};

/// The space-discrete field DAE
///   M a' + K(a) a - X i_m = 0,     X^T a' = v_c
/// with M the conductivity (mass) matrix, K the reluctivity-weighted
/// stiffness and X the coil excitation matrix (one column per coupled coil).
class FieldModel {
public:
    FieldModel() = default;

    int n_dofs() const { return n_; }
    int n_coils() const { return static_cast<int>(X_.cols()); }
    bool linear() const { return linear_; }
    const Eigen::SparseMatrix<double>& M() const { return M_; }
    const Eigen::MatrixXd& X() const { return X_; }
    const std::vector<CoilSpec>& coils() const { return coils_; }
    const FeSystem* fe() const { return fe_.get(); }

    Eigen::SparseMatrix<double> K(const Eigen::VectorXd& a) const;
    /// Newton tangent d(K(a)a)/da; equals K for linear laws.
    Eigen::SparseMatrix<double> K_tangent(const Eigen::VectorXd& a) const;

    /// Equivalent port inductance X^T K(0)^{-1} X of the linearized model.
    Eigen::MatrixXd equivalent_inductance() const;

    /// Copy of the model with X restricted/reordered to the given coupled
    /// coil columns (one entry per circuit port, no repetitions).
    FieldModel with_coil_selection(const std::vector<int>& coil_columns) const;

    static FieldModel from_fe(std::shared_ptr<const FeSystem> fe, const std::vector<CoilSpec>& coils);
    /// `checked = false` skips the symmetry/rank admission checks so a broken
    /// model can still be loaded for diagnosis by validate_assumptions.
    static FieldModel from_matrices(Eigen::SparseMatrix<double> M, Eigen::SparseMatrix<double> K,
                                    Eigen::MatrixXd X, bool checked = true);

private:
    int n_ = 0;
    bool linear_ = true;
    Eigen::SparseMatrix<double> M_;
    Eigen::SparseMatrix<double> K_const_;
    Eigen::MatrixXd X_;
    std::vector<CoilSpec> coils_;
    std::shared_ptr<const FeSystem> fe_;
};

/// Builds a FieldModel from a mesh, materials and coil specs.
/// Errors: degenerate mesh, empty coil region, no interior dofs.
FieldModel assemble_fe(const Mesh2D& mesh, const MaterialTable& materials,
                       const std::vector<CoilSpec>& coils);

/// MatrixMarket ingestion of an externally discretized (linear) model.
/// Errors: dimension mismatch, asymmetric M beyond 1e-12 relative,
/// rank-deficient X.
FieldModel load_matrix_model(const std::string& m_path, const std::string& k_path,
                             const std::string& x_path);
/// Convenience: <prefix>_M.mtx, <prefix>_K.mtx, <prefix>_X.mtx.
FieldModel load_matrix_model(const std::string& prefix);
/// Skips the admission checks so validate_assumptions can report the defects.
FieldModel load_matrix_model_unchecked(const std::string& prefix);
void save_matrix_model(const FieldModel& model, const std::string& prefix);

/// Built-in benchmark geometry: unit-square domain, rectangular core ring,
/// two coil regions inside the core window (primary coupled, secondary with
/// imposed zero current), Dirichlet A_z = 0 on the outer boundary.
struct TransformerLiteOptions {
    int nx = 33;              // vertices per side; material edges align for (nx-1) % 16 == 0
    double sigma_core = 0.0;  // S/m; 1e3 for eddy current studies
    double turns = 120.0;     // primary winding turns
    bool brauer = false;      // nonlinear core reluctivity
    double nu_core = kNuVacuum / 1000.0;
};

enum TransformerLiteRegion { kRegionAir = 0, kRegionCore = 1, kRegionPrimary = 2, kRegionSecondary = 3 };

FieldModel transformer_lite(const TransformerLiteOptions& opts = {});

/// Machine checks of the structural assumptions: (a) M symmetric,
/// (b) M + K(a) admits a Cholesky factorization at random states,
/// (c) X has full column rank, (d) a -> K(a)a is strongly monotone
/// (Monte-Carlo estimate of the monotonicity constant).
struct ValidationOptions {
    int pencil_samples = 50;
    int monotonicity_pairs = 200;
    std::uint64_t seed = 1;
};

struct AssumptionReport {
    double m_asymmetry_rel = 0.0;
    bool m_symmetric = false;
    int pencil_failures = 0;
    bool pencil_spd = false;
    int x_rank = 0;
    bool x_full_rank = false;
    double monotonicity_min = 0.0; // min (da^T dKa) / |da|^2 over sampled pairs
    bool monotone = false;
    bool all_ok() const { return m_symmetric && pencil_spd && x_full_rank && monotone; }
    std::string to_text() const;
};

AssumptionReport validate_assumptions(const FieldModel& model, const ValidationOptions& opts = {});

/// Implicit-Euler residual of the field DAE, stacked as
/// (M (a_new - a_old)/dt + K(a_new) a_new - X i_m,
///  X^T (a_new - a_old)/dt - v_c).
Eigen::VectorXd eval_field_residual(const FieldModel& model, const Eigen::VectorXd& a_new,
                                    const Eigen::VectorXd& a_old, double dt,
                                    const Eigen::VectorXd& i_m, const Eigen::VectorXd& v_c);

} // namespace fieldcirc
