#include "fieldcirc/field.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fieldcirc/errors.hpp"
#include "fieldcirc/linalg.hpp"
#include "fieldcirc/mmio.hpp"

namespace fieldcirc {

ReluctivityLaw ReluctivityLaw::constant(double nu) {
    ReluctivityLaw law;
    law.linear = true;
    law.nu = nu;
    return law;
}

ReluctivityLaw ReluctivityLaw::brauer(double k1, double k2, double k3, double cap) {
    ReluctivityLaw law;
    law.linear = false;
    law.k1 = k1;
    law.k2 = k2;
    law.k3 = k3;
    law.cap = cap;
    return law;
}

double ReluctivityLaw::eval(double b2) const {
    if (linear) return nu;
    return std::min(k1 * std::exp(k2 * b2) + k3, cap);
}

double ReluctivityLaw::deriv(double b2) const {
    if (linear) return 0.0;
    double raw = k1 * std::exp(k2 * b2) + k3;
    if (raw >= cap) return 0.0;
    return k1 * k2 * std::exp(k2 * b2);
}

const Material& MaterialTable::material(int region) const {
    static const Material air{};
    if (region < 0 || region >= static_cast<int>(by_region.size())) return air;
    return by_region[region];
}

FeSystem::FeSystem(Mesh2D mesh, MaterialTable materials)
    : mesh_(std::move(mesh)), materials_(std::move(materials)) {
    mesh_.validate();
    dof_of_vertex_.assign(mesh_.n_vertices(), 0);
    for (int v : mesh_.dirichlet) dof_of_vertex_[v] = -1;
    n_dofs_ = 0;
    for (auto& d : dof_of_vertex_) {
        if (d == 0) d = n_dofs_++;
    }
    if (n_dofs_ == 0) throw ModelError("field assembly: no interior dofs (all vertices Dirichlet)");

    tris_.reserve(mesh_.n_triangles());
    for (int t = 0; t < mesh_.n_triangles(); ++t) {
        const auto& tri = mesh_.triangles[t];
        TriData d;
        d.area = mesh_.triangle_area(t);
        d.region = mesh_.region[t];
        const auto& p0 = mesh_.vertices[tri[0]];
        const auto& p1 = mesh_.vertices[tri[1]];
        const auto& p2 = mesh_.vertices[tri[2]];
        // P1 gradients: grad phi_i = perp(opposite edge) / (2 area)
        d.gx[0] = (p1[1] - p2[1]) / (2.0 * d.area);
        d.gy[0] = (p2[0] - p1[0]) / (2.0 * d.area);
        d.gx[1] = (p2[1] - p0[1]) / (2.0 * d.area);
        d.gy[1] = (p0[0] - p2[0]) / (2.0 * d.area);
        d.gx[2] = (p0[1] - p1[1]) / (2.0 * d.area);
        d.gy[2] = (p1[0] - p0[0]) / (2.0 * d.area);
        for (int k = 0; k < 3; ++k) d.dof[k] = dof_of_vertex_[tri[k]];
        tris_.push_back(d);
    }
}

bool FeSystem::linear() const {
    for (const auto& m : materials_.by_region) {
        if (!m.nu.linear) return false;
    }
    return true;
}

Eigen::SparseMatrix<double> FeSystem::assemble_mass() const {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& t : tris_) {
        double sigma = materials_.material(t.region).sigma;
        if (sigma == 0.0) continue;
        // exact P1 mass: area/6 diagonal, area/12 off-diagonal
        for (int i = 0; i < 3; ++i) {
            if (t.dof[i] < 0) continue;
            for (int j = 0; j < 3; ++j) {
                if (t.dof[j] < 0) continue;
                double m = sigma * t.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
                trips.emplace_back(t.dof[i], t.dof[j], m);
            }
        }
    }
    Eigen::SparseMatrix<double> M(n_dofs_, n_dofs_);
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

Eigen::SparseMatrix<double> FeSystem::assemble_stiffness(const Eigen::VectorXd& a) const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(tris_.size() * 9);
    for (const auto& t : tris_) {
        const auto& law = materials_.material(t.region).nu;
        double nu;
        if (law.linear) {
            nu = law.nu;
        } else {
            // B = curl(A_z e_z) has |B|^2 = |grad a|^2, constant per triangle
            double bx = 0.0, by = 0.0;
            for (int k = 0; k < 3; ++k) {
                double ak = t.dof[k] >= 0 ? a(t.dof[k]) : 0.0;
                bx += ak * t.gx[k];
                by += ak * t.gy[k];
            }
            nu = law.eval(bx * bx + by * by);
        }
        for (int i = 0; i < 3; ++i) {
            if (t.dof[i] < 0) continue;
            for (int j = 0; j < 3; ++j) {
                if (t.dof[j] < 0) continue;
                double k = nu * t.area * (t.gx[i] * t.gx[j] + t.gy[i] * t.gy[j]);
                trips.emplace_back(t.dof[i], t.dof[j], k);
            }
        }
    }
    Eigen::SparseMatrix<double> K(n_dofs_, n_dofs_);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
    return K;
}

Eigen::SparseMatrix<double> FeSystem::assemble_tangent(const Eigen::VectorXd& a) const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(tris_.size() * 9);
    for (const auto& t : tris_) {
        const auto& law = materials_.material(t.region).nu;
        double gax = 0.0, gay = 0.0;
        for (int k = 0; k < 3; ++k) {
            double ak = t.dof[k] >= 0 ? a(t.dof[k]) : 0.0;
            gax += ak * t.gx[k];
            gay += ak * t.gy[k];
        }
        double b2 = gax * gax + gay * gay;
        double nu = law.eval(b2);
        double dnu = law.deriv(b2);
        for (int i = 0; i < 3; ++i) {
            if (t.dof[i] < 0) continue;
            double gi_dot_a = t.gx[i] * gax + t.gy[i] * gay;
            for (int j = 0; j < 3; ++j) {
                if (t.dof[j] < 0) continue;
                double gj_dot_a = t.gx[j] * gax + t.gy[j] * gay;
                double v = nu * t.area * (t.gx[i] * t.gx[j] + t.gy[i] * t.gy[j]) +
                           2.0 * dnu * t.area * gi_dot_a * gj_dot_a;
                trips.emplace_back(t.dof[i], t.dof[j], v);
            }
        }
    }
    Eigen::SparseMatrix<double> J(n_dofs_, n_dofs_);
    J.setFromTriplets(trips.begin(), trips.end());
    J.makeCompressed();
    return J;
}

double FeSystem::region_area(int region) const {
    double area = 0.0;
    for (const auto& t : tris_) {
        if (t.region == region) area += t.area;
    }
    return area;
}

Eigen::VectorXd FeSystem::assemble_coil_column(const CoilSpec& coil) const {
    double area = region_area(coil.region);
    if (area <= 0.0) {
        throw ModelError("coil region " + std::to_string(coil.region) + " is empty");
    }
    double chi = coil.turns / area; // winding density, sign from the turns
    Eigen::VectorXd col = Eigen::VectorXd::Zero(n_dofs_);
    for (const auto& t : tris_) {
        if (t.region != coil.region) continue;
        for (int k = 0; k < 3; ++k) {
            if (t.dof[k] >= 0) col(t.dof[k]) += chi * t.area / 3.0;
        }
    }
    return col;
}

FieldModel FieldModel::from_fe(std::shared_ptr<const FeSystem> fe,
                               const std::vector<CoilSpec>& coils) {
    FieldModel m;
    m.fe_ = std::move(fe);
    m.n_ = m.fe_->n_dofs();
    m.M_ = m.fe_->assemble_mass();
    m.linear_ = m.fe_->linear();
    if (m.linear_) m.K_const_ = m.fe_->assemble_stiffness(Eigen::VectorXd::Zero(m.n_));
    m.coils_ = coils;
    int coupled = 0;
    for (const auto& c : coils) coupled += c.coupled ? 1 : 0;
    if (coupled == 0) throw ModelError("field model needs at least one coupled coil");
    m.X_.resize(m.n_, coupled);
    int col = 0;
    for (const auto& c : coils) {
        if (c.coupled) m.X_.col(col++) = m.fe_->assemble_coil_column(c);
    }
    if (matrix_rank(m.X_) < m.X_.cols()) throw ModelError("X rank-deficient");
    return m;
}

FieldModel FieldModel::from_matrices(Eigen::SparseMatrix<double> M, Eigen::SparseMatrix<double> K,
                                     Eigen::MatrixXd X, bool checked) {
    FieldModel m;
    m.n_ = static_cast<int>(K.rows());
    if (K.cols() != m.n_ || M.rows() != m.n_ || M.cols() != m.n_ || X.rows() != m.n_) {
        throw ModelError("field model: dimension mismatch between M, K, X");
    }
    if (X.cols() == 0) throw ModelError("field model: X has no columns");
    if (checked) {
        double m_norm = Eigen::MatrixXd(M).norm();
        double asym = m_norm == 0.0
                          ? 0.0
                          : Eigen::MatrixXd(M - Eigen::SparseMatrix<double>(M.transpose()))
                                    .norm() / m_norm;
        if (asym > 1e-12) throw ModelError("field model: M asymmetric beyond 1e-12 relative");
        if (matrix_rank(X) < X.cols()) throw ModelError("X rank-deficient");
    }
    m.M_ = std::move(M);
    m.K_const_ = std::move(K);
    m.X_ = std::move(X);
    m.linear_ = true;
    for (int c = 0; c < m.X_.cols(); ++c) {
        CoilSpec coil;
        coil.name = "coil" + std::to_string(c);
        coil.coupled = true;
        m.coils_.push_back(coil);
    }
    return m;
}

Eigen::SparseMatrix<double> FieldModel::K(const Eigen::VectorXd& a) const {
    if (linear_) return K_const_;
    return fe_->assemble_stiffness(a);
}

Eigen::SparseMatrix<double> FieldModel::K_tangent(const Eigen::VectorXd& a) const {
    if (linear_) return K_const_;
    return fe_->assemble_tangent(a);
}

FieldModel FieldModel::with_coil_selection(const std::vector<int>& coil_columns) const {
    FieldModel m = *this;
    m.X_.resize(n_, static_cast<Eigen::Index>(coil_columns.size()));
    std::vector<bool> used(static_cast<size_t>(X_.cols()), false);
    for (size_t i = 0; i < coil_columns.size(); ++i) {
        int c = coil_columns[i];
        if (c < 0 || c >= X_.cols()) {
            throw ModelError("coil index " + std::to_string(c) + " out of range (model has " +
                             std::to_string(X_.cols()) + " coupled coils)");
        }
        if (used[static_cast<size_t>(c)]) {
            throw ModelError("coil " + std::to_string(c) + " selected by more than one port");
        }
        used[static_cast<size_t>(c)] = true;
        m.X_.col(static_cast<Eigen::Index>(i)) = X_.col(c);
    }
    return m;
}

Eigen::MatrixXd FieldModel::equivalent_inductance() const {
    Eigen::SparseMatrix<double> K0 = K(Eigen::VectorXd::Zero(n_));
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(K0);
    if (chol.info() != Eigen::Success) {
        throw ModelError("equivalent inductance: K(0) is not factorizable");
    }
    return X_.transpose() * chol.solve(X_);
}

FieldModel assemble_fe(const Mesh2D& mesh, const MaterialTable& materials,
                       const std::vector<CoilSpec>& coils) {
    auto fe = std::make_shared<FeSystem>(mesh, materials);
    return FieldModel::from_fe(std::move(fe), coils);
}

FieldModel load_matrix_model(const std::string& m_path, const std::string& k_path,
                             const std::string& x_path) {
    Eigen::SparseMatrix<double> M = read_matrix_market(m_path);
    Eigen::SparseMatrix<double> K = read_matrix_market(k_path);
    Eigen::MatrixXd X = Eigen::MatrixXd(read_matrix_market(x_path));
    return FieldModel::from_matrices(std::move(M), std::move(K), std::move(X));
}

FieldModel load_matrix_model(const std::string& prefix) {
    return load_matrix_model(prefix + "_M.mtx", prefix + "_K.mtx", prefix + "_X.mtx");
}

FieldModel load_matrix_model_unchecked(const std::string& prefix) {
    Eigen::SparseMatrix<double> M = read_matrix_market(prefix + "_M.mtx");
    Eigen::SparseMatrix<double> K = read_matrix_market(prefix + "_K.mtx");
    Eigen::MatrixXd X = Eigen::MatrixXd(read_matrix_market(prefix + "_X.mtx"));
    return FieldModel::from_matrices(std::move(M), std::move(K), std::move(X), false);
}

void save_matrix_model(const FieldModel& model, const std::string& prefix) {
    if (!model.linear()) {
        throw ModelError("save_matrix_model: only linear models can be exported");
    }
    write_matrix_market(prefix + "_M.mtx", model.M());
    write_matrix_market(prefix + "_K.mtx", model.K(Eigen::VectorXd::Zero(model.n_dofs())));
    write_matrix_market(prefix + "_X.mtx", model.X());
}

FieldModel transformer_lite(const TransformerLiteOptions& opts) {
    // All rectangles sit on the 1/16 lattice so every mesh with
    // (nx-1) % 16 == 0 resolves the material boundaries exactly.
    auto inside = [](double x, double y, double x0, double x1, double y0, double y1) {
        return x > x0 && x < x1 && y > y0 && y < y1;
    };
    auto region_of = [&](double x, double y) -> int {
        if (inside(x, y, 7.0 / 16, 8.0 / 16, 7.0 / 16, 9.0 / 16)) return kRegionPrimary;
        if (inside(x, y, 8.0 / 16, 9.0 / 16, 7.0 / 16, 9.0 / 16)) return kRegionSecondary;
        bool in_outer = inside(x, y, 0.25, 0.75, 0.25, 0.75);
        bool in_window = inside(x, y, 6.0 / 16, 10.0 / 16, 6.0 / 16, 10.0 / 16);
        if (in_outer && !in_window) return kRegionCore;
        return kRegionAir;
    };
    Mesh2D mesh = structured_unit_square(opts.nx, region_of);

    MaterialTable mats;
    mats.by_region.resize(4);
    mats.by_region[kRegionAir] = {0.0, ReluctivityLaw::constant(kNuVacuum)};
    ReluctivityLaw core_law =
        opts.brauer
            ? ReluctivityLaw::brauer(kNuVacuum / 1250.0, 2.0, kNuVacuum / 5000.0)
            : ReluctivityLaw::constant(opts.nu_core);
    mats.by_region[kRegionCore] = {opts.sigma_core, core_law};
    mats.by_region[kRegionPrimary] = {0.0, ReluctivityLaw::constant(kNuVacuum)};
    mats.by_region[kRegionSecondary] = {0.0, ReluctivityLaw::constant(kNuVacuum)};

    std::vector<CoilSpec> coils;
    coils.push_back({kRegionPrimary, opts.turns, true, "primary"});
    coils.push_back({kRegionSecondary, opts.turns, false, "secondary"});
    return assemble_fe(mesh, mats, coils);
}

AssumptionReport validate_assumptions(const FieldModel& model, const ValidationOptions& opts) {
    AssumptionReport rep;
    const int n = model.n_dofs();

    Eigen::SparseMatrix<double> Mt = model.M().transpose();
    double m_norm = Eigen::MatrixXd(model.M()).norm();
    rep.m_asymmetry_rel = m_norm == 0.0 ? 0.0 : Eigen::MatrixXd(model.M() - Mt).norm() / m_norm;
    rep.m_symmetric = rep.m_asymmetry_rel <= 1e-12;

    rep.x_rank = matrix_rank(model.X());
    rep.x_full_rank = rep.x_rank == model.X().cols();

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scales[] = {1e-3, 1e-2, 1e-1};
    auto random_state = [&](int k) {
        Eigen::VectorXd a(n);
        for (int i = 0; i < n; ++i) a(i) = normal(rng);
        return (scales[k % 3] * a).eval();
    };

    rep.pencil_failures = 0;
    for (int s = 0; s < opts.pencil_samples; ++s) {
        Eigen::VectorXd a = random_state(s);
        Eigen::SparseMatrix<double> pencil = model.M() + model.K(a);
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(pencil);
        if (chol.info() != Eigen::Success) ++rep.pencil_failures;
    }
    rep.pencil_spd = rep.pencil_failures == 0;

    rep.monotonicity_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opts.monotonicity_pairs; ++s) {
        Eigen::VectorXd a1 = random_state(2 * s);
        Eigen::VectorXd a2 = random_state(2 * s + 1);
        Eigen::VectorXd da = a2 - a1;
        double d2 = da.squaredNorm();
        if (d2 == 0.0) continue;
        double val = da.dot(model.K(a2) * a2 - model.K(a1) * a1) / d2;
        rep.monotonicity_min = std::min(rep.monotonicity_min, val);
    }
    rep.monotone = rep.monotonicity_min >= 1e-12;
    return rep;
}

std::string AssumptionReport::to_text() const {
    std::ostringstream out;
    out << "(a) M symmetric:            " << (m_symmetric ? "pass" : "FAIL")
        << "  (relative asymmetry " << m_asymmetry_rel << ")\n";
    out << "(b) M + K(a) positive def.: " << (pencil_spd ? "pass" : "FAIL") << "  ("
        << pencil_failures << " Cholesky failures)\n";
    out << "(c) X full column rank:     " << (x_full_rank ? "pass" : "FAIL") << "  (rank " << x_rank
        << ")\n";
    out << "(d) K(a)a strongly monotone:" << (monotone ? " pass" : " FAIL")
        << "  (min ratio " << monotonicity_min << ")\n";
    return out.str();
}

Eigen::VectorXd eval_field_residual(const FieldModel& model, const Eigen::VectorXd& a_new,
                                    const Eigen::VectorXd& a_old, double dt,
                                    const Eigen::VectorXd& i_m, const Eigen::VectorXd& v_c) {
    if (!(dt > 0.0)) throw std::invalid_argument("eval_field_residual: dt must be positive");
    Eigen::VectorXd da = (a_new - a_old) / dt;
    Eigen::VectorXd r(model.n_dofs() + model.X().cols());
    r.head(model.n_dofs()) = model.M() * da + model.K(a_new) * a_new - model.X() * i_m;
    r.tail(model.X().cols()) = model.X().transpose() * da - v_c;
    return r;
}

} // namespace fieldcirc
