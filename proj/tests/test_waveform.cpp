#include <doctest.h>

#include "fieldcirc/waveform.hpp"

using namespace fieldcirc;

namespace {

Waveform ramp(double t0, double t1, int n, double slope) {
    Eigen::VectorXd t(n);
    Eigen::MatrixXd v(n, 1);
    for (int i = 0; i < n; ++i) {
        t(i) = t0 + (t1 - t0) * i / (n - 1);
        v(i, 0) = slope * t(i);
    }
    return Waveform(t, v);
}

} // namespace

TEST_CASE("waveform: grid validation") {
    Eigen::VectorXd t(2);
    t << 0.0, 0.0;
    CHECK_THROWS(Waveform(t, Eigen::MatrixXd::Zero(2, 1)));
    CHECK_THROWS(Waveform(Eigen::VectorXd(), Eigen::MatrixXd()));
    Eigen::VectorXd ok(2);
    ok << 0.0, 1.0;
    CHECK_THROWS(Waveform(ok, Eigen::MatrixXd::Zero(3, 1)));
}

TEST_CASE("waveform: linear interpolation and clamping") {
    Waveform w = ramp(0.0, 1.0, 11, 2.0);
    CHECK(w.eval(0.55)(0) == doctest::Approx(1.1).epsilon(1e-14));
    // clamp at the boundary +- epsilon
    const double eps = 1e-9;
    CHECK(w.eval(1.0 + eps)(0) == doctest::Approx(2.0));
    CHECK(w.eval(1.0 + 100.0)(0) == 2.0);
    CHECK(w.eval(0.0 - eps)(0) == 0.0);
    CHECK(w.eval(0.0 - 100.0)(0) == 0.0);
}

TEST_CASE("waveform: sup_diff") {
    Waveform w = ramp(0.0, 1.0, 5, 1.0);
    SUBCASE("identical waveforms") { CHECK(sup_diff(w, w) == 0.0); }
    SUBCASE("constant one vs constant zero on different grids") {
        Waveform one = Waveform::constant(0.0, 1.0, Eigen::VectorXd::Ones(1));
        Waveform zero = Waveform::constant(0.2, 0.7, Eigen::VectorXd::Zero(1));
        CHECK(sup_diff(one, zero) == doctest::Approx(1.0));
    }
    SUBCASE("ramp on coarse vs fine grid is interpolated exactly") {
        Waveform fine = ramp(0.0, 1.0, 101, 1.0);
        CHECK(sup_diff(w, fine) <= 1e-15);
    }
    SUBCASE("dimension mismatch throws") {
        Waveform two = Waveform::constant(0.0, 1.0, Eigen::VectorXd::Zero(2));
        CHECK_THROWS(sup_diff(w, two));
    }
}

TEST_CASE("waveform: make_grid hits the endpoints") {
    Eigen::VectorXd g = make_grid(0.0, 0.8, 1e-2);
    CHECK(g.size() == 81);
    CHECK(g(0) == 0.0);
    CHECK(g(80) == 0.8);
    CHECK_THROWS(make_grid(0.0, 1.0, 0.0));
    CHECK_THROWS(make_grid(1.0, 0.0, 0.1));
}

TEST_CASE("waveform: append joins windows") {
    Waveform a = ramp(0.0, 0.5, 6, 1.0);
    Waveform b = ramp(0.5, 1.0, 6, 1.0);
    a.append(b);
    CHECK(a.size() == 11);
    CHECK(a.t_end() == 1.0);
    CHECK(a.eval(0.73)(0) == doctest::Approx(0.73));
    Waveform misfit = ramp(0.7, 1.0, 4, 1.0);
    CHECK_THROWS(a.append(misfit));
}
