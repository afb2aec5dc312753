#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "sat/fermiflow.hpp"

using namespace sat;
using model::ChannelParams;
using model::LatticeGeometry;

namespace {

ChannelParams fermion_channel(double Omega, double Delta = 0.0, double U_qb = 0.0) {
    ChannelParams ch;
    ch.species = model::Species::fermion;
    ch.n_max = 1;
    ch.Omega = Omega;
    ch.Delta = Delta;
    ch.U_qb = U_qb;
    return ch;
}

LatticeGeometry geometry(int Ml, int Mr, int N) {
    LatticeGeometry g;
    g.M_left = Ml;
    g.M_right = Mr;
    g.N = N;
    return g;
}

} // namespace

TEST_SUITE("fermiflow") {

TEST_CASE("single-particle matrix carries hopping, impurity and conversion") {
    auto ch = fermion_channel(1.5, 0.3, 0.7);
    auto sys = fermi::build_system(ch, geometry(2, 2, 1));
    REQUIRE(sys.dim() == 6); // 5 sites + molecule level
    CHECK(sys.h(0, 1) == doctest::Approx(-1.0));
    CHECK(sys.h(1, 2) == doctest::Approx(-1.0));
    CHECK(sys.h(2, 2) == doctest::Approx(0.7));
    CHECK(sys.h(2, 5) == doctest::Approx(1.5));
    CHECK(sys.h(5, 5) == doctest::Approx(-0.3));
    CHECK(sys.h(0, 5) == doctest::Approx(0.0).scale(1));
    CHECK((sys.h - sys.h.transpose()).norm() == doctest::Approx(0.0).scale(1));
}

TEST_CASE("fermi sea fills the box standing waves") {
    auto ch = fermion_channel(0.0);
    auto sys = fermi::build_system(ch, geometry(4, 3, 2));
    auto sea = fermi::prepare_fermi_sea(sys);
    REQUIRE(sea.orbitals.cols() == 2);
    // orthonormal and confined to the box
    Eigen::MatrixXcd g = sea.orbitals.adjoint() * sea.orbitals;
    CHECK((g - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
    for (int r = 4; r < sys.dim(); ++r)
        for (int c = 0; c < 2; ++c) CHECK(std::abs(sea.orbitals(r, c)) < 1e-14);
    double e = fermi::fermi_sea_energy(sys);
    double expect = -2 * std::cos(std::numbers::pi / 5) - 2 * std::cos(2 * std::numbers::pi / 5);
    CHECK(e == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("propagation is unitary and conserves particle number") {
    auto ch = fermion_channel(1.0, 0.2, 0.4);
    auto sys = fermi::build_system(ch, geometry(6, 6, 4));
    auto sea = fermi::prepare_fermi_sea(sys);
    auto series = fermi::evolve(sea, sys, 0.05, 40);
    REQUIRE(int(series.samples.size()) == 41);
    CHECK(series.samples.front().t == doctest::Approx(0.0).scale(1));
    CHECK(series.samples.back().t == doctest::Approx(2.0));
    Eigen::MatrixXcd g = sea.orbitals.adjoint() * sea.orbitals;
    CHECK((g - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);
    for (const auto& s : series.samples) {
        CHECK(s.n_left + s.n_imp + s.n_right + s.n_mol == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(s.n_mol >= -1e-12);
    }
    CHECK(series.samples.front().n_right == doctest::Approx(0.0).scale(1));
}

TEST_CASE("open transport reaches the ballistic steady current") {
    auto ch = fermion_channel(0.0);
    auto sys = fermi::build_system(ch, geometry(30, 30, 30));
    auto sea = fermi::prepare_fermi_sea(sys);
    auto series = fermi::evolve(sea, sys, 0.05, 200);
    auto fit = fermi::steady_current(series, 3.0, 10.0);
    CHECK(fit.slope == doctest::Approx(2.0 / std::numbers::pi).epsilon(0.06));
    CHECK(fit.n_samples > 100);
    CHECK(fit.stderr_slope < 0.05);
}

TEST_CASE("slope fitting recovers an exact line and rejects thin windows") {
    std::vector<double> t, y;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(0.1 * i);
        y.push_back(2.5 * (0.1 * i) - 0.7);
    }
    auto fit = fermi::fit_slope(t, y, 1.0, 4.0);
    CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.stderr_slope < 1e-10);
    CHECK_THROWS_AS((void)fermi::fit_slope(t, y, 1.0, 1.5), InsufficientWindowError);
}

TEST_CASE("current integral anchors to the free and half-filled values") {
    auto ch = fermion_channel(0.0);
    CHECK(fermi::analytic_current_integral(ch, 1.0) ==
          doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-10));
    CHECK(fermi::analytic_current_integral(ch, 0.5) ==
          doctest::Approx(2.0 * 0.5 / std::numbers::pi).epsilon(1e-9));
    double quarter = 2.0 * std::pow(std::sin(std::numbers::pi * 0.25 / 2), 2) / std::numbers::pi;
    CHECK(fermi::analytic_current_integral(ch, 0.25) == doctest::Approx(quarter).epsilon(1e-9));
}

TEST_CASE("closed-form current degrades smoothly to the undriven limit") {
    auto ch = fermion_channel(1e-9);
    auto cf = fermi::analytic_current_closed_form(ch, 0.6);
    double free_limit = 2.0 * std::pow(std::sin(0.3 * std::numbers::pi), 2) / std::numbers::pi;
    CHECK(cf.value == doctest::Approx(free_limit).epsilon(1e-6));
    CHECK(cf.consistent);
    // the verbatim transcription differs by a factor two in this limit
    CHECK(cf.ratio_printed_over_integral == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("closed form matches the quadrature across driving strengths") {
    auto ch = fermion_channel(0.0);
    for (double om : {0.5, 1.0, 2.0, 4.0}) {
        ch.Omega = om;
        for (double n : {0.25, 0.5, 0.85, 1.0}) {
            auto cf = fermi::analytic_current_closed_form(ch, n);
            CHECK(cf.consistent);
            CHECK(cf.ratio_value_over_integral == doctest::Approx(1.0).epsilon(1e-7));
        }
    }
    ch.Omega = 1.0;
    ch.Delta = 0.5;
    CHECK_THROWS_AS((void)fermi::analytic_current_closed_form(ch, 0.5), ConfigError);
}

} // TEST_SUITE
