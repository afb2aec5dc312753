#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "sat/gates.hpp"
#include "sat/observables.hpp"
#include "sat/oracle.hpp"
#include "sat/tebd.hpp"

using namespace sat;
using model::ChannelParams;
using model::LatticeGeometry;

namespace {

ChannelParams boson_channel(double Omega = 0.0, double Delta = 0.0, double U_qb = 0.0,
                            double U_bm = 0.0, double U_bb = 0.0, int n_max = 1) {
    ChannelParams ch;
    ch.Omega = Omega;
    ch.Delta = Delta;
    ch.U_qb = U_qb;
    ch.U_bm = U_bm;
    ch.U_bb = U_bb;
    ch.n_max = n_max;
    return ch;
}

LatticeGeometry geometry(int Ml, int Mr, int N) {
    LatticeGeometry g;
    g.M_left = Ml;
    g.M_right = Mr;
    g.N = N;
    return g;
}

// oracle state lifted onto the chain as an MPS, for engine-identical seeds
mps::MpsState lift(const oracle::SectorBasis& basis, const Eigen::VectorXcd& psi,
                   const std::vector<mps::SiteBasis>& bases) {
    return mps::from_dense(bases, oracle::sector_to_product(basis, psi, bases));
}

} // namespace

TEST_SUITE("tebd") {

TEST_CASE("trotter gates are unitary and block-diagonal in the atom number") {
    auto geom = geometry(2, 2, 2);
    auto ch = boson_channel(1.1, 0.3, 0.6, 0.4, 2.0, 2);
    auto bases = mps::chain_bases(geom, 2);
    auto gates = mps::build_gates(bases, ch, 0.05, false);
    REQUIRE(int(gates.full.size()) == 4);
    for (int b = 0; b < 4; ++b) {
        const auto& g = gates.full[std::size_t(b)];
        Eigen::MatrixXcd gram = g.adjoint() * g;
        CHECK((gram - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).norm() < 1e-12);
        const auto& L = bases[std::size_t(b)];
        const auto& R = bases[std::size_t(b) + 1];
        for (int s = 0; s < L.dim(); ++s)
            for (int t = 0; t < R.dim(); ++t)
                for (int u = 0; u < L.dim(); ++u)
                    for (int v = 0; v < R.dim(); ++v)
                        if (L.atoms(s) + R.atoms(t) != L.atoms(u) + R.atoms(v))
                            CHECK(std::abs(g(s * R.dim() + t, u * R.dim() + v)) == 0.0);
    }
}

TEST_CASE("bond generators sum to the exact sector hamiltonian") {
    auto geom = geometry(2, 2, 2);
    auto ch = boson_channel(0.9, 0.2, 0.5, 0.3, 1.5, 2);
    auto bases = mps::chain_bases(geom, 2);
    auto basis = oracle::build_sector(geom, 2);
    Eigen::VectorXcd vec(basis.dim());
    for (Eigen::Index i = 0; i < vec.size(); ++i)
        vec[i] = std::complex<double>(std::sin(0.4 * double(i) + 0.2), std::cos(0.9 * double(i)));
    vec.normalize();
    oracle::ExactPropagator prop(basis, ch);
    double direct = prop.energy(vec);
    auto psi = lift(basis, vec, bases);
    std::complex<double> summed = 0.0;
    for (int b = 0; b + 1 < int(bases.size()); ++b)
        summed += mps::expect_bond(psi, b, mps::bond_hamiltonian(bases, ch, b));
    CHECK(summed.imag() == doctest::Approx(0.0).scale(1).epsilon(1e-10));
    CHECK(summed.real() == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("conversion amplitude updates rebuild only the impurity bonds") {
    auto geom = geometry(2, 1, 2);
    auto ch = boson_channel(2.0, 0.3, 0.5, 0.2, 1.0, 2);
    auto bases = mps::chain_bases(geom, 2);
    auto gates = mps::build_gates(bases, ch, 0.03, false);
    mps::set_conversion_amplitude(gates, bases, ch, 0.7);
    auto chref = ch;
    chref.Omega = 0.7;
    auto ref = mps::build_gates(bases, chref, 0.03, false);
    for (std::size_t b = 0; b < gates.full.size(); ++b) {
        CHECK((gates.full[b] - ref.full[b]).norm() < 1e-14);
        CHECK((gates.half[b] - ref.half[b]).norm() < 1e-14);
    }
}

TEST_CASE("uniform full box is the hard-core ground state without sweeps") {
    auto ch = boson_channel(1.0, 0.0, 0.5, 0.0, 0.0, 1);
    auto geom = geometry(3, 3, 3);
    auto res = tebd::ground_state(ch, geom);
    CHECK(res.sweeps == 0);
    CHECK(res.energy == doctest::Approx(0.0).scale(1));
    CHECK(res.state.max_chi() == 1);
    auto bases = res.state.bases;
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(mps::expect_site(res.state, j, bases[std::size_t(j)].number_op()) - 1.0) <
              1e-12);
    CHECK(obs::n_right(res.state, geom) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("imaginary-time sweeps reach the exact interacting box ground state") {
    auto ch = boson_channel(0.8, 0.1, 0.4, 0.2, 4.0, 2);
    auto geom = geometry(4, 2, 2);
    auto res = tebd::ground_state(ch, geom);
    auto box = oracle::ground_state_box(ch, 4, 2);
    CHECK(res.energy == doctest::Approx(box.energy).epsilon(1e-4));
    auto full = oracle::build_sector(geom, 2);
    auto exact = lift(full, oracle::embed_box_in_sector(box, full), res.state.bases);
    CHECK(std::abs(mps::overlap(res.state, exact)) > 1.0 - 1e-3);
}

TEST_CASE("ground-state search reports non-convergence honestly") {
    auto ch = boson_channel(0.0, 0.0, 0.0, 0.0, 1.0, 2);
    auto geom = geometry(6, 1, 3);
    tebd::GroundStateOptions opts;
    opts.stages = {0.05};
    opts.check_every = 1;
    opts.max_sweeps_per_stage = 2;
    CHECK_THROWS_AS((void)tebd::ground_state(ch, geom, opts), ConvergenceError);
}

TEST_CASE("real-time quench conserves norm, atom number and energy") {
    auto ch = boson_channel(0.9, 0.2, 0.5, 0.3, 2.0, 2);
    auto geom = geometry(2, 2, 2);
    auto res = tebd::ground_state(ch, geom);
    auto psi = res.state;
    tebd::EvolveOptions opts;
    opts.dt = 0.01;
    opts.t_final = 1.0;
    opts.obs_interval = 0.1;
    opts.record_energy = true;
    opts.record_fidelity = true;
    auto traj = tebd::evolve(psi, ch, geom, opts);
    REQUIRE(traj.status == tebd::RunStatus::ok);
    REQUIRE(int(traj.samples.size()) == 11);
    for (const auto& s : traj.samples) {
        CHECK(s.n_total == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(s.fidelity <= 1.0 + 1e-9);
    }
    CHECK(traj.samples.front().fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(traj.samples.back().energy - traj.samples.front().energy) < 5e-4);
    CHECK(mps::norm_value(psi) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mps::canonical_defect(psi) < 1e-8);
}

TEST_CASE("quench dynamics track the exact propagator") {
    auto ch = boson_channel(1.0, 0.2, 0.5, 0.3, 4.0, 2);
    auto geom = geometry(2, 2, 2);
    auto basis = oracle::build_sector(geom, 2);
    auto box = oracle::ground_state_box(ch, 2, 2);
    auto psi0 = oracle::embed_box_in_sector(box, basis);

    oracle::ExactPropagator prop(basis, ch);
    auto ref = psi0;
    prop.advance(ref, 0.5);

    auto bases = mps::chain_bases(geom, 2);
    auto psi = lift(basis, psi0, bases);
    tebd::EvolveOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 0.5;
    opts.trunc.chi_max = 64;
    opts.trunc.discard_tol = 1e-16;
    opts.obs_interval = 0.5;
    auto traj = tebd::evolve(psi, ch, geom, opts);
    REQUIRE(traj.status == tebd::RunStatus::ok);
    double nr = obs::n_right(psi, geom);
    CHECK(nr == doctest::Approx(oracle::n_right_of(basis, ref, geom.impurity_index()))
                    .epsilon(1e-5));
    double nm = mps::expect_site(psi, geom.impurity_index(),
                                 bases[std::size_t(geom.impurity_index())].molecule_op())
                    .real();
    CHECK(nm == doctest::Approx(oracle::molecule_population(basis, ref)).scale(1).epsilon(1e-5));
}

TEST_CASE("halving the step quarters the splitting error") {
    auto ch = boson_channel(1.0, 0.0, 0.0, 0.0, 0.0, 1);
    auto geom = geometry(1, 1, 1);
    auto basis = oracle::build_sector(geom, 1);
    auto bases = mps::chain_bases(geom, 1);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(Eigen::Index(basis.dim()));
    psi0[basis.find({1, 0, 0}, false)] = 1.0;
    oracle::ExactPropagator prop(basis, ch);
    auto ref = psi0;
    prop.advance(ref, 1.0);
    auto ref_dense = oracle::sector_to_product(basis, ref, bases);

    auto run = [&](double dt) {
        auto psi = lift(basis, psi0, bases);
        tebd::EvolveOptions opts;
        opts.dt = dt;
        opts.t_final = 1.0;
        opts.trunc.chi_max = 16;
        opts.trunc.discard_tol = 1e-16;
        opts.obs_interval = 1.0;
        (void)tebd::evolve(psi, ch, geom, opts);
        return (mps::to_dense(psi) - ref_dense).norm();
    };
    double coarse = run(0.04);
    double fine = run(0.02);
    CHECK(coarse / fine > 3.0);
    CHECK(coarse / fine < 5.2);
}

TEST_CASE("ramped conversion drive keeps the atom number conserved") {
    auto ch = boson_channel(1.5, 0.0, 0.5, 0.0, 0.0, 1);
    auto geom = geometry(2, 2, 2);
    auto res = tebd::ground_state(ch, geom);
    auto psi = res.state;
    tebd::EvolveOptions opts;
    opts.dt = 0.01;
    opts.t_final = 1.0;
    opts.ramp.enabled = true;
    opts.ramp.omega_from = 0.0;
    opts.ramp.t_ramp = 0.5;
    auto traj = tebd::evolve(psi, ch, geom, opts);
    CHECK(traj.status == tebd::RunStatus::ok);
    for (const auto& s : traj.samples) CHECK(s.n_total == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("exhausted truncation budget stops the run with a warning status") {
    auto ch = boson_channel(0.0, 0.0, 0.0, 0.0, 0.0, 1);
    auto geom = geometry(4, 4, 4);
    auto res = tebd::ground_state(ch, geom);
    auto psi = res.state;
    tebd::EvolveOptions opts;
    opts.dt = 0.02;
    opts.t_final = 4.0;
    opts.trunc.chi_max = 2;
    opts.trunc.discard_tol = 1e-12;
    opts.trunc_budget = 1e-8;
    auto traj = tebd::evolve(psi, ch, geom, opts);
    CHECK(traj.status == tebd::RunStatus::truncation_budget_exceeded);
    CHECK(traj.truncation_total > 1e-8);
    CHECK(traj.samples.back().t < 4.0 - 1e-9);
}

TEST_CASE("density-matrix snapshots arrive on schedule with a clean trace") {
    auto ch = boson_channel(1.0, 0.0, 0.5, 0.0, 0.0, 1);
    auto geom = geometry(2, 2, 2);
    auto res = tebd::ground_state(ch, geom);
    auto psi = res.state;
    tebd::EvolveOptions opts;
    opts.dt = 0.01;
    opts.t_final = 1.0;
    opts.spdm_interval = 0.5;
    auto traj = tebd::evolve(psi, ch, geom, opts);
    REQUIRE(int(traj.snapshots.size()) == 3);
    CHECK(traj.snapshots[1].t == doctest::Approx(0.5));
    const auto& last = traj.snapshots.back();
    REQUIRE(last.rho.rows() == geom.total_sites());
    CHECK((last.rho - last.rho.adjoint()).norm() < 1e-10);
    const auto& s = traj.samples.back();
    CHECK(last.rho.trace().real() == doctest::Approx(s.n_total - s.n_mol).epsilon(1e-6));
}

} // TEST_SUITE
