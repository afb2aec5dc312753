#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sat/oracle.hpp"

using namespace sat;
using model::ChannelParams;

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

Eigen::VectorXcd trig_state(std::size_t dim) {
    Eigen::VectorXcd v(dim);
    for (std::size_t i = 0; i < dim; ++i)
        v[Eigen::Index(i)] = std::complex<double>(std::cos(0.3 * double(i) + 0.1),
                                                  std::sin(0.7 * double(i)));
    v.normalize();
    return v;
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("sector enumeration counts states and respects caps") {
    auto plain = oracle::build_sector(2, -1, 1, 1);
    CHECK(plain.dim() == 2);
    auto reg = oracle::build_sector(1, 0, 1, 1);
    CHECK(reg.dim() == 2); // |1, q> and |0, m>

    auto mid = oracle::build_sector(4, 1, 2, 2);
    std::vector<int> occ;
    bool mol = false;
    int with_mol = 0;
    for (auto key : mid.keys) {
        mid.unpack(key, occ, mol);
        int atoms = occ[0] + occ[1] + occ[2] + occ[3] + (mol ? 1 : 0);
        CHECK(atoms == 2);
        if (mol) ++with_mol;
    }
    CHECK(with_mol > 0);
    CHECK(std::size_t(with_mol) < mid.dim());

    CHECK_THROWS_AS((void)oracle::build_sector(22, -1, 1, 1), DimensionError);
    CHECK_THROWS_AS((void)oracle::build_sector(4, -1, 8, 2), DimensionError);
    CHECK_THROWS_AS((void)oracle::build_sector(3, -1, 1, 5), OverfillError);
}

TEST_CASE("two-site hopping matrix") {
    auto basis = oracle::build_sector(2, -1, 1, 1);
    auto h = oracle::exact_hamiltonian(basis, boson_channel());
    Eigen::MatrixXd dense(h);
    Eigen::MatrixXd expect(2, 2);
    expect << 0, -1, -1, 0;
    CHECK((dense - expect).norm() < 1e-15);
}

TEST_CASE("lone impurity reproduces the two-level mixing block") {
    auto basis = oracle::build_sector(1, 0, 1, 1);
    auto ch = boson_channel(1.3, 0.4, 0.9);
    Eigen::MatrixXd h(oracle::exact_hamiltonian(basis, ch));
    int iq = basis.find({1}, false);
    int im = basis.find({0}, true);
    REQUIRE(iq >= 0);
    REQUIRE(im >= 0);
    CHECK(h(iq, iq) == doctest::Approx(0.9));
    CHECK(h(im, im) == doctest::Approx(-0.4));
    CHECK(h(iq, im) == doctest::Approx(1.3));
}

TEST_CASE("soft-core amplitudes carry bosonic enhancement factors") {
    auto basis = oracle::build_sector(3, -1, 2, 2);
    auto ch = boson_channel(0, 0, 0, 0, 3.0, 2);
    Eigen::MatrixXd h(oracle::exact_hamiltonian(basis, ch));
    int i110 = basis.find({1, 1, 0}, false);
    int i200 = basis.find({2, 0, 0}, false);
    int i101 = basis.find({1, 0, 1}, false);
    REQUIRE(i110 >= 0);
    CHECK(h(i110, i200) == doctest::Approx(-std::numbers::sqrt2).epsilon(1e-14));
    CHECK(h(i110, i101) == doctest::Approx(-1.0));
    CHECK(h(i200, i200) == doctest::Approx(3.0)); // U_bb/2 * n(n-1)
    CHECK(h(i110, i110) == doctest::Approx(0.0).scale(1));
    CHECK((h - h.transpose()).norm() < 1e-13);
}

TEST_CASE("full hamiltonian is hermitian with the register in play") {
    auto basis = oracle::build_sector(4, 1, 2, 2);
    auto ch = boson_channel(0.8, 0.3, 0.6, 0.4, 2.0, 2);
    Eigen::MatrixXd h(oracle::exact_hamiltonian(basis, ch));
    CHECK((h - h.transpose()).norm() < 1e-13);
    // conversion: |.., 1q, ..> <-> |.., 0m, ..> with amplitude Omega sqrt(1)
    int a = basis.find({1, 1, 0, 0}, false);
    int b = basis.find({1, 0, 0, 0}, true);
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    CHECK(h(a, b) == doctest::Approx(0.8));
}

TEST_CASE("register flip completes a half rabi cycle") {
    auto basis = oracle::build_sector(1, 0, 1, 1);
    auto ch = boson_channel(1.0);
    oracle::ExactPropagator prop(basis, ch);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2);
    int iq = basis.find({1}, false);
    int im = basis.find({0}, true);
    psi[iq] = 1.0;
    prop.advance(psi, std::numbers::pi / 2);
    CHECK(std::abs(psi[iq]) < 1e-12);
    CHECK(std::abs(psi[im] - std::complex<double>(0, -1)) < 1e-12);
}

TEST_CASE("propagation conserves norm and energy in both engines") {
    auto basis = oracle::build_sector(6, 2, 2, 3);
    auto ch = boson_channel(0.9, 0.2, 0.5, 0.3, 1.5, 2);
    auto psi0 = trig_state(basis.dim());

    // dense path
    oracle::ExactPropagator dense(basis, ch);
    auto psi = psi0;
    double e0 = dense.energy(psi);
    for (int s = 0; s < 10; ++s) dense.advance(psi, 0.05);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    CHECK(dense.energy(psi) == doctest::Approx(e0).epsilon(1e-10));

    // krylov path on the same problem, forced by a small dense cap stand-in:
    // rerun with a krylov dimension large enough to be exact and compare
    oracle::ExactPropagator krylov(basis, ch, 30);
    auto chk = psi0;
    for (int s = 0; s < 10; ++s) krylov.advance(chk, 0.05);
    CHECK((chk - psi).norm() < 1e-9);
}

TEST_CASE("site densities and molecule weight read off the packed keys") {
    auto basis = oracle::build_sector(3, 1, 2, 2);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index(basis.dim()));
    int a = basis.find({2, 0, 0}, false);
    int b = basis.find({1, 0, 0}, true);
    psi[a] = std::sqrt(0.25);
    psi[b] = std::complex<double>(0, std::sqrt(0.75));
    CHECK(oracle::density(basis, psi, 0) == doctest::Approx(0.25 * 2 + 0.75 * 1));
    CHECK(oracle::density(basis, psi, 1) == doctest::Approx(0.0).scale(1));
    CHECK(oracle::molecule_population(basis, psi) == doctest::Approx(0.75));
    CHECK(oracle::n_right_of(basis, psi, 1) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("one-body density matrix reproduces hand superpositions") {
    auto basis = oracle::build_sector(3, -1, 1, 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
    psi[basis.find({1, 0, 0}, false)] = 1 / std::numbers::sqrt2;
    psi[basis.find({0, 1, 0}, false)] = 1 / std::numbers::sqrt2;
    auto rho = oracle::spdm(basis, psi);
    CHECK(rho(0, 0).real() == doctest::Approx(0.5));
    CHECK(rho(1, 1).real() == doctest::Approx(0.5));
    CHECK(rho(0, 1).real() == doctest::Approx(0.5));
    CHECK(rho(2, 2).real() == doctest::Approx(0.0).scale(1));
    CHECK((rho - rho.adjoint()).norm() < 1e-14);
    CHECK(std::abs(rho.trace() - std::complex<double>(1.0)) < 1e-13);
}

TEST_CASE("box ground state matches the exact spectrum and embeds cleanly") {
    auto ch = boson_channel(0, 0, 0, 0, 4.0, 2);
    auto box = oracle::ground_state_box(ch, 4, 2);
    Eigen::MatrixXd h(oracle::exact_hamiltonian(box.basis, ch));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    CHECK(box.energy == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-12));
    CHECK(std::abs(box.amp.norm() - 1.0) < 1e-12);

    model::LatticeGeometry geom;
    geom.M_left = 4;
    geom.M_right = 2;
    geom.N = 2;
    auto full = oracle::build_sector(geom, 2);
    auto emb = oracle::embed_box_in_sector(box, full);
    CHECK(std::abs(emb.norm() - 1.0) < 1e-12);
    oracle::ExactPropagator prop(full, ch);
    CHECK(prop.energy(emb) == doctest::Approx(box.energy).epsilon(1e-12));
    CHECK(oracle::n_right_of(full, emb, geom.impurity_index()) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("free wavepacket transmits completely") {
    auto res = oracle::wavepacket_transmission(std::numbers::pi / 2, boson_channel(0.0));
    CHECK(std::abs(res.transmitted - 1.0) < 1e-6);
    CHECK(res.norm_error < 1e-10);
    CHECK(res.lattice_sites >= 400);
}

TEST_CASE("wavepacket input validation") {
    auto ch = boson_channel(1.0);
    CHECK_THROWS_AS((void)oracle::wavepacket_transmission(1.0, ch, 0, 20.0), ConfigError);
    CHECK_THROWS_AS((void)oracle::wavepacket_transmission(1.0, ch, 300, 40.0), ConfigError);
    CHECK_THROWS_AS((void)oracle::wavepacket_transmission(0.1, ch), ConfigError);
    CHECK_THROWS_AS((void)oracle::wavepacket_transmission(3.1, ch), ConfigError);
}

} // TEST_SUITE
