#include "sat/gates.hpp"

#include <complex>
#include <map>

#include "sat/errors.hpp"

namespace sat::mps {

Eigen::MatrixXd bond_hamiltonian(const std::vector<SiteBasis>& bases,
                                 const model::ChannelParams& ch, int bond) {
    const int L = int(bases.size());
    if (bond < 0 || bond + 1 >= L) throw DimensionError("bond_hamiltonian: bond out of range");
    const SiteBasis& bi = bases[std::size_t(bond)];
    const SiteBasis& bj = bases[std::size_t(bond + 1)];
    const int di = bi.dim();
    const int dj = bj.dim();
    const Eigen::MatrixXd ai = bi.annihilator();
    const Eigen::MatrixXd aj = bj.annihilator();
    const Eigen::MatrixXd hi = bi.onsite(ch);
    const Eigen::MatrixXd hj = bj.onsite(ch);
    const double wL = (bond == 0) ? 1.0 : 0.5;
    const double wR = (bond + 1 == L - 1) ? 1.0 : 0.5;

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(di * dj, di * dj);
    for (int s = 0; s < di; ++s)
        for (int sp = 0; sp < di; ++sp)
            for (int t = 0; t < dj; ++t)
                for (int tp = 0; tp < dj; ++tp) {
                    double v = -ch.J * (ai(sp, s) * aj(t, tp) + ai(s, sp) * aj(tp, t));
                    if (t == tp) v += wL * hi(s, sp);
                    if (s == sp) v += wR * hj(t, tp);
                    if (v != 0.0) h(s * dj + t, sp * dj + tp) += v;
                }
    return h;
}

Eigen::MatrixXcd charge_blocked_exponential(const Eigen::MatrixXd& h, const SiteBasis& left,
                                            const SiteBasis& right,
                                            std::complex<double> prefactor) {
    const int di = left.dim();
    const int dj = right.dim();
    if (h.rows() != di * dj || h.cols() != di * dj)
        throw DimensionError("charge_blocked_exponential: generator dimension");

    std::map<int, std::vector<int>> groups;
    for (int s = 0; s < di; ++s)
        for (int t = 0; t < dj; ++t)
            groups[left.atoms(s) + right.atoms(t)].push_back(s * dj + t);

    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(di * dj, di * dj);
    for (const auto& [q, idx] : groups) {
        const int n = int(idx.size());
        Eigen::MatrixXd hb(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) hb(r, c) = h(idx[std::size_t(r)], idx[std::size_t(c)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hb);
        Eigen::VectorXcd ph(n);
        for (int r = 0; r < n; ++r) ph[r] = std::exp(prefactor * eig.eigenvalues()[r]);
        const Eigen::MatrixXcd gb =
            eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().transpose();
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) g(idx[std::size_t(r)], idx[std::size_t(c)]) = gb(r, c);
    }
    return g;
}

namespace {

void build_one(BondGates& gates, const std::vector<SiteBasis>& bases,
               const model::ChannelParams& ch, int bond) {
    const SiteBasis& bi = bases[std::size_t(bond)];
    const SiteBasis& bj = bases[std::size_t(bond + 1)];
    const Eigen::MatrixXd h = bond_hamiltonian(bases, ch, bond);
    const std::complex<double> pref =
        gates.imaginary ? std::complex<double>(-gates.dt, 0.0) : std::complex<double>(0.0, -gates.dt);
    gates.h[std::size_t(bond)] = h;
    gates.full[std::size_t(bond)] = charge_blocked_exponential(h, bi, bj, pref);
    gates.half[std::size_t(bond)] = charge_blocked_exponential(h, bi, bj, 0.5 * pref);
}

} // namespace

BondGates build_gates(const std::vector<SiteBasis>& bases, const model::ChannelParams& ch,
                      double dt, bool imaginary) {
    if (bases.size() < 2) throw ConfigError("build_gates: need at least two sites");
    if (!(dt > 0.0)) throw ConfigError("build_gates: dt must be positive");
    BondGates gates;
    gates.dt = dt;
    gates.imaginary = imaginary;
    const std::size_t nb = bases.size() - 1;
    gates.h.resize(nb);
    gates.full.resize(nb);
    gates.half.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) build_one(gates, bases, ch, int(b));
    return gates;
}

void set_conversion_amplitude(BondGates& gates, const std::vector<SiteBasis>& bases,
                              const model::ChannelParams& ch, double omega_now) {
    int imp = -1;
    for (std::size_t j = 0; j < bases.size(); ++j)
        if (bases[j].is_impurity()) imp = int(j);
    if (imp < 0) throw ConfigError("set_conversion_amplitude: chain has no impurity site");
    model::ChannelParams now = ch;
    now.Omega = omega_now;
    if (imp - 1 >= 0) build_one(gates, bases, now, imp - 1);
    if (imp + 1 < int(bases.size())) build_one(gates, bases, now, imp);
}

} // namespace sat::mps
