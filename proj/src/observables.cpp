#include "sat/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "sat/errors.hpp"

namespace sat::obs {

Eigen::MatrixXcd spdm_lattice(const mps::MpsState& psi, kernels::Exec exec) {
    return kernels::spdm(psi, exec);
}

Eigen::MatrixXcd spdm_lattice(const fermi::FermiSeaState& state,
                              const fermi::SingleParticleSystem& sys) {
    const int L = sys.geometry.total_sites();
    if (state.orbitals.rows() != sys.dim())
        throw DimensionError("spdm_lattice: orbital dimension mismatch");
    const Eigen::MatrixXcd lattice = state.orbitals.topRows(L);
    return lattice.conjugate() * lattice.transpose();
}

Eigen::VectorXd site_densities(const Eigen::MatrixXcd& rho) {
    return rho.diagonal().real();
}

double n_right(const mps::MpsState& psi, const model::LatticeGeometry& geom) {
    double total = 0.0;
    for (int j = geom.impurity_index() + 1; j < psi.size(); ++j)
        total += mps::expect_site(psi, j, psi.bases[std::size_t(j)].number_op()).real();
    return total;
}

MomentumDistribution momentum_distribution(const Eigen::MatrixXcd& rho) {
    const int L = int(rho.rows());
    if (rho.cols() != L || L < 1) throw DimensionError("momentum_distribution: square matrix required");
    MomentumDistribution out;
    out.k.resize(L);
    out.nk.resize(L);
    for (int q = 0; q < L; ++q) {
        const int qq = q - L / 2; // -floor(L/2) .. ceil(L/2)-1, ascending
        const double k = 2.0 * std::numbers::pi * double(qq) / double(L);
        std::complex<double> acc = 0.0;
        for (int j = 0; j < L; ++j)
            for (int l = 0; l < L; ++l)
                acc += std::polar(1.0, k * double(j - l)) * rho(j, l);
        out.k[q] = k;
        out.nk[q] = acc.real() / double(L);
    }
    return out;
}

CondensateModes condensate_modes(const Eigen::MatrixXcd& rho, int n_modes) {
    const int L = int(rho.rows());
    if (rho.cols() != L || L < 1) throw DimensionError("condensate_modes: square matrix required");
    if (n_modes < 1 || n_modes > L) throw ConfigError("condensate_modes: mode count out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
    if (eig.info() != Eigen::Success) throw ConvergenceError("condensate_modes: eigensolver failed");

    CondensateModes out;
    out.lambdas.resize(n_modes);
    out.modes.resize(L, n_modes);
    for (int m = 0; m < n_modes; ++m) {
        const int src = L - 1 - m; // solver sorts ascending
        out.lambdas[m] = eig.eigenvalues()[src];
        Eigen::VectorXcd v = eig.eigenvectors().col(src);
        int imax = 0;
        double best = 0.0;
        for (int j = 0; j < L; ++j)
            if (std::abs(v[j]) > best + 1e-12) {
                best = std::abs(v[j]);
                imax = j;
            }
        if (best > 0.0) v *= std::conj(v[imax]) / best;
        out.modes.col(m) = v;
    }
    if (n_modes >= 2)
        out.degenerate = (out.lambdas[0] - out.lambdas[1]) < 1e-10 * std::abs(out.lambdas[0]);
    return out;
}

namespace {

const tebd::ObsSample& sample_at(const tebd::QuenchTrajectory& traj, double t) {
    for (const auto& s : traj.samples)
        if (std::abs(s.t - t) <= 1e-9) return s;
    throw AlignmentError("readout: sample grid does not contain t = " + std::to_string(t));
}

const tebd::SpdmSnapshot& snapshot_at(const tebd::QuenchTrajectory& traj, double t) {
    for (const auto& s : traj.snapshots)
        if (std::abs(s.t - t) <= 1e-9) return s;
    throw AlignmentError("readout: no density-matrix snapshot at t = " + std::to_string(t));
}

double trailing_sigma(const tebd::QuenchTrajectory& traj, double t, double window) {
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (const auto& s : traj.samples) {
        if (s.t < t - window - 1e-9 || s.t > t + 1e-9) continue;
        sum += s.n_right;
        sum2 += s.n_right * s.n_right;
        ++n;
    }
    if (n < 2) return 0.0;
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, sum2 / n - mean * mean));
}

ChannelReadout channel_readout(const tebd::QuenchTrajectory& traj, double t) {
    const auto& s = sample_at(traj, t);
    const auto& snap = snapshot_at(traj, t);
    ChannelReadout out;
    out.n_right = s.n_right;
    const double n_total = std::max(1e-12, snap.rho.real().diagonal().sum());
    out.cond_frac = condensate_modes(snap.rho, 1).lambdas[0] / n_total;
    const auto mk = momentum_distribution(snap.rho);
    const double peak = mk.nk.maxCoeff();
    const double mean = mk.nk.mean();
    out.peak_contrast = (peak - mean) / std::max(1e-12, peak + mean);
    return out;
}

} // namespace

ReadoutReport readout_visibility(const tebd::QuenchTrajectory& up,
                                 const tebd::QuenchTrajectory& down, double t_report) {
    if (!up.snapshots.empty() && !down.snapshots.empty() &&
        up.snapshots.front().rho.rows() != down.snapshots.front().rho.rows())
        throw AlignmentError("readout: channels ran on different lattices");
    ReadoutReport rep;
    rep.up = channel_readout(up, t_report);
    rep.down = channel_readout(down, t_report);
    rep.n_right_separation = std::abs(rep.up.n_right - rep.down.n_right);
    const double denom = rep.up.cond_frac + rep.down.cond_frac;
    rep.cond_frac_contrast =
        denom > 1e-12 ? (rep.up.cond_frac - rep.down.cond_frac) / denom : 0.0;
    const double su = trailing_sigma(up, t_report, 1.0);
    const double sd = trailing_sigma(down, t_report, 1.0);
    rep.pooled_sigma = std::max(1e-6, std::sqrt(0.5 * (su * su + sd * sd)));
    rep.score = rep.n_right_separation / rep.pooled_sigma;
    return rep;
}

} // namespace sat::obs
