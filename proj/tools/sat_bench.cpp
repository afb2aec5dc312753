// Times the parallel kernels against their serial reference implementations
// and verifies that both produce bit-identical results. --quick shrinks the
// sizes so the equality gate can run inside the test suite.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include <Eigen/Dense>

#include "sat/gates.hpp"
#include "sat/kernels.hpp"
#include "sat/model.hpp"
#include "sat/mps_state.hpp"
#include "sat/tebd.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool states_identical(const sat::mps::MpsState& a, const sat::mps::MpsState& b) {
    if (a.size() != b.size() || a.lambda.size() != b.lambda.size()) return false;
    for (std::size_t bd = 0; bd < a.lambda.size(); ++bd) {
        if (a.lambda[bd].size() != b.lambda[bd].size()) return false;
        if (a.lambda[bd] != b.lambda[bd]) return false;
        if (a.bond_atoms[bd] != b.bond_atoms[bd]) return false;
    }
    for (int j = 0; j < a.size(); ++j)
        for (std::size_t s = 0; s < a.gamma[std::size_t(j)].size(); ++s) {
            const auto& ga = a.gamma[std::size_t(j)][s];
            const auto& gb = b.gamma[std::size_t(j)][s];
            if (ga.rows() != gb.rows() || ga.cols() != gb.cols()) return false;
            if (ga != gb) return false;
        }
    return true;
}

struct Line {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool identical;
};

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int n = quick ? 6 : 12;
    const int steps = quick ? 10 : 50;
    const int dim = quick ? 120 : 400;
    const int n_times = quick ? 8 : 64;

    sat::model::ChannelParams ch;
    ch.Omega = 1.0;
    sat::model::LatticeGeometry geom{n, n, n};

    sat::tebd::GroundStateOptions gopt;
    gopt.exec = sat::kernels::Exec::serial;
    auto gs = sat::tebd::ground_state(ch, geom, gopt);

    const auto bases = sat::mps::chain_bases(geom, ch.n_max);
    const auto gates = sat::mps::build_gates(bases, ch, 0.02, false);
    const sat::kernels::TruncationPolicy pol{128, 1e-8};

    auto sweep_steps = [&](sat::mps::MpsState& psi, sat::kernels::Exec exec) {
        for (int s = 0; s < steps; ++s) {
            sat::kernels::sweep_parity(psi, gates, 0, true, pol, exec);
            sat::kernels::sweep_parity(psi, gates, 1, false, pol, exec);
            sat::kernels::sweep_parity(psi, gates, 0, true, pol, exec);
        }
    };

    std::vector<Line> lines;

    {
        auto psi_s = gs.state;
        auto psi_p = gs.state;
        auto t0 = Clock::now();
        sweep_steps(psi_s, sat::kernels::Exec::serial);
        const double ts = ms_since(t0);
        t0 = Clock::now();
        sweep_steps(psi_p, sat::kernels::Exec::parallel);
        const double tp = ms_since(t0);
        lines.push_back({"gate sweeps", ts, tp, states_identical(psi_s, psi_p)});

        auto t1 = Clock::now();
        const auto rho_s = sat::kernels::spdm_serial(psi_s);
        const double rs = ms_since(t1);
        t1 = Clock::now();
        const auto rho_p = sat::kernels::spdm(psi_p, sat::kernels::Exec::parallel);
        const double rp = ms_since(t1);
        const bool same = rho_s.rows() == rho_p.rows() && rho_s == rho_p;
        lines.push_back({"density matrix", rs, rp, same});
    }

    {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (int j = 0; j + 1 < dim; ++j) h(j, j + 1) = h(j + 1, j) = -1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
        Eigen::MatrixXcd c0 = eig.eigenvectors().leftCols(dim / 4).cast<std::complex<double>>();
        std::vector<double> times;
        for (int i = 0; i < n_times; ++i) times.push_back(0.1 * (i + 1));

        std::vector<Eigen::MatrixXcd> out_s, out_p;
        auto t0 = Clock::now();
        sat::kernels::phase_samples_serial(eig.eigenvectors(), eig.eigenvalues(), c0, times,
                                           out_s);
        const double ts = ms_since(t0);
        t0 = Clock::now();
        sat::kernels::phase_samples(eig.eigenvectors(), eig.eigenvalues(), c0, times, out_p,
                                    sat::kernels::Exec::parallel);
        const double tp = ms_since(t0);
        bool same = out_s.size() == out_p.size();
        for (std::size_t i = 0; same && i < out_s.size(); ++i)
            same = out_s[i] == out_p[i];
        lines.push_back({"phase samples", ts, tp, same});
    }

    std::printf("%-16s %12s %12s %9s %s\n", "kernel", "serial/ms", "parallel/ms", "speedup",
                "identical");
    bool all_same = true;
    for (const auto& l : lines) {
        std::printf("%-16s %12.2f %12.2f %8.2fx %s\n", l.name, l.serial_ms, l.parallel_ms,
                    l.serial_ms / std::max(1e-9, l.parallel_ms), l.identical ? "yes" : "NO");
        all_same = all_same && l.identical;
    }
    std::printf("workers: %d\n", sat::kernels::worker_count());
    return all_same ? 0 : 1;
}
