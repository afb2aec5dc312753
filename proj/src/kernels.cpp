#include "sat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sat/errors.hpp"
#include "sat/gates.hpp"
#include "sat/mps_state.hpp"

namespace sat::kernels {

int worker_count() {
    if (const char* env = std::getenv("SAT_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Exec default_exec() { return Exec::parallel; }

namespace {

void thin_svd(const Eigen::MatrixXcd& M, Eigen::MatrixXcd& U, Eigen::VectorXd& sig,
              Eigen::MatrixXcd& V) {
    if (std::min(M.rows(), M.cols()) <= 64) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        U = svd.matrixU();
        sig = svd.singularValues();
        V = svd.matrixV();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        U = svd.matrixU();
        sig = svd.singularValues();
        V = svd.matrixV();
    }
}

Eigen::VectorXd edge_or_lambda(const mps::MpsState& psi, int bond) {
    if (bond < 0 || bond >= int(psi.lambda.size())) return Eigen::VectorXd::Ones(1);
    return psi.lambda[std::size_t(bond)];
}

std::vector<int> edge_or_charges(const mps::MpsState& psi, int bond) {
    if (bond < 0) return {0};
    if (bond >= int(psi.lambda.size())) return {psi.total_atoms};
    return psi.bond_atoms[std::size_t(bond)];
}

constexpr double kLambdaFloor = 1e-12;

} // namespace

double apply_bond_gate(mps::MpsState& psi, int bond, const Eigen::MatrixXcd& gate,
                       const TruncationPolicy& pol) {
    const int L = psi.size();
    if (bond < 0 || bond + 1 >= L) throw DimensionError("apply_bond_gate: bond out of range");
    const int i = bond;
    const int j = bond + 1;
    const int di = psi.bases[std::size_t(i)].dim();
    const int dj = psi.bases[std::size_t(j)].dim();
    if (gate.rows() != di * dj || gate.cols() != di * dj)
        throw DimensionError("apply_bond_gate: gate dimension");

    const Eigen::VectorXd lamL = edge_or_lambda(psi, bond - 1);
    const Eigen::VectorXd lamC = edge_or_lambda(psi, bond);
    const Eigen::VectorXd lamR = edge_or_lambda(psi, bond + 1);
    const std::vector<int> qL = edge_or_charges(psi, bond - 1);
    const std::vector<int> qR = edge_or_charges(psi, bond + 1);
    const int chiL = int(lamL.size());
    const int chiR = int(lamR.size());

    // Theta[s*dj+t] = lamL Gamma_i[s] lamC Gamma_j[t] lamR, then the gate.
    std::vector<Eigen::MatrixXcd> theta(std::size_t(di * dj));
    {
        std::vector<Eigen::MatrixXcd> X(static_cast<std::size_t>(di)),
            B(static_cast<std::size_t>(dj));
        for (int s = 0; s < di; ++s)
            X[std::size_t(s)] =
                lamL.asDiagonal() * psi.gamma[std::size_t(i)][std::size_t(s)] * lamC.asDiagonal();
        for (int t = 0; t < dj; ++t)
            B[std::size_t(t)] = psi.gamma[std::size_t(j)][std::size_t(t)] * lamR.asDiagonal();
        std::vector<Eigen::MatrixXcd> raw(std::size_t(di * dj));
        for (int s = 0; s < di; ++s)
            for (int t = 0; t < dj; ++t)
                raw[std::size_t(s * dj + t)].noalias() = X[std::size_t(s)] * B[std::size_t(t)];
        for (int p = 0; p < di * dj; ++p) {
            theta[std::size_t(p)] = Eigen::MatrixXcd::Zero(chiL, chiR);
            for (int q = 0; q < di * dj; ++q) {
                const std::complex<double> g = gate(p, q);
                if (g != 0.0) theta[std::size_t(p)].noalias() += g * raw[std::size_t(q)];
            }
        }
    }

    // Group rows (s, a) and columns (t, c) of Theta by the atom count left of
    // the new cut; the decomposition acts on each charge block independently.
    std::map<int, std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>>
        groups;
    for (int s = 0; s < di; ++s) {
        const int qs = psi.bases[std::size_t(i)].atoms(s);
        for (int a = 0; a < chiL; ++a) groups[qL[std::size_t(a)] + qs].first.push_back({s, a});
    }
    for (int t = 0; t < dj; ++t) {
        const int qt = psi.bases[std::size_t(j)].atoms(t);
        for (int c = 0; c < chiR; ++c) groups[qR[std::size_t(c)] - qt].second.push_back({t, c});
    }

    struct Blk {
        int q = 0;
        std::vector<std::pair<int, int>> rows, cols;
        Eigen::MatrixXcd U, V;
        Eigen::VectorXd sig;
    };
    std::vector<Blk> blocks;
    double total_weight = 0.0;
    for (auto& [q, rc] : groups) {
        if (rc.first.empty() || rc.second.empty()) continue;
        Blk blk;
        blk.q = q;
        blk.rows = std::move(rc.first);
        blk.cols = std::move(rc.second);
        Eigen::MatrixXcd M(Eigen::Index(blk.rows.size()), Eigen::Index(blk.cols.size()));
        for (std::size_t r = 0; r < blk.rows.size(); ++r) {
            const auto [s, a] = blk.rows[r];
            for (std::size_t c = 0; c < blk.cols.size(); ++c) {
                const auto [t, cc] = blk.cols[c];
                M(Eigen::Index(r), Eigen::Index(c)) = theta[std::size_t(s * dj + t)](a, cc);
            }
        }
        thin_svd(M, blk.U, blk.sig, blk.V);
        total_weight += blk.sig.squaredNorm();
        blocks.push_back(std::move(blk));
    }
    if (blocks.empty() || !(total_weight > 0.0))
        throw ValidationError("apply_bond_gate: state annihilated at bond update");

    struct Cand {
        double sig;
        int blk, col;
    };
    std::vector<Cand> cand;
    for (int bi = 0; bi < int(blocks.size()); ++bi)
        for (int c = 0; c < blocks[std::size_t(bi)].sig.size(); ++c)
            cand.push_back({blocks[std::size_t(bi)].sig[c], bi, c});
    std::stable_sort(cand.begin(), cand.end(),
                     [](const Cand& a, const Cand& b) { return a.sig > b.sig; });
    // Modes below the inverse-gauge guard are never kept, whatever the
    // tolerance: their lambda would be zeroed on the next 1/lambda anyway,
    // so keeping them only pollutes the canonical form.
    const double sig_floor = kLambdaFloor * std::sqrt(total_weight);
    while (cand.size() > 1 && cand.back().sig <= sig_floor) cand.pop_back();

    int keep = std::min<int>(pol.chi_max, int(cand.size()));
    double kept_weight = 0.0;
    for (int n = 0; n < keep; ++n) kept_weight += cand[std::size_t(n)].sig * cand[std::size_t(n)].sig;
    // Shrink further while the discarded weight stays inside the tolerance.
    while (keep > 1) {
        const double tail = cand[std::size_t(keep - 1)].sig * cand[std::size_t(keep - 1)].sig;
        if (total_weight - (kept_weight - tail) > pol.discard_tol * total_weight) break;
        kept_weight -= tail;
        --keep;
    }
    const double discarded = std::max(0.0, 1.0 - kept_weight / total_weight);
    const double rescale = 1.0 / std::sqrt(kept_weight);

    Eigen::VectorXd lam(keep);
    std::vector<int> qs(static_cast<std::size_t>(keep));
    auto& gi = psi.gamma[std::size_t(i)];
    auto& gj = psi.gamma[std::size_t(j)];
    for (int s = 0; s < di; ++s) gi[std::size_t(s)] = Eigen::MatrixXcd::Zero(chiL, keep);
    for (int t = 0; t < dj; ++t) gj[std::size_t(t)] = Eigen::MatrixXcd::Zero(keep, chiR);
    for (int al = 0; al < keep; ++al) {
        const auto& k = cand[std::size_t(al)];
        const Blk& blk = blocks[std::size_t(k.blk)];
        lam[al] = k.sig * rescale;
        qs[std::size_t(al)] = blk.q;
        for (std::size_t r = 0; r < blk.rows.size(); ++r) {
            const auto [s, a] = blk.rows[r];
            const double w = lamL[a] < kLambdaFloor ? 0.0 : 1.0 / lamL[a];
            gi[std::size_t(s)](a, al) = blk.U(Eigen::Index(r), k.col) * w;
        }
        for (std::size_t c = 0; c < blk.cols.size(); ++c) {
            const auto [t, cc] = blk.cols[c];
            const double w = lamR[cc] < kLambdaFloor ? 0.0 : 1.0 / lamR[cc];
            gj[std::size_t(t)](al, cc) = std::conj(blk.V(Eigen::Index(c), k.col)) * w;
        }
    }
    psi.lambda[std::size_t(bond)] = lam;
    psi.bond_atoms[std::size_t(bond)] = qs;
    return discarded;
}

SweepStats sweep_parity_serial(mps::MpsState& psi, const mps::BondGates& gates, int parity,
                               bool half, const TruncationPolicy& pol) {
    const int nb = psi.size() - 1;
    SweepStats st;
    for (int b = parity; b < nb; b += 2) {
        const auto& g = half ? gates.half[std::size_t(b)] : gates.full[std::size_t(b)];
        const double w = apply_bond_gate(psi, b, g, pol);
        st.truncation_weight += w;
        st.max_step_weight = std::max(st.max_step_weight, w);
        st.max_chi = std::max(st.max_chi, psi.chi(b));
    }
    psi.truncation_accumulated += st.truncation_weight;
    return st;
}

SweepStats sweep_parity(mps::MpsState& psi, const mps::BondGates& gates, int parity, bool half,
                        const TruncationPolicy& pol, Exec exec) {
    if (exec == Exec::serial) return sweep_parity_serial(psi, gates, parity, half, pol);
    const int nb = psi.size() - 1;
    std::vector<int> bonds;
    for (int b = parity; b < nb; b += 2) bonds.push_back(b);
    std::vector<double> weights(bonds.size(), 0.0);
    std::vector<int> chis(bonds.size(), 1);

    // Same-parity bonds touch disjoint tensors, so updates may run
    // concurrently; the reduction below runs in fixed bond order.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
#endif
    for (std::size_t idx = 0; idx < bonds.size(); ++idx) {
        const int b = bonds[idx];
        const auto& g = half ? gates.half[std::size_t(b)] : gates.full[std::size_t(b)];
        weights[idx] = apply_bond_gate(psi, b, g, pol);
        chis[idx] = psi.chi(b);
    }

    SweepStats st;
    for (std::size_t idx = 0; idx < bonds.size(); ++idx) {
        st.truncation_weight += weights[idx];
        st.max_step_weight = std::max(st.max_step_weight, weights[idx]);
        st.max_chi = std::max(st.max_chi, chis[idx]);
    }
    psi.truncation_accumulated += st.truncation_weight;
    return st;
}

namespace {

// Right-gauge tensors Gamma_j Lambda_j used by the transfer contraction.
std::vector<std::vector<Eigen::MatrixXcd>> right_tensors(const mps::MpsState& psi) {
    const int L = psi.size();
    std::vector<std::vector<Eigen::MatrixXcd>> B(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) {
        const int d = psi.bases[std::size_t(j)].dim();
        const Eigen::VectorXd lamR = edge_or_lambda(psi, j);
        B[std::size_t(j)].resize(std::size_t(d));
        for (int s = 0; s < d; ++s) {
            Eigen::MatrixXcd G = psi.gamma[std::size_t(j)][std::size_t(s)];
            if (j < L - 1) G = G * lamR.asDiagonal();
            B[std::size_t(j)][std::size_t(s)] = std::move(G);
        }
    }
    return B;
}

void spdm_row(const mps::MpsState& psi, const std::vector<std::vector<Eigen::MatrixXcd>>& B,
              int i, Eigen::MatrixXcd& rho) {
    const int L = psi.size();
    const int di = psi.bases[std::size_t(i)].dim();
    const Eigen::VectorXd lamL = edge_or_lambda(psi, i - 1);
    const Eigen::MatrixXd rais = psi.bases[std::size_t(i)].annihilator().transpose();

    std::vector<Eigen::MatrixXcd> M(static_cast<std::size_t>(di));
    for (int s = 0; s < di; ++s) M[std::size_t(s)] = lamL.asDiagonal() * B[std::size_t(i)][std::size_t(s)];

    double diag = 0.0;
    for (int s = 0; s < di; ++s)
        diag += double(psi.bases[std::size_t(i)].bosons(s)) * M[std::size_t(s)].squaredNorm();
    rho(i, i) = diag;

    if (i + 1 >= L) return;
    const Eigen::Index chi = M[0].cols();
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(chi, chi);
    for (int sp = 0; sp < di; ++sp)
        for (int s = 0; s < di; ++s) {
            if (rais(sp, s) == 0.0) continue;
            E.noalias() += rais(sp, s) * (M[std::size_t(s)].transpose() * M[std::size_t(sp)].conjugate());
        }

    for (int j = i + 1; j < L; ++j) {
        const int dj = psi.bases[std::size_t(j)].dim();
        const Eigen::MatrixXd lower = psi.bases[std::size_t(j)].annihilator();
        std::complex<double> val = 0.0;
        for (int t = 0; t < dj; ++t) {
            Eigen::MatrixXcd F;
            F.noalias() = B[std::size_t(j)][std::size_t(t)].transpose() * E;
            for (int tp = 0; tp < dj; ++tp) {
                if (lower(tp, t) == 0.0) continue;
                val += lower(tp, t) *
                       (F.transpose().cwiseProduct(B[std::size_t(j)][std::size_t(tp)].conjugate())).sum();
            }
        }
        rho(i, j) = val;
        if (j < L - 1) {
            const Eigen::Index chin = B[std::size_t(j)][0].cols();
            Eigen::MatrixXcd En = Eigen::MatrixXcd::Zero(chin, chin);
            for (int t = 0; t < dj; ++t)
                En.noalias() += B[std::size_t(j)][std::size_t(t)].transpose() * E *
                                B[std::size_t(j)][std::size_t(t)].conjugate();
            E = std::move(En);
        }
    }
}

} // namespace

Eigen::MatrixXcd spdm_serial(const mps::MpsState& psi) {
    const int L = psi.size();
    const auto B = right_tensors(psi);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(L, L);
    for (int i = 0; i < L; ++i) spdm_row(psi, B, i, rho);
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) rho(j, i) = std::conj(rho(i, j));
    return rho;
}

Eigen::MatrixXcd spdm(const mps::MpsState& psi, Exec exec) {
    if (exec == Exec::serial) return spdm_serial(psi);
    const int L = psi.size();
    const auto B = right_tensors(psi);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(L, L);
    // Rows write disjoint slices of rho.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
#endif
    for (int i = 0; i < L; ++i) spdm_row(psi, B, i, rho);
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) rho(j, i) = std::conj(rho(i, j));
    return rho;
}

void phase_samples_serial(const Eigen::MatrixXd& V, const Eigen::VectorXd& lam,
                          const Eigen::MatrixXcd& C0, const std::vector<double>& times,
                          std::vector<Eigen::MatrixXcd>& out) {
    if (V.cols() != lam.size() || lam.size() != C0.rows())
        throw DimensionError("phase_samples: shape mismatch");
    out.assign(times.size(), Eigen::MatrixXcd());
    for (std::size_t s = 0; s < times.size(); ++s) {
        Eigen::VectorXcd ph(lam.size());
        for (Eigen::Index r = 0; r < lam.size(); ++r)
            ph[r] = std::exp(std::complex<double>(0.0, -lam[r] * times[s]));
        const Eigen::MatrixXcd rot = ph.asDiagonal() * C0;
        Eigen::MatrixXcd res(V.rows(), C0.cols());
        res.real() = V * rot.real();
        res.imag() = V * rot.imag();
        out[s] = std::move(res);
    }
}

void phase_samples(const Eigen::MatrixXd& V, const Eigen::VectorXd& lam,
                   const Eigen::MatrixXcd& C0, const std::vector<double>& times,
                   std::vector<Eigen::MatrixXcd>& out, Exec exec) {
    if (exec == Exec::serial) {
        phase_samples_serial(V, lam, C0, times, out);
        return;
    }
    if (V.cols() != lam.size() || lam.size() != C0.rows())
        throw DimensionError("phase_samples: shape mismatch");
    out.assign(times.size(), Eigen::MatrixXcd());
    // Samples are independent; each writes its own slot.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count())
#endif
    for (std::size_t s = 0; s < times.size(); ++s) {
        Eigen::VectorXcd ph(lam.size());
        for (Eigen::Index r = 0; r < lam.size(); ++r)
            ph[r] = std::exp(std::complex<double>(0.0, -lam[r] * times[s]));
        const Eigen::MatrixXcd rot = ph.asDiagonal() * C0;
        Eigen::MatrixXcd res(V.rows(), C0.cols());
        res.real() = V * rot.real();
        res.imag() = V * rot.imag();
        out[s] = std::move(res);
    }
}

} // namespace sat::kernels
