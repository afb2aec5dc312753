#include "sat/mps_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <utility>

#include "sat/errors.hpp"

namespace sat::mps {

namespace {

Eigen::VectorXd edge_or_lambda(const MpsState& psi, int bond) {
    if (bond < 0 || bond >= int(psi.lambda.size())) return Eigen::VectorXd::Ones(1);
    return psi.lambda[std::size_t(bond)];
}

// Center tensor Lambda_{j-1} Gamma_j Lambda_j for local expectation values.
std::vector<Eigen::MatrixXcd> center_tensor(const MpsState& psi, int site) {
    const Eigen::VectorXd lamL = edge_or_lambda(psi, site - 1);
    const Eigen::VectorXd lamR = edge_or_lambda(psi, site);
    const auto& g = psi.gamma[std::size_t(site)];
    std::vector<Eigen::MatrixXcd> M(g.size());
    for (std::size_t s = 0; s < g.size(); ++s)
        M[s] = lamL.asDiagonal() * g[s] * lamR.asDiagonal();
    return M;
}

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

} // namespace

int MpsState::max_chi() const {
    int m = 1;
    for (const auto& l : lambda) m = std::max(m, int(l.size()));
    return m;
}

MpsState product_state(const std::vector<SiteBasis>& bases, const std::vector<int>& local_states) {
    if (bases.empty()) throw ConfigError("product_state: empty chain");
    if (bases.size() != local_states.size())
        throw DimensionError("product_state: one local state per site required");
    MpsState psi;
    psi.bases = bases;
    const int L = psi.size();
    psi.gamma.resize(std::size_t(L));
    psi.lambda.assign(std::size_t(L - 1), Eigen::VectorXd::Ones(1));
    psi.bond_atoms.resize(std::size_t(L - 1));
    int running = 0;
    for (int j = 0; j < L; ++j) {
        const int d = bases[std::size_t(j)].dim();
        const int s0 = local_states[std::size_t(j)];
        if (s0 < 0 || s0 >= d) throw ConfigError("product_state: local state out of range");
        auto& g = psi.gamma[std::size_t(j)];
        g.assign(std::size_t(d), Eigen::MatrixXcd::Zero(1, 1));
        g[std::size_t(s0)](0, 0) = 1.0;
        running += bases[std::size_t(j)].atoms(s0);
        if (j < L - 1) psi.bond_atoms[std::size_t(j)] = {running};
    }
    psi.total_atoms = running;
    return psi;
}

Eigen::VectorXcd to_dense(const MpsState& psi, std::size_t max_dim) {
    std::size_t dim = 1;
    for (const auto& b : psi.bases) {
        dim *= std::size_t(b.dim());
        if (dim > max_dim) throw DimensionError("to_dense: state dimension exceeds guard");
    }
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
    const int L = psi.size();
    for (int j = 0; j < L; ++j) {
        const int d = psi.bases[std::size_t(j)].dim();
        const Eigen::VectorXd lamR = edge_or_lambda(psi, j);
        const Eigen::Index chiR = (j < L - 1) ? lamR.size() : 1;
        if (std::size_t(acc.rows()) * std::size_t(d) * std::size_t(chiR) > 4 * max_dim)
            throw DimensionError("to_dense: intermediate exceeds guard");
        Eigen::MatrixXcd nxt(acc.rows() * d, chiR);
        for (int s = 0; s < d; ++s) {
            Eigen::MatrixXcd B = psi.gamma[std::size_t(j)][std::size_t(s)];
            if (j < L - 1) B = B * lamR.asDiagonal();
            Eigen::MatrixXcd rows = acc * B;
            for (Eigen::Index p = 0; p < acc.rows(); ++p) nxt.row(p * d + s) = rows.row(p);
        }
        acc = std::move(nxt);
    }
    return acc.col(0);
}

MpsState from_dense(const std::vector<SiteBasis>& bases, const Eigen::VectorXcd& amp,
                    double charge_tol) {
    const int L = int(bases.size());
    if (L < 1) throw ConfigError("from_dense: empty chain");
    std::size_t dim = 1;
    for (const auto& b : bases) {
        dim *= std::size_t(b.dim());
        if (dim > (std::size_t(1) << 28)) throw DimensionError("from_dense: state too large");
    }
    if (std::size_t(amp.size()) != dim) throw DimensionError("from_dense: amplitude size mismatch");
    const double nrm = amp.norm();
    if (!(nrm > 1e-300)) throw ValidationError("from_dense: zero state");

    const double amax = amp.cwiseAbs().maxCoeff();
    int total = -1;
    for (std::size_t idx = 0; idx < dim; ++idx) {
        if (std::abs(amp[Eigen::Index(idx)]) <= charge_tol * amax) continue;
        std::size_t rest = idx;
        int q = 0;
        for (int j = L - 1; j >= 0; --j) {
            const int d = bases[std::size_t(j)].dim();
            q += bases[std::size_t(j)].atoms(int(rest % std::size_t(d)));
            rest /= std::size_t(d);
        }
        if (total < 0)
            total = q;
        else if (total != q)
            throw ValidationError("from_dense: state mixes atom-number sectors");
    }

    MpsState psi;
    psi.bases = bases;
    psi.gamma.resize(std::size_t(L));
    psi.lambda.resize(std::size_t(L - 1));
    psi.bond_atoms.resize(std::size_t(L - 1));
    psi.total_atoms = total;

    Eigen::MatrixXcd rem = amp.transpose() / nrm; // orthonormal-left expansion coefficients
    Eigen::VectorXd lam_prev = Eigen::VectorXd::Ones(1);
    std::vector<int> q_prev{0};
    std::size_t d_rest = dim;

    for (int j = 0; j < L; ++j) {
        const int d = bases[std::size_t(j)].dim();
        d_rest /= std::size_t(d);
        const int chiP = int(rem.rows());
        if (j == L - 1) {
            auto& g = psi.gamma[std::size_t(j)];
            g.assign(std::size_t(d), Eigen::MatrixXcd::Zero(chiP, 1));
            for (int a = 0; a < chiP; ++a) {
                const double w = lam_prev[a] < 1e-13 ? 0.0 : 1.0 / lam_prev[a];
                for (int s = 0; s < d; ++s) g[std::size_t(s)](a, 0) = rem(a, s) * w;
            }
            break;
        }

        std::map<int, std::vector<std::pair<int, int>>> groups; // charge -> (a, s) rows
        for (int s = 0; s < d; ++s)
            for (int a = 0; a < chiP; ++a)
                groups[q_prev[std::size_t(a)] + bases[std::size_t(j)].atoms(s)].push_back({a, s});

        struct Blk {
            int q;
            std::vector<std::pair<int, int>> rows;
            Eigen::MatrixXcd U, V;
            Eigen::VectorXd sig;
        };
        std::vector<Blk> blocks;
        double sig_max = 0.0;
        for (auto& [q, rows] : groups) {
            Eigen::MatrixXcd M(Eigen::Index(rows.size()), Eigen::Index(d_rest));
            for (std::size_t r = 0; r < rows.size(); ++r)
                M.row(Eigen::Index(r)) = rem.block(rows[r].first,
                                                   Eigen::Index(std::size_t(rows[r].second) * d_rest),
                                                   1, Eigen::Index(d_rest));
            Blk blk;
            blk.q = q;
            blk.rows = rows;
            thin_svd(M, blk.U, blk.sig, blk.V);
            if (blk.sig.size() > 0) sig_max = std::max(sig_max, blk.sig[0]);
            blocks.push_back(std::move(blk));
        }

        struct Kept {
            double sig;
            int blk, col;
        };
        std::vector<Kept> kept;
        for (int bi = 0; bi < int(blocks.size()); ++bi)
            for (int c = 0; c < blocks[std::size_t(bi)].sig.size(); ++c)
                if (blocks[std::size_t(bi)].sig[c] > 1e-13 * sig_max)
                    kept.push_back({blocks[std::size_t(bi)].sig[c], bi, c});
        std::stable_sort(kept.begin(), kept.end(),
                         [](const Kept& a, const Kept& b) { return a.sig > b.sig; });
        if (kept.empty()) throw ValidationError("from_dense: vanishing Schmidt spectrum");

        const int chi = int(kept.size());
        double w2 = 0.0;
        for (const auto& k : kept) w2 += k.sig * k.sig;
        const double rescale = 1.0 / std::sqrt(w2);

        Eigen::VectorXd lam(chi);
        std::vector<int> qs(static_cast<std::size_t>(chi));
        auto& g = psi.gamma[std::size_t(j)];
        g.assign(std::size_t(d), Eigen::MatrixXcd::Zero(chiP, chi));
        Eigen::MatrixXcd rem_next(chi, Eigen::Index(d_rest));
        for (int al = 0; al < chi; ++al) {
            const auto& k = kept[std::size_t(al)];
            const Blk& blk = blocks[std::size_t(k.blk)];
            lam[al] = k.sig * rescale;
            qs[std::size_t(al)] = blk.q;
            for (std::size_t r = 0; r < blk.rows.size(); ++r) {
                const auto [a, s] = blk.rows[r];
                const double w = lam_prev[a] < 1e-13 ? 0.0 : 1.0 / lam_prev[a];
                g[std::size_t(s)](a, al) = blk.U(Eigen::Index(r), k.col) * w;
            }
            rem_next.row(al) = (k.sig * rescale) * blk.V.col(k.col).adjoint();
        }
        psi.lambda[std::size_t(j)] = lam;
        psi.bond_atoms[std::size_t(j)] = qs;
        rem = std::move(rem_next);
        lam_prev = lam;
        q_prev = qs;
    }
    return psi;
}

std::complex<double> overlap(const MpsState& a, const MpsState& b) {
    if (a.size() != b.size()) throw DimensionError("overlap: chain lengths differ");
    const int L = a.size();
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Ones(1, 1);
    for (int j = 0; j < L; ++j) {
        const int d = a.bases[std::size_t(j)].dim();
        if (d != b.bases[std::size_t(j)].dim())
            throw DimensionError("overlap: local dimensions differ");
        const Eigen::VectorXd lamA = edge_or_lambda(a, j);
        const Eigen::VectorXd lamB = edge_or_lambda(b, j);
        const Eigen::Index ca = (j < L - 1) ? lamA.size() : 1;
        const Eigen::Index cb = (j < L - 1) ? lamB.size() : 1;
        Eigen::MatrixXcd En = Eigen::MatrixXcd::Zero(ca, cb);
        for (int s = 0; s < d; ++s) {
            Eigen::MatrixXcd Ma = a.gamma[std::size_t(j)][std::size_t(s)];
            Eigen::MatrixXcd Mb = b.gamma[std::size_t(j)][std::size_t(s)];
            if (j < L - 1) {
                Ma = Ma * lamA.asDiagonal();
                Mb = Mb * lamB.asDiagonal();
            }
            En.noalias() += Ma.adjoint() * E * Mb;
        }
        E = std::move(En);
    }
    return E(0, 0);
}

double norm_value(const MpsState& psi) {
    return std::sqrt(std::abs(overlap(psi, psi)));
}

std::complex<double> expect_site(const MpsState& psi, int site, const Eigen::MatrixXd& op) {
    if (site < 0 || site >= psi.size()) throw DimensionError("expect_site: site out of range");
    const int d = psi.bases[std::size_t(site)].dim();
    if (op.rows() != d || op.cols() != d) throw DimensionError("expect_site: operator dimension");
    const auto M = center_tensor(psi, site);
    std::complex<double> val = 0.0;
    for (int sp = 0; sp < d; ++sp)
        for (int s = 0; s < d; ++s) {
            if (op(sp, s) == 0.0) continue;
            val += op(sp, s) * (M[std::size_t(sp)].conjugate().cwiseProduct(M[std::size_t(s)])).sum();
        }
    return val;
}

std::complex<double> expect_bond(const MpsState& psi, int bond, const Eigen::MatrixXd& h2) {
    if (bond < 0 || bond + 1 >= psi.size()) throw DimensionError("expect_bond: bond out of range");
    const int di = psi.bases[std::size_t(bond)].dim();
    const int dj = psi.bases[std::size_t(bond + 1)].dim();
    if (h2.rows() != di * dj || h2.cols() != di * dj)
        throw DimensionError("expect_bond: operator dimension");
    const Eigen::VectorXd lamL = edge_or_lambda(psi, bond - 1);
    const Eigen::VectorXd lamC = edge_or_lambda(psi, bond);
    const Eigen::VectorXd lamR = edge_or_lambda(psi, bond + 1);
    std::vector<Eigen::MatrixXcd> theta(std::size_t(di * dj));
    for (int s = 0; s < di; ++s) {
        const Eigen::MatrixXcd X =
            lamL.asDiagonal() * psi.gamma[std::size_t(bond)][std::size_t(s)] * lamC.asDiagonal();
        for (int t = 0; t < dj; ++t)
            theta[std::size_t(s * dj + t)] =
                X * psi.gamma[std::size_t(bond + 1)][std::size_t(t)] * lamR.asDiagonal();
    }
    std::complex<double> val = 0.0;
    for (int bra = 0; bra < di * dj; ++bra)
        for (int ket = 0; ket < di * dj; ++ket) {
            if (h2(bra, ket) == 0.0) continue;
            val += h2(bra, ket) *
                   (theta[std::size_t(bra)].conjugate().cwiseProduct(theta[std::size_t(ket)])).sum();
        }
    return val;
}

double canonical_defect(const MpsState& psi) {
    const int L = psi.size();
    double worst = 0.0;
    for (int j = 0; j < L; ++j) {
        const int d = psi.bases[std::size_t(j)].dim();
        const Eigen::VectorXd lamL = edge_or_lambda(psi, j - 1);
        const Eigen::VectorXd lamR = edge_or_lambda(psi, j);
        const Eigen::Index cl = psi.gamma[std::size_t(j)][0].rows();
        const Eigen::Index cr = psi.gamma[std::size_t(j)][0].cols();
        Eigen::MatrixXcd EA = Eigen::MatrixXcd::Zero(cr, cr);
        Eigen::MatrixXcd EB = Eigen::MatrixXcd::Zero(cl, cl);
        for (int s = 0; s < d; ++s) {
            const auto& G = psi.gamma[std::size_t(j)][std::size_t(s)];
            const Eigen::MatrixXcd A = lamL.asDiagonal() * G;
            EA.noalias() += A.adjoint() * A;
            Eigen::MatrixXcd B = G;
            if (j < L - 1) B = G * lamR.asDiagonal();
            EB.noalias() += B * B.adjoint();
        }
        EA -= Eigen::MatrixXcd::Identity(cr, cr);
        EB -= Eigen::MatrixXcd::Identity(cl, cl);
        worst = std::max({worst, EA.cwiseAbs().maxCoeff(), EB.cwiseAbs().maxCoeff()});
    }
    return worst;
}

void boost(MpsState& psi, double k0) {
    for (int j = 0; j < psi.size(); ++j) {
        const auto& basis = psi.bases[std::size_t(j)];
        for (int s = 0; s < basis.dim(); ++s) {
            const double phase = k0 * double(j) * double(basis.atoms(s));
            psi.gamma[std::size_t(j)][std::size_t(s)] *=
                std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
}

namespace {

constexpr char kMagic[9] = "SATMPS01";

void put_u64(std::ofstream& f, std::uint64_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& f, double v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint64_t get_u64(std::ifstream& f) {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!f) throw CheckpointError("checkpoint truncated");
    return v;
}
double get_f64(std::ifstream& f) {
    double v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!f) throw CheckpointError("checkpoint truncated");
    return v;
}

} // namespace

void save_checkpoint(const MpsState& psi, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot open checkpoint for writing: " + path);
    f.write(kMagic, 8);
    put_u64(f, std::uint64_t(psi.size()));
    put_u64(f, std::uint64_t(psi.total_atoms));
    put_f64(f, psi.truncation_accumulated);
    for (const auto& b : psi.bases) {
        put_u64(f, std::uint64_t(b.n_max()));
        put_u64(f, b.is_impurity() ? 1 : 0);
    }
    for (std::size_t bnd = 0; bnd + 1 < std::size_t(psi.size()); ++bnd) {
        const auto& lam = psi.lambda[bnd];
        put_u64(f, std::uint64_t(lam.size()));
        f.write(reinterpret_cast<const char*>(lam.data()),
                std::streamsize(sizeof(double)) * lam.size());
        for (int q : psi.bond_atoms[bnd]) put_u64(f, std::uint64_t(std::int64_t(q)));
    }
    for (const auto& site : psi.gamma)
        for (const auto& G : site) {
            put_u64(f, std::uint64_t(G.rows()));
            put_u64(f, std::uint64_t(G.cols()));
            f.write(reinterpret_cast<const char*>(G.data()),
                    std::streamsize(sizeof(std::complex<double>)) * G.size());
        }
    f.flush();
    if (!f) throw CheckpointError("checkpoint write failed: " + path);
}

MpsState load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CheckpointError("cannot open checkpoint: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::string(magic, 8) != std::string(kMagic, 8))
        throw CheckpointError("not a state checkpoint: " + path);
    const auto L = get_u64(f);
    if (L < 1 || L > 100000) throw CheckpointError("checkpoint chain length out of range");
    MpsState psi;
    psi.total_atoms = int(std::int64_t(get_u64(f)));
    psi.truncation_accumulated = get_f64(f);
    psi.bases.reserve(L);
    for (std::uint64_t j = 0; j < L; ++j) {
        const int n_max = int(get_u64(f));
        const bool imp = get_u64(f) != 0;
        psi.bases.push_back(imp ? SiteBasis::impurity(n_max) : SiteBasis::bulk(n_max));
    }
    psi.lambda.resize(L - 1);
    psi.bond_atoms.resize(L - 1);
    for (std::uint64_t bnd = 0; bnd + 1 < L; ++bnd) {
        const auto chi = get_u64(f);
        if (chi < 1 || chi > (1u << 20)) throw CheckpointError("checkpoint bond dimension corrupt");
        Eigen::VectorXd lam(static_cast<Eigen::Index>(chi));
        f.read(reinterpret_cast<char*>(lam.data()), std::streamsize(sizeof(double) * chi));
        if (!f) throw CheckpointError("checkpoint truncated");
        psi.lambda[bnd] = lam;
        psi.bond_atoms[bnd].resize(chi);
        for (auto& q : psi.bond_atoms[bnd]) q = int(std::int64_t(get_u64(f)));
    }
    psi.gamma.resize(L);
    for (std::uint64_t j = 0; j < L; ++j) {
        const int d = psi.bases[j].dim();
        psi.gamma[j].resize(std::size_t(d));
        for (int s = 0; s < d; ++s) {
            const auto rows = get_u64(f);
            const auto cols = get_u64(f);
            const std::uint64_t expect_rows = (j == 0) ? 1 : std::uint64_t(psi.chi(int(j) - 1));
            const std::uint64_t expect_cols = (j + 1 == L) ? 1 : std::uint64_t(psi.chi(int(j)));
            if (rows != expect_rows || cols != expect_cols)
                throw CheckpointError("checkpoint tensor shape inconsistent");
            Eigen::MatrixXcd G(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            f.read(reinterpret_cast<char*>(G.data()),
                   std::streamsize(sizeof(std::complex<double>) * rows * cols));
            if (!f) throw CheckpointError("checkpoint truncated");
            psi.gamma[j][std::size_t(s)] = std::move(G);
        }
    }
    return psi;
}

} // namespace sat::mps
