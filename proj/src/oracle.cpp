#include "sat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "sat/errors.hpp"
#include "sat/fermiflow.hpp"

namespace sat::oracle {

namespace {
constexpr std::size_t kSectorCap = 2'000'000;
constexpr int kDenseCap = 2048;
} // namespace

std::uint64_t SectorBasis::pack(const std::vector<int>& occ, bool mol) {
    std::uint64_t key = mol ? (std::uint64_t(1) << 63) : 0;
    for (std::size_t j = 0; j < occ.size(); ++j) key |= std::uint64_t(occ[j]) << (3 * j);
    return key;
}

void SectorBasis::unpack(std::uint64_t key, std::vector<int>& occ, bool& mol) const {
    occ.assign(std::size_t(L), 0);
    mol = (key >> 63) != 0;
    for (int j = 0; j < L; ++j) occ[std::size_t(j)] = int((key >> (3 * j)) & 7u);
}

int SectorBasis::find(const std::vector<int>& occ, bool mol) const {
    const auto it = index.find(pack(occ, mol));
    return it == index.end() ? -1 : it->second;
}

SectorBasis build_sector(int L, int impurity, int n_max, int N) {
    if (L < 1 || L > 21) throw DimensionError("sector basis: 1..21 sites supported");
    if (n_max < 1 || n_max > 7) throw DimensionError("sector basis: n_max 1..7 supported");
    if (impurity >= L) throw ConfigError("sector basis: impurity index out of range");
    if (N < 0) throw ConfigError("sector basis: negative atom number");

    SectorBasis basis;
    basis.L = L;
    basis.n_max = n_max;
    basis.N = N;
    basis.impurity = impurity;

    std::vector<int> occ(std::size_t(L), 0);
    const int mol_max = (impurity >= 0 && N >= 1) ? 1 : 0;
    for (int mol = 0; mol <= mol_max; ++mol) {
        const int n_lattice = N - mol;
        if (n_lattice < 0 || n_lattice > L * n_max) continue;
        std::function<void(int, int)> rec = [&](int j, int rem) {
            if (j == L) {
                if (rem == 0) {
                    basis.keys.push_back(SectorBasis::pack(occ, mol != 0));
                    if (basis.keys.size() > kSectorCap)
                        throw DimensionError("sector basis exceeds size cap");
                }
                return;
            }
            if (rem > (L - j) * n_max) return;
            for (int n = 0; n <= std::min(n_max, rem); ++n) {
                occ[std::size_t(j)] = n;
                rec(j + 1, rem - n);
            }
            occ[std::size_t(j)] = 0;
        };
        rec(0, n_lattice);
    }
    if (basis.keys.empty()) throw OverfillError("sector basis: no states with this atom number");
    basis.index.reserve(basis.keys.size() * 2);
    for (std::size_t i = 0; i < basis.keys.size(); ++i)
        basis.index.emplace(basis.keys[i], int(i));
    return basis;
}

SectorBasis build_sector(const model::LatticeGeometry& geom, int n_max) {
    return build_sector(geom.total_sites(), geom.impurity_index(), n_max, geom.N);
}

SectorBasis build_box_sector(int M, int N, int n_max) { return build_sector(M, -1, n_max, N); }

Eigen::SparseMatrix<double> exact_hamiltonian(const SectorBasis& basis,
                                              const model::ChannelParams& ch) {
    ch.validate();
    const int dim = int(basis.dim());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(dim) * std::size_t(2 * basis.L + 2));

    std::vector<int> occ;
    bool mol = false;
    for (int src = 0; src < dim; ++src) {
        basis.unpack(basis.keys[std::size_t(src)], occ, mol);
        double diag = 0.0;
        for (int j = 0; j < basis.L; ++j) {
            const double n = occ[std::size_t(j)];
            diag += 0.5 * ch.U_bb * n * (n - 1.0);
        }
        if (basis.impurity >= 0) {
            const double n0 = occ[std::size_t(basis.impurity)];
            diag += mol ? (-ch.Delta + ch.U_bm * n0) : ch.U_qb * n0;
        }
        if (diag != 0.0) trip.emplace_back(src, src, diag);

        for (int j = 0; j + 1 < basis.L; ++j)
            for (int dir = 0; dir < 2; ++dir) {
                const int from = dir == 0 ? j : j + 1;
                const int to = dir == 0 ? j + 1 : j;
                if (occ[std::size_t(from)] < 1 || occ[std::size_t(to)] >= basis.n_max) continue;
                const double amp = -ch.J * std::sqrt(double(occ[std::size_t(from)]) *
                                                     double(occ[std::size_t(to)] + 1));
                occ[std::size_t(from)] -= 1;
                occ[std::size_t(to)] += 1;
                const int tgt = basis.find(occ, mol);
                occ[std::size_t(from)] += 1;
                occ[std::size_t(to)] -= 1;
                if (tgt < 0) throw ValidationError("exact_hamiltonian: hop leaves the sector");
                trip.emplace_back(tgt, src, amp);
            }

        if (basis.impurity >= 0 && ch.Omega != 0.0) {
            const int i0 = basis.impurity;
            if (!mol && occ[std::size_t(i0)] >= 1) {
                const double amp = ch.Omega * std::sqrt(double(occ[std::size_t(i0)]));
                occ[std::size_t(i0)] -= 1;
                const int tgt = basis.find(occ, true);
                occ[std::size_t(i0)] += 1;
                if (tgt >= 0) trip.emplace_back(tgt, src, amp);
            } else if (mol && occ[std::size_t(i0)] + 1 <= basis.n_max) {
                const double amp = ch.Omega * std::sqrt(double(occ[std::size_t(i0)] + 1));
                occ[std::size_t(i0)] += 1;
                const int tgt = basis.find(occ, false);
                occ[std::size_t(i0)] -= 1;
                if (tgt >= 0) trip.emplace_back(tgt, src, amp);
            }
        }
    }
    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

ExactPropagator::ExactPropagator(const SectorBasis& basis, const model::ChannelParams& ch,
                                 int krylov_dim)
    : h_(exact_hamiltonian(basis, ch)), m_(std::max(2, krylov_dim)) {
    dense_ = int(basis.dim()) <= kDenseCap;
    if (dense_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(h_)};
        if (eig.info() != Eigen::Success)
            throw ConvergenceError("propagator: eigendecomposition failed");
        evec_ = eig.eigenvectors();
        eval_ = eig.eigenvalues();
    } else {
        hc_ = h_.cast<std::complex<double>>();
    }
}

void ExactPropagator::advance(Eigen::VectorXcd& psi, double dt) const {
    if (psi.size() != h_.rows()) throw DimensionError("propagator: state dimension mismatch");
    if (dt == 0.0) return;
    if (dense_) {
        const Eigen::VectorXd a = evec_.transpose() * psi.real();
        const Eigen::VectorXd b = evec_.transpose() * psi.imag();
        Eigen::VectorXcd c(a.size());
        c.real() = a;
        c.imag() = b;
        for (Eigen::Index r = 0; r < c.size(); ++r)
            c[r] *= std::exp(std::complex<double>(0.0, -eval_[r] * dt));
        psi.real() = evec_ * c.real();
        psi.imag() = evec_ * c.imag();
        return;
    }

    const double nrm0 = psi.norm();
    if (nrm0 < 1e-300) return;
    const int m = std::min<int>(m_, int(psi.size()));
    Eigen::MatrixXcd Q(psi.size(), m);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    Q.col(0) = psi / nrm0;
    int m_eff = m;
    for (int l = 0; l < m; ++l) {
        Eigen::VectorXcd w = hc_ * Q.col(l);
        alpha[l] = std::real(Q.col(l).dot(w));
        w -= alpha[l] * Q.col(l);
        if (l > 0) w -= beta[l - 1] * Q.col(l - 1);
        // Full reorthogonalization keeps the Krylov basis clean.
        for (int pass = 0; pass < 2; ++pass)
            for (int p = 0; p <= l; ++p) w -= Q.col(p).dot(w) * Q.col(p);
        if (l + 1 == m) break;
        const double b = w.norm();
        if (b < 1e-12) {
            m_eff = l + 1;
            break;
        }
        beta[l] = b;
        Q.col(l + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_eff, m_eff);
    for (int l = 0; l < m_eff; ++l) {
        T(l, l) = alpha[l];
        if (l + 1 < m_eff) T(l, l + 1) = T(l + 1, l) = beta[l];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
    Eigen::VectorXcd z(m_eff);
    for (int r = 0; r < m_eff; ++r)
        z[r] = std::exp(std::complex<double>(0.0, -eig.eigenvalues()[r] * dt)) *
               eig.eigenvectors()(0, r);
    Eigen::VectorXcd u(m_eff);
    u.real() = eig.eigenvectors() * z.real();
    u.imag() = eig.eigenvectors() * z.imag();
    psi = nrm0 * (Q.leftCols(m_eff) * u);
}

double ExactPropagator::energy(const Eigen::VectorXcd& psi) const {
    const Eigen::VectorXd hr = h_ * psi.real();
    const Eigen::VectorXd hi = h_ * psi.imag();
    return psi.real().dot(hr) + psi.imag().dot(hi);
}

double density(const SectorBasis& basis, const Eigen::VectorXcd& psi, int site) {
    if (site < 0 || site >= basis.L) throw DimensionError("density: site out of range");
    double val = 0.0;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const int n = int((basis.keys[i] >> (3 * site)) & 7u);
        if (n != 0) val += double(n) * std::norm(psi[Eigen::Index(i)]);
    }
    return val;
}

double molecule_population(const SectorBasis& basis, const Eigen::VectorXcd& psi) {
    double val = 0.0;
    for (std::size_t i = 0; i < basis.dim(); ++i)
        if (basis.keys[i] >> 63) val += std::norm(psi[Eigen::Index(i)]);
    return val;
}

double n_right_of(const SectorBasis& basis, const Eigen::VectorXcd& psi, int impurity_site) {
    double val = 0.0;
    for (int j = impurity_site + 1; j < basis.L; ++j) val += density(basis, psi, j);
    return val;
}

Eigen::MatrixXcd spdm(const SectorBasis& basis, const Eigen::VectorXcd& psi) {
    const int L = basis.L;
    if (basis.N < 1) return Eigen::MatrixXcd::Zero(L, L);
    const SectorBasis low = build_sector(L, basis.impurity, basis.n_max, basis.N - 1);
    Eigen::MatrixXcd lowered = Eigen::MatrixXcd::Zero(Eigen::Index(low.dim()), L);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const std::uint64_t key = basis.keys[i];
        const std::complex<double> a = psi[Eigen::Index(i)];
        if (a == 0.0) continue;
        for (int j = 0; j < L; ++j) {
            const int n = int((key >> (3 * j)) & 7u);
            if (n == 0) continue;
            const auto it = low.index.find(key - (std::uint64_t(1) << (3 * j)));
            if (it == low.index.end()) throw ValidationError("spdm: lowered state missing");
            lowered(it->second, j) += std::sqrt(double(n)) * a;
        }
    }
    return lowered.adjoint() * lowered;
}

BoxGroundState ground_state_box(const model::ChannelParams& ch, int M, int N) {
    ch.validate();
    BoxGroundState out;
    out.basis = build_box_sector(M, N, ch.n_max);
    if (out.basis.dim() > 5000)
        throw DimensionError("ground_state_box: sector too large for dense diagonalization");
    const Eigen::MatrixXd h = Eigen::MatrixXd(exact_hamiltonian(out.basis, ch));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success)
        throw ConvergenceError("ground_state_box: eigendecomposition failed");
    out.energy = eig.eigenvalues()[0];
    Eigen::VectorXd v = eig.eigenvectors().col(0);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    out.amp = v.cast<std::complex<double>>();
    return out;
}

Eigen::VectorXcd sector_to_product(const SectorBasis& basis, const Eigen::VectorXcd& psi,
                                   const std::vector<mps::SiteBasis>& bases) {
    if (int(bases.size()) != basis.L)
        throw DimensionError("sector_to_product: chain length mismatch");
    std::size_t dim = 1;
    std::vector<std::size_t> stride(bases.size());
    for (int j = basis.L - 1; j >= 0; --j) {
        stride[std::size_t(j)] = dim;
        dim *= std::size_t(bases[std::size_t(j)].dim());
        if (dim > (std::size_t(1) << 28)) throw DimensionError("sector_to_product: too large");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(dim));
    std::vector<int> occ;
    bool mol = false;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        basis.unpack(basis.keys[i], occ, mol);
        std::size_t idx = 0;
        for (int j = 0; j < basis.L; ++j) {
            const auto& sb = bases[std::size_t(j)];
            const int s = (j == basis.impurity) ? sb.index_of(occ[std::size_t(j)], mol)
                                                : occ[std::size_t(j)];
            idx += std::size_t(s) * stride[std::size_t(j)];
        }
        out[Eigen::Index(idx)] = psi[Eigen::Index(i)];
    }
    return out;
}

Eigen::VectorXcd embed_box_in_sector(const BoxGroundState& box, const SectorBasis& full) {
    if (full.impurity != box.basis.L)
        throw DimensionError("embed_box_in_sector: impurity must sit just right of the box");
    if (full.N != box.basis.N || full.n_max != box.basis.n_max)
        throw DimensionError("embed_box_in_sector: sector mismatch");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(full.dim()));
    std::vector<int> occ;
    bool mol = false;
    std::vector<int> occ_full(std::size_t(full.L), 0);
    for (std::size_t i = 0; i < box.basis.dim(); ++i) {
        box.basis.unpack(box.basis.keys[i], occ, mol);
        std::fill(occ_full.begin(), occ_full.end(), 0);
        std::copy(occ.begin(), occ.end(), occ_full.begin());
        const int tgt = full.find(occ_full, false);
        if (tgt < 0) throw ValidationError("embed_box_in_sector: state missing in full sector");
        out[tgt] = box.amp[Eigen::Index(i)];
    }
    return out;
}

WavepacketResult wavepacket_transmission(double k0, const model::ChannelParams& ch,
                                         int lattice_sites, double sigma) {
    ch.validate();
    if (!(sigma >= 40.0)) throw ConfigError("wavepacket: packet width must be at least 40 sites");
    if (!(k0 >= 0.25 && k0 <= std::numbers::pi - 0.25))
        throw ConfigError("wavepacket: carrier too close to the band edge for a clean run");

    int M_left, M_right;
    if (lattice_sites <= 0) {
        // Margins of ~5 sigma keep every tail systematically below 1e-6.
        M_left = int(std::ceil(10.6 * sigma));
        M_right = int(std::ceil(10.4 * sigma));
    } else {
        if (double(lattice_sites) < 10.0 * sigma)
            throw ConfigError("wavepacket: lattice must be at least 10x the packet width");
        M_left = lattice_sites / 2;
        M_right = lattice_sites - M_left - 1;
    }
    const model::LatticeGeometry geom{M_left, M_right, 1};
    const auto sys = fermi::build_system(ch, geom);
    const int L = geom.total_sites();
    const int imp = geom.impurity_index();
    const int dim = sys.dim();

    const double d = (lattice_sites <= 0) ? 5.4 * sigma : 0.5 * double(M_left);
    const double c = (lattice_sites <= 0) ? 5.2 * sigma : 0.5 * double(std::min(M_left, M_right));
    const int x0 = imp - int(std::lround(d));
    const double v = model::group_velocity(k0, ch);
    const double t_stop = (double(imp - x0) + c) / v;

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    for (int j = 0; j < L; ++j) {
        const double dx = double(j - x0);
        psi[j] = std::polar(std::exp(-dx * dx / (4.0 * sigma * sigma)), k0 * double(j));
    }
    psi.normalize();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.h);
    if (eig.info() != Eigen::Success)
        throw ConvergenceError("wavepacket: eigendecomposition failed");
    {
        const Eigen::VectorXd a = eig.eigenvectors().transpose() * psi.real();
        const Eigen::VectorXd b = eig.eigenvectors().transpose() * psi.imag();
        Eigen::VectorXcd cm(dim);
        cm.real() = a;
        cm.imag() = b;
        for (int r = 0; r < dim; ++r)
            cm[r] *= std::exp(std::complex<double>(0.0, -eig.eigenvalues()[r] * t_stop));
        psi.real() = eig.eigenvectors() * cm.real();
        psi.imag() = eig.eigenvectors() * cm.imag();
    }

    WavepacketResult out;
    out.lattice_sites = L;
    out.t_stop = t_stop;
    out.norm_error = std::abs(psi.norm() - 1.0);
    for (int j = 0; j < L; ++j) {
        const double w = std::norm(psi[j]);
        if (j < imp)
            out.reflected += w;
        else if (j > imp)
            out.transmitted += w;
        else
            out.on_impurity = w;
    }
    out.molecule = std::norm(psi[dim - 1]);

    double edges = 0.0;
    for (int j = 0; j < 3; ++j) edges += std::norm(psi[j]) + std::norm(psi[L - 1 - j]);
    if (edges > 5e-3)
        throw BoundaryContaminationError(
            "wavepacket: packet reached the lattice boundary (edge weight " +
            std::to_string(edges) + ")");
    return out;
}

} // namespace sat::oracle
