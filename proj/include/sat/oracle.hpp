#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sat/model.hpp"
#include "sat/site_basis.hpp"

// Brute-force reference engine: dense state vectors in one atom-number sector
// with exact (eigendecomposition or Krylov) propagation. Slow on purpose and
// size-capped; every other engine is validated against it.

namespace sat::oracle {

// Basis of the N-atom sector over L lattice sites; site `impurity` (if >= 0)
// carries the q/m register, and a bound molecule counts one atom.
struct SectorBasis {
    int L = 0;
    int n_max = 1;
    int N = 0;
    int impurity = -1;
    std::vector<std::uint64_t> keys;
    std::unordered_map<std::uint64_t, int> index;

    std::size_t dim() const { return keys.size(); }
    static std::uint64_t pack(const std::vector<int>& occ, bool mol);
    void unpack(std::uint64_t key, std::vector<int>& occ, bool& mol) const;
    int find(const std::vector<int>& occ, bool mol) const;
};

SectorBasis build_sector(int L, int impurity, int n_max, int N);
SectorBasis build_sector(const model::LatticeGeometry& geom, int n_max);
SectorBasis build_box_sector(int M, int N, int n_max);

Eigen::SparseMatrix<double> exact_hamiltonian(const SectorBasis& basis,
                                              const model::ChannelParams& ch);

class ExactPropagator {
public:
    ExactPropagator(const SectorBasis& basis, const model::ChannelParams& ch,
                    int krylov_dim = 24);
    void advance(Eigen::VectorXcd& psi, double dt) const;
    const Eigen::SparseMatrix<double>& hamiltonian() const { return h_; }
    double energy(const Eigen::VectorXcd& psi) const;

private:
    Eigen::SparseMatrix<double> h_;
    Eigen::SparseMatrix<std::complex<double>> hc_;
    Eigen::MatrixXd evec_;
    Eigen::VectorXd eval_;
    bool dense_ = false;
    int m_ = 24;
};

double density(const SectorBasis& basis, const Eigen::VectorXcd& psi, int site);
double molecule_population(const SectorBasis& basis, const Eigen::VectorXcd& psi);
double n_right_of(const SectorBasis& basis, const Eigen::VectorXcd& psi, int impurity_site);
Eigen::MatrixXcd spdm(const SectorBasis& basis, const Eigen::VectorXcd& psi);

struct BoxGroundState {
    SectorBasis basis;
    Eigen::VectorXcd amp;
    double energy = 0.0;
};
// Dense diagonalization of the source box; unique by Perron-Frobenius.
BoxGroundState ground_state_box(const model::ChannelParams& ch, int M, int N);

// Lifts a sector vector to tensor-product amplitudes over the given chain
// (box states are padded with an empty impurity and drain).
Eigen::VectorXcd sector_to_product(const SectorBasis& basis, const Eigen::VectorXcd& psi,
                                   const std::vector<mps::SiteBasis>& bases);
Eigen::VectorXcd embed_box_in_sector(const BoxGroundState& box, const SectorBasis& full);

struct WavepacketResult {
    double transmitted = 0.0;
    double reflected = 0.0;
    double on_impurity = 0.0;
    double molecule = 0.0; // residue still bound when the run stops
    double norm_error = 0.0;
    int lattice_sites = 0;
    double t_stop = 0.0;
};

// Gaussian packet launched at the impurity, evolved by one exact
// eigendecomposition step to the clearance time. lattice_sites = 0 sizes the
// lattice for sub-1e-6 tail systematics.
WavepacketResult wavepacket_transmission(double k0, const model::ChannelParams& ch,
                                         int lattice_sites = 0, double sigma = 40.0);

} // namespace sat::oracle
