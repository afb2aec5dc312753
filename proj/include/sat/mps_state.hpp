#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sat/site_basis.hpp"

// Canonical-form matrix product state over the chain bases. Bond b sits
// between sites b and b+1; lambda[b] holds its Schmidt values (sum of squares
// kept at 1) and bond_atoms[b] the probe-atom count to the left of the cut for
// each Schmidt vector. Charge labels make every tensor block-sparse in the
// conserved atom number, which the update kernels exploit.

namespace sat::mps {

struct MpsState {
    std::vector<SiteBasis> bases;
    std::vector<std::vector<Eigen::MatrixXcd>> gamma; // [site][phys] chiL x chiR
    std::vector<Eigen::VectorXd> lambda;              // internal bonds, size L-1
    std::vector<std::vector<int>> bond_atoms;         // parallel to lambda
    int total_atoms = 0;
    double truncation_accumulated = 0.0;

    int size() const { return int(bases.size()); }
    int chi(int bond) const {
        if (bond < 0 || bond >= int(lambda.size())) return 1;
        return int(lambda[std::size_t(bond)].size());
    }
    int max_chi() const;
};

// |local_states[0], local_states[1], ...> as a chi = 1 state.
MpsState product_state(const std::vector<SiteBasis>& bases,
                       const std::vector<int>& local_states);

// Dense amplitude vector, site 0 slowest index. Guarded against blowup.
Eigen::VectorXcd to_dense(const MpsState& psi, std::size_t max_dim = (1u << 24));

// Exact charge-blocked Schmidt decomposition of a dense vector. The vector
// must carry a sharp total atom number; mixed-charge amplitudes are rejected.
MpsState from_dense(const std::vector<SiteBasis>& bases, const Eigen::VectorXcd& amp,
                    double charge_tol = 1e-12);

std::complex<double> overlap(const MpsState& a, const MpsState& b);
double norm_value(const MpsState& psi);

// <op_j> with op in the site-j basis; uses the mixed-canonical center tensor.
std::complex<double> expect_site(const MpsState& psi, int site, const Eigen::MatrixXd& op);

// <h_b> for a two-site operator on bond b, indexed (s*d_right + t).
std::complex<double> expect_bond(const MpsState& psi, int bond, const Eigen::MatrixXd& h2);

// Largest violation of the left/right orthonormality conditions; ~1e-12 for a
// healthy state, grows if the gauge degrades.
double canonical_defect(const MpsState& psi);

// Multiplies gamma entries by exp(i k0 j atoms(s)); exact momentum boost.
void boost(MpsState& psi, double k0);

void save_checkpoint(const MpsState& psi, const std::string& path);
MpsState load_checkpoint(const std::string& path);

} // namespace sat::mps
