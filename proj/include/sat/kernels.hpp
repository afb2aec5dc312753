#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Update kernels behind the evolution and measurement loops. Each kernel has
// a serial reference implementation and a parallel one; the parallel path
// partitions work into disjoint writes and reduces in a fixed order, so both
// produce bit-identical results. The benchmark target times them against each
// other and checks that equality.

namespace sat::mps {
struct MpsState;
struct BondGates;
} // namespace sat::mps

namespace sat::kernels {

enum class Exec { serial, parallel };

// Worker threads for the parallel path: SAT_WORKERS if set, else the OpenMP
// default; 1 when built without OpenMP.
int worker_count();
Exec default_exec();

struct TruncationPolicy {
    int chi_max = 128;
    double discard_tol = 1e-8; // discarded Schmidt weight per cut, relative
};

struct SweepStats {
    double truncation_weight = 0.0; // summed over bonds
    double max_step_weight = 0.0;   // worst single cut
    int max_chi = 1;
};

// Applies one two-site gate in canonical form with a charge-blocked singular
// value decomposition; returns the discarded relative Schmidt weight.
double apply_bond_gate(mps::MpsState& psi, int bond, const Eigen::MatrixXcd& gate,
                       const TruncationPolicy& pol);

// Applies the gate on every bond of the given parity (0 = even bonds).
SweepStats sweep_parity(mps::MpsState& psi, const mps::BondGates& gates, int parity, bool half,
                        const TruncationPolicy& pol, Exec exec);
SweepStats sweep_parity_serial(mps::MpsState& psi, const mps::BondGates& gates, int parity,
                               bool half, const TruncationPolicy& pol);

// One-body density matrix <b_i^dag b_j> over lattice occupations (the
// molecule register is traced out). O(L^2 chi^3).
Eigen::MatrixXcd spdm(const mps::MpsState& psi, Exec exec);
Eigen::MatrixXcd spdm_serial(const mps::MpsState& psi);

// out[s] = V exp(-i lam t_s) C0 for each requested time; the free-propagation
// inner loop of the determinant engine.
void phase_samples(const Eigen::MatrixXd& V, const Eigen::VectorXd& lam,
                   const Eigen::MatrixXcd& C0, const std::vector<double>& times,
                   std::vector<Eigen::MatrixXcd>& out, Exec exec);
void phase_samples_serial(const Eigen::MatrixXd& V, const Eigen::VectorXd& lam,
                          const Eigen::MatrixXcd& C0, const std::vector<double>& times,
                          std::vector<Eigen::MatrixXcd>& out);

} // namespace sat::kernels
