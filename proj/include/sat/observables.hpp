#pragma once

#include <Eigen/Dense>

#include "sat/fermiflow.hpp"
#include "sat/kernels.hpp"
#include "sat/model.hpp"
#include "sat/mps_state.hpp"
#include "sat/tebd.hpp"

// Measurement layer shared by both engines: one-body density matrices over
// lattice occupations (the molecule register never appears as a lattice
// index), momentum distributions on the discrete grid k = 2 pi q / L, natural
// orbitals, and the two-channel readout comparison.

namespace sat::obs {

Eigen::MatrixXcd spdm_lattice(const mps::MpsState& psi,
                              kernels::Exec exec = kernels::default_exec());
Eigen::MatrixXcd spdm_lattice(const fermi::FermiSeaState& state,
                              const fermi::SingleParticleSystem& sys);

Eigen::VectorXd site_densities(const Eigen::MatrixXcd& rho);

double n_right(const mps::MpsState& psi, const model::LatticeGeometry& geom);

struct MomentumDistribution {
    Eigen::VectorXd k;  // ascending, 2 pi q / L with q = -floor(L/2) .. ceil(L/2)-1
    Eigen::VectorXd nk;
};
MomentumDistribution momentum_distribution(const Eigen::MatrixXcd& rho);

struct CondensateModes {
    Eigen::VectorXd lambdas; // descending
    Eigen::MatrixXcd modes;  // columns, phase-fixed: largest component real positive
    bool degenerate = false; // leading pair closer than 1e-10 relative
};
CondensateModes condensate_modes(const Eigen::MatrixXcd& rho, int n_modes);

struct ChannelReadout {
    double n_right = 0.0;
    double cond_frac = 0.0;     // lambda_1 / N
    double peak_contrast = 0.0; // (max nk - mean nk) / (max + mean)
};

struct ReadoutReport {
    ChannelReadout up, down;
    double n_right_separation = 0.0;
    double cond_frac_contrast = 0.0; // (up - down) / (up + down)
    double pooled_sigma = 0.0;       // trailing-window n_right fluctuation
    double score = 0.0;              // separation / pooled fluctuation
};

// Compares two evolutions of the same lattice at a common sample time; grids
// lacking that time raise AlignmentError.
ReadoutReport readout_visibility(const tebd::QuenchTrajectory& up,
                                 const tebd::QuenchTrajectory& down, double t_report);

} // namespace sat::obs
