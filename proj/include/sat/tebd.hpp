#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sat/gates.hpp"
#include "sat/kernels.hpp"
#include "sat/model.hpp"
#include "sat/mps_state.hpp"

// Time evolution drivers: imaginary-time ground-state preparation in the
// source box (walls up, conversion off) and the real-time quench with the
// impurity coupled. Second-order even/odd splitting throughout.

namespace sat::tebd {

struct GroundStateOptions {
    int chi_max = 256;
    double discard_tol = 1e-12;
    double energy_tol_per_site = 1e-8; // per-sweep energy change, units of J
    int check_every = 10;
    int max_sweeps_per_stage = 3000;
    std::vector<double> stages = {0.3, 0.1, 0.05, 0.02, 0.01, 0.005};
    kernels::Exec exec = kernels::default_exec();
};

struct GroundStateResult {
    mps::MpsState state; // full chain, box state embedded left of the impurity
    double energy = 0.0; // box energy
    int sweeps = 0;
    double final_delta = 0.0;
};

GroundStateResult ground_state(const model::ChannelParams& ch,
                               const model::LatticeGeometry& geom,
                               const GroundStateOptions& opts = {});

struct RampSchedule {
    bool enabled = false;
    double omega_from = 0.0;
    double t_ramp = 0.0;
};

struct EvolveOptions {
    double dt = 0.02;
    double t_final = 10.0;
    kernels::TruncationPolicy trunc{};
    double obs_interval = 0.1;  // units of 1/J
    double spdm_interval = 0.0; // 0 disables density-matrix snapshots
    double trunc_budget = 1e-3; // accumulated discarded weight before abort
    RampSchedule ramp{};
    bool record_energy = false;
    bool record_fidelity = false; // |<psi(0)|psi(t)>|, cheap only at small chi
    kernels::Exec exec = kernels::default_exec();
};

struct ObsSample {
    double t = 0.0;
    double n_left = 0.0, n_imp = 0.0, n_right = 0.0, n_mol = 0.0, n_total = 0.0;
    double trunc_acc = 0.0;
    int chi = 1;
    double energy = 0.0;   // NaN unless recorded
    double fidelity = 0.0; // NaN unless recorded
};

struct SpdmSnapshot {
    double t = 0.0;
    Eigen::MatrixXcd rho;
};

enum class RunStatus { ok, truncation_budget_exceeded };

struct QuenchTrajectory {
    std::vector<ObsSample> samples;
    std::vector<SpdmSnapshot> snapshots;
    RunStatus status = RunStatus::ok;
    double truncation_total = 0.0;
    int max_chi = 1;
};

// Evolves psi in place under the quench Hamiltonian; the trajectory carries
// the sampled observables. A trajectory cut short by the truncation budget is
// returned with the warning status rather than thrown away.
QuenchTrajectory evolve(mps::MpsState& psi, const model::ChannelParams& ch,
                        const model::LatticeGeometry& geom, const EvolveOptions& opts);

} // namespace sat::tebd
