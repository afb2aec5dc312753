#include "sat/tebd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sat/errors.hpp"

namespace sat::tebd {

namespace {

double chain_energy(const mps::MpsState& psi, const mps::BondGates& gates) {
    double e = 0.0;
    for (int b = 0; b + 1 < psi.size(); ++b)
        e += mps::expect_bond(psi, b, gates.h[std::size_t(b)]).real();
    return e;
}

// Round-robin filling; validate() guarantees ceil(N/M) <= n_max.
std::vector<int> initial_occupations(int M, int N) {
    std::vector<int> occ(std::size_t(M), N / M);
    for (int j = 0; j < N % M; ++j) occ[std::size_t(j)] += 1;
    return occ;
}

mps::MpsState embed_box(const mps::MpsState& box, const model::ChannelParams& ch,
                        const model::LatticeGeometry& geom) {
    const auto bases = mps::chain_bases(geom, ch.n_max);
    mps::MpsState psi;
    psi.bases = bases;
    const int L = geom.total_sites();
    psi.gamma.resize(std::size_t(L));
    psi.lambda.assign(std::size_t(L - 1), Eigen::VectorXd::Ones(1));
    psi.bond_atoms.assign(std::size_t(L - 1), {geom.N});
    psi.total_atoms = geom.N;
    for (int j = 0; j < geom.M_left; ++j) {
        psi.gamma[std::size_t(j)] = box.gamma[std::size_t(j)];
        if (j < geom.M_left - 1) {
            psi.lambda[std::size_t(j)] = box.lambda[std::size_t(j)];
            psi.bond_atoms[std::size_t(j)] = box.bond_atoms[std::size_t(j)];
        }
    }
    // The box state ends on a dimension-1 bond; impurity and drain sites are
    // appended as |0,q> and |0> with all charge already left of each cut.
    for (int j = geom.M_left; j < L; ++j) {
        const auto& basis = bases[std::size_t(j)];
        auto& g = psi.gamma[std::size_t(j)];
        g.assign(std::size_t(basis.dim()), Eigen::MatrixXcd::Zero(1, 1));
        g[0](0, 0) = 1.0; // |0> bulk, |0,q> on the impurity
    }
    return psi;
}

} // namespace

GroundStateResult ground_state(const model::ChannelParams& ch,
                               const model::LatticeGeometry& geom,
                               const GroundStateOptions& opts) {
    ch.validate();
    geom.validate(ch);
    const int M = geom.M_left;
    const int N = geom.N;
    const auto box = mps::box_bases(M, ch.n_max);

    GroundStateResult out;
    // A completely filled box (or a single site) is the whole sector.
    if (N == M * ch.n_max || M == 1) {
        const auto occ = initial_occupations(M, N);
        const mps::MpsState prod = mps::product_state(box, occ);
        double e = 0.0;
        for (int j = 0; j < M; ++j)
            e += 0.5 * ch.U_bb * double(occ[std::size_t(j)]) * double(occ[std::size_t(j)] - 1);
        out.state = embed_box(prod, ch, geom);
        out.energy = e;
        return out;
    }

    mps::MpsState psi = mps::product_state(box, initial_occupations(M, N));
    kernels::TruncationPolicy pol;
    pol.chi_max = opts.chi_max;
    pol.discard_tol = opts.discard_tol;

    int sweeps_total = 0;
    double energy = std::numeric_limits<double>::quiet_NaN();
    double delta_per_sweep = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t stage = 0; stage < opts.stages.size(); ++stage) {
        const bool last = stage + 1 == opts.stages.size();
        const double dtau = opts.stages[stage];
        const auto gates = mps::build_gates(box, ch, dtau, true);
        double e_prev = chain_energy(psi, gates);
        const double tol =
            opts.energy_tol_per_site * ch.J * double(M) * (last ? 1.0 : 10.0);
        bool settled = false;
        for (int sweep = 0; sweep < opts.max_sweeps_per_stage; ++sweep) {
            kernels::sweep_parity(psi, gates, 0, true, pol, opts.exec);
            kernels::sweep_parity(psi, gates, 1, false, pol, opts.exec);
            kernels::sweep_parity(psi, gates, 0, true, pol, opts.exec);
            ++sweeps_total;
            if ((sweep + 1) % opts.check_every == 0) {
                const double e_now = chain_energy(psi, gates);
                delta_per_sweep = std::abs(e_now - e_prev) / double(opts.check_every);
                e_prev = e_now;
                if (delta_per_sweep <= tol) {
                    settled = true;
                    break;
                }
            }
        }
        energy = e_prev;
        if (last && !settled)
            throw ConvergenceError("ground_state: energy drift " + std::to_string(delta_per_sweep) +
                                   " per sweep after " + std::to_string(sweeps_total) +
                                   " sweeps exceeds tolerance " + std::to_string(tol));
    }

    psi.truncation_accumulated = 0.0;
    out.state = embed_box(psi, ch, geom);
    out.energy = energy;
    out.sweeps = sweeps_total;
    out.final_delta = delta_per_sweep;
    return out;
}

namespace {

ObsSample measure(const mps::MpsState& psi, const model::LatticeGeometry& geom, double t,
                  const mps::BondGates& gates, bool record_energy, const mps::MpsState* init) {
    ObsSample s;
    s.t = t;
    const int L = psi.size();
    const int imp = geom.impurity_index();
    for (int j = 0; j < L; ++j) {
        const auto& basis = psi.bases[std::size_t(j)];
        const double n = mps::expect_site(psi, j, basis.number_op()).real();
        if (j < imp)
            s.n_left += n;
        else if (j > imp)
            s.n_right += n;
        else
            s.n_imp = n;
        s.n_total += n;
    }
    s.n_mol = mps::expect_site(psi, imp, psi.bases[std::size_t(imp)].molecule_op()).real();
    s.n_total += s.n_mol;
    s.trunc_acc = psi.truncation_accumulated;
    s.chi = psi.max_chi();
    s.energy = record_energy ? chain_energy(psi, gates) : std::numeric_limits<double>::quiet_NaN();
    s.fidelity = init ? std::abs(mps::overlap(*init, psi)) : std::numeric_limits<double>::quiet_NaN();
    return s;
}

} // namespace

QuenchTrajectory evolve(mps::MpsState& psi, const model::ChannelParams& ch,
                        const model::LatticeGeometry& geom, const EvolveOptions& opts) {
    ch.validate();
    geom.validate(ch);
    if (psi.size() != geom.total_sites()) throw DimensionError("evolve: state/geometry mismatch");
    if (!psi.bases[std::size_t(geom.impurity_index())].is_impurity())
        throw DimensionError("evolve: impurity site misplaced");
    if (!(opts.dt > 0.0)) throw ConfigError("evolve: dt must be positive");
    if (opts.t_final < 0.0) throw ConfigError("evolve: t_final must be nonnegative");

    const long n_steps = std::llround(opts.t_final / opts.dt);
    const long obs_every = std::max<long>(1, std::llround(opts.obs_interval / opts.dt));
    const long spdm_every =
        opts.spdm_interval > 0.0 ? std::max<long>(1, std::llround(opts.spdm_interval / opts.dt)) : 0;

    auto omega_at = [&](double t) {
        if (!opts.ramp.enabled || opts.ramp.t_ramp <= 0.0) return ch.Omega;
        const double x = std::min(1.0, std::max(0.0, t / opts.ramp.t_ramp));
        return opts.ramp.omega_from + (ch.Omega - opts.ramp.omega_from) * x;
    };

    const auto& bases = psi.bases;
    auto gates = mps::build_gates(bases, ch, opts.dt, false);
    bool ramp_live = opts.ramp.enabled && opts.ramp.t_ramp > 0.0;

    const mps::MpsState init = opts.record_fidelity ? psi : mps::MpsState{};
    const mps::MpsState* init_ptr = opts.record_fidelity ? &init : nullptr;
    const double acc_start = psi.truncation_accumulated;

    QuenchTrajectory traj;
    traj.samples.push_back(measure(psi, geom, 0.0, gates, opts.record_energy, init_ptr));
    if (spdm_every > 0)
        traj.snapshots.push_back({0.0, kernels::spdm(psi, opts.exec)});

    for (long s = 0; s < n_steps; ++s) {
        const double t_now = double(s) * opts.dt;
        if (ramp_live) {
            mps::set_conversion_amplitude(gates, bases, ch, omega_at(t_now + 0.5 * opts.dt));
            if (t_now + opts.dt >= opts.ramp.t_ramp) {
                // Final rebuild pins the target value exactly, then stays put.
                mps::set_conversion_amplitude(gates, bases, ch, ch.Omega);
                ramp_live = false;
            }
        }
        auto st0 = kernels::sweep_parity(psi, gates, 0, true, opts.trunc, opts.exec);
        auto st1 = kernels::sweep_parity(psi, gates, 1, false, opts.trunc, opts.exec);
        auto st2 = kernels::sweep_parity(psi, gates, 0, true, opts.trunc, opts.exec);
        traj.max_chi = std::max({traj.max_chi, st0.max_chi, st1.max_chi, st2.max_chi});

        const double t_next = double(s + 1) * opts.dt;
        const bool last = (s + 1 == n_steps);
        if ((s + 1) % obs_every == 0 || last)
            traj.samples.push_back(measure(psi, geom, t_next, gates, opts.record_energy, init_ptr));
        if (spdm_every > 0 && ((s + 1) % spdm_every == 0 || last))
            traj.snapshots.push_back({t_next, kernels::spdm(psi, opts.exec)});

        traj.truncation_total = psi.truncation_accumulated - acc_start;
        if (traj.truncation_total > opts.trunc_budget) {
            traj.status = RunStatus::truncation_budget_exceeded;
            if (traj.samples.back().t != t_next)
                traj.samples.push_back(
                    measure(psi, geom, t_next, gates, opts.record_energy, init_ptr));
            break;
        }
    }
    traj.truncation_total = psi.truncation_accumulated - acc_start;
    return traj;
}

} // namespace sat::tebd
