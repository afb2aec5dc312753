#include "sat/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "sat/errors.hpp"
#include "sat/fermiflow.hpp"
#include "sat/model.hpp"
#include "sat/observables.hpp"
#include "sat/oracle.hpp"
#include "sat/scattering.hpp"
#include "sat/tebd.hpp"
#include "sat/version.hpp"

namespace sat::scenario {

namespace {

namespace fs = std::filesystem;
using io::Json;

// ---------------------------------------------------------------- defaults

Json channel_defaults(const char* species, int n_max) {
    Json c;
    c["J"] = 1.0;
    c["Omega"] = 0.0;
    c["Delta"] = 0.0;
    c["U_qb"] = 0.0;
    c["U_bm"] = 0.0;
    c["U_bb"] = 0.0;
    c["species"] = species;
    c["n_max"] = n_max;
    return c;
}

Json geometry_defaults(int ml, int mr, int n) {
    Json g;
    g["M_left"] = ml;
    g["M_right"] = mr;
    g["N"] = n;
    return g;
}

Json boson_numerics(double dt, double t_final, int chi, double discard, double obs,
                    double spdm, bool window, bool ramp, bool records) {
    Json n;
    n["dt"] = dt;
    n["T_final"] = t_final;
    n["chi_max"] = chi;
    n["discard_tol"] = discard;
    n["obs_interval"] = obs;
    if (spdm >= 0.0) n["spdm_interval"] = spdm;
    n["trunc_budget"] = 0.5;
    if (window) n["window"] = Json::array({0.0, 0.0});
    if (ramp) {
        n["ramp"]["enabled"] = false;
        n["ramp"]["omega_from"] = 0.0;
        n["ramp"]["t_ramp"] = 1.0;
    }
    n["gs_chi_max"] = 256;
    n["gs_discard_tol"] = 1e-12;
    if (records) {
        n["record_energy"] = false;
        n["record_fidelity"] = false;
    }
    return n;
}

} // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "transmission-scan", "fermi-transport",  "boson-transport",
        "current-vs-filling", "current-vs-omega", "mi-melting",
        "boosted-gas",        "qubit-readout",    "oracle-validate"};
    return names;
}

Json default_config(const std::string& scenario) {
    Json cfg;
    cfg["scenario"] = scenario;
    cfg["units"] = kUnitsNote;

    if (scenario == "transmission-scan") {
        cfg["channel"] = channel_defaults("boson", 1);
        cfg["scan"]["n_samples"] = 199;
        cfg["scan"]["curves"] = Json::array();
        auto curve = [](const char* label, double om, double de, double uq) {
            Json c;
            c["label"] = label;
            c["Omega"] = om;
            c["Delta"] = de;
            c["U_qb"] = uq;
            return c;
        };
        cfg["scan"]["curves"].push_back(curve("omega4", 4.0, 0.0, 0.0));
        cfg["scan"]["curves"].push_back(curve("omega8-detuned", 8.0, 4.0, 2.0));
        cfg["scan"]["curves"].push_back(curve("omega1-fano", 1.0, 0.0, 2.0));
        cfg["scan"]["curves"].push_back(curve("omega1", 1.0, 0.0, 0.0));
    } else if (scenario == "fermi-transport") {
        cfg["channel"] = channel_defaults("fermion", 1);
        cfg["geometry"] = geometry_defaults(40, 40, 40);
        cfg["numerics"]["dt"] = 0.05;
        cfg["numerics"]["T_final"] = 12.0;
        cfg["numerics"]["obs_interval"] = 0.05;
        cfg["numerics"]["window"] = Json::array({4.0, 12.0});
    } else if (scenario == "boson-transport") {
        cfg["channel"] = channel_defaults("boson", 1);
        cfg["geometry"] = geometry_defaults(16, 16, 16);
        cfg["numerics"] = boson_numerics(0.02, 10.0, 128, 1e-8, 0.1, 0.0, true, true, true);
    } else if (scenario == "current-vs-filling") {
        cfg["channel"] = channel_defaults("fermion", 1);
        cfg["geometry"] = geometry_defaults(12, 12, 12);
        cfg["numerics"] = boson_numerics(0.02, 6.5, 64, 1e-8, 0.1, -1.0, true, false, false);
        cfg["scan"]["fillings"] = Json::array({0.2, 0.4, 0.5, 0.6, 0.8, 1.0});
        cfg["scan"]["omegas"] = Json::array({0.0, 1.0, 2.0});
        cfg["scan"]["include_bosons"] = false;
    } else if (scenario == "current-vs-omega") {
        cfg["channel"] = channel_defaults("fermion", 1);
        cfg["geometry"] = geometry_defaults(12, 12, 12);
        cfg["numerics"] = boson_numerics(0.02, 6.5, 64, 1e-8, 0.1, -1.0, true, false, false);
        cfg["scan"]["omegas"] = Json::array({0.0, 0.5, 1.0, 2.0, 4.0});
        cfg["scan"]["filling"] = 1.0;
        cfg["scan"]["include_bosons"] = false;
    } else if (scenario == "mi-melting") {
        cfg["channel"] = channel_defaults("boson", 1);
        cfg["geometry"] = geometry_defaults(18, 54, 18);
        cfg["numerics"] = boson_numerics(0.02, 21.6, 128, 1e-6, 0.1, 0.5, false, false, false);
    } else if (scenario == "boosted-gas") {
        cfg["channel"] = channel_defaults("boson", 10);
        cfg["geometry"] = geometry_defaults(10, 30, 10);
        cfg["numerics"] = boson_numerics(0.02, 6.5, 64, 1e-8, 0.05, -1.0, true, false, false);
        cfg["numerics"]["window"] = Json::array({2.0, 6.0});
        cfg["scan"]["k0"] = 1.5707963267948966;
    } else if (scenario == "qubit-readout") {
        cfg["channel"] = channel_defaults("boson", 1);
        cfg["channel"]["Omega"] = 4.0;
        cfg["channel"]["U_qb"] = 2.0;
        cfg["geometry"] = geometry_defaults(18, 54, 18);
        cfg["numerics"] = boson_numerics(0.0025, 12.0, 96, 1e-6, 0.1, 6.0, false, false, false);
        cfg["scan"]["delta_transparent"] = -8.0;
        cfg["scan"]["delta_blocked"] = 0.0;
        cfg["scan"]["t_report"] = 12.0;
    } else if (scenario == "oracle-validate") {
        // battery settings are built in; only the output location is a knob
    } else {
        throw ConfigError("unknown scenario: " + scenario);
    }

    cfg["output"]["directory"] = scenario + "-out";
    return cfg;
}

namespace {

// -------------------------------------------------------- config resolution

std::string type_name(const Json& j) {
    if (j.is_object()) return "object";
    if (j.is_array()) return "array";
    if (j.is_string()) return "string";
    if (j.is_boolean()) return "bool";
    if (j.is_number()) return "number";
    return "null";
}

void reject_unknown(const Json& user, const Json& defaults, const std::string& path) {
    if (defaults.is_object()) {
        if (!user.is_object())
            throw ConfigError("config key '" + path + "': expected an object, got " +
                              type_name(user));
        for (const auto& [k, v] : user.items()) {
            const std::string sub = path.empty() ? k : path + "." + k;
            if (!defaults.contains(k)) throw ConfigError("unknown config key '" + sub + "'");
            reject_unknown(v, defaults.at(k), sub);
        }
        return;
    }
    if (defaults.is_array()) {
        if (!user.is_array())
            throw ConfigError("config key '" + path + "': expected an array, got " +
                              type_name(user));
        return; // element contents validated where they are read
    }
    const bool both_numbers = defaults.is_number() && user.is_number();
    if (!both_numbers && user.type() != defaults.type())
        throw ConfigError("config key '" + path + "': expected " + type_name(defaults) +
                          ", got " + type_name(user));
}

Json merge(const Json& defaults, const Json& user) {
    if (!defaults.is_object()) return user;
    Json out = defaults;
    for (const auto& [k, v] : user.items()) out[k] = merge(defaults.at(k), v);
    return out;
}

double as_num(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

int as_int(const Json& v, const std::string& where) {
    const double x = as_num(v, where);
    if (std::floor(x) != x || std::abs(x) > 1e9)
        throw ConfigError(where + ": expected an integer");
    return int(x);
}

std::vector<double> as_num_list(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_num(e, where));
    return out;
}

model::ChannelParams parse_channel(const Json& c) {
    model::ChannelParams ch;
    ch.J = as_num(c.at("J"), "channel.J");
    ch.Omega = as_num(c.at("Omega"), "channel.Omega");
    ch.Delta = as_num(c.at("Delta"), "channel.Delta");
    ch.U_qb = as_num(c.at("U_qb"), "channel.U_qb");
    ch.U_bm = as_num(c.at("U_bm"), "channel.U_bm");
    ch.U_bb = as_num(c.at("U_bb"), "channel.U_bb");
    const std::string sp = c.at("species").get<std::string>();
    if (sp == "boson")
        ch.species = model::Species::boson;
    else if (sp == "fermion")
        ch.species = model::Species::fermion;
    else
        throw ConfigError("channel.species: must be \"boson\" or \"fermion\"");
    ch.n_max = as_int(c.at("n_max"), "channel.n_max");
    ch.validate();
    return ch;
}

model::LatticeGeometry parse_geometry(const Json& g) {
    model::LatticeGeometry geom;
    geom.M_left = as_int(g.at("M_left"), "geometry.M_left");
    geom.M_right = as_int(g.at("M_right"), "geometry.M_right");
    geom.N = as_int(g.at("N"), "geometry.N");
    return geom;
}

struct Numerics {
    double dt = 0.02;
    double T_final = 10.0;
    int chi_max = 128;
    double discard_tol = 1e-8;
    double obs_interval = 0.1;
    double spdm_interval = 0.0;
    double trunc_budget = 0.5;
    double window_t1 = 0.0, window_t2 = 0.0;
    tebd::RampSchedule ramp{};
    int gs_chi_max = 256;
    double gs_discard_tol = 1e-12;
    bool record_energy = false;
    bool record_fidelity = false;
};

Numerics parse_numerics(const Json& n) {
    Numerics num;
    num.dt = as_num(n.at("dt"), "numerics.dt");
    num.T_final = as_num(n.at("T_final"), "numerics.T_final");
    if (n.contains("chi_max")) num.chi_max = as_int(n.at("chi_max"), "numerics.chi_max");
    if (n.contains("discard_tol"))
        num.discard_tol = as_num(n.at("discard_tol"), "numerics.discard_tol");
    num.obs_interval = as_num(n.at("obs_interval"), "numerics.obs_interval");
    if (n.contains("spdm_interval"))
        num.spdm_interval = as_num(n.at("spdm_interval"), "numerics.spdm_interval");
    if (n.contains("trunc_budget"))
        num.trunc_budget = as_num(n.at("trunc_budget"), "numerics.trunc_budget");
    if (n.contains("window")) {
        const auto w = as_num_list(n.at("window"), "numerics.window");
        if (w.size() != 2) throw ConfigError("numerics.window: expected [t1, t2]");
        num.window_t1 = w[0];
        num.window_t2 = w[1];
    }
    if (n.contains("ramp")) {
        const auto& r = n.at("ramp");
        num.ramp.enabled = r.at("enabled").get<bool>();
        num.ramp.omega_from = as_num(r.at("omega_from"), "numerics.ramp.omega_from");
        num.ramp.t_ramp = as_num(r.at("t_ramp"), "numerics.ramp.t_ramp");
    }
    if (n.contains("gs_chi_max"))
        num.gs_chi_max = as_int(n.at("gs_chi_max"), "numerics.gs_chi_max");
    if (n.contains("gs_discard_tol"))
        num.gs_discard_tol = as_num(n.at("gs_discard_tol"), "numerics.gs_discard_tol");
    if (n.contains("record_energy")) num.record_energy = n.at("record_energy").get<bool>();
    if (n.contains("record_fidelity"))
        num.record_fidelity = n.at("record_fidelity").get<bool>();
    if (num.window_t1 == 0.0 && num.window_t2 == 0.0) {
        num.window_t1 = 0.4 * num.T_final;
        num.window_t2 = num.T_final;
    }
    if (!(num.window_t1 < num.window_t2))
        throw ConfigError("numerics.window: need t1 < t2");
    return num;
}

// ------------------------------------------------------------ file helpers

void write_timeseries(const fs::path& file, const std::vector<tebd::ObsSample>& samples,
                      bool energy, bool fidelity) {
    io::CsvWriter csv(file);
    std::vector<std::string> head = {"t",     "n_left",     "n_imp", "n_right",
                                     "n_mol", "n_total",    "truncation", "chi"};
    if (energy) head.push_back("energy");
    if (fidelity) head.push_back("fidelity");
    csv.row(head);
    for (const auto& s : samples) {
        std::vector<std::string> r = {io::num(s.t),     io::num(s.n_left),
                                      io::num(s.n_imp), io::num(s.n_right),
                                      io::num(s.n_mol), io::num(s.n_total),
                                      io::num(s.trunc_acc), io::num((long long)s.chi)};
        if (energy) r.push_back(io::num(s.energy));
        if (fidelity) r.push_back(io::num(s.fidelity));
        csv.row(r);
    }
}

struct SnapshotAnalytics {
    double lambda1_peak = 0.0;
    double t_peak = 0.0;
    double k_at_peak = 0.0;     // argmax of n(k) at the peak snapshot
    double cond_frac_peak = 0.0;
    double pr_final = 0.0;      // participation ratio of the last snapshot
    std::size_t peak_index = 0;
};

// Long-format n(k) heatmap plus the natural-orbital spectrum per snapshot;
// the leading-mode density profile is written at the lambda1 peak.
SnapshotAnalytics write_snapshot_tables(const fs::path& dir,
                                        const tebd::QuenchTrajectory& traj) {
    SnapshotAnalytics an;
    if (traj.snapshots.empty()) return an;

    io::CsvWriter nk_csv(dir / "nk_heatmap.csv");
    nk_csv.row({"t", "k", "nk"});
    io::CsvWriter lam_csv(dir / "lambdas.csv");
    lam_csv.row({"t", "lambda1", "lambda2", "lambda3", "lambda4", "trace", "cond_frac",
                 "participation_ratio"});

    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        const int L = int(snap.rho.rows());
        const auto nk = obs::momentum_distribution(snap.rho);
        for (int q = 0; q < nk.k.size(); ++q)
            nk_csv.row({io::num(snap.t), io::num(nk.k[q]), io::num(nk.nk[q])});

        const auto modes = obs::condensate_modes(snap.rho, L);
        const double trace = snap.rho.trace().real();
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < modes.lambdas.size(); ++i) {
            const double lam = std::max(0.0, modes.lambdas[i]);
            s1 += lam;
            s2 += lam * lam;
        }
        const double pr = s2 > 0.0 ? s1 * s1 / s2 : 0.0;
        const double l1 = modes.lambdas[0];
        auto lam_or_zero = [&](int i) {
            return int(modes.lambdas.size()) > i ? modes.lambdas[i] : 0.0;
        };
        lam_csv.row({io::num(snap.t), io::num(l1), io::num(lam_or_zero(1)),
                     io::num(lam_or_zero(2)), io::num(lam_or_zero(3)), io::num(trace),
                     io::num(trace > 0 ? l1 / trace : 0.0), io::num(pr)});

        if (l1 > an.lambda1_peak) {
            an.lambda1_peak = l1;
            an.t_peak = snap.t;
            an.peak_index = s;
            an.cond_frac_peak = trace > 0 ? l1 / trace : 0.0;
            int qmax = 0;
            nk.nk.maxCoeff(&qmax);
            an.k_at_peak = nk.k[qmax];
        }
        if (s + 1 == traj.snapshots.size()) an.pr_final = pr;
    }

    const auto& peak = traj.snapshots[an.peak_index];
    const auto modes = obs::condensate_modes(peak.rho, 1);
    io::CsvWriter mode_csv(dir / "mode_density.csv");
    mode_csv.row({"site", "density", "mode1_abs2"});
    for (int j = 0; j < peak.rho.rows(); ++j)
        mode_csv.row({io::num((long long)j), io::num(peak.rho(j, j).real()),
                      io::num(std::norm(modes.modes(j, 0)))});
    return an;
}

// ----------------------------------------------------------- boson driver

struct BosonOutcome {
    tebd::QuenchTrajectory traj;
    double gs_energy = 0.0;
    int gs_sweeps = 0;
};

BosonOutcome boson_quench(const model::ChannelParams& ch, const model::LatticeGeometry& geom,
                          const Numerics& num, double k0, kernels::Exec exec) {
    tebd::GroundStateOptions gopt;
    gopt.chi_max = num.gs_chi_max;
    gopt.discard_tol = num.gs_discard_tol;
    gopt.exec = exec;
    auto gs = tebd::ground_state(ch, geom, gopt);
    if (k0 != 0.0) mps::boost(gs.state, k0);

    tebd::EvolveOptions eopt;
    eopt.dt = num.dt;
    eopt.t_final = num.T_final;
    eopt.trunc.chi_max = num.chi_max;
    eopt.trunc.discard_tol = num.discard_tol;
    eopt.obs_interval = num.obs_interval;
    eopt.spdm_interval = num.spdm_interval;
    eopt.trunc_budget = num.trunc_budget;
    eopt.ramp = num.ramp;
    eopt.record_energy = num.record_energy;
    eopt.record_fidelity = num.record_fidelity;
    eopt.exec = exec;

    BosonOutcome out;
    out.gs_energy = gs.energy;
    out.gs_sweeps = gs.sweeps;
    out.traj = tebd::evolve(gs.state, ch, geom, eopt);
    return out;
}

void note_budget(const tebd::QuenchTrajectory& traj, Json& status) {
    if (traj.status == tebd::RunStatus::truncation_budget_exceeded)
        status["truncation_budget_exceeded"] = true;
}

// --------------------------------------------------------------- scenarios

Json run_transmission_scan(const Json& cfg, const fs::path& out, Json& /*status*/) {
    const auto base = parse_channel(cfg.at("channel"));
    const int n_samples = as_int(cfg.at("scan").at("n_samples"), "scan.n_samples");
    if (n_samples < 2) throw ConfigError("scan.n_samples: need at least 2");

    Json kpi;
    const auto& curves = cfg.at("scan").at("curves");
    if (!curves.is_array() || curves.empty())
        throw ConfigError("scan.curves: need at least one {label, Omega, Delta, U_qb} entry");
    for (const auto& entry : curves) {
        if (!entry.is_object() || !entry.contains("label") || !entry.contains("Omega") ||
            !entry.contains("Delta") || !entry.contains("U_qb") || entry.size() != 4)
            throw ConfigError("scan.curves: each entry needs exactly label/Omega/Delta/U_qb");
        const std::string label = entry.at("label").get<std::string>();
        if (label.empty() ||
            label.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                    "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_") !=
                std::string::npos)
            throw ConfigError("scan.curves: label must be filesystem-safe: " + label);

        model::ChannelParams ch = base;
        ch.Omega = as_num(entry.at("Omega"), "scan.curves.Omega");
        ch.Delta = as_num(entry.at("Delta"), "scan.curves.Delta");
        ch.U_qb = as_num(entry.at("U_qb"), "scan.curves.U_qb");
        const auto profile = scattering::transmission_profile(ch, n_samples);

        io::CsvWriter csv(out / ("curve_" + label + ".csv"));
        csv.row({"k", "epsilon", "T", "R", "re_f_plus", "im_f_plus", "inserted"});
        double max_t = 0.0;
        for (const auto& s : profile.samples) {
            csv.row({io::num(s.k), io::num(s.epsilon), io::num(s.T), io::num(s.R),
                     io::num(s.f_plus.real()), io::num(s.f_plus.imag()),
                     io::num((long long)(s.inserted ? 1 : 0))});
            max_t = std::max(max_t, s.T);
        }
        kpi["max_T_" + label] = max_t;
    }
    return kpi;
}

Json run_fermi_transport(const Json& cfg, const fs::path& out, Json& /*status*/,
                         kernels::Exec exec) {
    const auto ch = parse_channel(cfg.at("channel"));
    if (ch.species != model::Species::fermion)
        throw ConfigError("fermi-transport: channel.species must be \"fermion\"");
    const auto geom = parse_geometry(cfg.at("geometry"));
    geom.validate(ch);
    const auto num = parse_numerics(cfg.at("numerics"));

    const auto sys = fermi::build_system(ch, geom);
    auto state = fermi::prepare_fermi_sea(sys);
    const int n_steps = int(std::llround(num.T_final / num.dt));
    const auto series = fermi::evolve(state, sys, num.dt, n_steps, exec);

    const int stride = std::max(1, int(std::llround(num.obs_interval / num.dt)));
    io::CsvWriter csv(out / "current.csv");
    csv.row({"t", "N_R", "n_mol"});
    for (std::size_t i = 0; i < series.samples.size(); ++i) {
        if (i % std::size_t(stride) != 0 && i + 1 != series.samples.size()) continue;
        const auto& s = series.samples[i];
        csv.row({io::num(s.t), io::num(s.n_right), io::num(s.n_mol)});
    }

    const auto fit = fermi::steady_current(series, num.window_t1, num.window_t2);
    Json kpi;
    kpi["steady_current"] = fit.slope;
    kpi["steady_current_stderr"] = fit.stderr_slope;
    kpi["fit_window_t1"] = fit.t1;
    kpi["fit_window_t2"] = fit.t2;
    kpi["n_right_final"] = series.samples.back().n_right;
    kpi["n_mol_final"] = series.samples.back().n_mol;
    kpi["I_analytic"] = fermi::analytic_current_integral(ch, double(geom.N) / geom.M_left);
    return kpi;
}

Json run_boson_transport(const Json& cfg, const fs::path& out, Json& status,
                         kernels::Exec exec) {
    const auto ch = parse_channel(cfg.at("channel"));
    if (ch.species != model::Species::boson)
        throw ConfigError("boson-transport: channel.species must be \"boson\"");
    const auto geom = parse_geometry(cfg.at("geometry"));
    geom.validate(ch);
    const auto num = parse_numerics(cfg.at("numerics"));

    const auto run = boson_quench(ch, geom, num, 0.0, exec);
    note_budget(run.traj, status);
    write_timeseries(out / "timeseries.csv", run.traj.samples, num.record_energy,
                     num.record_fidelity);
    const auto an = write_snapshot_tables(out, run.traj);

    std::vector<double> t, y;
    for (const auto& s : run.traj.samples) {
        t.push_back(s.t);
        y.push_back(s.n_right);
    }
    Json kpi;
    const auto fit = fermi::fit_slope(t, y, num.window_t1, num.window_t2);
    kpi["steady_current"] = fit.slope;
    kpi["steady_current_stderr"] = fit.stderr_slope;
    kpi["n_right_final"] = y.back();
    kpi["gs_energy"] = run.gs_energy;
    kpi["truncation_total"] = run.traj.truncation_total;
    kpi["max_chi"] = run.traj.max_chi;
    if (!run.traj.snapshots.empty()) kpi["lambda1_peak"] = an.lambda1_peak;
    return kpi;
}

// Shared by current-vs-filling and current-vs-omega: the analytic fermion
// current on a (filling, Omega) grid, optionally with hard-core boson steady
// currents from TEBD on the same grid.
Json run_current_table(const Json& cfg, const fs::path& out, Json& status,
                       kernels::Exec exec, bool omega_major) {
    const auto base = parse_channel(cfg.at("channel"));
    const auto geom = parse_geometry(cfg.at("geometry"));
    const auto num = parse_numerics(cfg.at("numerics"));
    const auto& scan = cfg.at("scan");
    const bool include_bosons = scan.at("include_bosons").get<bool>();

    std::vector<double> fillings, omegas;
    if (omega_major) {
        fillings = {as_num(scan.at("filling"), "scan.filling")};
        omegas = as_num_list(scan.at("omegas"), "scan.omegas");
    } else {
        fillings = as_num_list(scan.at("fillings"), "scan.fillings");
        omegas = as_num_list(scan.at("omegas"), "scan.omegas");
    }
    if (fillings.empty()) fillings = {double(geom.N) / geom.M_left};
    if (omegas.empty()) omegas = {base.Omega};

    struct RowKey {
        double n, omega;
    };
    std::vector<RowKey> rows;
    if (omega_major)
        for (double om : omegas) rows.push_back({fillings[0], om});
    else
        for (double n : fillings)
            for (double om : omegas) rows.push_back({n, om});

    io::CsvWriter csv(out / (omega_major ? "omega_current.csv" : "filling_current.csv"));
    if (omega_major)
        csv.row({"Omega", "n", "I_fermion_analytic", "I_closed_form", "I_boson_tebd",
                 "boson_n_effective", "row_status"});
    else
        csv.row({"n", "Omega", "I_fermion_analytic", "I_closed_form", "I_boson_tebd",
                 "boson_n_effective", "row_status"});

    int failed = 0;
    double last_analytic = 0.0, last_boson = 0.0;
    double max_analytic = 0.0;
    bool boson_done = false;
    for (const auto& row : rows) {
        if (!(row.n > 0.0 && row.n <= 1.0))
            throw ConfigError("filling must lie in (0, 1]");
        model::ChannelParams ch = base;
        ch.Omega = row.omega;
        const double analytic = fermi::analytic_current_integral(ch, row.n);
        last_analytic = analytic;
        max_analytic = std::max(max_analytic, analytic);

        std::string closed_field;
        if (ch.Delta == 0.0 && ch.U_qb == 0.0)
            closed_field = io::num(fermi::analytic_current_closed_form(ch, row.n).value);

        std::string boson_field, n_eff_field, row_status = "ok";
        if (include_bosons) {
            try {
                model::ChannelParams chb = ch;
                chb.species = model::Species::boson;
                model::LatticeGeometry g = geom;
                g.N = std::max(1, int(std::lround(row.n * geom.M_left)));
                g.validate(chb);
                const auto run = boson_quench(chb, g, num, 0.0, exec);
                note_budget(run.traj, status);
                std::vector<double> t, y;
                for (const auto& s : run.traj.samples) {
                    t.push_back(s.t);
                    y.push_back(s.n_right);
                }
                const auto fit = fermi::fit_slope(t, y, num.window_t1, num.window_t2);
                boson_field = io::num(fit.slope);
                n_eff_field = io::num(double(g.N) / g.M_left);
                last_boson = fit.slope;
                boson_done = true;
            } catch (const std::exception& e) {
                row_status = std::string("failed: ") + e.what();
                ++failed;
            }
        }
        const std::string a = io::num(omega_major ? row.omega : row.n);
        const std::string b = io::num(omega_major ? row.n : row.omega);
        csv.row({a, b, io::num(analytic), closed_field, boson_field, n_eff_field, row_status});
    }

    if (failed > 0) status["ok"] = false;
    status["rows_failed"] = failed;
    Json kpi;
    kpi["rows"] = (long long)rows.size();
    if (rows.size() == 1) {
        kpi["I_analytic"] = last_analytic;
        if (boson_done) kpi["I_boson"] = last_boson;
    }
    kpi["I_analytic_max"] = max_analytic;
    return kpi;
}

Json run_mi_melting(const Json& cfg, const fs::path& out, Json& status, kernels::Exec exec) {
    const auto ch = parse_channel(cfg.at("channel"));
    if (ch.species != model::Species::boson)
        throw ConfigError("mi-melting: channel.species must be \"boson\"");
    const auto geom = parse_geometry(cfg.at("geometry"));
    geom.validate(ch);
    auto num = parse_numerics(cfg.at("numerics"));
    if (num.spdm_interval <= 0.0)
        throw ConfigError("mi-melting: numerics.spdm_interval must be positive");

    const auto run = boson_quench(ch, geom, num, 0.0, exec);
    note_budget(run.traj, status);
    write_timeseries(out / "timeseries.csv", run.traj.samples, false, false);
    const auto an = write_snapshot_tables(out, run.traj);

    Json kpi;
    kpi["lambda1_peak"] = an.lambda1_peak;
    kpi["t_peak"] = an.t_peak;
    kpi["k_at_peak"] = an.k_at_peak;
    kpi["cond_frac_peak"] = an.cond_frac_peak;
    kpi["participation_ratio_final"] = an.pr_final;
    kpi["gs_energy"] = run.gs_energy;
    kpi["truncation_total"] = run.traj.truncation_total;
    kpi["max_chi"] = run.traj.max_chi;
    return kpi;
}

Json run_boosted_gas(const Json& cfg, const fs::path& out, Json& status, kernels::Exec exec) {
    const auto ch = parse_channel(cfg.at("channel"));
    if (ch.species != model::Species::boson)
        throw ConfigError("boosted-gas: channel.species must be \"boson\"");
    const auto geom = parse_geometry(cfg.at("geometry"));
    geom.validate(ch);
    const auto num = parse_numerics(cfg.at("numerics"));
    const double k0 = as_num(cfg.at("scan").at("k0"), "scan.k0");
    if (!(k0 > 0.0 && k0 < std::numbers::pi))
        throw ConfigError("scan.k0: need 0 < k0 < pi for a propagating boost");

    const auto run = boson_quench(ch, geom, num, k0, exec);
    note_budget(run.traj, status);
    write_timeseries(out / "timeseries.csv", run.traj.samples, false, false);

    std::vector<double> t, y;
    for (const auto& s : run.traj.samples) {
        t.push_back(s.t);
        y.push_back(s.n_right);
    }
    const auto fit = fermi::fit_slope(t, y, num.window_t1, num.window_t2);
    const double dilute = scattering::dilute_gas_current(k0, geom.N, ch, geom);

    Json kpi;
    kpi["n_right_slope"] = fit.slope;
    kpi["slope_stderr"] = fit.stderr_slope;
    kpi["dilute_current"] = dilute;
    kpi["slope_over_dilute"] = dilute != 0.0 ? fit.slope / dilute : 0.0;
    kpi["truncation_total"] = run.traj.truncation_total;
    kpi["max_chi"] = run.traj.max_chi;
    return kpi;
}

Json run_qubit_readout(const Json& cfg, const fs::path& out, Json& status,
                       kernels::Exec exec) {
    const auto base = parse_channel(cfg.at("channel"));
    if (base.species != model::Species::boson)
        throw ConfigError("qubit-readout: channel.species must be \"boson\"");
    const auto geom = parse_geometry(cfg.at("geometry"));
    geom.validate(base);
    const auto num = parse_numerics(cfg.at("numerics"));
    const auto& scan = cfg.at("scan");
    const double d_up = as_num(scan.at("delta_transparent"), "scan.delta_transparent");
    const double d_down = as_num(scan.at("delta_blocked"), "scan.delta_blocked");
    const double t_report = as_num(scan.at("t_report"), "scan.t_report");
    if (num.spdm_interval <= 0.0)
        throw ConfigError("qubit-readout: numerics.spdm_interval must be positive");

    auto one_channel = [&](double delta, const char* name) {
        model::ChannelParams ch = base;
        ch.Delta = delta;
        const fs::path dir = out / name;
        fs::create_directories(dir);
        const auto run = boson_quench(ch, geom, num, 0.0, exec);
        note_budget(run.traj, status);
        write_timeseries(dir / "timeseries.csv", run.traj.samples, false, false);
        write_snapshot_tables(dir, run.traj);
        return run;
    };
    const auto up = one_channel(d_up, "up");     // transparent spin channel
    const auto down = one_channel(d_down, "down"); // blocking spin channel

    const auto rep = obs::readout_visibility(up.traj, down.traj, t_report);
    Json readout;
    readout["t_report"] = t_report;
    readout["delta_transparent"] = d_up;
    readout["delta_blocked"] = d_down;
    readout["up"]["n_right"] = rep.up.n_right;
    readout["up"]["cond_frac"] = rep.up.cond_frac;
    readout["up"]["peak_contrast"] = rep.up.peak_contrast;
    readout["down"]["n_right"] = rep.down.n_right;
    readout["down"]["cond_frac"] = rep.down.cond_frac;
    readout["down"]["peak_contrast"] = rep.down.peak_contrast;
    readout["n_right_separation"] = rep.n_right_separation;
    readout["cond_frac_contrast"] = rep.cond_frac_contrast;
    readout["pooled_sigma"] = rep.pooled_sigma;
    readout["score"] = rep.score;
    io::write_json(out / "readout.json", readout);

    Json kpi;
    kpi["n_right_up"] = rep.up.n_right;
    kpi["n_right_down"] = rep.down.n_right;
    kpi["n_right_separation"] = rep.n_right_separation;
    kpi["separation_score"] = rep.score;
    kpi["cond_frac_up"] = rep.up.cond_frac;
    kpi["cond_frac_down"] = rep.down.cond_frac;
    kpi["cond_frac_contrast"] = rep.cond_frac_contrast;
    return kpi;
}

// ----------------------------------------------------- validation battery

struct Check {
    std::string name;
    std::string detail;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

Json run_oracle_validate(const fs::path& out, Json& status, kernels::Exec exec) {
    std::vector<Check> checks;
    auto record = [&](const std::string& name, const std::string& detail, double value,
                      double tol) {
        checks.push_back({name, detail, value, tol, value <= tol});
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            checks.push_back({name, std::string("raised: ") + e.what(),
                              std::numeric_limits<double>::quiet_NaN(), 0.0, false});
        }
    };

    // Deterministic pseudo-random sector vector.
    auto trig_state = [](std::size_t dim) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i)
            v[Eigen::Index(i)] = std::complex<double>(std::sin(0.37 * double(i) + 0.11),
                                                      std::cos(0.23 * double(i) - 0.05));
        v.normalize();
        return v;
    };

    guarded("norm-conservation", [&] {
        model::ChannelParams ch;
        ch.Omega = 1.2;
        ch.Delta = 0.4;
        ch.U_qb = 0.6;
        ch.U_bm = 0.3;
        ch.U_bb = 2.0;
        ch.n_max = 2;
        const auto basis = oracle::build_sector(6, 2, 2, 3);
        const oracle::ExactPropagator prop(basis, ch);
        auto psi = trig_state(basis.dim());
        for (int s = 0; s < 20; ++s) prop.advance(psi, 0.05);
        record("norm-conservation", "20 steps, mixed couplings", std::abs(psi.norm() - 1.0),
               1e-10);
    });

    guarded("zero-hamiltonian", [&] {
        model::ChannelParams ch;
        ch.n_max = 2;
        ch.U_bb = 0.0;
        const auto basis = oracle::build_sector(1, -1, 2, 2); // single site, no hops
        const oracle::ExactPropagator prop(basis, ch);
        auto psi = trig_state(basis.dim());
        const auto before = psi;
        prop.advance(psi, 1.0);
        record("zero-hamiltonian", "single full site, H = 0",
               (psi - before).cwiseAbs().maxCoeff(), 1e-12);
    });

    guarded("rabi-half-period", [&] {
        model::ChannelParams ch;
        ch.Omega = 1.0;
        const auto basis = oracle::build_sector(1, 0, 1, 1); // {|1,q>, |0,m>}
        const oracle::ExactPropagator prop(basis, ch);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2);
        const int iq = basis.find({1}, false);
        const int im = basis.find({0}, true);
        psi[iq] = 1.0;
        prop.advance(psi, std::numbers::pi / 2.0);
        const double err =
            std::abs(psi[im] - std::complex<double>(0.0, -1.0)) + std::abs(psi[iq]);
        record("rabi-half-period", "|1,q> -> -i |0,m> at t = pi/2", err, 1e-10);
    });

    guarded("two-site-hop", [&] {
        model::ChannelParams ch;
        const auto basis = oracle::build_sector(2, -1, 1, 1);
        const Eigen::MatrixXd h = Eigen::MatrixXd(oracle::exact_hamiltonian(basis, ch));
        Eigen::MatrixXd ref(2, 2);
        ref << 0.0, -1.0, -1.0, 0.0;
        record("two-site-hop", "one particle on two sites", (h - ref).cwiseAbs().maxCoeff(),
               1e-15);
    });

    guarded("hermiticity", [&] {
        model::ChannelParams ch;
        ch.Omega = 1.3;
        ch.Delta = -0.7;
        ch.U_qb = 0.9;
        ch.U_bm = 0.4;
        ch.U_bb = 3.0;
        ch.n_max = 2;
        const auto basis = oracle::build_sector(4, 1, 2, 2);
        const Eigen::MatrixXd h = Eigen::MatrixXd(oracle::exact_hamiltonian(basis, ch));
        record("hermiticity", "4 sites, 2 atoms, all couplings",
               (h - h.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    });

    guarded("single-particle-match", [&] {
        model::ChannelParams ch;
        ch.species = model::Species::fermion;
        ch.Omega = 1.5;
        ch.Delta = 0.3;
        ch.U_qb = 0.7;
        const model::LatticeGeometry geom{4, 4, 1};
        const auto sys = fermi::build_system(ch, geom);
        auto state = fermi::prepare_fermi_sea(sys);
        // start from one atom on site 2 in both engines
        state.orbitals = Eigen::MatrixXcd::Zero(sys.dim(), 1);
        state.orbitals(2, 0) = 1.0;
        const auto series = fermi::evolve(state, sys, 0.05, 60, exec);

        const auto basis = oracle::build_sector(geom, 1);
        const oracle::ExactPropagator prop(basis, ch);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index(basis.dim()));
        std::vector<int> occ(9, 0);
        occ[2] = 1;
        psi[basis.find(occ, false)] = 1.0;
        prop.advance(psi, 3.0);

        double err = std::abs(series.samples.back().n_mol -
                              oracle::molecule_population(basis, psi));
        for (int j = 0; j < 9; ++j) {
            const double d_fermi = (state.orbitals.row(j) * state.orbitals.row(j).adjoint())
                                       .value()
                                       .real();
            err = std::max(err, std::abs(d_fermi - oracle::density(basis, psi, j)));
        }
        record("single-particle-match", "densities at t = 3 agree across engines", err,
               1e-10);
    });

    guarded("wavepacket-free", [&] {
        model::ChannelParams ch;
        const auto res = oracle::wavepacket_transmission(1.2, ch);
        record("wavepacket-free", "no coupling: full transmission",
               std::abs(res.transmitted - 1.0), 1e-6);
    });

    guarded("tebd-small-quench", [&] {
        model::ChannelParams ch;
        ch.Omega = 1.0;
        ch.Delta = 0.2;
        ch.U_qb = 0.5;
        ch.U_bm = 0.3;
        ch.U_bb = 4.0;
        ch.n_max = 2;
        const model::LatticeGeometry geom{2, 2, 2};
        const auto box = oracle::ground_state_box(ch, geom.M_left, geom.N);
        const auto full = oracle::build_sector(geom, ch.n_max);
        Eigen::VectorXcd psi0 = oracle::embed_box_in_sector(box, full);

        const oracle::ExactPropagator prop(full, ch);
        Eigen::VectorXcd psi_exact = psi0;
        const double t_final = 0.5;
        prop.advance(psi_exact, t_final);

        const auto bases = mps::chain_bases(geom, ch.n_max);
        auto mps_state = mps::from_dense(bases, oracle::sector_to_product(full, psi0, bases));
        tebd::EvolveOptions eopt;
        eopt.dt = 1e-3;
        eopt.t_final = t_final;
        eopt.trunc.chi_max = 64;
        eopt.trunc.discard_tol = 1e-16;
        eopt.obs_interval = t_final;
        eopt.exec = exec;
        const auto traj = tebd::evolve(mps_state, ch, geom, eopt);

        const double err = std::max(
            std::abs(traj.samples.back().n_right -
                     oracle::n_right_of(full, psi_exact, geom.impurity_index())),
            std::abs(traj.samples.back().n_mol -
                     oracle::molecule_population(full, psi_exact)));
        record("tebd-small-quench", "drained-box quench vs exact propagation", err, 1e-5);
    });

    guarded("checkpoint-roundtrip", [&] {
        model::ChannelParams ch;
        ch.U_bb = 4.0;
        ch.n_max = 2;
        const model::LatticeGeometry geom{3, 2, 3};
        tebd::GroundStateOptions gopt;
        gopt.exec = exec;
        auto gs = tebd::ground_state(ch, geom, gopt);
        const fs::path file = out / "checkpoint_roundtrip.mps";
        mps::save_checkpoint(gs.state, file.string());
        const auto back = mps::load_checkpoint(file.string());
        record("checkpoint-roundtrip", "save/load preserves the state",
               std::abs(1.0 - std::abs(mps::overlap(gs.state, back))), 1e-12);
    });

    io::CsvWriter csv(out / "validation.csv");
    csv.row({"check", "detail", "value", "tolerance", "status"});
    int failed = 0;
    for (const auto& c : checks) {
        csv.row({c.name, c.detail, io::num(c.value), io::num(c.tol),
                 c.pass ? "pass" : "fail"});
        if (!c.pass) ++failed;
    }
    if (failed > 0) status["ok"] = false;

    Json kpi;
    kpi["checks_total"] = (long long)checks.size();
    kpi["checks_failed"] = (long long)failed;
    return kpi;
}

} // namespace

// ------------------------------------------------------------- public API

Json resolve_config(const Json& user) {
    if (!user.is_object()) throw ConfigError("config root must be a JSON object");
    if (!user.contains("scenario") || !user.at("scenario").is_string())
        throw ConfigError("config needs a \"scenario\" string");
    const std::string name = user.at("scenario").get<std::string>();
    const Json defaults = default_config(name);
    reject_unknown(user, defaults, "");
    Json resolved = merge(defaults, user);
    if (resolved.at("units").get<std::string>() != kUnitsNote)
        throw ConfigError(std::string("units: this engine works in ") + kUnitsNote);
    return resolved;
}

Json run_config(const Json& resolved, const fs::path& out_dir, kernels::Exec exec) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    Json echo;
    echo["engine"] = io::engine_string();
    for (const auto& [k, v] : resolved.items()) echo[k] = v;
    io::write_json(out_dir / "resolved_config.json", echo);

    const std::string name = resolved.at("scenario").get<std::string>();
    Json status;
    status["ok"] = true;
    status["truncation_budget_exceeded"] = false;

    const auto t0 = std::chrono::steady_clock::now();
    Json kpi;
    if (name == "transmission-scan")
        kpi = run_transmission_scan(resolved, out_dir, status);
    else if (name == "fermi-transport")
        kpi = run_fermi_transport(resolved, out_dir, status, exec);
    else if (name == "boson-transport")
        kpi = run_boson_transport(resolved, out_dir, status, exec);
    else if (name == "current-vs-filling")
        kpi = run_current_table(resolved, out_dir, status, exec, false);
    else if (name == "current-vs-omega")
        kpi = run_current_table(resolved, out_dir, status, exec, true);
    else if (name == "mi-melting")
        kpi = run_mi_melting(resolved, out_dir, status, exec);
    else if (name == "boosted-gas")
        kpi = run_boosted_gas(resolved, out_dir, status, exec);
    else if (name == "qubit-readout")
        kpi = run_qubit_readout(resolved, out_dir, status, exec);
    else if (name == "oracle-validate")
        kpi = run_oracle_validate(out_dir, status, exec);
    else
        throw ConfigError("unknown scenario: " + name);
    const auto t1 = std::chrono::steady_clock::now();

    Json summary;
    summary["engine"] = io::engine_string();
    summary["scenario"] = name;
    summary["units"] = kUnitsNote;
    summary["kpi"] = kpi;
    summary["status"] = status;
    summary["runtime_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    io::write_json(out_dir / "summary.json", summary);
    return summary;
}

namespace {

int classify_and_report(const char* phase) {
    try {
        throw;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s: config error: %s\n", phase, e.what());
        return kConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "%s: io error: %s\n", phase, e.what());
        return kIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: error: %s\n", phase, e.what());
        return kEngine;
    }
}

Json parse_token(const std::string& tok) {
    if (tok == "true") return Json(true);
    if (tok == "false") return Json(false);
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end && *end == '\0' && end != tok.c_str()) return Json(x);
    return Json(tok);
}

Json& walk_path(Json& root, const std::string& axis) {
    Json* cur = &root;
    std::size_t pos = 0;
    while (pos <= axis.size()) {
        const std::size_t dot = axis.find('.', pos);
        const std::string seg =
            axis.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (seg.empty()) throw ConfigError("axis path has an empty segment: " + axis);
        if (cur->is_array()) {
            char* end = nullptr;
            const long idx = std::strtol(seg.c_str(), &end, 10);
            if (!end || *end != '\0' || idx < 0 || std::size_t(idx) >= cur->size())
                throw ConfigError("axis path: bad array index '" + seg + "' in " + axis);
            cur = &(*cur)[std::size_t(idx)];
        } else if (cur->is_object()) {
            if (!cur->contains(seg))
                throw ConfigError("axis not found in config: " + axis + " (at '" + seg + "')");
            cur = &(*cur)[seg];
        } else {
            throw ConfigError("axis path descends into a scalar: " + axis);
        }
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (cur->is_object() || cur->is_array())
        throw ConfigError("axis must point at a scalar value: " + axis);
    return *cur;
}

} // namespace

int run(const fs::path& config_path, const fs::path& out_override, kernels::Exec exec) {
    try {
        const Json user = io::read_json(config_path);
        const Json resolved = resolve_config(user);
        const fs::path out =
            out_override.empty()
                ? fs::path(resolved.at("output").at("directory").get<std::string>())
                : out_override;
        const Json summary = run_config(resolved, out, exec);
        std::printf("wrote %s\n", (out / "summary.json").string().c_str());
        if (summary.at("status").at("truncation_budget_exceeded").get<bool>())
            std::fprintf(stderr, "warning: truncation budget exhausted, run cut short\n");
        return summary.at("status").at("ok").get<bool>() ? kOk : kEngine;
    } catch (...) {
        return classify_and_report("run");
    }
}

int sweep(const fs::path& config_path, const std::string& axis,
          const std::vector<std::string>& values, const fs::path& out_override,
          kernels::Exec exec) {
    try {
        const Json user = io::read_json(config_path);
        const Json resolved = resolve_config(user);
        const fs::path out =
            out_override.empty()
                ? fs::path(resolved.at("output").at("directory").get<std::string>() + "-sweep")
                : out_override;
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw IoError("cannot create output directory " + out.string());

        {
            Json probe = resolved;
            walk_path(probe, axis); // axis must exist before any run starts
        }

        struct Row {
            std::string value;
            Json kpi;
            std::string status;
        };
        std::vector<Row> rows;
        int failed = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            Json cfg = resolved;
            walk_path(cfg, axis) = parse_token(values[i]);
            char sub[16];
            std::snprintf(sub, sizeof sub, "%03zu", i);
            const fs::path run_dir = out / "runs" / sub;
            Row row{values[i], Json::object(), "ok"};
            try {
                const Json summary = run_config(cfg, run_dir, exec);
                row.kpi = summary.at("kpi");
                if (!summary.at("status").at("ok").get<bool>()) {
                    row.status = "failed: scenario reported failure";
                    ++failed;
                }
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
                ++failed;
            }
            rows.push_back(std::move(row));
        }

        std::vector<std::string> kpi_cols;
        for (const auto& row : rows)
            for (const auto& [k, v] : row.kpi.items())
                if (std::find(kpi_cols.begin(), kpi_cols.end(), k) == kpi_cols.end())
                    kpi_cols.push_back(k);

        io::CsvWriter csv(out / "sweep.csv");
        std::vector<std::string> head = {axis};
        head.insert(head.end(), kpi_cols.begin(), kpi_cols.end());
        head.push_back("status");
        csv.row(head);
        for (const auto& row : rows) {
            std::vector<std::string> r = {row.value};
            for (const auto& col : kpi_cols) {
                if (!row.kpi.contains(col))
                    r.emplace_back();
                else if (row.kpi.at(col).is_number())
                    r.push_back(io::num(row.kpi.at(col).get<double>()));
                else
                    r.push_back(row.kpi.at(col).dump());
            }
            r.push_back(row.status);
            csv.row(r);
        }

        Json summary;
        summary["engine"] = io::engine_string();
        summary["axis"] = axis;
        summary["values"] = values;
        summary["n_runs"] = (long long)rows.size();
        summary["n_failed"] = (long long)failed;
        io::write_json(out / "sweep_summary.json", summary);
        std::printf("wrote %s\n", (out / "sweep.csv").string().c_str());
        return failed == 0 ? kOk : kEngine;
    } catch (...) {
        return classify_and_report("sweep");
    }
}

int validate(const fs::path& out_override, kernels::Exec exec) {
    try {
        const Json cfg = default_config("oracle-validate");
        const fs::path out = out_override.empty() ? fs::path("oracle-validate-out")
                                                  : out_override;
        const Json summary = run_config(cfg, out, exec);
        const auto& kpi = summary.at("kpi");
        std::printf("validation: %lld checks, %lld failed\n",
                    kpi.at("checks_total").get<long long>(),
                    kpi.at("checks_failed").get<long long>());
        return summary.at("status").at("ok").get<bool>() ? kOk : kEngine;
    } catch (...) {
        return classify_and_report("validate");
    }
}

} // namespace sat::scenario
