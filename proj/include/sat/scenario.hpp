#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sat/csv.hpp"
#include "sat/kernels.hpp"

// Scenario runner: resolves a config against per-scenario defaults, drives the
// engines, and persists plot-ready tables. Every output directory receives the
// resolved config and a JSON summary; data CSVs are deterministic, so the same
// config writes byte-identical payloads.

namespace sat::scenario {

// Process exit codes, shared by run/sweep/validate.
enum ExitCode : int {
    kOk = 0,
    kConfig = 2, // malformed config, bad key, invalid parameters
    kEngine = 3, // numerical or validation failure during the run
    kIo = 4,     // filesystem trouble
};

inline constexpr const char* kUnitsNote = "J=1, hbar=1, a=1";

const std::vector<std::string>& scenario_names();

// Fully-populated default config for one scenario.
io::Json default_config(const std::string& scenario);

// Defaults overlaid with the user config; unknown keys and type mismatches
// are rejected with dotted-path diagnostics.
io::Json resolve_config(const io::Json& user);

// Runs one resolved config into out_dir; returns the summary that was written
// to summary.json. Throws on failure (see ExitCode for the mapping).
io::Json run_config(const io::Json& resolved, const std::filesystem::path& out_dir,
                    kernels::Exec exec);

// `sat run <config>`: returns a process exit code, never throws.
int run(const std::filesystem::path& config_path, const std::filesystem::path& out_override,
        kernels::Exec exec);

// `sat sweep <config> --axis <path> --values v1,v2,...`: one sub-run per value
// under <out>/runs/NNN, collated into sweep.csv. Sub-run failures are recorded
// per row and the sweep continues; any failed row turns the exit code to 3.
int sweep(const std::filesystem::path& config_path, const std::string& axis,
          const std::vector<std::string>& values, const std::filesystem::path& out_override,
          kernels::Exec exec);

// `sat validate`: oracle comparison battery with default settings.
int validate(const std::filesystem::path& out_override, kernels::Exec exec);

} // namespace sat::scenario
