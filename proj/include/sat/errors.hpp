#pragma once

#include <stdexcept>
#include <string>

namespace sat {

// Invalid parameter combinations, malformed configs, inconsistent geometry.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// More particles requested than the source box can hold.
struct OverfillError : ConfigError {
    using ConfigError::ConfigError;
};

// k at (or beyond) a band edge where v(k)=0: no propagating mode.
struct EvanescentModeError : std::domain_error {
    using std::domain_error::domain_error;
};

// j_eff evaluated at a dressed-state pole (eps = +/- Omega).
struct DegenerateResonanceError : std::domain_error {
    using std::domain_error::domain_error;
};

// transparency detuning -Omega^2/U_qb undefined for U_qb=0 with coupling on.
struct UndefinedTransparencyError : std::domain_error {
    using std::domain_error::domain_error;
};

// Iterative procedure failed to reach its tolerance (imaginary time, quadrature depth).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested basis or matrix exceeds a hard size cap.
struct DimensionError : std::length_error {
    using std::length_error::length_error;
};

// Steady-current fit window holds fewer samples than the fit needs.
struct InsufficientWindowError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Wave packet touched a lattice edge where it corrupts the measurement.
struct BoundaryContaminationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Readout comparator fed trajectories on different time grids.
struct AlignmentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or truncated state checkpoint.
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A validation battery check failed its tolerance.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem trouble: unwritable output directory, unreadable input file.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sat
