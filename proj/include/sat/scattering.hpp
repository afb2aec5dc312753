#pragma once

#include <complex>
#include <vector>

#include "sat/model.hpp"

// Exact scattering of one propagating atom off the dressed impurity:
// f_pm(k) = [1 + (i U_eff / v)^{+/-1}]^{-1}, so f_plus + f_minus = 1 and
// T = |f_plus|^2 = v^2 / (v^2 + U_eff^2).

namespace sat::scattering {

struct ScatteringAmplitudes {
    double k = 0.0;
    std::complex<double> f_plus;  // forward amplitude
    std::complex<double> f_minus; // backward amplitude
    double T = 0.0;
    double R = 0.0;
};

struct TransmissionSample {
    double k = 0.0;
    double epsilon = 0.0;
    double T = 0.0;
    double R = 0.0;
    std::complex<double> f_plus;
    bool inserted = false; // exact zero/unity point, not from the uniform grid
};

struct TransmissionProfile {
    model::ChannelParams channel;
    std::vector<TransmissionSample> samples; // ordered by k, epsilon increasing
};

// Throws EvanescentModeError unless 0 < k < pi with v(k) > 0.
ScatteringAmplitudes amplitudes(double k, const model::ChannelParams& ch);

// Uniform k grid of n_samples interior points plus exact zero/unity samples
// inserted where those energies lie inside the band.
TransmissionProfile transmission_profile(const model::ChannelParams& ch, int n_samples);

// Dilute-gas steady current N * T(k) * v(k) / M_left: N independent carriers at
// momentum k, normalised per source-box site.
double dilute_gas_current(double k, int N, const model::ChannelParams& ch,
                          const model::LatticeGeometry& geom);

} // namespace sat::scattering
