#include "sat/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sat::scattering {

using std::numbers::pi;

ScatteringAmplitudes amplitudes(double k, const model::ChannelParams& ch)
{
    ch.validate();
    if (!(k > 0.0 && k < pi))
        throw EvanescentModeError("amplitudes: k=" + std::to_string(k) +
                                  " outside the propagating branch (0, pi)");
    const double v = model::group_velocity(k, ch);
    if (v <= 1e-12 * ch.J)
        throw EvanescentModeError("amplitudes: v(k) vanishes at the band edge");

    ScatteringAmplitudes out;
    out.k = k;

    const auto u = model::u_eff(k, ch);
    if (u.pole) {
        // Molecular resonance: U_eff -> inf gives complete reflection.
        out.f_plus = 0.0;
        out.f_minus = 1.0;
        out.T = 0.0;
        out.R = 1.0;
        return out;
    }

    // Common denominator keeps f_plus + f_minus = 1 to roundoff.
    const std::complex<double> den(v, u.value);
    out.f_plus = v / den;
    out.f_minus = std::complex<double>(0.0, u.value) / den;
    const double s = v * v + u.value * u.value;
    out.T = v * v / s;
    out.R = u.value * u.value / s;
    return out;
}

TransmissionProfile transmission_profile(const model::ChannelParams& ch, int n_samples)
{
    ch.validate();
    if (n_samples < 2)
        throw ConfigError("transmission_profile: n_samples must be >= 2");

    TransmissionProfile prof;
    prof.channel = ch;
    prof.samples.reserve(static_cast<size_t>(n_samples) + 2);

    for (int i = 0; i < n_samples; ++i) {
        const double k = pi * (i + 1) / (n_samples + 1);
        const auto a = amplitudes(k, ch);
        prof.samples.push_back({k, model::dispersion(k, ch), a.T, a.R, a.f_plus, false});
    }

    // Exact feature points of the Fano profile, bypassing floating evaluation.
    if (const auto e0 = model::reflection_energy(ch)) {
        const double k0 = model::wavenumber_at_energy(*e0, ch);
        prof.samples.push_back({k0, *e0, 0.0, 1.0, {0.0, 0.0}, true});
    }
    if (const auto e1 = model::transmission_unity_energy(ch)) {
        const double k1 = model::wavenumber_at_energy(*e1, ch);
        prof.samples.push_back({k1, *e1, 1.0, 0.0, {1.0, 0.0}, true});
    }

    std::sort(prof.samples.begin(), prof.samples.end(),
              [](const TransmissionSample& a, const TransmissionSample& b) {
                  if (a.k != b.k)
                      return a.k < b.k;
                  return b.inserted < a.inserted; // inserted exact point first
              });
    // A grid point may coincide with an inserted feature; keep the exact one.
    prof.samples.erase(std::unique(prof.samples.begin(), prof.samples.end(),
                                   [](const TransmissionSample& a, const TransmissionSample& b) {
                                       return std::abs(a.k - b.k) < 1e-12;
                                   }),
                       prof.samples.end());
    return prof;
}

double dilute_gas_current(double k, int N, const model::ChannelParams& ch,
                          const model::LatticeGeometry& geom)
{
    if (N < 1)
        throw ConfigError("dilute_gas_current: N must be >= 1");
    if (geom.M_left < 1)
        throw ConfigError("dilute_gas_current: M_left must be >= 1");
    const auto a = amplitudes(k, ch);
    return N * a.T * model::group_velocity(k, ch) / geom.M_left;
}

} // namespace sat::scattering
