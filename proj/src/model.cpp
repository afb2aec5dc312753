#include "sat/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sat::model {

namespace {

// Relative scale for "energy hits the resonance exactly": roundoff in
// -2J cos(k) near the band centre is ~1e-16*J, so 1e-12 is wide enough to
// catch intended hits and far too narrow to matter for quadrature.
double pole_window(const ChannelParams& ch, double e_m)
{
    return 1e-12 * std::max(2.0 * ch.J, std::abs(e_m));
}

} // namespace

void ChannelParams::validate() const
{
    if (!(J > 0.0))
        throw ConfigError("ChannelParams: J must be positive, got " + std::to_string(J));
    if (Omega < 0.0)
        throw ConfigError("ChannelParams: Omega must be >= 0, got " + std::to_string(Omega));
    if (n_max < 1)
        throw ConfigError("ChannelParams: n_max must be >= 1, got " + std::to_string(n_max));
    if (species == Species::fermion && n_max != 1)
        throw ConfigError("ChannelParams: fermions are single-occupancy, n_max must be 1");
    if (!std::isfinite(Omega) || !std::isfinite(Delta) || !std::isfinite(U_qb) ||
        !std::isfinite(U_bm) || !std::isfinite(U_bb) || !std::isfinite(J))
        throw ConfigError("ChannelParams: all couplings must be finite");
}

void LatticeGeometry::validate(const ChannelParams& ch) const
{
    ch.validate();
    if (M_left < 1)
        throw ConfigError("LatticeGeometry: M_left must be >= 1");
    if (M_right < 0)
        throw ConfigError("LatticeGeometry: M_right must be >= 0");
    if (N < 1)
        throw ConfigError("LatticeGeometry: N must be >= 1");
    const long cap = static_cast<long>(M_left) *
                     (ch.species == Species::fermion ? 1 : ch.n_max);
    if (N > cap)
        throw OverfillError("LatticeGeometry: cannot seed " + std::to_string(N) +
                            " particles into a box holding at most " + std::to_string(cap));
}

double dispersion(double k, const ChannelParams& ch)
{
    return -2.0 * ch.J * std::cos(k);
}

double group_velocity(double k, const ChannelParams& ch)
{
    return 2.0 * ch.J * std::sin(k);
}

double molecule_level(const ChannelParams& ch)
{
    return -ch.Delta;
}

EffectiveInteraction u_eff_at_energy(double eps, const ChannelParams& ch)
{
    if (ch.Omega == 0.0)
        return {ch.U_qb, false};
    const double e_m = molecule_level(ch);
    if (std::abs(eps - e_m) <= pole_window(ch, e_m))
        return {0.0, true};
    return {ch.U_qb + ch.Omega * ch.Omega / (eps - e_m), false};
}

EffectiveInteraction u_eff(double k, const ChannelParams& ch)
{
    return u_eff_at_energy(dispersion(k, ch), ch);
}

double j_eff(double eps, const ChannelParams& ch)
{
    const double w = pole_window(ch, ch.Omega);
    if (std::abs(eps - ch.Omega) <= w || std::abs(eps + ch.Omega) <= w)
        throw DegenerateResonanceError("j_eff: eps coincides with a dressed level +/-Omega");
    return -ch.J * ch.J / (eps + ch.Omega) - ch.J * ch.J / (eps - ch.Omega);
}

DressedPair dressed_energies(const ChannelParams& ch)
{
    const double half = 0.5 * ch.U_qb;
    const double r = std::sqrt(half * half + ch.Omega * ch.Omega);
    return {half + r, half - r};
}

double transparency_detuning(const ChannelParams& ch)
{
    if (ch.Omega == 0.0)
        return 0.0;
    if (ch.U_qb == 0.0)
        throw UndefinedTransparencyError(
            "transparency_detuning: undefined for U_qb=0 with Omega>0");
    return -ch.Omega * ch.Omega / ch.U_qb;
}

namespace {

std::optional<double> in_band(double eps, const ChannelParams& ch)
{
    // Strict interior: a feature at a band edge has v=0 and no propagating mode.
    const double edge = 2.0 * ch.J * (1.0 - 1e-12);
    if (std::abs(eps) < edge)
        return eps;
    return std::nullopt;
}

} // namespace

std::optional<double> reflection_energy(const ChannelParams& ch)
{
    if (ch.Omega == 0.0)
        return std::nullopt;
    return in_band(molecule_level(ch), ch);
}

std::optional<double> transmission_unity_energy(const ChannelParams& ch)
{
    if (ch.Omega == 0.0 || ch.U_qb == 0.0)
        return std::nullopt;
    return in_band(molecule_level(ch) - ch.Omega * ch.Omega / ch.U_qb, ch);
}

double wavenumber_at_energy(double eps, const ChannelParams& ch)
{
    // Open branch only: |eps| = 2J is a band edge with v = 0, no running wave.
    if (std::abs(eps) >= 2.0 * ch.J)
        throw EvanescentModeError("wavenumber_at_energy: energy outside the open band");
    return std::acos(-eps / (2.0 * ch.J));
}

} // namespace sat::model
