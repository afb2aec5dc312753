#pragma once

#include <optional>

#include "sat/errors.hpp"

// Parameters and closed-form single-site physics of the dressed-impurity channel.
// Units throughout: hbar = 1, lattice constant a = 1, energies in units of the
// hopping J, times in 1/J.

namespace sat::model {

enum class Species { boson, fermion };

struct ChannelParams {
    double J = 1.0;     // nearest-neighbour hopping, J > 0 sets the scale
    double Omega = 0.0; // atom-molecule conversion amplitude, Omega >= 0
    double Delta = 0.0; // two-photon detuning; the molecule level sits at -Delta
    double U_qb = 0.0;  // probe-atom / impurity-atom on-site interaction
    double U_bm = 0.0;  // probe-atom / molecule on-site interaction
    double U_bb = 0.0;  // probe-atom / probe-atom on-site interaction (bosons)
    Species species = Species::boson;
    int n_max = 1;      // per-site boson cap (1 = hard core); fermions require 1

    void validate() const; // throws ConfigError
};

struct LatticeGeometry {
    int M_left = 1;  // source box sites, indices 0..M_left-1
    int M_right = 0; // drain sites right of the impurity
    int N = 1;       // initial particle number, prepared inside the box

    int impurity_index() const { return M_left; }
    int total_sites() const { return M_left + 1 + M_right; }

    void validate(const ChannelParams& ch) const; // throws ConfigError / OverfillError
};

// Eigenvalues of the on-site mixing matrix [[U_qb, Omega], [Omega, 0]].
struct DressedPair {
    double eps_plus;
    double eps_minus;
};

// Energy-dependent impurity coupling seen by one incident atom. The pole flag
// marks the molecular resonance (treated downstream as U_eff -> inf, T = 0).
struct EffectiveInteraction {
    double value = 0.0;
    bool pole = false;
};

// eps(k) = -2 J cos k, single Bloch band.
double dispersion(double k, const ChannelParams& ch);

// v(k) = d eps / d k = 2 J sin k.
double group_velocity(double k, const ChannelParams& ch);

// Bare molecular level: the conversion term carries -Delta m^+ m.
double molecule_level(const ChannelParams& ch);

// U_eff(eps) = U_qb + Omega^2 / (eps - e_m) with e_m = molecule_level(ch).
// The resonance sits at the molecular level, consistent with the -Delta m^+ m
// term every dynamical engine in this codebase carries; at Delta = 0 this
// coincides with all tabulated reference values. Energies within
// 1e-12 * max(2J, |e_m|) of e_m report the pole.
EffectiveInteraction u_eff_at_energy(double eps, const ChannelParams& ch);
EffectiveInteraction u_eff(double k, const ChannelParams& ch);

// Two-path effective tunnelling -J^2/(eps+Omega) - J^2/(eps-Omega); exact zero
// at eps = 0 by destructive interference. Throws DegenerateResonanceError at
// the dressed poles eps = +/- Omega.
double j_eff(double eps, const ChannelParams& ch);

// eps_pm = U_qb/2 +/- sqrt(U_qb^2/4 + Omega^2); sum = U_qb, product = -Omega^2.
DressedPair dressed_energies(const ChannelParams& ch);

// Detuning -Omega^2/U_qb at which the impurity screens itself: U_eff vanishes
// at band-centre energy. 0 when Omega = 0; throws UndefinedTransparencyError
// for U_qb = 0 with Omega > 0.
double transparency_detuning(const ChannelParams& ch);

// Band energy of the exact transmission zero (the molecular level), when it
// lies strictly inside the band and Omega > 0.
std::optional<double> reflection_energy(const ChannelParams& ch);

// Band energy of the exact transmission unity -Delta - Omega^2/U_qb (root of
// U_eff), when it lies strictly inside the band, Omega > 0 and U_qb != 0.
std::optional<double> transmission_unity_energy(const ChannelParams& ch);

// Inverse dispersion on the branch k in (0, pi).
double wavenumber_at_energy(double eps, const ChannelParams& ch);

} // namespace sat::model
