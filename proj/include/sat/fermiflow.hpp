#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sat/kernels.hpp"
#include "sat/model.hpp"

// Exact dynamics for noninteracting fermions: one (L+1)-level single-particle
// Hamiltonian (L lattice sites + molecule level at index L), a Fermi sea of N
// orthonormal orbitals, and closed-form current analytics.

namespace sat::fermi {

struct SingleParticleSystem {
    model::ChannelParams channel;
    model::LatticeGeometry geometry;
    Eigen::MatrixXd h; // (L+1) x (L+1), real symmetric

    int dim() const { return static_cast<int>(h.rows()); }
    int molecule_index() const { return dim() - 1; }
};

struct FermiSeaState {
    Eigen::MatrixXcd orbitals; // dim x N, orthonormal columns
    double t = 0.0;
};

struct CurrentSample {
    double t = 0.0;
    double n_left = 0.0;
    double n_imp = 0.0;
    double n_right = 0.0;
    double n_mol = 0.0;
};

struct CurrentSeries {
    model::LatticeGeometry geometry;
    std::vector<CurrentSample> samples;
};

struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    int n_samples = 0;
};

// Closed-form current bundle: `value` is the analytically integrated form
// (the one consistent with the k-integral; see value() notes in the source),
// `printed` the verbatim textbook transcription kept for the record.
struct ClosedFormCurrent {
    double value = 0.0;
    double printed = 0.0;
    double integral = 0.0;
    double ratio_value_over_integral = 0.0;
    double ratio_printed_over_integral = 0.0;
    bool consistent = false; // |value - integral| <= 1e-7 relative
};

// Lattice sites 0..L-1 with hopping -J, U_qb on the impurity diagonal, Omega
// coupling the impurity site to the molecule level, -Delta on that level.
SingleParticleSystem build_system(const model::ChannelParams& ch,
                                  const model::LatticeGeometry& geom);

// Lowest N orbitals of the left box with walls up and Omega off: standing waves
// sin(q pi (j+1)/(M_left+1)) at energies -2J cos(q pi /(M_left+1)).
FermiSeaState prepare_fermi_sea(const SingleParticleSystem& sys);

// Sum of the occupied box orbital energies.
double fermi_sea_energy(const SingleParticleSystem& sys);

// Quench: walls down, Omega on; exact propagation by one eigendecomposition of
// h. Samples observables at every step including t=0 (n_steps+1 samples) and
// leaves `state` advanced to t + n_steps*dt.
CurrentSeries evolve(FermiSeaState& state, const SingleParticleSystem& sys, double dt,
                     int n_steps, kernels::Exec exec = kernels::Exec::parallel);

// Least-squares slope of y(t) over [t1, t2] with its standard error.
// Throws InsufficientWindowError when the window holds fewer than 10 samples.
SlopeFit fit_slope(const std::vector<double>& t, const std::vector<double>& y, double t1,
                   double t2);
SlopeFit steady_current(const CurrentSeries& series, double t1, double t2);

// I0 = (1/2pi) * int_0^{pi n} T(k) v(k) dk by adaptive quadrature; normalised
// so that Omega=0 gives 2J sin^2(n pi/2)/pi. Valid for any Delta.
double analytic_current_integral(const model::ChannelParams& ch, double n,
                                 double rel_tol = 1e-12);

// Resonant-driving closed form; requires Delta = 0 and U_qb = 0 (its G+- carry
// no other couplings). Returns value/printed/integral plus consistency data.
ClosedFormCurrent analytic_current_closed_form(const model::ChannelParams& ch, double n);

} // namespace sat::fermi
