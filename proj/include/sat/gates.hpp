#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sat/model.hpp"
#include "sat/site_basis.hpp"

// Two-site Trotter gates. Bond b carries the hop between sites b and b+1 plus
// the site terms, edge sites with full weight and interior sites with half
// weight so the bond sum reproduces the Hamiltonian exactly.

namespace sat::mps {

struct BondGates {
    std::vector<Eigen::MatrixXd> h;      // two-site generators, index s*d_right + t
    std::vector<Eigen::MatrixXcd> full;  // exp(-i h dt) (or exp(-h dtau))
    std::vector<Eigen::MatrixXcd> half;  // same at dt/2
    double dt = 0.0;
    bool imaginary = false;
};

Eigen::MatrixXd bond_hamiltonian(const std::vector<SiteBasis>& bases,
                                 const model::ChannelParams& ch, int bond);

BondGates build_gates(const std::vector<SiteBasis>& bases, const model::ChannelParams& ch,
                      double dt, bool imaginary);

// Rebuilds only the bonds whose generator involves the impurity site, for
// time-dependent conversion drive.
void set_conversion_amplitude(BondGates& gates, const std::vector<SiteBasis>& bases,
                              const model::ChannelParams& ch, double omega_now);

// exp applied per atom-number block; entries coupling different two-site
// charges are zero by construction, never by floating-point accident.
Eigen::MatrixXcd charge_blocked_exponential(const Eigen::MatrixXd& h, const SiteBasis& left,
                                            const SiteBasis& right, std::complex<double> prefactor);

} // namespace sat::mps
