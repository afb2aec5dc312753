#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sat/model.hpp"

// Local Hilbert spaces of the chain. Bulk sites hold |n>, n = 0..n_max. The
// impurity is one composite site |n, s> with a two-state register s in {q, m}:
// q = impurity atom present, m = impurity atom bound with one probe atom into
// a molecule. The conserved charge is the probe-atom count n + [s=m].

namespace sat::mps {

class SiteBasis {
public:
    static SiteBasis bulk(int n_max);
    static SiteBasis impurity(int n_max);

    int dim() const { return imp_ ? 2 * (nmax_ + 1) : nmax_ + 1; }
    int n_max() const { return nmax_; }
    bool is_impurity() const { return imp_; }

    int bosons(int state) const { return imp_ ? state % (nmax_ + 1) : state; }
    bool molecule(int state) const { return imp_ && state >= nmax_ + 1; }
    int atoms(int state) const { return bosons(state) + (molecule(state) ? 1 : 0); }
    int index_of(int n, bool mol) const { return (mol ? nmax_ + 1 : 0) + n; }

    // Lattice-atom lowering operator; acts within the register on the impurity.
    Eigen::MatrixXd annihilator() const;
    Eigen::MatrixXd number_op() const;      // lattice occupation n
    Eigen::MatrixXd molecule_op() const;    // projector on s = m
    Eigen::MatrixXd atom_number_op() const; // n + [s=m]

    // Site-local Hamiltonian terms: U_bb/2 n(n-1) everywhere; on the impurity
    // additionally U_qb n (s=q), -Delta + U_bm n (s=m), and the conversion
    // Omega sqrt(n): |n, q> <-> |n-1, m>.
    Eigen::MatrixXd onsite(const model::ChannelParams& ch) const;

private:
    SiteBasis(int n_max, bool imp) : nmax_(n_max), imp_(imp) {}
    int nmax_;
    bool imp_;
};

// Full chain: M_left bulk sites, the impurity, M_right bulk sites.
std::vector<SiteBasis> chain_bases(const model::LatticeGeometry& geom, int n_max);

// Source box alone (ground-state preparation runs with walls up, Omega off).
std::vector<SiteBasis> box_bases(int M_left, int n_max);

} // namespace sat::mps
