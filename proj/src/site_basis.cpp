#include "sat/site_basis.hpp"

#include <cmath>

#include "sat/errors.hpp"

namespace sat::mps {

SiteBasis SiteBasis::bulk(int n_max) {
    if (n_max < 1) throw ConfigError("site basis requires n_max >= 1");
    return SiteBasis(n_max, false);
}

SiteBasis SiteBasis::impurity(int n_max) {
    if (n_max < 1) throw ConfigError("site basis requires n_max >= 1");
    return SiteBasis(n_max, true);
}

Eigen::MatrixXd SiteBasis::annihilator() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim(), dim());
    const int regs = imp_ ? 2 : 1;
    for (int r = 0; r < regs; ++r) {
        for (int n = 1; n <= nmax_; ++n) {
            const int src = r * (nmax_ + 1) + n;
            b(src - 1, src) = std::sqrt(double(n));
        }
    }
    return b;
}

Eigen::MatrixXd SiteBasis::number_op() const {
    Eigen::MatrixXd n = Eigen::MatrixXd::Zero(dim(), dim());
    for (int s = 0; s < dim(); ++s) n(s, s) = bosons(s);
    return n;
}

Eigen::MatrixXd SiteBasis::molecule_op() const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim(), dim());
    for (int s = 0; s < dim(); ++s)
        if (molecule(s)) p(s, s) = 1.0;
    return p;
}

Eigen::MatrixXd SiteBasis::atom_number_op() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
    for (int s = 0; s < dim(); ++s) a(s, s) = atoms(s);
    return a;
}

Eigen::MatrixXd SiteBasis::onsite(const model::ChannelParams& ch) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
    for (int s = 0; s < dim(); ++s) {
        const double n = bosons(s);
        h(s, s) = 0.5 * ch.U_bb * n * (n - 1.0);
        if (imp_) {
            if (molecule(s))
                h(s, s) += -ch.Delta + ch.U_bm * n;
            else
                h(s, s) += ch.U_qb * n;
        }
    }
    if (imp_) {
        // Conversion is automatically zero on |0,q> and saturated m states.
        for (int n = 1; n <= nmax_; ++n) {
            const int q = index_of(n, false);
            const int m = index_of(n - 1, true);
            h(q, m) = h(m, q) = ch.Omega * std::sqrt(double(n));
        }
    }
    return h;
}

std::vector<SiteBasis> chain_bases(const model::LatticeGeometry& geom, int n_max) {
    std::vector<SiteBasis> bases;
    bases.reserve(std::size_t(geom.total_sites()));
    for (int j = 0; j < geom.total_sites(); ++j)
        bases.push_back(j == geom.impurity_index() ? SiteBasis::impurity(n_max)
                                                   : SiteBasis::bulk(n_max));
    return bases;
}

std::vector<SiteBasis> box_bases(int M_left, int n_max) {
    if (M_left < 1) throw ConfigError("box needs at least one site");
    return std::vector<SiteBasis>(std::size_t(M_left), SiteBasis::bulk(n_max));
}

} // namespace sat::mps
