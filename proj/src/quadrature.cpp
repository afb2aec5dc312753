#include "sat/quadrature.hpp"

#include <cmath>

#include "sat/errors.hpp"

namespace sat::quad {

namespace {

struct Simpson {
    const std::function<double(double)>& f;
    int max_depth;

    static double rule(double fa, double fm, double fb, double h)
    {
        return h / 6.0 * (fa + 4.0 * fm + fb);
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const
    {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = rule(fa, flm, fm, m - a);
        const double right = rule(fm, frm, fb, b - m);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14 * std::abs(m))
            return left + right + delta / 15.0;
        if (depth >= max_depth)
            throw ConvergenceError("adaptive_simpson: recursion depth exceeded");
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth)
{
    if (a == b)
        return 0.0;

    // Coarse 9-point estimate to turn the relative tolerance into an absolute one.
    double coarse = 0.0;
    const int n0 = 8;
    for (int i = 0; i < n0; ++i) {
        const double x0 = a + (b - a) * i / n0;
        const double x1 = a + (b - a) * (i + 1) / n0;
        coarse += Simpson::rule(f(x0), f(0.5 * (x0 + x1)), f(x1), x1 - x0);
    }
    double tol = std::max(abs_tol, rel_tol * std::abs(coarse));
    if (tol == 0.0)
        tol = 1e-300; // integrand may be identically zero; one refinement settles it

    const Simpson s{f, max_depth};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return s.recurse(a, b, fa, fm, fb, Simpson::rule(fa, fm, fb, b - a), tol, 0);
}

} // namespace sat::quad
