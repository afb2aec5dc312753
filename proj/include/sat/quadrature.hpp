#pragma once

#include <functional>

namespace sat::quad {

// Adaptive Simpson integration of f over [a, b]. The tolerance is split across
// subintervals in the standard way (Richardson error estimate |S2-S1|/15), so
// the returned value satisfies roughly |I - exact| <= rel_tol*|exact| + abs_tol
// for smooth integrands. Throws ConvergenceError if the recursion exceeds
// max_depth without meeting the local tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 48);

} // namespace sat::quad
