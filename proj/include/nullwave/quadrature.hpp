#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nullwave {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
///
/// Uses the usual recursive bisection with the Richardson correction
/// (S2 + (S2 - S1) / 15). Recursion is capped at `max_depth` levels.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

/// Composite Simpson rule for samples f[0..N] on a uniform grid of spacing h.
///
/// N even: plain Simpson. N odd (N >= 3): Simpson on [0, N-3] and the 3/8 rule
/// on the last three panels. N == 1 falls back to the trapezoid rule.
double composite_simpson(std::span<const double> f, double h);

/// Same as composite_simpson but for an interleaved array with `stride`
/// between consecutive samples (component-major layouts).
double composite_simpson_strided(std::span<const double> f, std::size_t count, std::size_t stride,
                                 double h);

}  // namespace nullwave
