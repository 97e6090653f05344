#pragma once

#include "fvar/grid.hpp"

namespace fvar {

/// Left fractional integral of order beta from node `lower`:
///   (1/Gamma(beta)) int_lower^x (x-t)^{beta-1} f(t) dt.
/// Product trapezoid: the kernel is integrated exactly against the
/// piecewise-linear interpolant of f. Output on [lower, f.hi]; zero at lower.
SampledPath left_frac_integral(const SampledPath& f, double beta, int lower);

/// Right fractional integral of order beta up to node `upper`:
///   (1/Gamma(beta)) int_x^upper (t-x)^{beta-1} g(t) dt.
/// Output on [g.lo, upper]; zero at upper.
SampledPath right_frac_integral(const SampledPath& g, double beta, int upper);

/// Left Caputo derivative of order alpha in (0,1) from node `lower`, by the
/// L1 scheme: f' replaced by per-subinterval difference quotients, kernel
/// integrated exactly. Output on [lower, f.hi]; zero at lower by convention.
SampledPath caputo_left(const SampledPath& f, double alpha, int lower);

/// Left Riemann-Liouville derivative of order alpha in (0,1): d/dx of the
/// left (1-alpha)-integral, differentiated by finite differences.
SampledPath rl_left_derivative(const SampledPath& f, double alpha, int lower);

/// Right Riemann-Liouville derivative of order alpha in (0,1):
///   -(1/Gamma(1-alpha)) d/dx int_x^upper (t-x)^{-alpha} g(t) dt,
/// computed as -d/dx of the right (1-alpha)-integral by finite differences
/// (centered inside, one-sided three-point at range ends). Unreliable at the
/// node `upper` itself when g(upper) != 0; callers mask accordingly.
SampledPath rl_right_derivative(const SampledPath& g, double alpha, int upper);

/// The delay-splitting correction term
///   (1/Gamma(1-alpha)) d/dx int_r^upper (t-x)^{-alpha} g(t) dt
/// evaluated at nodes x in [a, r]. g must cover [r, upper]. The inner
/// integral uses exact kernel moments; d/dx uses the same finite-difference
/// stencils as rl_right_derivative so that the two combine cleanly at x = r.
SampledPath tail_derivative_correction(const SampledPath& g, double alpha, int r, int upper);

/// The companion integral term
///   (1/Gamma(beta)) int_r^upper (t-x)^{beta-1} g(t) dt
/// evaluated at nodes x in [a, r]; exact kernel moments handle the x = r case.
SampledPath tail_integral_correction(const SampledPath& g, double beta, int r, int upper);

} // namespace fvar
