#pragma once

namespace fvar {

/// Gamma function via a Lanczos approximation (relative error below 1e-13 on
/// (0, 10], well beyond that in practice). Poles at 0, -1, -2, ... raise
/// DomainError.
double gamma_fn(double x);

/// Digamma (logarithmic derivative of gamma). Needed by symbolic
/// differentiation through gamma(...).
double digamma_fn(double x);

} // namespace fvar
