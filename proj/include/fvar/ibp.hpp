#pragma once

#include "fvar/grid.hpp"

#include <string>
#include <vector>

namespace fvar {

/// Both sides of an integration-by-parts identity evaluated numerically.
struct IbpResidual {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;     // |lhs - rhs|
    double rel_residual = 0.0; // residual / max(1, |lhs|, |rhs|)
    double grid_h = 0.0;
    std::vector<double> rhs_terms; // individual right-hand-side contributions
};

/// int_a^b g . (left beta-integral of f) == int_a^b f . (right beta-integral of g).
IbpResidual verify_ibp_integral(const SampledPath& f, const SampledPath& g, double beta);

/// int_a^b g . (Caputo_a^alpha f) == int_a^b f . (right RL_b^alpha g)
///   + [f . (right (1-alpha)-integral of g)]_a^b.
IbpResidual verify_ibp_caputo(const SampledPath& f, const SampledPath& g, double alpha);

/// The split form with integration range starting at an interior node r:
/// int_r^b g . (Caputo_a^alpha f) == int_r^b f . (right RL_b^alpha g)
///   - int_a^r f . tail_derivative_correction(g)
///   - (f(a)/Gamma(1-alpha)) int_r^b (t-a)^{-alpha} g(t) dt.
/// rhs_terms reports the three contributions individually.
IbpResidual verify_ibp_split(const SampledPath& f, const SampledPath& g, double alpha, int r);

/// One fixed C^1 test pair on [0, 2] for the convergence catalog.
struct IbpCatalogEntry {
    std::string name;
    std::string identity; // "integral" | "caputo" | "split"
    double order;         // beta or alpha
    double (*f)(double);
    double (*g)(double);
};

/// The built-in catalog. Pairs feeding the caputo/split identities vanish
/// where the right-sided derivatives are singular (at b, and at the split
/// point r for the split identity), keeping the outer trapezoid first-order
/// accurate or better.
const std::vector<IbpCatalogEntry>& ibp_catalog();

/// Run one catalog entry at resolution n (grid [0,2], tau = 1, r at x = 1).
IbpResidual run_ibp_entry(const IbpCatalogEntry& entry, int n);

} // namespace fvar
