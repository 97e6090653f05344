#pragma once

#include "fvar/functional.hpp"

namespace fvar {

/// Numerical residuals of the three necessary optimality conditions: the
/// terminal condition dL/dv_tau(b) = 0, the inner condition on [a, b-tau]
/// (eleven terms, including the delay-splitting tail corrections and the
/// delayed-argument terms at x + tau), and the outer condition on [b-tau, b].
///
/// Norms are max-abs over nodes at least `mask margin` away from the ends of
/// each sub-interval; right-sided Riemann-Liouville derivatives are unreliable
/// at their own upper endpoint, and double finite differencing of the delayed
/// derivative amplifies the admissible kink at a. The margin is a fixed
/// fraction of the sub-interval (at least two interior nodes), so it shrinks
/// in node count but not in measure as the grid refines.
struct ELReport {
    double terminal_residual = 0.0;
    SampledPath inner; // [a, b-tau]
    SampledPath outer; // [b-tau, b]
    double inner_norm = 0.0;
    double outer_norm = 0.0;
    double grid_h = 0.0;
    int inner_unmasked_lo = 0, inner_unmasked_hi = 0;
    int outer_unmasked_lo = 0, outer_unmasked_hi = 0;
    /// Conditions 2 and 3 both apply at x = b-tau; the gap between their
    /// residuals there is recorded but never asserted on.
    double split_point_mismatch = 0.0;
};

/// Condition 1: dL/dv_tau evaluated on [y](b).
double residual_terminal(const Trajectory& traj, const ProblemSpec& spec);

/// Condition 2 residual path on [a, b-tau].
SampledPath residual_inner(const Trajectory& traj, const ProblemSpec& spec);

/// Condition 3 residual path on [b-tau, b].
SampledPath residual_outer(const Trajectory& traj, const ProblemSpec& spec);

/// All three conditions with masked norms. Rejects classical-mode specs.
ELReport el_report(const Trajectory& traj, const ProblemSpec& spec);

/// The alpha -> 1, beta -> 0 limit form: v means y', no fractional operators.
/// Requires a spec flagged classical.
ELReport classical_residual(const Trajectory& traj, const ProblemSpec& spec);

/// The first-variation pairing assembled exactly as in the sufficiency proof:
///   int_a^{b-tau} inner . d dx + int_{b-tau}^b outer . d dx
///     + terminal . d(b-tau),
/// for a variation direction d on the full grid (zero on the history segment
/// and at b). Matches the finite-difference directional derivative of J.
double directional_pairing(const ELReport& report, const SampledPath& direction);

/// Max-abs of a residual path under the standard endpoint mask; also reports
/// the unmasked index range.
double masked_norm(const SampledPath& p, int* unmasked_lo = nullptr, int* unmasked_hi = nullptr);

} // namespace fvar
