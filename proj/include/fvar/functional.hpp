#pragma once

#include "fvar/problem.hpp"

namespace fvar {

/// The sampled components of the argument vector
///   [y](x) = (x, y(x), v(x), w(x), z(x), y(x-tau), y'(x-tau))
/// along a trajectory. v is the left Caputo alpha-derivative and w the left
/// beta-integral (in classical mode v is y' and w is identically zero);
/// delayed values are exact node shifts of y and yprime.
struct EvaluatedFields {
    SampledPath y;      // [a, b]
    SampledPath v;      // [a, b], v(a) = 0 by operator convention
    SampledPath w;      // [a, b], w(a) = 0
    SampledPath z;      // [a, b], z(a) = 0
    SampledPath y_del;  // [a, b]
    SampledPath v_del;  // [a, b]
    SampledPath yprime; // [a - tau, b]; finite differences, evaluated
                        // separately on the history and main segments so the
                        // admissible kink at a never enters a stencil
};

EvaluatedFields evaluate_fields(const Trajectory& traj, const ProblemSpec& spec);

/// z(x) = int_a^x l(t, y, v, w) dt by cumulative trapezoid; exact zero path
/// when l is the literal 0.
SampledPath compute_z(const SampledPath& y, const SampledPath& v, const SampledPath& w,
                      const ProblemSpec& spec);

/// The cost functional: composite trapezoid of L over [a, b].
double evaluate_J(const Trajectory& traj, const ProblemSpec& spec);
double evaluate_J(const EvaluatedFields& fields, const ProblemSpec& spec);

/// Evaluate an expression over the full argument vector [y](x) at each node
/// of [a, b]. A literal-zero expression produces an exact zero path.
SampledPath eval_along_L(const Expr& e, const EvaluatedFields& f, const ProblemSpec& spec);

/// Evaluate an expression over the inner vector {y}(x) = (x, y, v, w).
SampledPath eval_along_inner(const Expr& e, const EvaluatedFields& f, const ProblemSpec& spec);

/// Environment for the argument vector at one node (terminal condition etc).
Env env_at(const EvaluatedFields& f, const ProblemSpec& spec, int node_index);

} // namespace fvar
