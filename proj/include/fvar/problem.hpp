#pragma once

#include "fvar/expr.hpp"
#include "fvar/grid.hpp"

#include <string>
#include <vector>

namespace fvar {

/// A complete delayed fractional variational problem: minimize
///   J(y) = int_a^b L(x, y, v, w, z, y_tau, v_tau) dx
/// with v the left Caputo alpha-derivative of y, w the left beta-integral,
/// z(x) = int_a^x l(t, y, v, w) dt, delayed values y(x-tau) and y'(x-tau),
/// history y = phi on [a-tau, a], and terminal value y(b) = y_b.
struct ProblemSpec {
    double a = 0.0;
    double b = 1.0;
    double tau = 0.5;
    double alpha = 0.5;
    double beta = 1.0;
    double y_b = 0.0;
    int n = 128;
    bool classical = false;          // v means y'; no fractional operators
    bool positive_base_pow = false;  // permits non-constant exponents
    std::string label;
    Expr L;   // over x y v w z y_tau v_tau (+ parameters)
    Expr l;   // over x y v w (+ parameters)
    Expr phi; // over x (+ parameters)

    GridPtr grid() const { return make_grid(a, b, tau, n); }
    /// Same problem on a finer/coarser grid.
    ProblemSpec with_n(int n_override) const;
    /// Parameter environment (alpha, beta, tau, pi bound).
    Env param_env() const;
};

/// An admissible discrete trajectory: values on the full grid [a-tau, b] with
/// the history segment pinned to phi samples and the terminal value to y_b.
struct Trajectory {
    SampledPath y; // on [0, idx_b]
};

/// Throws ValidationError naming the offending field.
void validate_problem(const ProblemSpec& spec);

/// Parse the flat `key = value` problem-file format. `#` starts a comment;
/// keys may appear in any order; unknown or duplicate keys are rejected.
ProblemSpec load_problem(const std::string& contents);

/// Canonical problem-file text; load_problem(pretty_print(s)) reproduces a
/// structurally equal spec.
std::string pretty_print(const ProblemSpec& spec);

/// The built-in analytic benchmark: on [0,2] with tau = 1,
///   L = (v - gamma(alpha+2)*x)^2 + z + (v_tau - (alpha+1)*pospart(x-1)^alpha)^2
///   l = (y - x^(alpha+1))^2,  phi = 0,  y(2) = 2^(alpha+1).
/// Its exact minimizer is 0 on [-1,0] and x^(alpha+1) on [0,2], with J = 0.
ProblemSpec builtin_example(double alpha, int n = 128);

/// Catalog lookup by name: "example" (the benchmark above), "rich" (every
/// partial derivative nonzero), "classical-quadratic" (classical mode).
ProblemSpec builtin_problem(const std::string& name, double alpha = 0.5, int n = 128);
std::vector<std::string> builtin_names();

/// Exact nodal samples of the analytic minimizer of the built-in example.
Trajectory make_reference(const ProblemSpec& spec);

/// Assemble a trajectory from values at the nodes strictly between a and b;
/// history and terminal values are pinned from the spec.
Trajectory make_trajectory(const ProblemSpec& spec, const std::vector<double>& interior_values);

/// The pinned-boundary complement of make_trajectory.
std::vector<double> extract_interior(const ProblemSpec& spec, const Trajectory& traj);

/// History + terminal skeleton with interior filled by linear interpolation
/// from phi(a) to y_b.
Trajectory linear_init(const ProblemSpec& spec);

} // namespace fvar
