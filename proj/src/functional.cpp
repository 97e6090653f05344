#include "fvar/functional.hpp"
#include "fvar/errors.hpp"
#include "fvar/fracops.hpp"

#include <cmath>

namespace fvar {

namespace {

SampledPath derivative_best(const SampledPath& p) {
    return p.count() >= 5 ? derivative_fd4(p) : derivative_fd(p);
}

[[noreturn]] void rethrow_at_node(const EvalError& e, double x) {
    throw EvalError("at x = " + std::to_string(x) + ": " + e.what(), e.subexpr);
}

} // namespace

Env env_at(const EvaluatedFields& f, const ProblemSpec& spec, int i) {
    Env env = spec.param_env();
    env[Slot::x] = f.y.x_of(i);
    env[Slot::y] = f.y.at(i);
    env[Slot::v] = f.v.at(i);
    env[Slot::w] = f.w.at(i);
    env[Slot::z] = f.z.at(i);
    env[Slot::y_tau] = f.y_del.at(i);
    env[Slot::v_tau] = f.v_del.at(i);
    return env;
}

SampledPath eval_along_L(const Expr& e, const EvaluatedFields& f, const ProblemSpec& spec) {
    SampledPath out = SampledPath::zeros(f.y.grid(), f.y.lo(), f.y.hi());
    if (e.is_literal_zero()) return out;
    for (int i = f.y.lo(); i <= f.y.hi(); ++i) {
        try {
            out.at(i) = e.eval(env_at(f, spec, i));
        } catch (const EvalError& err) {
            rethrow_at_node(err, f.y.x_of(i));
        }
    }
    return out;
}

SampledPath eval_along_inner(const Expr& e, const EvaluatedFields& f, const ProblemSpec& spec) {
    SampledPath out = SampledPath::zeros(f.y.grid(), f.y.lo(), f.y.hi());
    if (e.is_literal_zero()) return out;
    Env env = spec.param_env();
    for (int i = f.y.lo(); i <= f.y.hi(); ++i) {
        env[Slot::x] = f.y.x_of(i);
        env[Slot::y] = f.y.at(i);
        env[Slot::v] = f.v.at(i);
        env[Slot::w] = f.w.at(i);
        try {
            out.at(i) = e.eval(env);
        } catch (const EvalError& err) {
            rethrow_at_node(err, f.y.x_of(i));
        }
    }
    return out;
}

SampledPath compute_z(const SampledPath& y, const SampledPath& v, const SampledPath& w,
                      const ProblemSpec& spec) {
    if (spec.l.is_literal_zero())
        return SampledPath::zeros(y.grid(), y.lo(), y.hi());
    SampledPath integrand = SampledPath::zeros(y.grid(), y.lo(), y.hi());
    Env env = spec.param_env();
    for (int i = y.lo(); i <= y.hi(); ++i) {
        env[Slot::x] = y.x_of(i);
        env[Slot::y] = y.at(i);
        env[Slot::v] = v.at(i);
        env[Slot::w] = w.at(i);
        try {
            integrand.at(i) = spec.l.eval(env);
        } catch (const EvalError& err) {
            rethrow_at_node(err, y.x_of(i));
        }
    }
    return cumulative_trapezoid(integrand);
}

EvaluatedFields evaluate_fields(const Trajectory& traj, const ProblemSpec& spec) {
    const GridPtr grid = traj.y.grid();
    const int ia = grid->idx_a();
    const int ib = grid->idx_b();
    const int shift = grid->n_hist();
    if (traj.y.lo() != 0 || traj.y.hi() != ib)
        throw DomainError("evaluate_fields: trajectory must cover the full grid");

    EvaluatedFields f;
    f.y = traj.y.slice(ia, ib);

    // y' piecewise: the admissible class allows a kink at a, so stencils do
    // not cross it. The value at the node of a uses the right-sided stencil
    // into [a, b].
    SampledPath yprime = SampledPath::zeros(grid, 0, ib);
    {
        const SampledPath hist = derivative_best(traj.y.slice(0, ia));
        for (int i = 0; i < ia; ++i) yprime.at(i) = hist.at(i);
        const SampledPath main = derivative_best(traj.y.slice(ia, ib));
        for (int i = ia; i <= ib; ++i) yprime.at(i) = main.at(i);
    }
    f.yprime = yprime;

    if (spec.classical) {
        f.v = yprime.slice(ia, ib);
        f.w = SampledPath::zeros(grid, ia, ib);
    } else {
        f.v = caputo_left(traj.y, spec.alpha, ia);
        f.w = left_frac_integral(traj.y, spec.beta, ia);
    }

    f.y_del = SampledPath::zeros(grid, ia, ib);
    f.v_del = SampledPath::zeros(grid, ia, ib);
    for (int i = ia; i <= ib; ++i) {
        f.y_del.at(i) = traj.y.at(i - shift);
        f.v_del.at(i) = yprime.at(i - shift);
    }

    f.z = compute_z(f.y, f.v, f.w, spec);
    return f;
}

double evaluate_J(const EvaluatedFields& fields, const ProblemSpec& spec) {
    return trapezoid(eval_along_L(spec.L, fields, spec));
}

double evaluate_J(const Trajectory& traj, const ProblemSpec& spec) {
    // Lean assembly for the solver's hot path: operator fields that neither
    // L nor l references are left as zero paths. Their env slots are never
    // read, so the value matches the full evaluation bit for bit.
    const GridPtr grid = traj.y.grid();
    const int ia = grid->idx_a();
    const int ib = grid->idx_b();
    const int shift = grid->n_hist();
    if (traj.y.lo() != 0 || traj.y.hi() != ib)
        throw DomainError("evaluate_J: trajectory must cover the full grid");

    const bool need_v = spec.L.uses(Slot::v) || spec.l.uses(Slot::v);
    const bool need_w = spec.L.uses(Slot::w) || spec.l.uses(Slot::w);
    const bool need_z = spec.L.uses(Slot::z);
    const bool need_vdel = spec.L.uses(Slot::v_tau);

    EvaluatedFields f;
    f.y = traj.y.slice(ia, ib);
    if (spec.classical || need_vdel) {
        SampledPath yprime = SampledPath::zeros(grid, 0, ib);
        const SampledPath hist = derivative_best(traj.y.slice(0, ia));
        for (int i = 0; i < ia; ++i) yprime.at(i) = hist.at(i);
        const SampledPath main = derivative_best(traj.y.slice(ia, ib));
        for (int i = ia; i <= ib; ++i) yprime.at(i) = main.at(i);
        f.yprime = std::move(yprime);
    } else {
        f.yprime = SampledPath::zeros(grid, 0, ib);
    }

    if (spec.classical)
        f.v = f.yprime.slice(ia, ib);
    else
        f.v = need_v ? caputo_left(traj.y, spec.alpha, ia) : SampledPath::zeros(grid, ia, ib);
    f.w = (!spec.classical && need_w) ? left_frac_integral(traj.y, spec.beta, ia)
                                      : SampledPath::zeros(grid, ia, ib);

    f.y_del = SampledPath::zeros(grid, ia, ib);
    f.v_del = SampledPath::zeros(grid, ia, ib);
    for (int i = ia; i <= ib; ++i) {
        f.y_del.at(i) = traj.y.at(i - shift);
        f.v_del.at(i) = f.yprime.at(i - shift);
    }

    f.z = need_z ? compute_z(f.y, f.v, f.w, spec) : SampledPath::zeros(grid, ia, ib);
    return evaluate_J(f, spec);
}

} // namespace fvar
