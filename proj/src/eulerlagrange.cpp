#include "fvar/eulerlagrange.hpp"
#include "fvar/errors.hpp"
#include "fvar/fracops.hpp"

#include <cmath>

namespace fvar {

namespace {

struct Partials {
    Expr Ly, Lv, Lw, Lz, Lyt, Lvt; // of L, in (y, v, w, z, y_tau, v_tau)
    Expr ly, lv, lw;               // of l, in (y, v, w)
};

Partials differentiate_all(const ProblemSpec& spec) {
    Partials p;
    p.Ly = spec.L.differentiate(Slot::y);
    p.Lv = spec.L.differentiate(Slot::v);
    p.Lw = spec.L.differentiate(Slot::w);
    p.Lz = spec.L.differentiate(Slot::z);
    p.Lyt = spec.L.differentiate(Slot::y_tau);
    p.Lvt = spec.L.differentiate(Slot::v_tau);
    p.ly = spec.l.differentiate(Slot::y);
    p.lv = spec.l.differentiate(Slot::v);
    p.lw = spec.l.differentiate(Slot::w);
    return p;
}

void add_into(SampledPath& acc, const SampledPath& term) {
    for (int i = term.lo(); i <= term.hi(); ++i) acc.at(i) += term.at(i);
}

void sub_into(SampledPath& acc, const SampledPath& term) {
    for (int i = term.lo(); i <= term.hi(); ++i) acc.at(i) -= term.at(i);
}

/// Values of `p` read at x + tau, for x in node range [lo, hi].
SampledPath shift_by_tau(const SampledPath& p, int lo, int hi) {
    const int shift = p.grid()->n_hist();
    SampledPath out = SampledPath::zeros(p.grid(), lo, hi);
    for (int i = lo; i <= hi; ++i) out.at(i) = p.at(i + shift);
    return out;
}

/// d/dx of p(x + tau) on [a, b-tau]: the composed path is extended one node
/// left of a so interior stencils stay centered; the b-tau end is one-sided.
SampledPath shifted_derivative(const SampledPath& p, int ia, int ibmt) {
    const SampledPath ext = shift_by_tau(p, ia - 1, ibmt);
    return derivative_fd(ext).slice(ia, ibmt);
}

struct Assembled {
    EvaluatedFields fields;
    SampledPath inner, outer;
    double terminal = 0.0;
};

double eval_terminal(const Partials& p, const EvaluatedFields& f, const ProblemSpec& spec) {
    if (p.Lvt.is_literal_zero()) return 0.0;
    return p.Lvt.eval(env_at(f, spec, f.y.grid()->idx_b()));
}

Assembled assemble_fractional(const Trajectory& traj, const ProblemSpec& spec) {
    const GridPtr grid = traj.y.grid();
    const int ia = grid->idx_a();
    const int ibmt = grid->idx_b_minus_tau();
    const int ib = grid->idx_b();
    const double alpha = spec.alpha;
    const double beta = spec.beta;

    Assembled out;
    out.fields = evaluate_fields(traj, spec);
    const EvaluatedFields& f = out.fields;
    const Partials p = differentiate_all(spec);

    SampledPath inner = SampledPath::zeros(grid, ia, ibmt);
    SampledPath outer = SampledPath::zeros(grid, ibmt, ib);

    // dL/dy contributes pointwise to both conditions.
    if (!p.Ly.is_literal_zero()) {
        const SampledPath PLy = eval_along_L(p.Ly, f, spec);
        add_into(inner, PLy.slice(ia, ibmt));
        add_into(outer, PLy.slice(ibmt, ib));
    }

    // dL/dv under right Riemann-Liouville derivatives. On [a, b-tau] the
    // operator stops at b-tau and the delay-splitting correction (Lemma-type
    // tail term) enters with a minus sign; both use the same difference
    // stencils so their endpoint singularities cancel in the sum.
    if (!p.Lv.is_literal_zero()) {
        const SampledPath PLv = eval_along_L(p.Lv, f, spec);
        add_into(inner, rl_right_derivative(PLv.slice(ia, ibmt), alpha, ibmt));
        sub_into(inner, tail_derivative_correction(PLv, alpha, ibmt, ib));
        add_into(outer, rl_right_derivative(PLv.slice(ibmt, ib), alpha, ib));
    }

    // dL/dw under right fractional integrals; the tail integral enters with
    // a plus sign.
    if (!p.Lw.is_literal_zero()) {
        const SampledPath PLw = eval_along_L(p.Lw, f, spec);
        add_into(inner, right_frac_integral(PLw.slice(ia, ibmt), beta, ibmt));
        add_into(inner, tail_integral_correction(PLw, beta, ibmt, ib));
        add_into(outer, right_frac_integral(PLw.slice(ibmt, ib), beta, ib));
    }

    // Terms routed through z: Z(x) = int_x^b dL/dz dt, paired with the
    // partials of l. Products are formed pointwise before the right-sided
    // operators are applied.
    if (!p.Lz.is_literal_zero()) {
        const SampledPath Zcap = reverse_cumulative_trapezoid(eval_along_L(p.Lz, f, spec));
        if (!p.ly.is_literal_zero()) {
            const SampledPath q_y = Zcap * eval_along_inner(p.ly, f, spec);
            add_into(inner, q_y.slice(ia, ibmt));
            add_into(outer, q_y.slice(ibmt, ib));
        }
        if (!p.lv.is_literal_zero()) {
            const SampledPath q_v = Zcap * eval_along_inner(p.lv, f, spec);
            add_into(inner, rl_right_derivative(q_v.slice(ia, ibmt), alpha, ibmt));
            sub_into(inner, tail_derivative_correction(q_v, alpha, ibmt, ib));
            add_into(outer, rl_right_derivative(q_v.slice(ibmt, ib), alpha, ib));
        }
        if (!p.lw.is_literal_zero()) {
            const SampledPath q_w = Zcap * eval_along_inner(p.lw, f, spec);
            add_into(inner, right_frac_integral(q_w.slice(ia, ibmt), beta, ibmt));
            add_into(inner, tail_integral_correction(q_w, beta, ibmt, ib));
            add_into(outer, right_frac_integral(q_w.slice(ibmt, ib), beta, ib));
        }
    }

    // Delay terms, read at x + tau by exact node shift. The derivative is
    // taken of the composed function of x; the composition has no symbolic
    // form, so it is differenced numerically.
    if (!p.Lyt.is_literal_zero())
        add_into(inner, shift_by_tau(eval_along_L(p.Lyt, f, spec), ia, ibmt));
    if (!p.Lvt.is_literal_zero())
        sub_into(inner, shifted_derivative(eval_along_L(p.Lvt, f, spec), ia, ibmt));

    out.inner = std::move(inner);
    out.outer = std::move(outer);
    out.terminal = eval_terminal(p, f, spec);
    return out;
}

Assembled assemble_classical(const Trajectory& traj, const ProblemSpec& spec) {
    const GridPtr grid = traj.y.grid();
    const int ia = grid->idx_a();
    const int ibmt = grid->idx_b_minus_tau();
    const int ib = grid->idx_b();

    Assembled out;
    out.fields = evaluate_fields(traj, spec);
    const EvaluatedFields& f = out.fields;
    const Partials p = differentiate_all(spec);

    SampledPath full = SampledPath::zeros(grid, ia, ib);
    if (!p.Ly.is_literal_zero()) add_into(full, eval_along_L(p.Ly, f, spec));
    if (!p.Lv.is_literal_zero())
        sub_into(full, derivative_fd(eval_along_L(p.Lv, f, spec)));
    if (!p.Lz.is_literal_zero()) {
        const SampledPath Zcap = reverse_cumulative_trapezoid(eval_along_L(p.Lz, f, spec));
        if (!p.ly.is_literal_zero()) add_into(full, Zcap * eval_along_inner(p.ly, f, spec));
        if (!p.lv.is_literal_zero())
            sub_into(full, derivative_fd(Zcap * eval_along_inner(p.lv, f, spec)));
    }

    SampledPath inner = full.slice(ia, ibmt);
    if (!p.Lyt.is_literal_zero())
        add_into(inner, shift_by_tau(eval_along_L(p.Lyt, f, spec), ia, ibmt));
    if (!p.Lvt.is_literal_zero())
        sub_into(inner, shifted_derivative(eval_along_L(p.Lvt, f, spec), ia, ibmt));

    out.inner = std::move(inner);
    out.outer = full.slice(ibmt, ib);
    out.terminal = eval_terminal(p, f, spec);
    return out;
}

ELReport report_from(const Assembled& a) {
    ELReport r;
    r.terminal_residual = a.terminal;
    r.inner = a.inner;
    r.outer = a.outer;
    r.grid_h = a.inner.grid()->h();
    r.inner_norm = masked_norm(a.inner, &r.inner_unmasked_lo, &r.inner_unmasked_hi);
    r.outer_norm = masked_norm(a.outer, &r.outer_unmasked_lo, &r.outer_unmasked_hi);
    const int ibmt = a.inner.hi();
    r.split_point_mismatch = std::abs(a.inner.at(ibmt) - a.outer.at(ibmt));
    return r;
}

} // namespace

double masked_norm(const SampledPath& p, int* unmasked_lo, int* unmasked_hi) {
    const double lo_x = p.x_of(p.lo());
    const double hi_x = p.x_of(p.hi());
    const double h = p.grid()->h();
    const double margin = std::max((hi_x - lo_x) / 32.0, 2.0 * h) * (1.0 + 1e-9);
    double norm = 0.0;
    int first = -1, last = -1;
    for (int i = p.lo(); i <= p.hi(); ++i) {
        const double x = p.x_of(i);
        if (x - lo_x <= margin || hi_x - x <= margin) continue;
        if (first < 0) first = i;
        last = i;
        if (!std::isfinite(p.at(i)))
            throw DomainError("residual path is not finite at x = " + std::to_string(x));
        norm = std::max(norm, std::abs(p.at(i)));
    }
    if (unmasked_lo) *unmasked_lo = first;
    if (unmasked_hi) *unmasked_hi = last;
    return norm;
}

double residual_terminal(const Trajectory& traj, const ProblemSpec& spec) {
    const EvaluatedFields f = evaluate_fields(traj, spec);
    const Expr Lvt = spec.L.differentiate(Slot::v_tau);
    if (Lvt.is_literal_zero()) return 0.0;
    return Lvt.eval(env_at(f, spec, traj.y.grid()->idx_b()));
}

SampledPath residual_inner(const Trajectory& traj, const ProblemSpec& spec) {
    if (spec.classical)
        throw DomainError("residual_inner: classical-mode spec; use classical_residual");
    return assemble_fractional(traj, spec).inner;
}

SampledPath residual_outer(const Trajectory& traj, const ProblemSpec& spec) {
    if (spec.classical)
        throw DomainError("residual_outer: classical-mode spec; use classical_residual");
    return assemble_fractional(traj, spec).outer;
}

ELReport el_report(const Trajectory& traj, const ProblemSpec& spec) {
    if (spec.classical)
        throw DomainError("el_report: classical-mode spec; use classical_residual");
    return report_from(assemble_fractional(traj, spec));
}

ELReport classical_residual(const Trajectory& traj, const ProblemSpec& spec) {
    if (!spec.classical)
        throw DomainError("classical_residual: spec is not flagged classical");
    return report_from(assemble_classical(traj, spec));
}

double directional_pairing(const ELReport& report, const SampledPath& direction) {
    const GridPtr grid = report.inner.grid();
    if (!same_grid(direction.grid(), grid))
        throw DomainError("directional_pairing: direction on a different grid");
    const int ia = grid->idx_a();
    const int ibmt = grid->idx_b_minus_tau();
    const int ib = grid->idx_b();
    double acc = trapezoid(report.inner * direction.slice(ia, ibmt));
    acc += trapezoid(report.outer * direction.slice(ibmt, ib));
    acc += report.terminal_residual * direction.at(ibmt);
    return acc;
}

} // namespace fvar
