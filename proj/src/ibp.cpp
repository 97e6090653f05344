#include "fvar/ibp.hpp"
#include "fvar/errors.hpp"
#include "fvar/fracops.hpp"
#include "fvar/gamma.hpp"

#include <cmath>

namespace fvar {

namespace {

void check_common_range(const SampledPath& f, const SampledPath& g) {
    if (!same_grid(f.grid(), g.grid()) || f.lo() != g.lo() || f.hi() != g.hi())
        throw DomainError("ibp: f and g must share grid and node range");
}

IbpResidual finish(double lhs, double rhs, double h, std::vector<double> terms = {}) {
    IbpResidual r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = std::abs(lhs - rhs);
    r.rel_residual = r.residual / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    r.grid_h = h;
    r.rhs_terms = std::move(terms);
    return r;
}

} // namespace

IbpResidual verify_ibp_integral(const SampledPath& f, const SampledPath& g, double beta) {
    check_common_range(f, g);
    const double lhs = trapezoid(g * left_frac_integral(f, beta, f.lo()));
    const double rhs = trapezoid(f * right_frac_integral(g, beta, g.hi()));
    return finish(lhs, rhs, f.grid()->h());
}

IbpResidual verify_ibp_caputo(const SampledPath& f, const SampledPath& g, double alpha) {
    check_common_range(f, g);
    const double lhs = trapezoid(g * caputo_left(f, alpha, f.lo()));
    const SampledPath ig = right_frac_integral(g, 1.0 - alpha, g.hi());
    const double integral_term = trapezoid(f * rl_right_derivative(g, alpha, g.hi()));
    // ig vanishes at b by construction, so the boundary bracket reduces to
    // the contribution at a.
    const double boundary_term = f.at(f.hi()) * ig.at(g.hi()) - f.at(f.lo()) * ig.at(g.lo());
    const double rhs = integral_term + boundary_term;
    return finish(lhs, rhs, f.grid()->h(), {integral_term, boundary_term});
}

IbpResidual verify_ibp_split(const SampledPath& f, const SampledPath& g, double alpha, int r) {
    check_common_range(f, g);
    if (r <= f.lo() || r >= f.hi())
        throw DomainError("ibp split: r must be strictly interior to the range");
    const auto& grid = f.grid();
    const int hi = f.hi();

    const double lhs = trapezoid(g * caputo_left(f, alpha, f.lo()), r, hi);

    const SampledPath g_tail = g.slice(r, hi);
    const double t1 = trapezoid(f.slice(r, hi) * rl_right_derivative(g_tail, alpha, hi));
    const double t2 = trapezoid(f.slice(f.lo(), r) *
                                tail_derivative_correction(g, alpha, r, hi));

    // (f(a)/Gamma(1-alpha)) int_r^b (t-a)^{-alpha} g(t) dt: the kernel is
    // smooth on [r, b] because r > a.
    const double x_a = f.x_of(f.lo());
    const SampledPath kernel_g = SampledPath::sample(
        grid, r, hi, [&](double t) { return std::pow(t - x_a, -alpha); });
    const double t3 =
        f.at(f.lo()) / gamma_fn(1.0 - alpha) * trapezoid(kernel_g * g_tail);

    return finish(lhs, t1 - t2 - t3, grid->h(), {t1, -t2, -t3});
}

namespace {

double fn_x(double x) { return x; }
double fn_x2(double x) { return x * x; }
double fn_x2p1(double x) { return x * x + 1.0; }
double fn_two_minus_x(double x) { return 2.0 - x; }
double fn_two_minus_x_sq_off(double x) { return (2.0 - x) * (2.0 - x) + 0.5; }
double fn_sin(double x) { return std::sin(x); }
double fn_cos(double x) { return std::cos(x); }
double fn_exp_half(double x) { return std::exp(0.5 * x); }
double fn_exp_neg(double x) { return std::exp(-x); }
double fn_sin_half_pi(double x) { return std::sin(1.5707963267948966 * x); }
double fn_hump(double x) { return x * (2.0 - x); }
double fn_split_bump(double x) { return (x - 1.0) * (2.0 - x); }
double fn_sin_pi(double x) { return std::sin(3.141592653589793 * x); }

} // namespace

const std::vector<IbpCatalogEntry>& ibp_catalog() {
    static const std::vector<IbpCatalogEntry> catalog = {
        // Curved polynomials with nonzero endpoint values: the discrete
        // identity is adjoint-exact up to boundary terms, so a pair that is
        // piecewise linear or vanishes at the range ends sits at roundoff and
        // cannot show a convergence order.
        {"integral_poly_beta_0.5", "integral", 0.5, fn_x2p1, fn_two_minus_x_sq_off},
        {"integral_sin_exp_beta_0.5", "integral", 0.5, fn_sin, fn_exp_neg},
        {"integral_poly_beta_1", "integral", 1.0, fn_x2, fn_x2p1},
        {"integral_exp_cos_beta_1.7", "integral", 1.7, fn_exp_half, fn_cos},
        {"caputo_poly_alpha_0.5", "caputo", 0.5, fn_x2, fn_two_minus_x},
        {"caputo_sin_alpha_0.25", "caputo", 0.25, fn_sin, fn_sin_half_pi},
        {"caputo_exp_alpha_0.75", "caputo", 0.75, fn_exp_half, fn_hump},
        {"split_poly_alpha_0.5", "split", 0.5, fn_x, fn_split_bump},
        {"split_exp_alpha_0.25", "split", 0.25, fn_exp_neg, fn_sin_pi},
        {"split_poly_alpha_0.75", "split", 0.75, fn_x2, fn_split_bump},
    };
    return catalog;
}

IbpResidual run_ibp_entry(const IbpCatalogEntry& entry, int n) {
    const GridPtr grid = make_grid(0.0, 2.0, 1.0, n);
    const SampledPath f = SampledPath::sample(grid, grid->idx_a(), grid->idx_b(), entry.f);
    const SampledPath g = SampledPath::sample(grid, grid->idx_a(), grid->idx_b(), entry.g);
    if (entry.identity == "integral") return verify_ibp_integral(f, g, entry.order);
    if (entry.identity == "caputo") return verify_ibp_caputo(f, g, entry.order);
    if (entry.identity == "split")
        return verify_ibp_split(f, g, entry.order, grid->idx_b_minus_tau());
    throw DomainError("unknown ibp identity '" + entry.identity + "'");
}

} // namespace fvar
