#include "fvar/fracops.hpp"
#include "fvar/errors.hpp"
#include "fvar/gamma.hpp"

#include <cmath>
#include <vector>

namespace fvar {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("fractional derivative order alpha must lie in (0,1)");
}

void require_beta(double beta) {
    if (!(beta > 0.0)) throw DomainError("fractional integral order beta must be positive");
}

// (k*h)^p for k = 0..count-1. All exponents used here are positive, so the
// k = 0 entry is exactly zero.
std::vector<double> power_table(double h, double p, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) t[k] = std::pow(k * h, p);
    return t;
}

// Generic weakly singular right-sided quadrature:
//   out(x_i) = (1/Gamma(p)) int_{node(r)}^{node(upper)} (t - x_i)^{p-1} g(t) dt
// for i in [out_lo, out_hi], i <= r, with g piecewise linear. Shared by the
// right fractional integral (r = i) and the tail corrections (fixed r).
SampledPath right_kernel_quadrature(const SampledPath& g, double p, int r, int upper,
                                    int out_lo, int out_hi) {
    const auto& grid = g.grid();
    const double h = grid->h();
    const double inv_gamma = 1.0 / gamma_fn(p);
    const int max_k = upper - out_lo + 1;
    const std::vector<double> P = power_table(h, p, max_k + 1);
    const std::vector<double> Q = power_table(h, p + 1.0, max_k + 1);

    SampledPath out = SampledPath::zeros(grid, out_lo, out_hi);
    for (int i = out_lo; i <= out_hi; ++i) {
        const int from = (r < 0) ? i : r; // r < 0 means "start at x itself"
        double acc = 0.0;
        for (int j = from; j < upper; ++j) {
            const int k = j - i;
            const double m0 = (P[k + 1] - P[k]) / p;
            const double m1 = (Q[k + 1] - Q[k]) / (p + 1.0) - (k * h) * m0;
            acc += g.at(j) * (m0 - m1 / h) + g.at(j + 1) * (m1 / h);
        }
        out.at(i) = inv_gamma * acc;
    }
    return out;
}

} // namespace

SampledPath left_frac_integral(const SampledPath& f, double beta, int lower) {
    require_beta(beta);
    if (lower < f.lo() || lower > f.hi())
        throw DomainError("left_frac_integral: lower node outside sampled range");
    const auto& grid = f.grid();
    const double h = grid->h();
    const double inv_gamma = 1.0 / gamma_fn(beta);
    const int hi = f.hi();
    const int max_k = hi - lower;
    const std::vector<double> P = power_table(h, beta, max_k + 1);
    const std::vector<double> Q = power_table(h, beta + 1.0, max_k + 1);

    SampledPath out = SampledPath::zeros(grid, lower, hi);
    for (int i = lower + 1; i <= hi; ++i) {
        double acc = 0.0;
        for (int j = lower; j < i; ++j) {
            const int k = i - j; // u_j = k*h, u_{j+1} = (k-1)*h
            const double m0 = (P[k] - P[k - 1]) / beta;
            const double m1 = (k * h) * m0 - (Q[k] - Q[k - 1]) / (beta + 1.0);
            acc += f.at(j) * (m0 - m1 / h) + f.at(j + 1) * (m1 / h);
        }
        out.at(i) = inv_gamma * acc;
    }
    return out;
}

SampledPath right_frac_integral(const SampledPath& g, double beta, int upper) {
    require_beta(beta);
    if (upper < g.lo() || upper > g.hi())
        throw DomainError("right_frac_integral: upper node outside sampled range");
    return right_kernel_quadrature(g, beta, /*r=*/-1, upper, g.lo(), upper);
}

SampledPath caputo_left(const SampledPath& f, double alpha, int lower) {
    require_alpha(alpha);
    if (lower < f.lo() || lower > f.hi())
        throw DomainError("caputo_left: lower node outside sampled range");
    const auto& grid = f.grid();
    const double h = grid->h();
    const double c = 1.0 / gamma_fn(2.0 - alpha);
    const int hi = f.hi();
    const std::vector<double> R = power_table(h, 1.0 - alpha, hi - lower + 1);

    SampledPath out = SampledPath::zeros(grid, lower, hi);
    for (int i = lower + 1; i <= hi; ++i) {
        double acc = 0.0;
        for (int j = lower; j < i; ++j) {
            const int k = i - j;
            acc += (f.at(j + 1) - f.at(j)) / h * (R[k] - R[k - 1]);
        }
        out.at(i) = c * acc;
    }
    return out;
}

SampledPath rl_left_derivative(const SampledPath& f, double alpha, int lower) {
    require_alpha(alpha);
    const SampledPath w = left_frac_integral(f, 1.0 - alpha, lower);
    if (w.count() < 3)
        throw DomainError("rl_left_derivative: needs at least 3 nodes in range");
    return derivative_fd(w);
}

SampledPath rl_right_derivative(const SampledPath& g, double alpha, int upper) {
    require_alpha(alpha);
    const SampledPath w = right_frac_integral(g, 1.0 - alpha, upper);
    if (w.count() < 3)
        throw DomainError("rl_right_derivative: needs at least 3 nodes in range");
    return -1.0 * derivative_fd(w);
}

SampledPath tail_derivative_correction(const SampledPath& g, double alpha, int r, int upper) {
    require_alpha(alpha);
    if (r >= upper) throw DomainError("tail_derivative_correction: requires r < upper");
    if (g.lo() > r || g.hi() < upper)
        throw DomainError("tail_derivative_correction: g must cover [r, upper]");
    const auto& grid = g.grid();
    const int out_lo = grid->idx_a();
    if (r < out_lo) throw DomainError("tail_derivative_correction: r precedes node of a");
    // Extend one node to the left of a (always available: the history segment
    // has at least one node) so interior stencils stay centered; widen further
    // only in the degenerate r == idx_a case.
    int ext_lo = std::min(out_lo - 1, r - 2);
    if (ext_lo < 0) throw DomainError("tail_derivative_correction: range too short");
    const SampledPath F = right_kernel_quadrature(g, 1.0 - alpha, r, upper, ext_lo, r);
    return derivative_fd(F).slice(out_lo, r);
}

SampledPath tail_integral_correction(const SampledPath& g, double beta, int r, int upper) {
    require_beta(beta);
    if (r >= upper) throw DomainError("tail_integral_correction: requires r < upper");
    if (g.lo() > r || g.hi() < upper)
        throw DomainError("tail_integral_correction: g must cover [r, upper]");
    const int out_lo = g.grid()->idx_a();
    if (r < out_lo) throw DomainError("tail_integral_correction: r precedes node of a");
    return right_kernel_quadrature(g, beta, r, upper, out_lo, r);
}

} // namespace fvar
