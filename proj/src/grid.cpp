#include "fvar/grid.hpp"
#include "fvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fvar {

namespace {

void check_same_range(const SampledPath& p, const SampledPath& q) {
    if (!same_grid(p.grid(), q.grid()) || p.lo() != q.lo() || p.count() != q.count())
        throw DomainError("sampled paths must share grid and node range");
}

// Admissible n makes tau/h an integer with h = (b-a)/n.
bool n_is_aligned(double a, double b, double tau, long n) {
    const double ratio = tau * static_cast<double>(n) / (b - a);
    return std::abs(ratio - std::round(ratio)) <= 1e-9 && std::round(ratio) >= 1.0;
}

} // namespace

GridPtr Grid::make(double a, double b, double tau, int n) {
    if (!(b > a)) throw DomainError("grid: requires b > a");
    if (!(tau > 0.0) || !(tau < b - a))
        throw DomainError("grid: requires 0 < tau < b - a");
    if (n < 2) throw DomainError("grid: requires n >= 2");

    const double h = (b - a) / n;
    const double ratio = tau / h;
    const double snapped = std::round(ratio);
    if (std::abs(ratio - snapped) > 1e-12 * std::max(1.0, std::abs(ratio))) {
        // Name the nearest admissible n in the error.
        long n_down = n, n_up = n;
        while (n_down >= 2 && !n_is_aligned(a, b, tau, n_down)) --n_down;
        while (n_up <= 1000000L && !n_is_aligned(a, b, tau, n_up)) ++n_up;
        std::ostringstream msg;
        msg << "grid: tau = " << tau << " is not an integer multiple of h = " << h
            << " (tau/h = " << ratio << "); nearest admissible n:";
        if (n_down >= 2 && n_is_aligned(a, b, tau, n_down)) msg << " " << n_down;
        if (n_is_aligned(a, b, tau, n_up)) msg << " " << n_up;
        throw DomainError(msg.str());
    }
    const int n_hist = static_cast<int>(snapped);
    // Snap tau exactly onto the grid.
    return std::shared_ptr<const Grid>(new Grid(a, b, n_hist * h, n, n_hist, h));
}

GridPtr make_grid(double a, double b, double tau, int n) {
    return Grid::make(a, b, tau, n);
}

bool same_grid(const GridPtr& p, const GridPtr& q) {
    if (p == q) return true;
    if (!p || !q) return false;
    return p->a() == q->a() && p->b() == q->b() && p->tau() == q->tau() && p->n() == q->n();
}

SampledPath::SampledPath(GridPtr grid, int lo, std::vector<double> values)
    : grid_(std::move(grid)), lo_(lo), values_(std::move(values)) {
    if (!grid_) throw DomainError("sampled path: null grid");
    if (values_.empty()) throw DomainError("sampled path: empty value range");
    if (lo_ < 0 || hi() >= grid_->size())
        throw DomainError("sampled path: node range outside grid");
}

SampledPath SampledPath::sample(const GridPtr& grid, int lo, int hi,
                                const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
    for (int i = lo; i <= hi; ++i) v[i - lo] = f(grid->node(i));
    return SampledPath(grid, lo, std::move(v));
}

SampledPath SampledPath::zeros(const GridPtr& grid, int lo, int hi) {
    return SampledPath(grid, lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1), 0.0));
}

SampledPath SampledPath::slice(int new_lo, int new_hi) const {
    if (new_lo < lo_ || new_hi > hi() || new_lo > new_hi)
        throw DomainError("slice: sub-range outside path range");
    return SampledPath(grid_, new_lo,
                       std::vector<double>(values_.begin() + (new_lo - lo_),
                                           values_.begin() + (new_hi - lo_ + 1)));
}

bool SampledPath::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

double SampledPath::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

SampledPath operator+(const SampledPath& p, const SampledPath& q) {
    check_same_range(p, q);
    SampledPath out = p;
    for (int k = 0; k < out.count(); ++k) out.values()[k] += q.values()[k];
    return out;
}

SampledPath operator-(const SampledPath& p, const SampledPath& q) {
    check_same_range(p, q);
    SampledPath out = p;
    for (int k = 0; k < out.count(); ++k) out.values()[k] -= q.values()[k];
    return out;
}

SampledPath operator*(const SampledPath& p, const SampledPath& q) {
    check_same_range(p, q);
    SampledPath out = p;
    for (int k = 0; k < out.count(); ++k) out.values()[k] *= q.values()[k];
    return out;
}

SampledPath operator*(double c, const SampledPath& p) {
    SampledPath out = p;
    for (double& v : out.values()) v *= c;
    return out;
}

double trapezoid(const SampledPath& p) { return trapezoid(p, p.lo(), p.hi()); }

double trapezoid(const SampledPath& p, int lo, int hi) {
    if (lo < p.lo() || hi > p.hi() || lo > hi)
        throw DomainError("trapezoid: sub-range outside path range");
    const double h = p.grid()->h();
    double acc = 0.0;
    for (int i = lo; i < hi; ++i) acc += 0.5 * h * (p.at(i) + p.at(i + 1));
    return acc;
}

SampledPath cumulative_trapezoid(const SampledPath& p) {
    SampledPath out = SampledPath::zeros(p.grid(), p.lo(), p.hi());
    const double h = p.grid()->h();
    double acc = 0.0;
    for (int i = p.lo() + 1; i <= p.hi(); ++i) {
        acc += 0.5 * h * (p.at(i - 1) + p.at(i));
        out.at(i) = acc;
    }
    return out;
}

SampledPath reverse_cumulative_trapezoid(const SampledPath& p) {
    SampledPath out = SampledPath::zeros(p.grid(), p.lo(), p.hi());
    const double h = p.grid()->h();
    double acc = 0.0;
    for (int i = p.hi() - 1; i >= p.lo(); --i) {
        acc += 0.5 * h * (p.at(i) + p.at(i + 1));
        out.at(i) = acc;
    }
    return out;
}

SampledPath derivative_fd(const SampledPath& p) {
    if (p.count() < 3)
        throw DomainError("derivative: needs at least 3 nodes in range");
    const double h = p.grid()->h();
    SampledPath out = SampledPath::zeros(p.grid(), p.lo(), p.hi());
    const int lo = p.lo(), hi = p.hi();
    out.at(lo) = (-3.0 * p.at(lo) + 4.0 * p.at(lo + 1) - p.at(lo + 2)) / (2.0 * h);
    for (int i = lo + 1; i < hi; ++i)
        out.at(i) = (p.at(i + 1) - p.at(i - 1)) / (2.0 * h);
    out.at(hi) = (3.0 * p.at(hi) - 4.0 * p.at(hi - 1) + p.at(hi - 2)) / (2.0 * h);
    return out;
}

SampledPath derivative_fd4(const SampledPath& p) {
    if (p.count() < 5)
        throw DomainError("derivative: needs at least 5 nodes in range");
    const double h = p.grid()->h();
    SampledPath out = SampledPath::zeros(p.grid(), p.lo(), p.hi());
    const int lo = p.lo(), hi = p.hi();
    auto f = [&](int i) { return p.at(i); };
    // Fully one-sided and one-in biased five-point stencils at each end.
    out.at(lo) = (-25.0 * f(lo) + 48.0 * f(lo + 1) - 36.0 * f(lo + 2) + 16.0 * f(lo + 3) -
                  3.0 * f(lo + 4)) /
                 (12.0 * h);
    out.at(lo + 1) = (-3.0 * f(lo) - 10.0 * f(lo + 1) + 18.0 * f(lo + 2) - 6.0 * f(lo + 3) +
                      f(lo + 4)) /
                     (12.0 * h);
    for (int i = lo + 2; i <= hi - 2; ++i)
        out.at(i) = (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
    out.at(hi - 1) = (3.0 * f(hi) + 10.0 * f(hi - 1) - 18.0 * f(hi - 2) + 6.0 * f(hi - 3) -
                      f(hi - 4)) /
                     (12.0 * h);
    out.at(hi) = (25.0 * f(hi) - 48.0 * f(hi - 1) + 36.0 * f(hi - 2) - 16.0 * f(hi - 3) +
                  3.0 * f(hi - 4)) /
                 (12.0 * h);
    return out;
}

} // namespace fvar
