#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace fvar {

/// Uniform grid over [a - tau, b]. The delay tau must be an exact multiple of
/// the step h = (b - a)/n, so that x - tau and the splitting point b - tau
/// always land on nodes.
class Grid {
public:
    static std::shared_ptr<const Grid> make(double a, double b, double tau, int n);

    double a() const { return a_; }
    double b() const { return b_; }
    double tau() const { return tau_; }
    double h() const { return h_; }
    int n() const { return n_; }
    int n_hist() const { return n_hist_; }

    int size() const { return n_ + n_hist_ + 1; }
    int idx_a() const { return n_hist_; }
    int idx_b() const { return n_hist_ + n_; }
    int idx_b_minus_tau() const { return n_; }

    double node(int i) const { return a_ + (i - n_hist_) * h_; }

private:
    Grid(double a, double b, double tau, int n, int n_hist, double h)
        : a_(a), b_(b), tau_(tau), h_(h), n_(n), n_hist_(n_hist) {}

    double a_, b_, tau_, h_;
    int n_, n_hist_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Equivalent to Grid::make; kept as a free function because most call sites
/// read better with it.
GridPtr make_grid(double a, double b, double tau, int n);

/// Grids are value-compatible when they describe the same discretization,
/// regardless of which call built them.
bool same_grid(const GridPtr& p, const GridPtr& q);

/// Real values sampled at a contiguous node range [lo, hi] of a grid.
class SampledPath {
public:
    SampledPath() = default;
    SampledPath(GridPtr grid, int lo, std::vector<double> values);

    /// Sample a callable of x over [lo, hi].
    static SampledPath sample(const GridPtr& grid, int lo, int hi,
                              const std::function<double(double)>& f);
    static SampledPath zeros(const GridPtr& grid, int lo, int hi);

    const GridPtr& grid() const { return grid_; }
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(values_.size()) - 1; }
    int count() const { return static_cast<int>(values_.size()); }

    double at(int node_index) const { return values_[node_index - lo_]; }
    double& at(int node_index) { return values_[node_index - lo_]; }
    double x_of(int node_index) const { return grid_->node(node_index); }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Restriction to a node sub-range (values copied).
    SampledPath slice(int new_lo, int new_hi) const;

    bool all_finite() const;
    double max_abs() const;

private:
    GridPtr grid_;
    int lo_ = 0;
    std::vector<double> values_;
};

// Pointwise algebra; operands must share grid and range.
SampledPath operator+(const SampledPath& p, const SampledPath& q);
SampledPath operator-(const SampledPath& p, const SampledPath& q);
SampledPath operator*(const SampledPath& p, const SampledPath& q);
SampledPath operator*(double c, const SampledPath& p);

/// Composite trapezoid of the path over its full range.
double trapezoid(const SampledPath& p);
/// Composite trapezoid over [lo, hi] sub-range.
double trapezoid(const SampledPath& p, int lo, int hi);

/// Running integral from the left end: out(x) = int_{lo}^{x} p dt, out(lo) = 0.
SampledPath cumulative_trapezoid(const SampledPath& p);
/// Running integral to the right end: out(x) = int_{x}^{hi} p dt, out(hi) = 0.
SampledPath reverse_cumulative_trapezoid(const SampledPath& p);

/// Second-order finite-difference derivative: centered at interior nodes,
/// one-sided three-point at the two ends. Needs at least 3 nodes.
SampledPath derivative_fd(const SampledPath& p);

/// Fourth-order finite-difference derivative: five-point centered stencils in
/// the interior, biased five-point stencils at the four boundary-adjacent
/// nodes. Needs at least 5 nodes.
SampledPath derivative_fd4(const SampledPath& p);

} // namespace fvar
