#include "fvar/solver.hpp"
#include "fvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace fvar {

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> initial_interior(const ProblemSpec& spec, const SolverConfig& config) {
    switch (config.init) {
        case SolverInit::linear_interpolant:
            return extract_interior(spec, linear_init(spec));
        case SolverInit::zero: {
            const GridPtr grid = spec.grid();
            return std::vector<double>(
                static_cast<std::size_t>(grid->idx_b() - grid->idx_a() - 1), 0.0);
        }
        case SolverInit::custom: return config.custom_init;
    }
    throw DomainError("solver: unknown init mode");
}

struct Objective {
    const ProblemSpec& spec;
    double operator()(const std::vector<double>& interior) const {
        return evaluate_J(make_trajectory(spec, interior), spec);
    }
};

/// Stop when the relative J decrease stays below tol over 5 iterations.
struct StallDetector {
    double tol;
    int quiet = 0;
    bool update(double j_prev, double j_new) {
        const double rel = (j_prev - j_new) / std::max(std::abs(j_prev), 1e-12);
        quiet = rel < tol ? quiet + 1 : 0;
        return quiet >= 5;
    }
};

SolverResult run_gradient_descent(const ProblemSpec& spec, const SolverConfig& config) {
    Objective J{spec};
    std::vector<double> x = initial_interior(spec, config);
    if (x.empty()) throw DomainError("solver: grid has no interior nodes");

    SolverResult result;
    double j = J(x);
    result.J_initial = j;
    result.J_history.push_back(j);
    StallDetector stall{config.tol_J};

    std::vector<double> x_prev, g_prev;
    bool converged = false;
    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        Trajectory traj = make_trajectory(spec, x);
        const double fd_step = config.grad_step * std::max(1.0, traj.y.max_abs());
        std::vector<double> g = gradient_fd(spec, traj, fd_step);
        const double g2 = dot(g, g);
        if (g2 == 0.0) {
            converged = true;
            break;
        }

        // Barzilai-Borwein trial step, Armijo-safeguarded below.
        double t = 1.0 / std::max(1.0, inf_norm(g));
        if (!x_prev.empty()) {
            std::vector<double> s(x.size()), dg(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                s[i] = x[i] - x_prev[i];
                dg[i] = g[i] - g_prev[i];
            }
            const double sy = dot(s, dg);
            if (sy > 0.0) t = dot(s, s) / sy;
        }
        t = std::clamp(t, 1e-14, 1e8);

        std::vector<double> candidate(x.size());
        double j_new = 0.0;
        bool accepted = false;
        for (int back = 0; back < 60; ++back) {
            for (std::size_t i = 0; i < x.size(); ++i) candidate[i] = x[i] - t * g[i];
            j_new = J(candidate);
            if (j_new <= j - config.armijo_c * t * g2) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // No descent direction at finite-difference resolution.
            converged = true;
            break;
        }

        x_prev = x;
        g_prev = g;
        x = candidate;
        result.J_history.push_back(j_new);
        const double j_old = j;
        j = j_new;
        if (stall.update(j_old, j_new)) {
            converged = true;
            ++iter;
            break;
        }
    }

    result.trajectory = make_trajectory(spec, x);
    result.J_final = j;
    result.iterations = iter;
    result.converged = converged;
    return result;
}

SolverResult run_coordinate_search(const ProblemSpec& spec, const SolverConfig& config) {
    Objective J{spec};
    std::vector<double> x = initial_interior(spec, config);
    if (x.empty()) throw DomainError("solver: grid has no interior nodes");

    SolverResult result;
    double j = J(x);
    result.J_initial = j;
    result.J_history.push_back(j);
    StallDetector stall{config.tol_J};

    const double scale = std::max({1.0, std::abs(spec.y_b), inf_norm(x)});
    std::vector<double> step(x.size(), 0.25 * scale);
    bool converged = false;
    int sweep = 0;
    for (; sweep < config.max_iters; ++sweep) {
        // One-dimensional expand/contract search along each coordinate.
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (int attempt = 0; attempt < 24; ++attempt) {
                const double saved = x[k];
                x[k] = saved + step[k];
                double j_plus = J(x);
                if (j_plus < j) {
                    j = j_plus;
                    step[k] *= 2.0;
                    break;
                }
                x[k] = saved - step[k];
                double j_minus = J(x);
                if (j_minus < j) {
                    j = j_minus;
                    step[k] = -step[k] * 2.0;
                    break;
                }
                x[k] = saved;
                step[k] *= 0.5;
                if (std::abs(step[k]) < 1e-14 * scale) break;
            }
        }
        result.J_history.push_back(j);
        const std::size_t m = result.J_history.size();
        if (stall.update(result.J_history[m - 2], result.J_history[m - 1])) {
            converged = true;
            ++sweep;
            break;
        }
    }

    result.trajectory = make_trajectory(spec, x);
    result.J_final = j;
    result.iterations = sweep;
    result.converged = converged;
    return result;
}

} // namespace

std::vector<double> gradient_fd(const ProblemSpec& spec, const Trajectory& traj, double step) {
    if (!(step > 0.0)) throw DomainError("gradient_fd: step must be positive");
    const std::vector<double> interior = extract_interior(spec, traj);
    std::vector<double> grad(interior.size(), 0.0);

    // The per-coordinate J evaluations are pure; run them in two halves and
    // merge by index, which keeps the result independent of scheduling.
    const auto compute_range = [&](std::size_t begin, std::size_t end) {
        std::vector<double> work = interior;
        for (std::size_t k = begin; k < end; ++k) {
            work[k] = interior[k] + step;
            const double j_plus = evaluate_J(make_trajectory(spec, work), spec);
            work[k] = interior[k] - step;
            const double j_minus = evaluate_J(make_trajectory(spec, work), spec);
            work[k] = interior[k];
            grad[k] = (j_plus - j_minus) / (2.0 * step);
        }
    };
    const std::size_t mid = interior.size() / 2;
    if (interior.size() >= 32) {
        std::future<void> front =
            std::async(std::launch::async, compute_range, std::size_t{0}, mid);
        compute_range(mid, interior.size());
        front.get();
    } else {
        compute_range(0, interior.size());
    }
    return grad;
}

SolverResult minimize(const ProblemSpec& spec, const SolverConfig& config) {
    if (config.max_iters < 1) throw DomainError("solver: max_iters must be >= 1");
    if (!(config.grad_step > 0.0) || !(config.tol_J > 0.0) || !(config.armijo_c > 0.0))
        throw DomainError("solver: steps and tolerances must be positive");

    SolverResult result;
    switch (config.method) {
        case SolverMethod::fd_gradient_descent_backtracking:
            result = run_gradient_descent(spec, config);
            break;
        case SolverMethod::coordinate_nelder_mead:
            result = run_coordinate_search(spec, config);
            break;
        default: throw DomainError("solver: unknown method");
    }
    result.el = spec.classical ? classical_residual(result.trajectory, spec)
                               : el_report(result.trajectory, spec);
    return result;
}

} // namespace fvar
