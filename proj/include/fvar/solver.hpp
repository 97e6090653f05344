#pragma once

#include "fvar/eulerlagrange.hpp"

#include <vector>

namespace fvar {

enum class SolverMethod {
    fd_gradient_descent_backtracking,
    coordinate_nelder_mead,
};

enum class SolverInit { linear_interpolant, zero, custom };

struct SolverConfig {
    SolverMethod method = SolverMethod::fd_gradient_descent_backtracking;
    int max_iters = 4000;
    double grad_step = 1e-6; // finite-difference step, scaled by max(1, |y|_inf)
    double tol_J = 1e-10;    // stop when relative J decrease < tol_J over 5 iterations
    double armijo_c = 1e-4;
    SolverInit init = SolverInit::linear_interpolant;
    std::vector<double> custom_init; // interior nodal values when init == custom
};

struct SolverResult {
    Trajectory trajectory;
    double J_initial = 0.0;
    double J_final = 0.0;
    std::vector<double> J_history; // accepted iterates; non-increasing for descent
    ELReport el;                   // optimality-system residuals at the result
    int iterations = 0;
    bool converged = false;
};

/// Central-difference gradient of the discrete J with respect to each
/// interior nodal value.
std::vector<double> gradient_fd(const ProblemSpec& spec, const Trajectory& traj, double step);

/// Direct minimization of J over interior nodal values. History nodes and the
/// terminal node are never touched. Descent steps are Armijo-backtracked from
/// a Barzilai-Borwein trial step, so J_history is strictly non-increasing.
/// Non-convergence within max_iters is reported, not thrown.
SolverResult minimize(const ProblemSpec& spec, const SolverConfig& config);

} // namespace fvar
