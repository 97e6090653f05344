#include "fvar/csv.hpp"
#include "fvar/errors.hpp"
#include "fvar/eulerlagrange.hpp"
#include "fvar/fracops.hpp"
#include "fvar/ibp.hpp"
#include "fvar/problem.hpp"
#include "fvar/solver.hpp"
#include "fvar/sufficiency.hpp"

#include <CLI11.hpp>

#include <clocale>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace fvar;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << contents;
}

/// Problem argument: a built-in name ("example", "rich",
/// "classical-quadratic") or a path to a .fvp file.
ProblemSpec resolve_problem(const std::string& arg, double alpha, int n_override) {
    for (const std::string& name : builtin_names()) {
        if (arg == name) {
            ProblemSpec spec = builtin_problem(name, alpha, n_override > 0 ? n_override : 128);
            return spec;
        }
    }
    ProblemSpec spec = load_problem(read_file(arg));
    if (n_override > 0) spec = spec.with_n(n_override);
    return spec;
}

Trajectory resolve_trajectory(const ProblemSpec& spec, const std::string& traj_csv) {
    if (traj_csv.empty()) {
        if (spec.label == "builtin-example") return make_reference(spec);
        return linear_init(spec);
    }
    std::ifstream in(traj_csv);
    if (!in) throw Error("cannot open trajectory file '" + traj_csv + "'");
    const auto rows = read_xy_csv(in);
    const GridPtr grid = spec.grid();
    if (static_cast<int>(rows.size()) != grid->idx_b() + 1)
        throw Error("trajectory file must hold one row per node of [a-tau, b] (" +
                    std::to_string(grid->idx_b() + 1) + " rows)");
    // History and terminal values are re-pinned from the spec.
    std::vector<double> interior;
    for (int i = grid->idx_a() + 1; i < grid->idx_b(); ++i)
        interior.push_back(rows[static_cast<std::size_t>(i)].second);
    return make_trajectory(spec, interior);
}

void emit(const std::string& out_path, const std::string& contents) {
    if (out_path.empty())
        std::cout << contents;
    else
        write_file(out_path, contents);
}

// ---------------------------------------------------------------------------

int cmd_frac_op(const std::string& op, const std::string& expr_text, double alpha, double beta,
                double a, double b, double tau, int n, const std::string& out_path) {
    const GridPtr grid = make_grid(a, b, tau, n);
    const Expr f = Expr::parse(expr_text, history_vars());
    Env env;
    env[Slot::alpha] = alpha;
    env[Slot::beta] = beta;
    env[Slot::tau] = tau;
    env[Slot::pi] = 3.141592653589793238462643383279502884;
    const SampledPath input = SampledPath::sample(grid, grid->idx_a(), grid->idx_b(),
                                                  [&](double x) {
                                                      Env e = env;
                                                      e[Slot::x] = x;
                                                      return f.eval(e);
                                                  });
    SampledPath result;
    if (op == "left-int") result = left_frac_integral(input, beta, grid->idx_a());
    else if (op == "right-int") result = right_frac_integral(input, beta, grid->idx_b());
    else if (op == "caputo") result = caputo_left(input, alpha, grid->idx_a());
    else if (op == "rl-left") result = rl_left_derivative(input, alpha, grid->idx_a());
    else if (op == "rl-right") result = rl_right_derivative(input, alpha, grid->idx_b());
    else throw Error("unknown operator '" + op + "'");

    std::ostringstream csv;
    csv << "x,f," << op << "\n";
    for (int i = result.lo(); i <= result.hi(); ++i)
        csv << format_real(result.x_of(i)) << "," << format_real(input.at(i)) << ","
            << format_real(result.at(i)) << "\n";
    emit(out_path, csv.str());
    return 0;
}

int cmd_verify_ibp(int n, bool sweep, const std::string& out_path) {
    std::vector<int> ns = sweep ? std::vector<int>{64, 128, 256, 512} : std::vector<int>{n};
    std::vector<std::vector<std::string>> rows;
    for (const IbpCatalogEntry& entry : ibp_catalog()) {
        for (int res : ns) {
            const IbpResidual r = run_ibp_entry(entry, res);
            rows.push_back({entry.identity, entry.name, std::to_string(res),
                            format_real(r.lhs), format_real(r.rhs),
                            format_real(r.rel_residual)});
        }
    }
    std::ostringstream csv;
    write_table_csv(csv, {"identity", "name", "n", "lhs", "rhs", "rel_residual"}, rows);
    emit(out_path, csv.str());
    return 0;
}

int cmd_eval(const std::string& problem, double alpha, int n, const std::string& traj_csv,
             const std::string& fields_out) {
    const ProblemSpec spec = resolve_problem(problem, alpha, n);
    const Trajectory traj = resolve_trajectory(spec, traj_csv);
    const EvaluatedFields f = evaluate_fields(traj, spec);
    std::cout << "J = " << format_real(evaluate_J(f, spec)) << "\n";
    if (!fields_out.empty()) {
        std::ostringstream csv;
        csv << "x,y,v,w,z,y_tau,v_tau\n";
        for (int i = f.y.lo(); i <= f.y.hi(); ++i)
            csv << format_real(f.y.x_of(i)) << "," << format_real(f.y.at(i)) << ","
                << format_real(f.v.at(i)) << "," << format_real(f.w.at(i)) << ","
                << format_real(f.z.at(i)) << "," << format_real(f.y_del.at(i)) << ","
                << format_real(f.v_del.at(i)) << "\n";
        write_file(fields_out, csv.str());
    }
    return 0;
}

void print_report(const ELReport& r) {
    std::cout << "terminal_residual = " << format_real(r.terminal_residual) << "\n";
    std::cout << "inner_norm = " << format_real(r.inner_norm) << "\n";
    std::cout << "outer_norm = " << format_real(r.outer_norm) << "\n";
    std::cout << "split_point_mismatch = " << format_real(r.split_point_mismatch) << "\n";
}

int cmd_residual(const std::string& problem, double alpha, int n, bool classical,
                 const std::string& traj_csv, const std::string& out_prefix) {
    ProblemSpec spec = resolve_problem(problem, alpha, n);
    if (classical) spec.classical = true;
    const Trajectory traj = resolve_trajectory(spec, traj_csv);
    const ELReport r = spec.classical ? classical_residual(traj, spec) : el_report(traj, spec);
    print_report(r);
    if (!out_prefix.empty()) {
        std::ostringstream inner_csv, outer_csv;
        write_path_csv(inner_csv, r.inner, "inner_residual");
        write_path_csv(outer_csv, r.outer, "outer_residual");
        write_file(out_prefix + "_inner.csv", inner_csv.str());
        write_file(out_prefix + "_outer.csv", outer_csv.str());
    }
    return 0;
}

int cmd_solve(const std::string& problem, double alpha, int n, int iters,
              const std::string& method, const std::string& out_prefix) {
    const ProblemSpec spec = resolve_problem(problem, alpha, n);
    SolverConfig config;
    if (iters > 0) config.max_iters = iters;
    if (method == "coordinate-nelder-mead")
        config.method = SolverMethod::coordinate_nelder_mead;
    else if (method != "fd-gradient-descent-with-backtracking")
        throw Error("unknown solver method '" + method + "'");
    const SolverResult res = minimize(spec, config);
    std::cout << "J_initial = " << format_real(res.J_initial) << "\n";
    std::cout << "J_final = " << format_real(res.J_final) << "\n";
    std::cout << "iterations = " << res.iterations << "\n";
    std::cout << "converged = " << (res.converged ? "true" : "false") << "\n";
    print_report(res.el);
    if (!out_prefix.empty()) {
        std::ostringstream hist, traj;
        hist << "iteration,J\n";
        for (std::size_t k = 0; k < res.J_history.size(); ++k)
            hist << k << "," << format_real(res.J_history[k]) << "\n";
        write_path_csv(traj, res.trajectory.y, "y");
        write_file(out_prefix + "_jhistory.csv", hist.str());
        write_file(out_prefix + "_trajectory.csv", traj.str());
    }
    return 0;
}

int cmd_suffcheck(const std::string& problem, double alpha, int n, const std::string& traj_csv,
                  long trials, std::uint64_t seed, double inflate, const std::string& out_path) {
    const ProblemSpec spec = resolve_problem(problem, alpha, n);
    const Trajectory traj = resolve_trajectory(spec, traj_csv);
    const SufficiencyCertificate cert = certify(spec, traj, inflate, trials, seed);
    emit(out_path, certificate_json(cert) + "\n");
    return 0;
}

int cmd_example(double alpha, int n, bool sweep, long trials, std::uint64_t seed,
                const std::string& out_prefix) {
    const std::vector<int> ns = sweep ? std::vector<int>{64, 128, 256, 512} : std::vector<int>{n};
    for (int res : ns) {
        const ProblemSpec spec = builtin_example(alpha, res);
        const Trajectory reference = make_reference(spec);
        const double j = evaluate_J(reference, spec);
        const ELReport r = el_report(reference, spec);
        std::cout << "n = " << res << "\n";
        std::cout << "J(reference) = " << format_real(j) << "\n";
        print_report(r);
        if (!out_prefix.empty()) {
            std::ostringstream inner_csv, outer_csv;
            write_path_csv(inner_csv, r.inner, "inner_residual");
            write_path_csv(outer_csv, r.outer, "outer_residual");
            const std::string tag = "_n" + std::to_string(res);
            write_file(out_prefix + tag + "_inner.csv", inner_csv.str());
            write_file(out_prefix + tag + "_outer.csv", outer_csv.str());
        }
    }
    const ProblemSpec spec = builtin_example(alpha, ns.back());
    const SufficiencyCertificate cert = certify(spec, make_reference(spec), 0.5, trials, seed);
    std::cout << "certificate = "
              << (cert.conclusion == Conclusion::sufficient_minimizer ? "sufficient-minimizer"
                                                                      : "inconclusive")
              << "\n";
    if (!out_prefix.empty())
        write_file(out_prefix + "_certificate.json", certificate_json(cert) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    // The CSV/JSON contract is '.'-decimal regardless of environment.
    std::setlocale(LC_NUMERIC, "C");
    CLI::App app{"fvar: delayed fractional variational problems - operators, "
                 "optimality residuals, direct minimization, sufficiency checks"};
    app.require_subcommand(1);

    std::string problem, expr_text, op, traj_csv, out_path, method =
        "fd-gradient-descent-with-backtracking";
    double alpha = 0.5, beta = 1.0, a = 0.0, b = 2.0, tau = 1.0, inflate = 0.5;
    int n = 0, iters = 0;
    long trials = 10000;
    std::uint64_t seed = 12345;
    bool sweep = false, classical = false;

    auto* c_frac = app.add_subcommand("frac-op", "apply a fractional operator to an expression");
    c_frac->add_option("--op", op, "left-int | right-int | caputo | rl-left | rl-right")
        ->required();
    c_frac->add_option("--expr", expr_text, "expression in x")->required();
    c_frac->add_option("--alpha", alpha, "derivative order");
    c_frac->add_option("--beta", beta, "integral order");
    c_frac->add_option("--a", a, "left endpoint");
    c_frac->add_option("--b", b, "right endpoint");
    c_frac->add_option("--tau", tau, "delay (grid-aligned)");
    c_frac->add_option("--n", n, "subintervals of [a,b]");
    c_frac->add_option("--out", out_path, "CSV output path (stdout when omitted)");

    auto* c_ibp = app.add_subcommand("verify-ibp", "integration-by-parts identity residuals");
    c_ibp->add_option("--n", n, "grid resolution (default 256)");
    c_ibp->add_flag("--sweep", sweep, "run n in {64,128,256,512}");
    c_ibp->add_option("--out", out_path, "CSV output path");

    auto* c_eval = app.add_subcommand("eval", "evaluate the cost functional J");
    c_eval->add_option("problem", problem, "problem file or built-in name")->required();
    c_eval->add_option("--alpha", alpha, "alpha for built-in problems");
    c_eval->add_option("--n", n, "grid resolution override");
    c_eval->add_option("--traj", traj_csv, "trajectory CSV (default: reference or linear)");
    c_eval->add_option("--fields", out_path, "dump evaluated fields to CSV");

    auto* c_res = app.add_subcommand("residual", "optimality-condition residuals");
    c_res->add_option("problem", problem, "problem file or built-in name")->required();
    c_res->add_option("--alpha", alpha, "alpha for built-in problems");
    c_res->add_option("--n", n, "grid resolution override");
    c_res->add_flag("--classical", classical, "classical (alpha->1) conditions");
    c_res->add_option("--traj", traj_csv, "trajectory CSV");
    c_res->add_option("--out", out_path, "output prefix for residual CSVs");

    auto* c_solve = app.add_subcommand("solve", "minimize J over interior nodal values");
    c_solve->add_option("problem", problem, "problem file or built-in name")->required();
    c_solve->add_option("--alpha", alpha, "alpha for built-in problems");
    c_solve->add_option("--n", n, "grid resolution override");
    c_solve->add_option("--iters", iters, "maximum iterations");
    c_solve->add_option("--method", method,
                        "fd-gradient-descent-with-backtracking | coordinate-nelder-mead");
    c_solve->add_option("--out", out_path, "output prefix for J history / trajectory CSVs");

    auto* c_suff = app.add_subcommand("suffcheck", "convexity sufficiency certificate");
    c_suff->add_option("problem", problem, "problem file or built-in name")->required();
    c_suff->add_option("--alpha", alpha, "alpha for built-in problems");
    c_suff->add_option("--n", n, "grid resolution override");
    c_suff->add_option("--traj", traj_csv, "trajectory CSV");
    c_suff->add_option("--trials", trials, "sampling trials (default 10000)");
    c_suff->add_option("--seed", seed, "sampling seed");
    c_suff->add_option("--inflate", inflate, "box inflation factor");
    c_suff->add_option("--out", out_path, "JSON output path (stdout when omitted)");

    auto* c_ex = app.add_subcommand("example", "run the built-in analytic benchmark end to end");
    c_ex->add_option("--alpha", alpha, "fractional order (default 0.5)");
    c_ex->add_option("--n", n, "grid resolution (default 256)");
    c_ex->add_flag("--sweep", sweep, "run n in {64,128,256,512}");
    c_ex->add_option("--trials", trials, "certificate sampling trials");
    c_ex->add_option("--seed", seed, "certificate sampling seed");
    c_ex->add_option("--out", out_path, "output prefix for CSV/JSON artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (c_frac->parsed())
            return cmd_frac_op(op, expr_text, alpha, beta, a, b, tau, n > 0 ? n : 128, out_path);
        if (c_ibp->parsed()) return cmd_verify_ibp(n > 0 ? n : 256, sweep, out_path);
        if (c_eval->parsed()) return cmd_eval(problem, alpha, n, traj_csv, out_path);
        if (c_res->parsed())
            return cmd_residual(problem, alpha, n, classical, traj_csv, out_path);
        if (c_solve->parsed()) return cmd_solve(problem, alpha, n, iters, method, out_path);
        if (c_suff->parsed())
            return cmd_suffcheck(problem, alpha, n, traj_csv, trials, seed, inflate, out_path);
        if (c_ex->parsed())
            return cmd_example(alpha, n > 0 ? n : 256, sweep, trials, seed, out_path);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
