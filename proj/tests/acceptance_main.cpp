// Acceptance suite: one line per criterion, exit 1 on any failure.
// Runs the full pipeline at the resolutions and tolerances fixed below;
// nothing here is tunable from the command line on purpose.

#include "fvar/csv.hpp"
#include "fvar/eulerlagrange.hpp"
#include "fvar/fracops.hpp"
#include "fvar/gamma.hpp"
#include "fvar/ibp.hpp"
#include "fvar/problem.hpp"
#include "fvar/solver.hpp"
#include "fvar/sufficiency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fvar;

namespace {

int g_failures = 0;

struct Criterion {
    const char* name;
    std::vector<std::string> notes;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void run(const char* name, double budget_secs, const std::function<void(Criterion&)>& body) {
    Criterion c{name, {}, true};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_secs > 0.0 && secs > budget_secs) {
        c.ok = false;
        c.notes.push_back("runtime " + fmt(secs) + "s over the " + fmt(budget_secs) +
                          "s budget");
    }
    std::printf("[%s] %s (%.1fs)\n", c.ok ? "PASS" : "FAIL", name, secs);
    for (const std::string& n : c.notes) std::printf("        %s\n", n.c_str());
    if (!c.ok) ++g_failures;
}

double masked_max_err(const SampledPath& got, const std::function<double(double)>& want) {
    const double lo = got.x_of(got.lo()), hi = got.x_of(got.hi());
    const double margin = (hi - lo) / 32.0;
    double m = 0.0;
    for (int i = got.lo(); i <= got.hi(); ++i) {
        const double x = got.x_of(i);
        if (x - lo <= margin || hi - x <= margin) continue;
        m = std::max(m, std::abs(got.at(i) - want(x)));
    }
    return m;
}

SampledPath bump_direction(const GridPtr& g, double a, double b, int k) {
    SampledPath p = SampledPath::zeros(g, 0, g->idx_b());
    for (int i = g->idx_a(); i <= g->idx_b(); ++i) {
        const double s = (g->node(i) - a) / (b - a);
        p.at(i) = s * s * (1.0 - s) * std::cos(2.1 * k * s + 0.3 * k);
    }
    return (1.0 / p.max_abs()) * p;
}

// ---------------------------------------------------------------------------

void criterion_1_caputo_power_rule(Criterion& c) {
    for (double alpha : {0.25, 0.5, 0.75}) {
        std::vector<double> errs;
        for (int n : {256, 512}) {
            const GridPtr g = make_grid(0.0, 2.0, 1.0, n);
            const SampledPath f = SampledPath::sample(
                g, g->idx_a(), g->idx_b(),
                [alpha](double x) { return std::pow(x, alpha + 1.0); });
            const SampledPath out = caputo_left(f, alpha, g->idx_a());
            const double coef = gamma_fn(alpha + 2.0);
            errs.push_back(masked_max_err(out, [coef](double x) { return coef * x; }));
        }
        const double order = std::log2(errs[0] / errs[1]);
        c.expect(errs[1] < errs[0],
                 "alpha=" + fmt(alpha) + ": n=512 error not below n=256");
        c.expect(order >= 2.0 - alpha - 0.25,
                 "alpha=" + fmt(alpha) + ": order " + fmt(order) + " below " +
                     fmt(2.0 - alpha - 0.25));
        c.note("alpha=" + fmt(alpha) + ": err256=" + fmt(errs[0]) + " err512=" + fmt(errs[1]) +
               " order=" + fmt(order));
    }
}

void criterion_2_J_at_minimizer(Criterion& c) {
    std::vector<double> js;
    for (int n : {128, 256, 512}) {
        const ProblemSpec spec = builtin_example(0.5, n);
        js.push_back(evaluate_J(make_reference(spec), spec));
    }
    for (double j : js) c.expect(j >= -1e-12, "J negative beyond roundoff: " + fmt(j));
    c.expect(js[1] < js[0] && js[2] < js[1], "J not decreasing under refinement");
    c.expect(js[2] < js[0] / 2.0, "J(512) not below J(128)/2");
    c.note("J = " + fmt(js[0]) + " -> " + fmt(js[1]) + " -> " + fmt(js[2]));
}

void criterion_3_el_residuals(Criterion& c) {
    std::vector<double> inner, outer, term;
    for (int n : {128, 256, 512}) {
        const ProblemSpec spec = builtin_example(0.5, n);
        const ELReport r = el_report(make_reference(spec), spec);
        inner.push_back(r.inner_norm);
        outer.push_back(r.outer_norm);
        term.push_back(std::abs(r.terminal_residual));
    }
    c.expect(inner[1] < inner[0] && inner[2] < inner[1], "inner norm not strictly decreasing");
    c.expect(outer[1] < outer[0] && outer[2] < outer[1], "outer norm not strictly decreasing");
    for (double t : term) c.expect(t <= 1e-8, "terminal residual " + fmt(t) + " above 1e-8");
    c.note("inner = " + fmt(inner[0]) + " -> " + fmt(inner[1]) + " -> " + fmt(inner[2]));
    c.note("outer = " + fmt(outer[0]) + " -> " + fmt(outer[1]) + " -> " + fmt(outer[2]));
    c.note("terminal max = " + fmt(*std::max_element(term.begin(), term.end())));
}

void criterion_4_directional_oracle(Criterion& c) {
    const ProblemSpec spec = builtin_problem("rich", 0.6, 128);
    const GridPtr g = spec.grid();
    const double tol = std::max(1e-3, 10.0 * g->h());

    // Seeded random admissible trajectory: linear interpolant plus smooth
    // bumps vanishing on the history segment and at b.
    std::mt19937_64 rng(2718);
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    Trajectory traj = linear_init(spec);
    for (int k = 1; k <= 3; ++k) {
        const SampledPath b = bump_direction(g, spec.a, spec.b, k);
        const double amp = u01() - 0.5;
        for (int i = 0; i <= g->idx_b(); ++i) traj.y.at(i) += amp * b.at(i);
    }
    traj = make_trajectory(spec, extract_interior(spec, traj));

    const ELReport rep = el_report(traj, spec);
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const SampledPath d = bump_direction(g, spec.a, spec.b, k);
        const double eps = 1e-5;
        std::vector<double> plus = extract_interior(spec, traj), minus = plus;
        for (int i = g->idx_a() + 1; i < g->idx_b(); ++i) {
            plus[i - g->idx_a() - 1] += eps * d.at(i);
            minus[i - g->idx_a() - 1] -= eps * d.at(i);
        }
        const double fd = (evaluate_J(make_trajectory(spec, plus), spec) -
                           evaluate_J(make_trajectory(spec, minus), spec)) /
                          (2.0 * eps);
        const double pairing = directional_pairing(rep, d);
        const double rel =
            std::abs(fd - pairing) / std::max({std::abs(fd), std::abs(pairing), 1e-12});
        worst = std::max(worst, rel);
        c.expect(rel <= tol, "direction " + std::to_string(k) + ": rel error " + fmt(rel) +
                                 " above " + fmt(tol));
    }
    c.note("worst relative error " + fmt(worst) + " (tolerance " + fmt(tol) + ")");
}

void criterion_5_ibp_identities(Criterion& c) {
    const std::vector<int> ns = {64, 128, 256, 512};
    for (const IbpCatalogEntry& entry : ibp_catalog()) {
        std::vector<double> res;
        for (int n : ns) res.push_back(run_ibp_entry(entry, n).rel_residual);
        bool decreasing = true;
        for (std::size_t k = 1; k < res.size(); ++k) decreasing &= res[k] < res[k - 1];
        c.expect(decreasing, std::string(entry.name) + ": residuals not decreasing");
        c.expect(res.back() <= 1e-3,
                 std::string(entry.name) + ": final residual " + fmt(res.back()) + " above 1e-3");
    }
    c.note(std::to_string(ibp_catalog().size()) + " catalog entries across all three identities");
}

void criterion_6_solver_recovery(Criterion& c) {
    const ProblemSpec spec = builtin_example(0.5, 128);
    SolverConfig config;
    config.max_iters = 4000;
    const SolverResult res = minimize(spec, config);

    c.expect(res.J_final <= 1e-3 * res.J_initial,
             "J_final/J_init = " + fmt(res.J_final / res.J_initial) + " above 1e-3");
    bool mono = true;
    for (std::size_t k = 1; k < res.J_history.size(); ++k)
        mono &= res.J_history[k] <= res.J_history[k - 1];
    c.expect(mono, "J history not non-increasing");

    const Trajectory ref = make_reference(spec);
    double err = 0.0;
    for (int i = 0; i <= ref.y.hi(); ++i)
        err = std::max(err, std::abs(res.trajectory.y.at(i) - ref.y.at(i)));
    c.expect(err <= 5e-2, "trajectory error " + fmt(err) + " above 5e-2");

    const ELReport ref_rep = el_report(ref, spec);
    c.expect(res.el.inner_norm <= 10.0 * ref_rep.inner_norm,
             "solver inner residual above 10x reference");
    c.expect(res.el.outer_norm <= 10.0 * ref_rep.outer_norm,
             "solver outer residual above 10x reference");
    c.note("J: " + fmt(res.J_initial) + " -> " + fmt(res.J_final) + " in " +
           std::to_string(res.iterations) + " iterations; trajectory error " + fmt(err));
}

void criterion_7_sufficiency(Criterion& c) {
    const ProblemSpec spec = builtin_example(0.5, 256);
    const SufficiencyCertificate cert =
        certify(spec, make_reference(spec), 0.5, 10000, 12345);
    c.expect(cert.conclusion == Conclusion::sufficient_minimizer,
             "benchmark certificate not sufficient-minimizer");
    c.expect(cert.L_verdict.status == ConvexityStatus::likely_convex, "L not likely-convex");
    c.expect(cert.l_verdict.status == ConvexityStatus::likely_convex, "l not likely-convex");
    c.expect(cert.dLdz_min == 1.0 && cert.dLdz_max == 1.0,
             "dL/dz range [" + fmt(cert.dLdz_min) + ", " + fmt(cert.dLdz_max) + "] not {1}");

    // Twenty adversarial non-convex expressions: the convexity inequality
    // must be refuted with an independently re-checkable witness.
    const std::vector<std::string> adversarial = {
        "-y^2",          "y^3",           "sin(3*y)",        "-abs(y)",
        "cos(y)",        "y^4 - 3*y^2",   "y*v",             "-y^2 - v^2",
        "y^2 - v^2",     "exp(-y^2)",     "ln(2 + y^2)",     "sin(y)*cos(v)",
        "-y^4",          "y^3 + v^3",     "abs(y)^3 - y^2",  "-(y - v)^2",
        "y*v + v*w - y*w", "sin(2*y) + cos(2*v)", "-exp(y)", "y^2*v",
    };
    Env params;
    params[Slot::alpha] = 0.5;
    params[Slot::beta] = 1.0;
    params[Slot::tau] = 1.0;
    params[Slot::pi] = 3.141592653589793238462643383279502884;
    int sound = 0;
    for (const std::string& text : adversarial) {
        const Expr e = Expr::parse(text, lagrangian_vars());
        std::vector<VarBox> box;
        for (Slot s : {Slot::y, Slot::v, Slot::w})
            if (e.uses(s)) box.push_back(VarBox{s, -2.0, 2.0});
        const ConvexityVerdict v = check_convexity(e, box, {}, 10000, 4242, params);
        const bool refuted = v.status != ConvexityStatus::likely_convex &&
                             v.convex_witness.has_value();
        c.expect(refuted, text + ": convexity not refuted with a witness");
        if (refuted) {
            const double viol = recheck_witness(e, box, {}, *v.convex_witness, params);
            c.expect(viol < -1e-10, text + ": witness re-check violation " + fmt(viol));
            if (viol < -1e-10) ++sound;
        }
    }
    c.note("sound counterexamples: " + std::to_string(sound) + "/20");
}

void criterion_8_classical_limit(Criterion& c) {
    ProblemSpec cls = builtin_problem("classical-quadratic", 0.5, 256);
    ProblemSpec frac = cls;
    frac.classical = false;

    const GridPtr g = cls.grid();
    std::vector<double> interior;
    for (int i = g->idx_a() + 1; i < g->idx_b(); ++i)
        interior.push_back(std::cos(1.5707963267948966 * g->node(i)));
    const Trajectory traj_c = make_trajectory(cls, interior);
    const ELReport rc = classical_residual(traj_c, cls);

    auto gap_at = [&](double alpha) {
        frac.alpha = alpha;
        const ELReport rf = el_report(make_trajectory(frac, interior), frac);
        double gap = 0.0;
        for (int i = std::max(rf.inner_unmasked_lo, rc.inner_unmasked_lo);
             i <= std::min(rf.inner_unmasked_hi, rc.inner_unmasked_hi); ++i)
            gap = std::max(gap, std::abs(rf.inner.at(i) - rc.inner.at(i)));
        for (int i = std::max(rf.outer_unmasked_lo, rc.outer_unmasked_lo);
             i <= std::min(rf.outer_unmasked_hi, rc.outer_unmasked_hi); ++i)
            gap = std::max(gap, std::abs(rf.outer.at(i) - rc.outer.at(i)));
        return gap;
    };
    const double gap_99 = gap_at(0.99);
    const double gap_999 = gap_at(0.999);
    c.expect(gap_99 <= 0.1, "alpha=0.99 gap " + fmt(gap_99) + " above 0.1");
    c.expect(gap_999 < gap_99, "gap does not shrink as alpha -> 1");
    c.note("gap(0.99) = " + fmt(gap_99) + ", gap(0.999) = " + fmt(gap_999));
}

std::string slurp_or_empty(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_9_determinism(Criterion& c) {
    const std::string cli = FVAR_CLI_PATH;
    const struct {
        const char* label;
        std::string args;
        std::string out_a, out_b;
    } runs[] = {
        {"suffcheck", " suffcheck example --n 64 --trials 2000 --seed 99 --out ",
         "acc9_s_a.json", "acc9_s_b.json"},
        {"verify-ibp", " verify-ibp --n 128 --out ", "acc9_i_a.csv", "acc9_i_b.csv"},
    };
    for (const auto& r : runs) {
        const std::string cmd_a = cli + r.args + r.out_a + " > /dev/null 2>&1";
        const std::string cmd_b = cli + r.args + r.out_b + " > /dev/null 2>&1";
        c.expect(std::system(cmd_a.c_str()) == 0, std::string(r.label) + ": first run failed");
        c.expect(std::system(cmd_b.c_str()) == 0, std::string(r.label) + ": second run failed");
        const std::string a = slurp_or_empty(r.out_a);
        const std::string b = slurp_or_empty(r.out_b);
        c.expect(!a.empty() && a == b,
                 std::string(r.label) + ": repeated runs not byte-identical");
    }
    // Stdout of the end-to-end benchmark run is deterministic too.
    const std::string base = cli + " example --alpha 0.5 --n 64 --trials 1000 --seed 7 > ";
    c.expect(std::system((base + "acc9_e_a.txt 2>/dev/null").c_str()) == 0,
             "example: first run failed");
    c.expect(std::system((base + "acc9_e_b.txt 2>/dev/null").c_str()) == 0,
             "example: second run failed");
    const std::string ea = slurp_or_empty("acc9_e_a.txt");
    c.expect(!ea.empty() && ea == slurp_or_empty("acc9_e_b.txt"),
             "example: stdout not byte-identical");
}

} // namespace

int main() {
    std::printf("acceptance suite: delayed fractional variational toolkit\n");
    run("1. Caputo power rule convergence (alpha in {0.25, 0.5, 0.75})", 5.0,
        criterion_1_caputo_power_rule);
    run("2. J at the analytic minimizer decreases toward zero", 5.0,
        criterion_2_J_at_minimizer);
    run("3. optimality-system residuals shrink; terminal residual below 1e-8", 30.0,
        criterion_3_el_residuals);
    run("4. directional-derivative oracle validates all terms and signs", 120.0,
        criterion_4_directional_oracle);
    run("5. integration-by-parts identities converge on the catalog", 30.0,
        criterion_5_ibp_identities);
    run("6. solver recovers the analytic minimizer", 300.0, criterion_6_solver_recovery);
    run("7. sufficiency certificate and counterexample soundness", 30.0,
        criterion_7_sufficiency);
    run("8. classical limit agreement at alpha near 1", 0.0, criterion_8_classical_limit);
    run("9. fixed-seed CLI runs are byte-identical", 0.0, criterion_9_determinism);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
