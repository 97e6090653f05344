#include "fvar/problem.hpp"
#include "fvar/errors.hpp"
#include "fvar/gamma.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace fvar {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double r = std::stod(value, &used);
        while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used])))
            ++used;
        if (used != value.size())
            throw ValidationError(key, "trailing characters in numeric value '" + value + "'");
        return r;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError(key, "cannot parse numeric value '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ValidationError(key, "expected true/false, got '" + value + "'");
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

Expr parse_field_expr(const std::string& key, const std::string& text,
                      const std::set<std::string>& vars) {
    try {
        return Expr::parse(text, vars);
    } catch (const ParseError& e) {
        throw ValidationError(key, e.what());
    }
}

} // namespace

ProblemSpec ProblemSpec::with_n(int n_override) const {
    ProblemSpec out = *this;
    out.n = n_override;
    return out;
}

Env ProblemSpec::param_env() const {
    Env env;
    env[Slot::alpha] = alpha;
    env[Slot::beta] = beta;
    env[Slot::tau] = tau;
    env[Slot::pi] = kPi;
    return env;
}

void validate_problem(const ProblemSpec& spec) {
    if (!(spec.b > spec.a)) throw ValidationError("b", "requires b > a");
    if (!(spec.tau > 0.0) || !(spec.tau < spec.b - spec.a))
        throw ValidationError("tau", "requires 0 < tau < b - a");
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw ValidationError("alpha", "requires alpha in (0,1)");
    if (!(spec.beta > 0.0)) throw ValidationError("beta", "requires beta > 0");
    if (spec.n < 2) throw ValidationError("n", "requires n >= 2");
    if (!std::isfinite(spec.y_b)) throw ValidationError("y_b", "must be finite");
    if (spec.L.empty()) throw ValidationError("L", "missing Lagrangian");
    if (spec.l.empty()) throw ValidationError("l", "missing inner integrand");
    if (spec.phi.empty()) throw ValidationError("phi", "missing history function");

    // Grid alignment of tau (exact node placement of x - tau and b - tau).
    try {
        (void)make_grid(spec.a, spec.b, spec.tau, spec.n);
    } catch (const DomainError& e) {
        throw ValidationError("tau", e.what());
    }

    if (!spec.positive_base_pow) {
        if (spec.L.has_nonconstant_exponent())
            throw ValidationError(
                "L", "non-constant exponent requires 'positive_base_pow = true'");
        if (spec.l.has_nonconstant_exponent())
            throw ValidationError(
                "l", "non-constant exponent requires 'positive_base_pow = true'");
        if (spec.phi.has_nonconstant_exponent())
            throw ValidationError(
                "phi", "non-constant exponent requires 'positive_base_pow = true'");
    }

    if (spec.classical) {
        if (spec.L.uses(Slot::w) || spec.l.uses(Slot::w))
            throw ValidationError("classical",
                                  "classical mode admits no w (fractional integral) dependence");
    }

    // Continuity anchor of the admissible class: phi(a) must be finite.
    Env env = spec.param_env();
    env[Slot::x] = spec.a;
    double phi_a = 0.0;
    try {
        phi_a = spec.phi.eval(env);
    } catch (const EvalError& e) {
        throw ValidationError("phi", std::string("cannot evaluate at x = a: ") + e.what());
    }
    if (!std::isfinite(phi_a)) throw ValidationError("phi", "phi(a) is not finite");
}

ProblemSpec load_problem(const std::string& contents) {
    std::map<std::string, std::string> kv;
    std::istringstream in(contents);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("(file)", "line " + std::to_string(lineno) +
                                                ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ValidationError("(file)", "line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw ValidationError(key, "duplicate key");
        kv[key] = value;
    }

    static const std::set<std::string> known = {"a",   "b",   "tau", "alpha", "beta",
                                                "n",   "y_b", "L",   "l",     "phi",
                                                "label", "classical", "positive_base_pow"};
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!known.count(key)) throw ValidationError(key, "unknown key");
    }
    static const char* required[] = {"a", "b", "tau", "alpha", "beta", "n", "y_b", "L", "l", "phi"};
    for (const char* key : required) {
        if (!kv.count(key)) throw ValidationError(key, "missing required key");
    }

    ProblemSpec spec;
    spec.a = parse_real("a", kv["a"]);
    spec.b = parse_real("b", kv["b"]);
    spec.tau = parse_real("tau", kv["tau"]);
    spec.alpha = parse_real("alpha", kv["alpha"]);
    spec.beta = parse_real("beta", kv["beta"]);
    spec.y_b = parse_real("y_b", kv["y_b"]);
    const double n_real = parse_real("n", kv["n"]);
    if (n_real != std::floor(n_real) || n_real < 2 || n_real > 1e7)
        throw ValidationError("n", "must be an integer >= 2");
    spec.n = static_cast<int>(n_real);
    if (kv.count("label")) spec.label = kv["label"];
    if (kv.count("classical")) spec.classical = parse_bool("classical", kv["classical"]);
    if (kv.count("positive_base_pow"))
        spec.positive_base_pow = parse_bool("positive_base_pow", kv["positive_base_pow"]);

    spec.L = parse_field_expr("L", kv["L"], lagrangian_vars());
    spec.l = parse_field_expr("l", kv["l"], inner_vars());
    spec.phi = parse_field_expr("phi", kv["phi"], history_vars());

    validate_problem(spec);
    return spec;
}

std::string pretty_print(const ProblemSpec& spec) {
    std::ostringstream out;
    if (!spec.label.empty()) out << "label = " << spec.label << "\n";
    out << "a = " << format_number(spec.a) << "\n";
    out << "b = " << format_number(spec.b) << "\n";
    out << "tau = " << format_number(spec.tau) << "\n";
    out << "alpha = " << format_number(spec.alpha) << "\n";
    out << "beta = " << format_number(spec.beta) << "\n";
    out << "n = " << spec.n << "\n";
    out << "y_b = " << format_number(spec.y_b) << "\n";
    if (spec.classical) out << "classical = true\n";
    if (spec.positive_base_pow) out << "positive_base_pow = true\n";
    out << "L = " << spec.L.to_string() << "\n";
    out << "l = " << spec.l.to_string() << "\n";
    out << "phi = " << spec.phi.to_string() << "\n";
    return out.str();
}

ProblemSpec builtin_example(double alpha, int n) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("builtin example: alpha must lie in (0,1)");
    ProblemSpec spec;
    spec.a = 0.0;
    spec.b = 2.0;
    spec.tau = 1.0;
    spec.alpha = alpha;
    spec.beta = 1.0; // unused: L has no w dependence, so every beta term vanishes
    spec.n = n;
    spec.y_b = std::pow(2.0, alpha + 1.0);
    spec.label = "builtin-example";
    spec.L = Expr::parse(
        "(v - gamma(alpha+2)*x)^2 + z + (v_tau - (alpha+1)*pospart(x-1)^alpha)^2",
        lagrangian_vars());
    spec.l = Expr::parse("(y - x^(alpha+1))^2", inner_vars());
    spec.phi = Expr::parse("0", history_vars());
    validate_problem(spec);
    return spec;
}

namespace {

ProblemSpec builtin_rich(double alpha, int n) {
    // Exercises every term of the optimality system: all partial derivatives
    // of L and l are nonzero.
    ProblemSpec spec;
    spec.a = 0.0;
    spec.b = 2.0;
    spec.tau = 1.0;
    spec.alpha = (alpha > 0.0 && alpha < 1.0) ? alpha : 0.6;
    spec.beta = 0.8;
    spec.n = n;
    spec.y_b = 1.0;
    spec.label = "builtin-rich";
    spec.L = Expr::parse(
        "0.2*y^2 + 0.5*(v - x)^2 + 0.3*w^2 + z*(1 + 0.1*y) + 0.4*y_tau^2 + 0.3*(v_tau - 1)^2",
        lagrangian_vars());
    spec.l = Expr::parse("0.5*y^2 + 0.2*v*x + 0.1*w^2", inner_vars());
    spec.phi = Expr::parse("0.5*x^2 + 0.25*x", history_vars());
    validate_problem(spec);
    return spec;
}

ProblemSpec builtin_classical_quadratic(int n) {
    // Smooth quadratic problem with no delay dependence; used for the
    // classical-limit comparison. The trajectory cos(pi x / 2) continues the
    // history smoothly across a.
    ProblemSpec spec;
    spec.a = 0.0;
    spec.b = 2.0;
    spec.tau = 1.0;
    spec.alpha = 0.99;
    spec.beta = 1.0;
    spec.n = n;
    spec.y_b = -1.0;
    spec.label = "builtin-classical-quadratic";
    spec.classical = true;
    spec.L = Expr::parse("0.5*v^2 + 0.5*y^2", lagrangian_vars());
    spec.l = Expr::parse("0", inner_vars());
    spec.phi = Expr::parse("cos(pi*x/2)", history_vars());
    validate_problem(spec);
    return spec;
}

} // namespace

ProblemSpec builtin_problem(const std::string& name, double alpha, int n) {
    if (name == "example") return builtin_example(alpha, n);
    if (name == "rich") return builtin_rich(alpha, n);
    if (name == "classical-quadratic") return builtin_classical_quadratic(n);
    throw DomainError("unknown built-in problem '" + name + "'");
}

std::vector<std::string> builtin_names() {
    return {"example", "rich", "classical-quadratic"};
}

Trajectory make_reference(const ProblemSpec& spec) {
    if (spec.label != "builtin-example")
        throw DomainError("make_reference: analytic minimizer known only for the built-in example");
    const GridPtr grid = spec.grid();
    std::vector<double> values(static_cast<std::size_t>(grid->idx_b() + 1), 0.0);
    for (int i = 0; i <= grid->idx_b(); ++i) {
        const double x = grid->node(i);
        values[i] = x > 0.0 ? std::pow(x, spec.alpha + 1.0) : 0.0;
    }
    values[grid->idx_b()] = spec.y_b;
    return Trajectory{SampledPath(grid, 0, std::move(values))};
}

Trajectory make_trajectory(const ProblemSpec& spec, const std::vector<double>& interior_values) {
    const GridPtr grid = spec.grid();
    const int interior = grid->idx_b() - grid->idx_a() - 1;
    if (static_cast<int>(interior_values.size()) != interior)
        throw DomainError("make_trajectory: expected " + std::to_string(interior) +
                          " interior values, got " + std::to_string(interior_values.size()));
    std::vector<double> values(static_cast<std::size_t>(grid->idx_b() + 1), 0.0);
    Env env = spec.param_env();
    for (int i = 0; i <= grid->idx_a(); ++i) {
        env[Slot::x] = grid->node(i);
        values[i] = spec.phi.eval(env);
    }
    for (int k = 0; k < interior; ++k) values[grid->idx_a() + 1 + k] = interior_values[k];
    values[grid->idx_b()] = spec.y_b;
    return Trajectory{SampledPath(grid, 0, std::move(values))};
}

std::vector<double> extract_interior(const ProblemSpec& spec, const Trajectory& traj) {
    const GridPtr grid = traj.y.grid();
    (void)spec;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(grid->idx_b() - grid->idx_a() - 1));
    for (int i = grid->idx_a() + 1; i < grid->idx_b(); ++i) out.push_back(traj.y.at(i));
    return out;
}

Trajectory linear_init(const ProblemSpec& spec) {
    const GridPtr grid = spec.grid();
    Env env = spec.param_env();
    env[Slot::x] = spec.a;
    const double ya = spec.phi.eval(env);
    const int interior = grid->idx_b() - grid->idx_a() - 1;
    std::vector<double> vals(static_cast<std::size_t>(interior));
    for (int k = 0; k < interior; ++k) {
        const double t = static_cast<double>(k + 1) / (interior + 1);
        vals[k] = ya + t * (spec.y_b - ya);
    }
    return make_trajectory(spec, vals);
}

} // namespace fvar
