#include <doctest.h>

#include "fvar/errors.hpp"
#include "fvar/expr.hpp"
#include "fvar/gamma.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

using namespace fvar;

namespace {

Env env_with(std::initializer_list<std::pair<Slot, double>> bindings) {
    Env env;
    env[Slot::pi] = 3.141592653589793238462643383279502884;
    for (const auto& [slot, value] : bindings) env[slot] = value;
    return env;
}

double fd_partial(const Expr& e, const Env& env, Slot var, double step = 1e-6) {
    Env lo = env, hi = env;
    lo[var] -= step;
    hi[var] += step;
    return (e.eval(hi) - e.eval(lo)) / (2.0 * step);
}

} // namespace

TEST_CASE("parser handles the benchmark Lagrangian term") {
    const Expr e = Expr::parse("(v - gamma(alpha+2)*x)^2", lagrangian_vars());
    const Env env = env_with({{Slot::v, 2.0}, {Slot::x, 1.0}, {Slot::alpha, 0.5}});
    const double want = std::pow(2.0 - gamma_fn(2.5) * 1.0, 2);
    CHECK(e.eval(env) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("unknown identifiers are named in the error") {
    try {
        Expr::parse("y_tau + q", lagrangian_vars());
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'q'") != std::string::npos);
    }
    // 'z' is not a variable of the inner integrand context.
    CHECK_THROWS_AS(Expr::parse("y + z", inner_vars()), ParseError);
}

TEST_CASE("literal arithmetic constant-folds") {
    const Expr e = Expr::parse("2*(3+4)", history_vars());
    CHECK(e.is_constant());
    CHECK(e.eval(Env{}) == 14.0);
}

TEST_CASE("evaluation errors carry the offending subexpression") {
    const Expr e = Expr::parse("1/x", history_vars());
    try {
        e.eval(env_with({{Slot::x, 0.0}}));
        FAIL("expected evaluation error");
    } catch (const EvalError& err) {
        CHECK(err.subexpr.find("1/x") != std::string::npos);
    }
    CHECK_THROWS_AS(Expr::parse("ln(x)", history_vars()).eval(env_with({{Slot::x, -1.0}})),
                    EvalError);
    CHECK_THROWS_AS(Expr::parse("gamma(x)", history_vars()).eval(env_with({{Slot::x, -2.0}})),
                    EvalError);
    CHECK_THROWS_AS(Expr::parse("x^(0-1)", history_vars()).eval(env_with({{Slot::x, 0.0}})),
                    EvalError);
}

TEST_CASE("gamma evaluation matches the table value") {
    const Expr e = Expr::parse("gamma(alpha+2)", lagrangian_vars());
    CHECK(e.eval(env_with({{Slot::alpha, 0.5}})) ==
          doctest::Approx(1.3293403881791370).epsilon(1e-14));
}

TEST_CASE("symbolic partials of the benchmark expressions") {
    // d/dy (y - x^(alpha+1))^2 = 2 (y - x^(alpha+1))
    const Expr l = Expr::parse("(y - x^(alpha+1))^2", inner_vars());
    const Expr dl = l.differentiate(Slot::y);
    const Env env = env_with({{Slot::y, 1.5}, {Slot::x, 0.7}, {Slot::alpha, 0.5}});
    CHECK(dl.eval(env) ==
          doctest::Approx(2.0 * (1.5 - std::pow(0.7, 1.5))).epsilon(1e-13));

    // d/dz of an L containing a bare z term is the literal 1.
    const Expr L = Expr::parse("(v - x)^2 + z + y_tau^2", lagrangian_vars());
    const Expr dz = L.differentiate(Slot::z);
    CHECK(dz.is_constant());
    CHECK(dz.eval(Env{}) == 1.0);

    // Absent variable: the literal zero.
    CHECK(L.differentiate(Slot::v_tau).is_literal_zero());
}

TEST_CASE("differentiation of a variable-free expression is the literal zero") {
    const Expr e = Expr::parse("gamma(alpha+2)*tau - pi^2", lagrangian_vars());
    CHECK(e.differentiate(Slot::y).is_literal_zero());
}

TEST_CASE("derivatives agree with central differences on randomized environments") {
    const std::vector<std::string> catalog = {
        "(v - gamma(alpha+2)*x)^2 + z + (v_tau - (alpha+1)*pospart(x-1)^alpha)^2",
        "(y - x^(alpha+1))^2",
        "sin(y*v) + exp(0.3*w) - ln(2 + z^2)",
        "y^3 - 2*y*v + v/w",
        "abs(y)*y_tau + cos(v_tau)",
    };
    // The optimality system only ever differentiates in the non-x variables;
    // d/dx would hit the deliberate kink of the guarded power.
    const std::vector<Slot> bind = {Slot::x,     Slot::y,     Slot::v, Slot::w,
                                    Slot::z,     Slot::y_tau, Slot::v_tau};
    const std::vector<Slot> vars = {Slot::y, Slot::v, Slot::w, Slot::z, Slot::y_tau,
                                    Slot::v_tau};
    std::mt19937_64 rng(2024);
    auto draw = [&rng]() { return 0.5 + (rng() >> 11) * 0x1.0p-53 * 2.0; }; // [0.5, 2.5)

    for (const std::string& text : catalog) {
        const Expr e = Expr::parse(text, lagrangian_vars());
        for (Slot var : vars) {
            const Expr de = e.differentiate(var);
            for (int trial = 0; trial < 100; ++trial) {
                Env env = env_with({{Slot::alpha, 0.5}});
                for (Slot s : bind) env[s] = draw();
                const double sym = de.eval(env);
                const double fd = fd_partial(e, env, var);
                CHECK(std::abs(sym - fd) <= 1e-6 * std::max(1.0, std::abs(sym)));
            }
        }
    }
}

TEST_CASE("printed expressions re-parse to structurally identical trees") {
    const std::vector<std::string> catalog = {
        "(v - gamma(alpha+2)*x)^2 + z + (v_tau - (alpha+1)*pospart(x-1)^alpha)^2",
        "(y - x^(alpha+1))^2",
        "-x^2 + 3*x - 4/(x + 1)",
        "2^3^2",
        "-(y + v)*w",
        "sin(cos(exp(ln(x + 4))))",
        "y^3 - 2*y*v + v/w - abs(y)",
    };
    for (const std::string& text : catalog) {
        const Expr e = Expr::parse(text, lagrangian_vars());
        const Expr reparsed = Expr::parse(e.to_string(), lagrangian_vars());
        CHECK(reparsed.structurally_equal(e));
        // Derivative trees print and re-parse too.
        const Expr de = e.differentiate(Slot::y);
        CHECK(Expr::parse(de.to_string(), lagrangian_vars()).structurally_equal(de));
    }
    CHECK(Expr::parse("2^3^2", history_vars()).eval(Env{}) == 512.0);
}

TEST_CASE("random expression trees survive print/parse round trips") {
    // Property check over generated syntax: whatever the printer emits must
    // re-parse to a structurally identical tree.
    std::mt19937_64 rng(424242);
    auto pick = [&rng](int n) { return static_cast<int>(rng() % n); };
    const std::vector<std::string> leaves = {"x",     "y",   "v",     "w",  "z",
                                             "y_tau", "v_tau", "alpha", "2",  "0.5",
                                             "1e-3",  "3.75", "pi"};
    const std::vector<std::string> funcs = {"sin", "cos", "exp", "abs", "pospart"};

    std::function<std::string(int)> gen = [&](int depth) -> std::string {
        if (depth <= 0) return leaves[pick(static_cast<int>(leaves.size()))];
        switch (pick(8)) {
            case 0: return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
            case 1: return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
            case 2: return gen(depth - 1) + "*" + leaves[pick(13)];
            case 3: return "(" + gen(depth - 1) + ")/(" + gen(depth - 1) + " + 4)";
            case 4: return "-" + gen(depth - 1);
            case 5: return funcs[pick(5)] + "(" + gen(depth - 1) + ")";
            case 6: return "(" + gen(depth - 1) + ")^2";
            default: return leaves[pick(static_cast<int>(leaves.size()))];
        }
    };
    for (int trial = 0; trial < 200; ++trial) {
        const std::string text = gen(4);
        CAPTURE(text);
        const Expr e = Expr::parse(text, lagrangian_vars());
        const Expr back = Expr::parse(e.to_string(), lagrangian_vars());
        CHECK(back.structurally_equal(e));
        // Differentiated trees must round-trip as well.
        const Expr de = e.differentiate(Slot::y);
        CHECK(Expr::parse(de.to_string(), lagrangian_vars()).structurally_equal(de));
    }
}

TEST_CASE("abs differentiates to sign with an evaluation error exactly at zero") {
    const Expr e = Expr::parse("abs(y)", lagrangian_vars());
    const Expr de = e.differentiate(Slot::y);
    CHECK(de.eval(env_with({{Slot::y, 2.0}})) == 1.0);
    CHECK(de.eval(env_with({{Slot::y, -3.0}})) == -1.0);
    CHECK_THROWS_AS(de.eval(env_with({{Slot::y, 0.0}})), EvalError);
}

TEST_CASE("guarded power evaluates to zero left of the kink") {
    const Expr e = Expr::parse("(alpha+1)*pospart(x-1)^alpha", lagrangian_vars());
    CHECK(e.eval(env_with({{Slot::x, 0.3}, {Slot::alpha, 0.5}})) == 0.0);
    CHECK(e.eval(env_with({{Slot::x, 1.0}, {Slot::alpha, 0.5}})) == 0.0);
    CHECK(e.eval(env_with({{Slot::x, 2.0}, {Slot::alpha, 0.5}})) ==
          doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("non-constant exponents are detectable") {
    CHECK(Expr::parse("y^v", lagrangian_vars()).has_nonconstant_exponent());
    CHECK_FALSE(Expr::parse("y^(alpha+1)", lagrangian_vars()).has_nonconstant_exponent());
    CHECK_FALSE(Expr::parse("x^2", history_vars()).has_nonconstant_exponent());
}

TEST_CASE("parse failures carry byte offsets") {
    CHECK_THROWS_AS(Expr::parse("", history_vars()), ParseError);
    CHECK_THROWS_AS(Expr::parse("x +", history_vars()), ParseError);
    CHECK_THROWS_AS(Expr::parse("(x", history_vars()), ParseError);
    CHECK_THROWS_AS(Expr::parse("sin(x, 2)", history_vars()), ParseError);
    CHECK_THROWS_AS(Expr::parse("x 2", history_vars()), ParseError);
}
