#include <doctest.h>

#include "fvar/errors.hpp"
#include "fvar/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

using namespace fvar;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "missing file: " << path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("shipped benchmark problem file loads with the documented parameters") {
    const ProblemSpec spec = load_problem(slurp(std::string(FVAR_PROBLEMS_DIR) +
                                                "/example_alpha_0.5.fvp"));
    CHECK(spec.a == 0.0);
    CHECK(spec.b == 2.0);
    CHECK(spec.tau == 1.0);
    CHECK(spec.alpha == 0.5);
    CHECK(spec.y_b == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK_FALSE(spec.classical);
}

TEST_CASE("validation rejects tau outside (0, b-a) with the field named") {
    const std::string text =
        "a = 0\nb = 2\ntau = 3\nalpha = 0.5\nbeta = 1\nn = 8\ny_b = 1\n"
        "L = y^2\nl = 0\nphi = 0\n";
    try {
        load_problem(text);
        FAIL("expected validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field == "tau");
    }
}

TEST_CASE("missing and unknown keys are rejected") {
    const std::string missing_L =
        "a = 0\nb = 2\ntau = 1\nalpha = 0.5\nbeta = 1\nn = 8\ny_b = 1\nl = 0\nphi = 0\n";
    try {
        load_problem(missing_L);
        FAIL("expected validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field == "L");
    }
    const std::string unknown =
        "a = 0\nb = 2\ntau = 1\nalpha = 0.5\nbeta = 1\nn = 8\ny_b = 1\n"
        "L = y^2\nl = 0\nphi = 0\nfoo = 1\n";
    CHECK_THROWS_AS(load_problem(unknown), ValidationError);
    const std::string duplicate =
        "a = 0\na = 1\nb = 2\ntau = 1\nalpha = 0.5\nbeta = 1\nn = 8\ny_b = 1\n"
        "L = y^2\nl = 0\nphi = 0\n";
    CHECK_THROWS_AS(load_problem(duplicate), ValidationError);
}

TEST_CASE("non-constant exponents need the positive-base assertion") {
    const std::string base =
        "a = 0\nb = 2\ntau = 1\nalpha = 0.5\nbeta = 1\nn = 8\ny_b = 1\n"
        "l = 0\nphi = 0\nL = (1 + y^2)^v\n";
    CHECK_THROWS_AS(load_problem(base), ValidationError);
    CHECK_NOTHROW(load_problem(base + "positive_base_pow = true\n"));
}

TEST_CASE("problem files round-trip through pretty_print") {
    for (const std::string& name : builtin_names()) {
        const ProblemSpec spec = builtin_problem(name, 0.5, 64);
        const ProblemSpec again = load_problem(pretty_print(spec));
        CHECK(again.a == spec.a);
        CHECK(again.b == spec.b);
        CHECK(again.tau == spec.tau);
        CHECK(again.alpha == spec.alpha);
        CHECK(again.beta == spec.beta);
        CHECK(again.n == spec.n);
        CHECK(again.y_b == spec.y_b);
        CHECK(again.classical == spec.classical);
        CHECK(again.label == spec.label);
        CHECK(again.L.structurally_equal(spec.L));
        CHECK(again.l.structurally_equal(spec.l));
        CHECK(again.phi.structurally_equal(spec.phi));
    }
}

TEST_CASE("every catalog problem passes its own validation") {
    for (const std::string& name : builtin_names())
        CHECK_NOTHROW(validate_problem(builtin_problem(name, 0.5, 64)));
}

TEST_CASE("builtin example pins the terminal value 2^(alpha+1)") {
    const ProblemSpec spec = builtin_example(0.5, 32);
    CHECK(spec.y_b == doctest::Approx(2.8284271247461903).epsilon(1e-15));
    CHECK_THROWS_AS(builtin_example(1.5, 32), DomainError);
    CHECK_THROWS_AS(builtin_example(0.0, 32), DomainError);
}

TEST_CASE("reference trajectory samples the analytic minimizer exactly") {
    const ProblemSpec spec = builtin_example(0.5, 16);
    const Trajectory ref = make_reference(spec);
    const GridPtr g = ref.y.grid();
    CHECK(ref.y.at(g->idx_a()) == 0.0);                      // x = 0
    CHECK(ref.y.at(0) == 0.0);                               // history
    CHECK(ref.y.at(g->idx_a() / 2) == 0.0);                  // x = -0.5
    CHECK(ref.y.at(g->idx_b()) == spec.y_b);                 // x = 2
    const int mid = g->idx_a() + g->n() / 2;                 // x = 1
    CHECK(ref.y.at(mid) == doctest::Approx(1.0).epsilon(1e-15));

    ProblemSpec other = builtin_problem("rich");
    CHECK_THROWS_AS(make_reference(other), DomainError);
}

TEST_CASE("make_trajectory pins history and terminal values") {
    const ProblemSpec spec = builtin_example(0.5, 8);
    const GridPtr g = spec.grid();
    const int interior = g->idx_b() - g->idx_a() - 1;

    const Trajectory zeros = make_trajectory(spec, std::vector<double>(interior, 0.0));
    for (int i = 0; i <= g->idx_a(); ++i) CHECK(zeros.y.at(i) == 0.0);
    CHECK(zeros.y.at(g->idx_b()) == spec.y_b);

    // Interior sampled from the reference reproduces make_reference.
    const Trajectory ref = make_reference(spec);
    const Trajectory rebuilt = make_trajectory(spec, extract_interior(spec, ref));
    for (int i = 0; i <= g->idx_b(); ++i) CHECK(rebuilt.y.at(i) == ref.y.at(i));

    CHECK_THROWS_AS(make_trajectory(spec, std::vector<double>(interior + 1, 0.0)), DomainError);
}

TEST_CASE("classical-mode validation rejects w dependence") {
    ProblemSpec spec = builtin_problem("classical-quadratic", 0.5, 32);
    spec.L = Expr::parse("w^2", lagrangian_vars());
    CHECK_THROWS_AS(validate_problem(spec), ValidationError);
}
