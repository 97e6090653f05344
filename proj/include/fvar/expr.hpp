#pragma once

#include <array>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace fvar {

/// Fixed slot table for every name an expression may reference. Variables
/// occupy the first block; alpha/beta/tau/pi are per-problem parameters and
/// are always in scope.
enum class Slot : int {
    x = 0,
    y,
    v,
    w,
    z,
    y_tau,
    v_tau,
    alpha,
    beta,
    tau,
    pi,
    count_,
};

constexpr int kSlotCount = static_cast<int>(Slot::count_);

std::string_view slot_name(Slot s);
bool slot_is_parameter(Slot s);

/// Evaluation environment: one value per slot. Unbound slots are NaN; the
/// per-context variable validation guarantees they are never read.
struct Env {
    std::array<double, kSlotCount> values;
    Env();
    double& operator[](Slot s) { return values[static_cast<int>(s)]; }
    double operator[](Slot s) const { return values[static_cast<int>(s)]; }
};

enum class NodeKind { number, variable, add, sub, mul, div, pow, neg, call };

enum class FuncKind { sin, cos, exp, ln, abs, gamma, pospart, sign, step, digamma };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    double number = 0.0;          // number
    Slot slot = Slot::x;          // variable
    FuncKind fn = FuncKind::sin;  // call
    ExprNodePtr left, right;      // children (unary ops use left only)
};

/// Immutable expression tree with evaluation, symbolic differentiation, and a
/// printer whose output re-parses to a structurally identical tree.
class Expr {
public:
    Expr() = default;

    /// Recursive-descent parse. Precedence (low to high): +-, */, unary -,
    /// ^ (right-assoc), call/atom. Identifiers must be in `allowed_vars`, be
    /// parameters, or name a function.
    static Expr parse(const std::string& text, const std::set<std::string>& allowed_vars);

    bool empty() const { return !root_; }
    double eval(const Env& env) const;
    Expr differentiate(Slot var) const;
    Expr differentiate(std::string_view var) const;

    bool is_literal_zero() const;
    /// True when the tree references no variable slot (parameters and
    /// literals only), i.e. it is constant for a fixed problem.
    bool is_constant() const;
    bool uses(Slot s) const;
    /// True when some ^ node has an exponent that is not constant in the
    /// sense above. Such expressions are rejected at problem load unless the
    /// file asserts a positive base.
    bool has_nonconstant_exponent() const;

    std::string to_string() const;
    bool structurally_equal(const Expr& other) const;

    const ExprNodePtr& root() const { return root_; }
    explicit Expr(ExprNodePtr root) : root_(std::move(root)) {}

private:
    ExprNodePtr root_;
};

/// Variable sets for the three expression contexts of a problem file.
const std::set<std::string>& lagrangian_vars(); // x y v w z y_tau v_tau
const std::set<std::string>& inner_vars();      // x y v w
const std::set<std::string>& history_vars();    // x

} // namespace fvar
