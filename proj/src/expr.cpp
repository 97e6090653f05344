#include "fvar/expr.hpp"
#include "fvar/errors.hpp"
#include "fvar/gamma.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace fvar {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

const std::map<std::string, Slot, std::less<>>& slot_table() {
    static const std::map<std::string, Slot, std::less<>> t = {
        {"x", Slot::x},     {"y", Slot::y},         {"v", Slot::v},
        {"w", Slot::w},     {"z", Slot::z},         {"y_tau", Slot::y_tau},
        {"v_tau", Slot::v_tau}, {"alpha", Slot::alpha}, {"beta", Slot::beta},
        {"tau", Slot::tau}, {"pi", Slot::pi},
    };
    return t;
}

const std::map<std::string, FuncKind, std::less<>>& func_table() {
    static const std::map<std::string, FuncKind, std::less<>> t = {
        {"sin", FuncKind::sin},         {"cos", FuncKind::cos},
        {"exp", FuncKind::exp},         {"ln", FuncKind::ln},
        {"abs", FuncKind::abs},         {"gamma", FuncKind::gamma},
        {"pospart", FuncKind::pospart}, {"sign", FuncKind::sign},
        {"step", FuncKind::step},       {"digamma", FuncKind::digamma},
    };
    return t;
}

std::string_view func_name(FuncKind f) {
    switch (f) {
        case FuncKind::sin: return "sin";
        case FuncKind::cos: return "cos";
        case FuncKind::exp: return "exp";
        case FuncKind::ln: return "ln";
        case FuncKind::abs: return "abs";
        case FuncKind::gamma: return "gamma";
        case FuncKind::pospart: return "pospart";
        case FuncKind::sign: return "sign";
        case FuncKind::step: return "step";
        case FuncKind::digamma: return "digamma";
    }
    return "?";
}

ExprNodePtr mk_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::number;
    n->number = v;
    return n;
}

ExprNodePtr mk_variable(Slot s) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::variable;
    n->slot = s;
    return n;
}

bool is_number(const ExprNodePtr& n, double v) {
    return n->kind == NodeKind::number && n->number == v;
}

bool is_any_number(const ExprNodePtr& n) { return n->kind == NodeKind::number; }

ExprNodePtr mk_binary(NodeKind k, ExprNodePtr a, ExprNodePtr b);
ExprNodePtr mk_neg(ExprNodePtr a);

// Constant folding happens at construction: literal arithmetic collapses and
// additive/multiplicative identities drop out, so that a symbolically zero
// partial derivative is the literal 0.
ExprNodePtr mk_binary(NodeKind k, ExprNodePtr a, ExprNodePtr b) {
    if (is_any_number(a) && is_any_number(b)) {
        const double x = a->number, y = b->number;
        switch (k) {
            case NodeKind::add: return mk_number(x + y);
            case NodeKind::sub: return mk_number(x - y);
            case NodeKind::mul: return mk_number(x * y);
            case NodeKind::div:
                if (y != 0.0) return mk_number(x / y);
                break; // keep the node; evaluation reports the error
            case NodeKind::pow: {
                const double r = std::pow(x, y);
                if (std::isfinite(r)) return mk_number(r);
                break;
            }
            default: break;
        }
    }
    switch (k) {
        case NodeKind::add:
            if (is_number(a, 0.0)) return b;
            if (is_number(b, 0.0)) return a;
            break;
        case NodeKind::sub:
            if (is_number(b, 0.0)) return a;
            if (is_number(a, 0.0)) return mk_neg(b);
            break;
        case NodeKind::mul:
            if (is_number(a, 0.0) || is_number(b, 0.0)) return mk_number(0.0);
            if (is_number(a, 1.0)) return b;
            if (is_number(b, 1.0)) return a;
            break;
        case NodeKind::div:
            if (is_number(a, 0.0) && !is_number(b, 0.0)) return mk_number(0.0);
            if (is_number(b, 1.0)) return a;
            break;
        case NodeKind::pow:
            if (is_number(b, 1.0)) return a;
            if (is_number(b, 0.0)) return mk_number(1.0);
            break;
        default: break;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->left = std::move(a);
    n->right = std::move(b);
    return n;
}

ExprNodePtr mk_neg(ExprNodePtr a) {
    if (is_any_number(a)) return mk_number(-a->number);
    if (a->kind == NodeKind::neg) return a->left;
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::neg;
    n->left = std::move(a);
    return n;
}

ExprNodePtr mk_call(FuncKind f, ExprNodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::call;
    n->fn = f;
    n->left = std::move(a);
    return n;
}

// ---------------------------------------------------------------------------
// Parsing

struct Parser {
    const std::string& text;
    const std::set<std::string>& allowed;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) {
        throw ParseError(msg, at);
    }

    ExprNodePtr parse_expr() {
        ExprNodePtr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (eat('+')) lhs = mk_binary(NodeKind::add, lhs, parse_term());
            else if (eat('-')) lhs = mk_binary(NodeKind::sub, lhs, parse_term());
            else return lhs;
        }
    }

    ExprNodePtr parse_term() {
        ExprNodePtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (eat('*')) lhs = mk_binary(NodeKind::mul, lhs, parse_unary());
            else if (eat('/')) lhs = mk_binary(NodeKind::div, lhs, parse_unary());
            else return lhs;
        }
    }

    ExprNodePtr parse_unary() {
        skip_ws();
        if (eat('-')) return mk_neg(parse_unary());
        return parse_power();
    }

    ExprNodePtr parse_power() {
        ExprNodePtr base = parse_atom();
        skip_ws();
        if (eat('^')) return mk_binary(NodeKind::pow, base, parse_unary());
        return base;
    }

    ExprNodePtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression", pos);
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprNodePtr inner = parse_expr();
            if (!eat(')')) fail("expected ')'", pos);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'", pos);
    }

    ExprNodePtr parse_number() {
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
                pos = mark; // the 'e' belongs to an identifier context; stop before it
            } else {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
            }
        }
        return mk_number(std::stod(text.substr(start, pos - start)));
    }

    ExprNodePtr parse_ident() {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string name = text.substr(start, pos - start);
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            auto fit = func_table().find(name);
            if (fit == func_table().end())
                fail("unknown function '" + name + "'", start);
            ++pos;
            ExprNodePtr arg = parse_expr();
            skip_ws();
            if (pos < text.size() && text[pos] == ',')
                fail("function '" + name + "' takes exactly one argument", pos);
            if (!eat(')')) fail("expected ')' after function argument", pos);
            return mk_call(fit->second, arg);
        }
        auto sit = slot_table().find(name);
        if (sit == slot_table().end())
            fail("unknown identifier '" + name + "'", start);
        const Slot s = sit->second;
        if (!slot_is_parameter(s) && allowed.find(name) == allowed.end())
            fail("unknown identifier '" + name + "' (not a variable of this context)", start);
        return mk_variable(s);
    }
};

// ---------------------------------------------------------------------------
// Evaluation

std::string node_to_string(const ExprNodePtr& n);

double eval_node(const ExprNodePtr& n, const Env& env) {
    switch (n->kind) {
        case NodeKind::number: return n->number;
        case NodeKind::variable: return env[n->slot];
        case NodeKind::add: return eval_node(n->left, env) + eval_node(n->right, env);
        case NodeKind::sub: return eval_node(n->left, env) - eval_node(n->right, env);
        case NodeKind::mul: return eval_node(n->left, env) * eval_node(n->right, env);
        case NodeKind::div: {
            const double num = eval_node(n->left, env);
            const double den = eval_node(n->right, env);
            if (den == 0.0) throw EvalError("division by zero", node_to_string(n));
            return num / den;
        }
        case NodeKind::pow: {
            const double base = eval_node(n->left, env);
            const double e = eval_node(n->right, env);
            if (base == 0.0 && e < 0.0)
                throw EvalError("zero base with negative exponent", node_to_string(n));
            if (base < 0.0 && e != std::floor(e))
                throw EvalError("negative base with non-integer exponent", node_to_string(n));
            return std::pow(base, e);
        }
        case NodeKind::neg: return -eval_node(n->left, env);
        case NodeKind::call: {
            const double u = eval_node(n->left, env);
            switch (n->fn) {
                case FuncKind::sin: return std::sin(u);
                case FuncKind::cos: return std::cos(u);
                case FuncKind::exp: return std::exp(u);
                case FuncKind::ln:
                    if (u <= 0.0) throw EvalError("ln of non-positive value", node_to_string(n));
                    return std::log(u);
                case FuncKind::abs: return std::abs(u);
                case FuncKind::gamma:
                    try {
                        return gamma_fn(u);
                    } catch (const DomainError& e) {
                        throw EvalError(e.what(), node_to_string(n));
                    }
                case FuncKind::digamma:
                    try {
                        return digamma_fn(u);
                    } catch (const DomainError& e) {
                        throw EvalError(e.what(), node_to_string(n));
                    }
                case FuncKind::pospart: return u > 0.0 ? u : 0.0;
                case FuncKind::sign:
                    if (u == 0.0) throw EvalError("sign undefined at zero", node_to_string(n));
                    return u > 0.0 ? 1.0 : -1.0;
                case FuncKind::step: return u > 0.0 ? 1.0 : 0.0;
            }
            break;
        }
    }
    throw EvalError("malformed expression node", "?");
}

// ---------------------------------------------------------------------------
// Differentiation

bool node_uses_any_variable(const ExprNodePtr& n) {
    if (!n) return false;
    if (n->kind == NodeKind::variable) return !slot_is_parameter(n->slot);
    return node_uses_any_variable(n->left) || node_uses_any_variable(n->right);
}

ExprNodePtr diff_node(const ExprNodePtr& n, Slot var) {
    switch (n->kind) {
        case NodeKind::number: return mk_number(0.0);
        case NodeKind::variable: return mk_number(n->slot == var ? 1.0 : 0.0);
        case NodeKind::add:
            return mk_binary(NodeKind::add, diff_node(n->left, var), diff_node(n->right, var));
        case NodeKind::sub:
            return mk_binary(NodeKind::sub, diff_node(n->left, var), diff_node(n->right, var));
        case NodeKind::mul:
            return mk_binary(NodeKind::add,
                             mk_binary(NodeKind::mul, diff_node(n->left, var), n->right),
                             mk_binary(NodeKind::mul, n->left, diff_node(n->right, var)));
        case NodeKind::div:
            // (u'v - uv') / v^2
            return mk_binary(
                NodeKind::div,
                mk_binary(NodeKind::sub,
                          mk_binary(NodeKind::mul, diff_node(n->left, var), n->right),
                          mk_binary(NodeKind::mul, n->left, diff_node(n->right, var))),
                mk_binary(NodeKind::pow, n->right, mk_number(2.0)));
        case NodeKind::pow: {
            if (!node_uses_any_variable(n->right)) {
                // c * u^(c-1) * u'
                ExprNodePtr cm1 = mk_binary(NodeKind::sub, n->right, mk_number(1.0));
                return mk_binary(
                    NodeKind::mul,
                    mk_binary(NodeKind::mul, n->right, mk_binary(NodeKind::pow, n->left, cm1)),
                    diff_node(n->left, var));
            }
            // u^v * (v' ln u + v u'/u)
            ExprNodePtr t1 = mk_binary(NodeKind::mul, diff_node(n->right, var),
                                       mk_call(FuncKind::ln, n->left));
            ExprNodePtr t2 = mk_binary(NodeKind::mul, n->right,
                                       mk_binary(NodeKind::div, diff_node(n->left, var), n->left));
            return mk_binary(NodeKind::mul, mk_binary(NodeKind::pow, n->left, n->right),
                             mk_binary(NodeKind::add, t1, t2));
        }
        case NodeKind::neg: return mk_neg(diff_node(n->left, var));
        case NodeKind::call: {
            ExprNodePtr du = diff_node(n->left, var);
            ExprNodePtr outer;
            switch (n->fn) {
                case FuncKind::sin: outer = mk_call(FuncKind::cos, n->left); break;
                case FuncKind::cos: outer = mk_neg(mk_call(FuncKind::sin, n->left)); break;
                case FuncKind::exp: outer = mk_call(FuncKind::exp, n->left); break;
                case FuncKind::ln:
                    return mk_binary(NodeKind::div, du, n->left);
                case FuncKind::abs: outer = mk_call(FuncKind::sign, n->left); break;
                case FuncKind::gamma:
                    outer = mk_binary(NodeKind::mul, mk_call(FuncKind::gamma, n->left),
                                      mk_call(FuncKind::digamma, n->left));
                    break;
                case FuncKind::digamma:
                    throw EvalError("differentiation through digamma is unsupported",
                                    node_to_string(n));
                case FuncKind::pospart: outer = mk_call(FuncKind::step, n->left); break;
                case FuncKind::sign: return mk_number(0.0);
                case FuncKind::step: return mk_number(0.0);
            }
            return mk_binary(NodeKind::mul, outer, du);
        }
    }
    throw EvalError("malformed expression node", "?");
}

// ---------------------------------------------------------------------------
// Printing. Parenthesization follows the grammar so that re-parsing
// reproduces the tree.

int precedence(NodeKind k) {
    switch (k) {
        case NodeKind::add:
        case NodeKind::sub: return 1;
        case NodeKind::mul:
        case NodeKind::div: return 2;
        case NodeKind::neg: return 3;
        case NodeKind::pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string print_node(const ExprNodePtr& n, int parent_prec, bool right_side) {
    std::string s;
    int prec = precedence(n->kind);
    switch (n->kind) {
        case NodeKind::number:
            s = format_number(n->number);
            if (n->number < 0.0) prec = 3; // prints with a leading '-'
            break;
        case NodeKind::variable: s = std::string(slot_name(n->slot)); break;
        case NodeKind::add:
            s = print_node(n->left, prec, false) + " + " + print_node(n->right, prec + 1, true);
            break;
        case NodeKind::sub:
            s = print_node(n->left, prec, false) + " - " + print_node(n->right, prec + 1, true);
            break;
        case NodeKind::mul:
            s = print_node(n->left, prec, false) + "*" + print_node(n->right, prec + 1, true);
            break;
        case NodeKind::div:
            s = print_node(n->left, prec, false) + "/" + print_node(n->right, prec + 1, true);
            break;
        case NodeKind::neg: s = "-" + print_node(n->left, prec, true); break;
        case NodeKind::pow:
            // '^' binds tighter than unary minus on the left, and its right
            // operand re-enters at unary level (right-associative).
            s = print_node(n->left, prec + 1, false) + "^" + print_node(n->right, prec, true);
            break;
        case NodeKind::call:
            s = std::string(func_name(n->fn)) + "(" + print_node(n->left, 0, false) + ")";
            break;
    }
    if (prec < parent_prec) return "(" + s + ")";
    (void)right_side;
    return s;
}

std::string node_to_string(const ExprNodePtr& n) { return print_node(n, 0, false); }

bool nodes_equal(const ExprNodePtr& a, const ExprNodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::number: return a->number == b->number;
        case NodeKind::variable: return a->slot == b->slot;
        case NodeKind::call:
            return a->fn == b->fn && nodes_equal(a->left, b->left);
        case NodeKind::neg: return nodes_equal(a->left, b->left);
        default:
            return nodes_equal(a->left, b->left) && nodes_equal(a->right, b->right);
    }
}

bool node_uses(const ExprNodePtr& n, Slot s) {
    if (!n) return false;
    if (n->kind == NodeKind::variable) return n->slot == s;
    return node_uses(n->left, s) || node_uses(n->right, s);
}

bool node_has_nonconst_exponent(const ExprNodePtr& n) {
    if (!n) return false;
    if (n->kind == NodeKind::pow && node_uses_any_variable(n->right)) return true;
    return node_has_nonconst_exponent(n->left) || node_has_nonconst_exponent(n->right);
}

} // namespace

Env::Env() { values.fill(std::numeric_limits<double>::quiet_NaN()); }

std::string_view slot_name(Slot s) {
    switch (s) {
        case Slot::x: return "x";
        case Slot::y: return "y";
        case Slot::v: return "v";
        case Slot::w: return "w";
        case Slot::z: return "z";
        case Slot::y_tau: return "y_tau";
        case Slot::v_tau: return "v_tau";
        case Slot::alpha: return "alpha";
        case Slot::beta: return "beta";
        case Slot::tau: return "tau";
        case Slot::pi: return "pi";
        default: return "?";
    }
}

bool slot_is_parameter(Slot s) {
    return s == Slot::alpha || s == Slot::beta || s == Slot::tau || s == Slot::pi;
}

Expr Expr::parse(const std::string& text, const std::set<std::string>& allowed_vars) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ParseError("empty expression", 0);
    Parser p{text, allowed_vars};
    ExprNodePtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError("trailing characters after expression", p.pos);
    return Expr(std::move(root));
}

double Expr::eval(const Env& env) const {
    if (!root_) throw EvalError("evaluating empty expression", "");
    return eval_node(root_, env);
}

Expr Expr::differentiate(Slot var) const {
    if (!root_) throw EvalError("differentiating empty expression", "");
    return Expr(diff_node(root_, var));
}

Expr Expr::differentiate(std::string_view var) const {
    auto it = slot_table().find(var);
    if (it == slot_table().end())
        throw DomainError("differentiate: unknown variable '" + std::string(var) + "'");
    return differentiate(it->second);
}

bool Expr::is_literal_zero() const {
    return root_ && root_->kind == NodeKind::number && root_->number == 0.0;
}

bool Expr::is_constant() const { return root_ && !node_uses_any_variable(root_); }

bool Expr::uses(Slot s) const { return node_uses(root_, s); }

bool Expr::has_nonconstant_exponent() const { return node_has_nonconst_exponent(root_); }

std::string Expr::to_string() const {
    if (!root_) return "";
    return node_to_string(root_);
}

bool Expr::structurally_equal(const Expr& other) const {
    return nodes_equal(root_, other.root_);
}

const std::set<std::string>& lagrangian_vars() {
    static const std::set<std::string> s = {"x", "y", "v", "w", "z", "y_tau", "v_tau"};
    return s;
}

const std::set<std::string>& inner_vars() {
    static const std::set<std::string> s = {"x", "y", "v", "w"};
    return s;
}

const std::set<std::string>& history_vars() {
    static const std::set<std::string> s = {"x"};
    return s;
}

} // namespace fvar
