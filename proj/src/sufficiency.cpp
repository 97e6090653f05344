#include "fvar/sufficiency.hpp"
#include "fvar/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fvar {

namespace {

constexpr double kIneqTol = 1e-10;

// Implementation-independent uniform in [0,1): the distribution classes in
// <random> are not bit-reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

Env witness_env(const std::vector<VarBox>& block, const std::vector<VarBox>& frozen,
                const std::vector<double>& frozen_vals, const std::vector<double>& point,
                const Env& params) {
    Env env = params;
    for (std::size_t i = 0; i < frozen.size(); ++i) env[frozen[i].var] = frozen_vals[i];
    for (std::size_t i = 0; i < block.size(); ++i) env[block[i].var] = point[i];
    return env;
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi sweeps.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-300) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = m[i][i];
    return eig;
}

/// True when the tree contains a primitive whose symbolic second derivative
/// misses a kink (abs, sign, step, pospart). The constant-Hessian shortcut
/// is only sound without them.
bool contains_nonsmooth(const ExprNodePtr& n) {
    if (!n) return false;
    if (n->kind == NodeKind::call &&
        (n->fn == FuncKind::abs || n->fn == FuncKind::sign || n->fn == FuncKind::step ||
         n->fn == FuncKind::pospart))
        return true;
    return contains_nonsmooth(n->left) || contains_nonsmooth(n->right);
}

/// Constant-Hessian fast path: returns the exact status for expressions that
/// are (at most) quadratic in the block variables, or nullopt.
std::optional<ConvexityStatus> quadratic_status(const Expr& e, const std::vector<VarBox>& block,
                                                const Env& params, bool* linear_out) {
    if (contains_nonsmooth(e.root())) return std::nullopt;
    const std::size_t n = block.size();
    std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const Expr di = e.differentiate(block[i].var);
        for (std::size_t j = i; j < n; ++j) {
            const Expr dij = di.differentiate(block[j].var);
            if (!dij.is_constant()) return std::nullopt;
            double value = 0.0;
            if (!dij.is_literal_zero()) {
                try {
                    value = dij.eval(params);
                } catch (const EvalError&) {
                    return std::nullopt;
                }
            }
            hess[i][j] = hess[j][i] = value;
        }
    }
    const std::vector<double> eig = jacobi_eigenvalues(hess);
    double lo = 0.0, hi = 0.0;
    for (double v : eig) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double tol = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    const bool psd = lo >= -tol;
    const bool nsd = hi <= tol;
    if (linear_out) *linear_out = psd && nsd;
    if (psd) return ConvexityStatus::likely_convex;
    if (nsd) return ConvexityStatus::likely_concave;
    return ConvexityStatus::indefinite;
}

SignVerdict classify_sign(double lo, double hi) {
    if (lo >= -1e-12) return SignVerdict::nonnegative;
    if (hi <= 1e-12) return SignVerdict::nonpositive;
    return SignVerdict::mixed;
}

/// Requirement-relative verdict for a certificate slot: when the hypothesis
/// needs convexity (or convexity-or-concavity) and the raw verdict fails it
/// with a concrete witness, the stored status becomes `counterexample`.
ConvexityVerdict demote(ConvexityVerdict v, bool concave_acceptable) {
    const bool ok = v.status == ConvexityStatus::likely_convex ||
                    (concave_acceptable && v.status == ConvexityStatus::likely_concave);
    if (!ok && v.convex_witness.has_value()) v.status = ConvexityStatus::counterexample;
    return v;
}

} // namespace

std::string to_string(ConvexityStatus s) {
    switch (s) {
        case ConvexityStatus::likely_convex: return "likely-convex";
        case ConvexityStatus::likely_concave: return "likely-concave";
        case ConvexityStatus::indefinite: return "indefinite";
        case ConvexityStatus::counterexample: return "counterexample";
    }
    return "?";
}

ConvexityVerdict check_convexity(const Expr& e, const std::vector<VarBox>& block,
                                 const std::vector<VarBox>& frozen, long trials,
                                 std::uint64_t seed, const Env& params) {
    if (trials < 1) throw DomainError("check_convexity: trials must be >= 1");
    if (block.empty()) throw DomainError("check_convexity: empty variable block");
    for (const VarBox& b : block)
        if (!(b.hi > b.lo))
            throw DomainError("check_convexity: degenerate box for variable '" +
                              std::string(slot_name(b.var)) + "'");

    std::vector<Expr> grads;
    grads.reserve(block.size());
    for (const VarBox& b : block) grads.push_back(e.differentiate(b.var));

    std::mt19937_64 rng(seed);
    ConvexityVerdict verdict;
    verdict.margin_convex = std::numeric_limits<double>::infinity();
    verdict.margin_concave = -std::numeric_limits<double>::infinity();

    std::vector<double> frozen_vals(frozen.size());
    std::vector<double> point(block.size()), offset(block.size());
    for (long trial = 0; trial < trials; ++trial) {
        for (std::size_t i = 0; i < frozen.size(); ++i)
            frozen_vals[i] = uniform_in(rng, frozen[i].lo, frozen[i].hi);
        for (std::size_t i = 0; i < block.size(); ++i) {
            point[i] = uniform_in(rng, block[i].lo, block[i].hi);
            offset[i] = uniform_in(rng, block[i].lo, block[i].hi) - point[i];
        }
        try {
            Env env_p = witness_env(block, frozen, frozen_vals, point, params);
            const double f_p = e.eval(env_p);
            double linear_part = 0.0;
            for (std::size_t i = 0; i < block.size(); ++i)
                linear_part += grads[i].eval(env_p) * offset[i];
            Env env_q = env_p;
            for (std::size_t i = 0; i < block.size(); ++i)
                env_q[block[i].var] = point[i] + offset[i];
            const double f_q = e.eval(env_q);

            const double m = f_q - f_p - linear_part;
            ++verdict.samples_tested;
            if (m < verdict.margin_convex) {
                verdict.margin_convex = m;
                if (m < -kIneqTol)
                    verdict.convex_witness = ConvexityWitness{frozen_vals, point, offset, m};
            }
            if (m > verdict.margin_concave) {
                verdict.margin_concave = m;
                if (m > kIneqTol)
                    verdict.concave_witness = ConvexityWitness{frozen_vals, point, offset, m};
            }
        } catch (const EvalError&) {
            ++verdict.samples_skipped;
        }
    }
    if (verdict.samples_skipped * 2 > trials)
        throw DomainError("check_convexity: more than half the samples failed to evaluate");

    const bool conv_ok = verdict.margin_convex >= -kIneqTol;
    const bool conc_ok = verdict.margin_concave <= kIneqTol;
    if (conv_ok && conc_ok) {
        verdict.status = ConvexityStatus::likely_convex;
        verdict.linear = true;
    } else if (conv_ok) {
        verdict.status = ConvexityStatus::likely_convex;
    } else if (conc_ok) {
        verdict.status = ConvexityStatus::likely_concave;
    } else {
        verdict.status = ConvexityStatus::indefinite;
    }

    bool linear_exact = false;
    if (auto exact = quadratic_status(e, block, params, &linear_exact)) {
        verdict.exact_quadratic = true;
        verdict.status = *exact;
        verdict.linear = linear_exact;
        if (*exact == ConvexityStatus::likely_convex) verdict.convex_witness.reset();
        if (*exact == ConvexityStatus::likely_concave) verdict.concave_witness.reset();
    }
    return verdict;
}

double recheck_witness(const Expr& e, const std::vector<VarBox>& block,
                       const std::vector<VarBox>& frozen, const ConvexityWitness& w,
                       const Env& params) {
    Env env_p = witness_env(block, frozen, w.frozen, w.point, params);
    const double f_p = e.eval(env_p);
    double linear_part = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i)
        linear_part += e.differentiate(block[i].var).eval(env_p) * w.offset[i];
    Env env_q = env_p;
    for (std::size_t i = 0; i < block.size(); ++i)
        env_q[block[i].var] = w.point[i] + w.offset[i];
    return e.eval(env_q) - f_p - linear_part;
}

namespace {

VarBox observed_box(Slot var, const SampledPath& p, double inflation) {
    double lo = p.values().front(), hi = lo;
    for (double v : p.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double center = 0.5 * (lo + hi);
    // Inflate the observed range; the absolute floor keeps boxes of constant
    // fields (w identically zero, etc.) non-degenerate.
    const double half = 0.5 * (hi - lo) * (1.0 + inflation) + 0.05 * (1.0 + std::abs(center));
    return VarBox{var, center - half, center + half};
}

} // namespace

SufficiencyCertificate certify(const ProblemSpec& spec, const Trajectory& traj,
                               double box_inflation, long trials, std::uint64_t seed) {
    const EvaluatedFields f = evaluate_fields(traj, spec);
    const Env params = spec.param_env();

    SufficiencyCertificate cert;
    cert.trials = trials;
    cert.seed = seed;
    cert.box_inflation = box_inflation;

    cert.L_box = {
        observed_box(Slot::y, f.y, box_inflation),
        observed_box(Slot::v, f.v, box_inflation),
        observed_box(Slot::w, f.w, box_inflation),
        observed_box(Slot::z, f.z, box_inflation),
        observed_box(Slot::y_tau, f.y_del, box_inflation),
        observed_box(Slot::v_tau, f.v_del, box_inflation),
    };
    cert.l_box = {
        observed_box(Slot::y, f.y, box_inflation),
        observed_box(Slot::v, f.v, box_inflation),
        observed_box(Slot::w, f.w, box_inflation),
    };
    const std::vector<VarBox> frozen = {VarBox{Slot::x, spec.a, spec.b}};

    cert.L_verdict = demote(
        check_convexity(spec.L, cert.L_box, frozen, trials, seed, params),
        /*concave_acceptable=*/false);
    cert.l_verdict = demote(
        check_convexity(spec.l, cert.l_box, frozen, trials, seed + 1, params),
        /*concave_acceptable=*/true);

    // Sign of dL/dz along the trajectory at every node.
    const Expr Lz = spec.L.differentiate(Slot::z);
    const SampledPath dldz = eval_along_L(Lz, f, spec);
    cert.dLdz_min = dldz.values().front();
    cert.dLdz_max = cert.dLdz_min;
    for (double v : dldz.values()) {
        cert.dLdz_min = std::min(cert.dLdz_min, v);
        cert.dLdz_max = std::max(cert.dLdz_max, v);
    }
    cert.dLdz_sign = classify_sign(cert.dLdz_min, cert.dLdz_max);

    const bool L_ok = cert.L_verdict.status == ConvexityStatus::likely_convex;
    const bool l_convex = cert.l_verdict.status == ConvexityStatus::likely_convex;
    const bool l_concave =
        cert.l_verdict.status == ConvexityStatus::likely_concave || cert.l_verdict.linear;
    const bool branch1 = l_convex && cert.dLdz_min >= -1e-12;
    const bool branch2 = l_concave && cert.dLdz_max <= 1e-12;
    cert.conclusion = (L_ok && (branch1 || branch2)) ? Conclusion::sufficient_minimizer
                                                     : Conclusion::inconclusive;
    return cert;
}

namespace {

nlohmann::ordered_json box_json(const std::vector<VarBox>& boxes) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const VarBox& b : boxes)
        out[std::string(slot_name(b.var))] = {b.lo, b.hi};
    return out;
}

nlohmann::ordered_json witness_json(const std::optional<ConvexityWitness>& w) {
    if (!w.has_value()) return nullptr;
    nlohmann::ordered_json out;
    out["frozen"] = w->frozen;
    out["point"] = w->point;
    out["offset"] = w->offset;
    out["violation"] = w->violation;
    return out;
}

nlohmann::ordered_json verdict_json(const ConvexityVerdict& v) {
    nlohmann::ordered_json out;
    out["status"] = to_string(v.status);
    out["linear"] = v.linear;
    out["exact_quadratic"] = v.exact_quadratic;
    out["samples_tested"] = v.samples_tested;
    out["samples_skipped"] = v.samples_skipped;
    out["margin_convex"] = v.margin_convex;
    out["margin_concave"] = v.margin_concave;
    out["convexity_witness"] = witness_json(v.convex_witness);
    out["concavity_witness"] = witness_json(v.concave_witness);
    return out;
}

} // namespace

std::string certificate_json(const SufficiencyCertificate& cert) {
    nlohmann::ordered_json out;
    out["conclusion"] = cert.conclusion == Conclusion::sufficient_minimizer
                            ? "sufficient-minimizer"
                            : "inconclusive";
    out["L"] = verdict_json(cert.L_verdict);
    out["l"] = verdict_json(cert.l_verdict);
    switch (cert.dLdz_sign) {
        case SignVerdict::nonnegative: out["dLdz_sign"] = "nonnegative"; break;
        case SignVerdict::nonpositive: out["dLdz_sign"] = "nonpositive"; break;
        case SignVerdict::mixed: out["dLdz_sign"] = "mixed"; break;
    }
    out["dLdz_min"] = cert.dLdz_min;
    out["dLdz_max"] = cert.dLdz_max;
    out["trials"] = cert.trials;
    out["seed"] = cert.seed;
    out["box_inflation"] = cert.box_inflation;
    out["L_box"] = box_json(cert.L_box);
    out["l_box"] = box_json(cert.l_box);
    return out.dump(2);
}

} // namespace fvar
