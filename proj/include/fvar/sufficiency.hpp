#pragma once

#include "fvar/functional.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fvar {

enum class ConvexityStatus { likely_convex, likely_concave, indefinite, counterexample };

std::string to_string(ConvexityStatus s);

/// A concrete pair (point, point + offset) violating the gradient inequality,
/// re-checkable independently of the sampling run.
struct ConvexityWitness {
    std::vector<double> frozen; // values of the frozen coordinates (x)
    std::vector<double> point;  // block-variable coordinates
    std::vector<double> offset; // displacement c
    double violation = 0.0;     // f(p+c) - f(p) - <grad f(p), c>
};

struct VarBox {
    Slot var;
    double lo = 0.0;
    double hi = 0.0;
};

/// Sample-based convexity verdict for the inequality
///   f(p + c) - f(p) >= <grad f(p), c>   (convex; <= for concave),
/// tested jointly over the block variables with frozen coordinates shared by
/// both evaluation points. `likely_*` is never a proof; a purely quadratic
/// expression additionally gets an exact constant-Hessian verdict.
struct ConvexityVerdict {
    ConvexityStatus status = ConvexityStatus::indefinite;
    bool linear = false;          // both inequalities tight everywhere
    bool exact_quadratic = false; // constant Hessian decided the status
    std::optional<ConvexityWitness> convex_witness;  // violates convexity
    std::optional<ConvexityWitness> concave_witness; // violates concavity
    long samples_tested = 0;
    long samples_skipped = 0;
    double margin_convex = 0.0;  // min over trials of f(q)-f(p)-<grad,c>
    double margin_concave = 0.0; // max over trials
};

ConvexityVerdict check_convexity(const Expr& e, const std::vector<VarBox>& block,
                                 const std::vector<VarBox>& frozen, long trials,
                                 std::uint64_t seed, const Env& params);

/// Re-evaluate a witness against the inequality; returns the violation value
/// (negative = convexity violated).
double recheck_witness(const Expr& e, const std::vector<VarBox>& block,
                       const std::vector<VarBox>& frozen, const ConvexityWitness& w,
                       const Env& params);

enum class SignVerdict { nonnegative, nonpositive, mixed };
enum class Conclusion { sufficient_minimizer, inconclusive };

/// The convexity-sufficiency certificate: L jointly convex in
/// (y, v, w, z, y_tau, v_tau), plus either (l convex and dL/dz >= 0) or
/// (l concave and dL/dz <= 0) along the trajectory. `sufficient_minimizer`
/// means exactly "the hypotheses passed sampling", nothing stronger.
struct SufficiencyCertificate {
    ConvexityVerdict L_verdict; // requirement-relative: must be convex
    ConvexityVerdict l_verdict;
    SignVerdict dLdz_sign = SignVerdict::mixed;
    double dLdz_min = 0.0;
    double dLdz_max = 0.0;
    Conclusion conclusion = Conclusion::inconclusive;
    long trials = 0;
    std::uint64_t seed = 0;
    double box_inflation = 0.0;
    std::vector<VarBox> L_box, l_box;
};

SufficiencyCertificate certify(const ProblemSpec& spec, const Trajectory& traj,
                               double box_inflation, long trials, std::uint64_t seed);

/// Deterministic JSON rendering of the certificate.
std::string certificate_json(const SufficiencyCertificate& cert);

} // namespace fvar
