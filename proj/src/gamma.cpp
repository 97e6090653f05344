#include "fvar/gamma.hpp"
#include "fvar/errors.hpp"

#include <cmath>

namespace fvar {

namespace {

// Lanczos coefficients, g = 7, 9 terms.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

double lanczos_gamma_pos(double x) {
    // Valid for x >= 0.5.
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

} // namespace

double gamma_fn(double x) {
    if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
    if (is_nonpositive_integer(x))
        throw DomainError("gamma: pole at non-positive integer argument");
    if (x < 0.5) {
        // Reflection: gamma(x) gamma(1-x) = pi / sin(pi x).
        return kPi / (std::sin(kPi * x) * lanczos_gamma_pos(1.0 - x));
    }
    return lanczos_gamma_pos(x);
}

double digamma_fn(double x) {
    if (!std::isfinite(x)) throw DomainError("digamma: non-finite argument");
    if (is_nonpositive_integer(x))
        throw DomainError("digamma: pole at non-positive integer argument");
    if (x < 0.5) {
        // Reflection: psi(1-x) - psi(x) = pi cot(pi x).
        return digamma_fn(1.0 - x) - kPi / std::tan(kPi * x);
    }
    // Shift to the asymptotic region, then use the standard expansion.
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    double series = std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                          inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return acc + series;
}

} // namespace fvar
