#include "vbcomp/normal.hpp"

#include <cmath>
#include <limits>

namespace vbcomp::num {

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr double tail_cut = -8.0;

// S(t) = 1 - 1/t^2 + 3/t^4 - 15/t^6 + ..., truncated where the terms stop
// shrinking (the series is asymptotic). For t >= 8 the floor is ~1e-12.
double hazard_series(double t) {
    const double it2 = 1.0 / (t * t);
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 64; ++k) {
        term *= -(2.0 * k - 1.0) * it2;
        if (std::abs(term) >= prev) break;
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-17 * std::abs(sum)) break;
    }
    return t / sum;
}
}  // namespace

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x - 0.5 * ln2pi);
}

double log_norm_pdf(double x) {
    return -0.5 * x * x - 0.5 * ln2pi;
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

double inv_mills(double x) {
    if (x < tail_cut) return hazard_series(-x);
    return norm_pdf(x) / norm_cdf(x);
}

double log_norm_cdf(double x) {
    if (x >= 0.0) return std::log1p(-0.5 * std::erfc(x * inv_sqrt2));
    if (x >= tail_cut) return std::log(0.5 * std::erfc(-x * inv_sqrt2));
    return log_norm_pdf(x) - std::log(hazard_series(-x));
}

double digamma(double x) {
    // recur up to x >= 10, then the standard asymptotic series
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double ix = 1.0 / x;
    const double ix2 = ix * ix;
    result += std::log(x) - 0.5 * ix
        - ix2 * (1.0 / 12.0 - ix2 * (1.0 / 120.0 - ix2 * (1.0 / 252.0 - ix2 * (1.0 / 240.0 - ix2 / 132.0))));
    return result;
}

}  // namespace vbcomp::num
