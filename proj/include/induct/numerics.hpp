#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace induct {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Finite stand-in for log(0) inside optimization.
inline constexpr double kLogZeroSentinel = -1e18;

inline bool is_log_zero(double v) { return !(v > kLogZeroSentinel / 2); }

inline double logistic(double u) {
    if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

/// log(1 + exp(u)) without overflow.
inline double softplus(double u) { return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

/// log(logistic(u))
inline double log_logistic(double u) { return -softplus(-u); }

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// log(exp(a) + exp(b))
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Pairwise summation; the grouping depends only on the length.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Normalized softmax of `z` restricted to finite entries; returns false if
/// no entry is finite (weights left all zero).
inline bool softmax_into(std::span<const double> z, std::vector<double>& w) {
    w.assign(z.size(), 0.0);
    double m = kNegInf;
    for (double v : z)
        if (!is_log_zero(v)) m = std::max(m, v);
    if (m == kNegInf) return false;
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (is_log_zero(z[i])) continue;
        w[i] = std::exp(z[i] - m);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return true;
}

}  // namespace induct
