#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "induct/errors.hpp"
#include "induct/numerics.hpp"

namespace induct::fit {

inline constexpr double kClampDelta = 1e-6;

/// -[r log pred + (1 - r) log(1 - pred)] with pred clamped to [delta, 1 - delta].
inline double weighted_bce_loss(double pred, double r, double delta = kClampDelta) {
    const double p = std::clamp(pred, delta, 1.0 - delta);
    return -(r * std::log(p) + (1.0 - r) * std::log1p(-p));
}

/// d loss / d pred; zero where the clamp is active.
inline double weighted_bce_grad(double pred, double r, double delta = kClampDelta) {
    if (pred < delta || pred > 1.0 - delta) return 0.0;
    return -r / pred + (1.0 - r) / (1.0 - pred);
}

inline double r_squared(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size() || target.size() < 2)
        throw DegenerateTargets("r_squared needs two or more paired values");
    double mean = 0.0;
    for (double t : target) mean += t;
    mean /= static_cast<double>(target.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        ss_res += (target[i] - pred[i]) * (target[i] - pred[i]);
        ss_tot += (target[i] - mean) * (target[i] - mean);
    }
    if (ss_tot == 0.0) throw DegenerateTargets("targets are all equal");
    return 1.0 - ss_res / ss_tot;
}

inline double mean_absolute_error(std::span<const double> pred, std::span<const double> target) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
    return pred.empty() ? 0.0 : s / static_cast<double>(pred.size());
}

/// Unbiased integer in [0, n) from the raw engine; identical on every platform.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    return r % n;
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded_rand(rng, i)]);
}

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> holdout;
};

/// Shuffles ids with `seed` and cuts them into k contiguous folds whose sizes
/// differ by at most one. Train and holdout lists keep ascending order.
inline std::vector<Fold> kfold_split(const std::vector<std::size_t>& ids, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > ids.size())
        throw InvalidK("k = " + std::to_string(k) + " is invalid for " + std::to_string(ids.size()) + " ids");
    std::vector<std::size_t> order = ids;
    std::mt19937_64 rng(seed);
    fisher_yates(order, rng);
    std::vector<std::size_t> fold_of(order.size());
    const std::size_t base = order.size() / k, extra = order.size() % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) fold_of[pos + i] = f;
        pos += len;
    }
    std::vector<std::pair<std::size_t, std::size_t>> tagged;
    for (std::size_t i = 0; i < order.size(); ++i) tagged.emplace_back(order[i], fold_of[i]);
    std::sort(tagged.begin(), tagged.end());
    std::vector<Fold> folds(k);
    for (const auto& [id, f] : tagged)
        for (std::size_t g = 0; g < k; ++g) (g == f ? folds[g].holdout : folds[g].train).push_back(id);
    return folds;
}

}  // namespace induct::fit
