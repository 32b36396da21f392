#pragma once

// Weighted hypothesis pools: deduplicated or importance-weighted posteriors,
// posterior predictives and Platt calibration.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "induct/concept_model.hpp"
#include "induct/errors.hpp"
#include "induct/likelihood.hpp"
#include "induct/numerics.hpp"
#include "induct/prior.hpp"

namespace induct {

struct PosteriorDiagnostics {
    std::size_t duplicates_merged = 0;
    std::size_t unparsed = 0;
    std::size_t zero_weight = 0;
};

struct PosteriorState {
    std::vector<Hypothesis> pool;
    std::vector<double> weights;
    std::vector<double> log_weights;  // unnormalized, after temperature
    PosteriorDiagnostics diagnostics;
    bool degenerate = false;
};

namespace posterior_detail {

inline PosteriorState normalize(std::vector<Hypothesis> pool, std::vector<double> logw, PosteriorDiagnostics diag) {
    PosteriorState s;
    s.degenerate = !softmax_into(logw, s.weights);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pool[i].is_parsed()) ++diag.unparsed;
        if (s.weights[i] == 0.0) ++diag.zero_weight;
    }
    s.pool = std::move(pool);
    s.log_weights = std::move(logw);
    s.diagnostics = diag;
    return s;
}

inline void check_lengths(std::size_t pool, std::size_t loglik) {
    if (pool != loglik)
        throw ConfigError("pool has " + std::to_string(pool) + " hypotheses but " + std::to_string(loglik) +
                          " log-likelihoods were given");
}

}  // namespace posterior_detail

/// Merges duplicates by canonical NL (first occurrence wins) and weights each
/// survivor by (p(C) p(X|C))^(1/T).
inline PosteriorState dedup_weights(const std::vector<Hypothesis>& pool, const PriorSpec& prior,
                                    std::span<const double> loglik, double temperature = 1.0) {
    posterior_detail::check_lengths(pool.size(), loglik.size());
    if (!(temperature > 0)) throw ConfigError("temperature must be positive");
    std::unordered_set<std::string> seen;
    std::vector<Hypothesis> kept;
    std::vector<double> logw;
    PosteriorDiagnostics diag;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!seen.insert(pool[i].canonical()).second) {
            ++diag.duplicates_merged;
            continue;
        }
        kept.push_back(pool[i]);
        const double l = pool[i].is_parsed() ? loglik[i] : kNegInf;
        logw.push_back(is_log_zero(l) ? kNegInf : (prior_logweight(prior, pool[i]) + l) / temperature);
    }
    return posterior_detail::normalize(std::move(kept), std::move(logw), diag);
}

/// Weights proportional to p(C) p(X|C) / q(C|X); no deduplication.
inline PosteriorState importance_weights(const std::vector<Hypothesis>& pool, const PriorSpec& prior,
                                         std::span<const double> loglik) {
    posterior_detail::check_lengths(pool.size(), loglik.size());
    std::vector<double> logw;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pool[i].proposal_logprob)
            throw MissingLogQ("hypothesis '" + pool[i].nl_text + "' has no proposal log-probability");
        const double l = pool[i].is_parsed() ? loglik[i] : kNegInf;
        logw.push_back(is_log_zero(l) ? kNegInf : prior_logweight(prior, pool[i]) + l - *pool[i].proposal_logprob);
    }
    return posterior_detail::normalize(pool, std::move(logw), {});
}

inline void require_nondegenerate(const PosteriorState& s) {
    if (s.degenerate) throw DegenerateError("every hypothesis in the pool has zero posterior weight");
}

inline double predict_membership(const PosteriorState& s, int x_test) {
    require_nondegenerate(s);
    double p = 0.0;
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
        if (s.weights[i] == 0.0) continue;
        if (cached_extension(require_number(s.pool[i]))->contains(x_test)) p += s.weights[i];
    }
    return std::clamp(p, 0.0, 1.0);
}

inline double predict_response(const PosteriorState& s, const Trial& t, const ShapeLikParams& p) {
    require_nondegenerate(s);
    double agree = 0.0;
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
        if (s.weights[i] == 0.0) continue;
        if (concept_holds(require_shape(s.pool[i]), t)) agree += s.weights[i];
    }
    return (1.0 - p.epsilon) * agree + p.epsilon * p.alpha;
}

inline constexpr double kProbClamp = 1e-6;

inline double clamp_prob(double p, double delta = kProbClamp) { return std::clamp(p, delta, 1.0 - delta); }

/// logistic(b + a * logit(p)) with p clamped to [1e-6, 1 - 1e-6].
inline double platt(double p, double a, double b) { return logistic(b + a * logit(clamp_prob(p))); }

/// Index of the highest-weight hypothesis; ties go to the earliest.
inline std::size_t map_index(const PosteriorState& s) {
    require_nondegenerate(s);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.weights.size(); ++i)
        if (s.weights[i] > s.weights[best]) best = i;
    return best;
}

/// {"hypotheses": [{"nl", "dsl", "weight"}...], "diagnostics": {...}} by descending weight.
inline nlohmann::json posterior_to_json(const PosteriorState& s) {
    std::vector<std::size_t> order(s.pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.weights[a] > s.weights[b]; });
    nlohmann::json hs = nlohmann::json::array();
    for (std::size_t i : order)
        hs.push_back({{"nl", s.pool[i].nl_text},
                      {"dsl", s.pool[i].program_text()},
                      {"parsed", s.pool[i].is_parsed()},
                      {"weight", s.weights[i]}});
    return {{"hypotheses", hs},
            {"diagnostics",
             {{"duplicates_merged", s.diagnostics.duplicates_merged},
              {"unparsed", s.diagnostics.unparsed},
              {"zero_weight", s.diagnostics.zero_weight},
              {"degenerate", s.degenerate}}}};
}

}  // namespace induct
