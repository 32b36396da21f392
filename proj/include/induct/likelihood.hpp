#pragma once

// Number Game likelihood and the noisy trial likelihood with power-law
// memory decay for logical concepts.

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "induct/concept_model.hpp"
#include "induct/errors.hpp"
#include "induct/numerics.hpp"

namespace induct {

inline constexpr double kNumberDomainSize = 100.0;

struct NumberLikParams {
    double epsilon = 0.5;
};

struct ShapeLikParams {
    double epsilon = 0.5;
    double alpha = 0.5;
    double beta = 1.0;
};

/// Get-or-compute map safe for concurrent use. The first stored value for a
/// key wins, so every caller observes the same result.
template <typename Key, typename Value, typename Hash = std::hash<Key>>
class MemoCache {
public:
    template <typename F>
    std::shared_ptr<const Value> get_or_compute(const Key& key, F&& compute) {
        {
            std::shared_lock lock(mu_);
            const auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        auto value = std::make_shared<const Value>(compute());
        std::unique_lock lock(mu_);
        return map_.try_emplace(key, std::move(value)).first->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return map_.size();
    }

    void clear() {
        std::unique_lock lock(mu_);
        map_.clear();
    }

private:
    mutable std::shared_mutex mu_;
    std::unordered_map<Key, std::shared_ptr<const Value>, Hash> map_;
};

/// Extensions keyed by canonical program text.
inline MemoCache<std::string, dsl::NumberExtension>& extension_cache() {
    static MemoCache<std::string, dsl::NumberExtension> cache;
    return cache;
}

inline std::shared_ptr<const dsl::NumberExtension> cached_extension(const dsl::NumberExpr& e) {
    return extension_cache().get_or_compute(dsl::format_number(e), [&] { return dsl::number_extension(e); });
}

inline const dsl::NumberExpr& require_number(const Hypothesis& h) {
    const auto* p = h.parsed();
    if (!p) throw DomainMismatch("'" + h.nl_text + "' has no parsed program");
    if (!p->number()) throw DomainMismatch("'" + h.nl_text + "' is a shape concept, expected a number concept");
    return *p->number();
}

inline const dsl::ShapeExpr& require_shape(const Hypothesis& h) {
    const auto* p = h.parsed();
    if (!p) throw DomainMismatch("'" + h.nl_text + "' has no parsed program");
    if (!p->shape()) throw DomainMismatch("'" + h.nl_text + "' is a number concept, expected a shape concept");
    return *p->shape();
}

/// Log-probability of one example under extension `ext`; -inf only when
/// epsilon is exactly 0 and x is outside the extension.
inline double number_example_logprob(const dsl::NumberExtension& ext, int x, double epsilon) {
    const double noise = epsilon / kNumberDomainSize;
    const double in = ext.contains(x) ? (1.0 - epsilon) / ext.size() : 0.0;
    const double p = in + noise;
    return p > 0 ? std::log(p) : kNegInf;
}

/// Unparsed hypotheses carry zero likelihood.
inline double number_loglikelihood(const Hypothesis& h, const NumberExampleSet& X, const NumberLikParams& p) {
    if (!h.is_parsed()) return kNegInf;
    const auto ext = cached_extension(require_number(h));
    double total = 0.0;
    for (int x : X.values()) total += number_example_logprob(*ext, x, p.epsilon);
    return total;
}

inline bool concept_holds(const dsl::ShapeExpr& e, const Trial& t) { return dsl::eval_shape(e, t.test, t.batch); }

/// p(Y = y | B, T, C) = (1 - eps) 1[(B,T) in C] + eps alpha for y = 1.
inline double response_prob(bool holds, bool label, double epsilon, double alpha) {
    const double p1 = (holds ? 1.0 - epsilon : 0.0) + epsilon * alpha;
    return label ? p1 : 1.0 - p1;
}

inline double trial_response_prob(const Hypothesis& h, const Trial& t, const ShapeLikParams& p) {
    if (!h.is_parsed()) return 0.0;
    return response_prob(concept_holds(require_shape(h), t), t.label, p.epsilon, p.alpha);
}

/// (1 + K - k)^(-beta) for 1-based trial index k.
inline double decay_weight(std::size_t K, std::size_t k, double beta) {
    return std::pow(static_cast<double>(1 + K - k), -beta);
}

inline double decayed_sequence_loglik(const Hypothesis& h, std::span<const Trial> trials, const ShapeLikParams& p) {
    if (trials.empty()) return 0.0;
    if (!h.is_parsed()) return kNegInf;
    const auto& e = require_shape(h);
    const std::size_t K = trials.size();
    double total = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        const double q = response_prob(concept_holds(e, trials[k - 1]), trials[k - 1].label, p.epsilon, p.alpha);
        total += decay_weight(K, k, p.beta) * (q > 0 ? std::log(q) : kNegInf);
    }
    return total;
}

/// Replaces -inf by the finite sentinel.
inline double finite_loglik(double v) { return std::isinf(v) && v < 0 ? kLogZeroSentinel : v; }

}  // namespace induct
