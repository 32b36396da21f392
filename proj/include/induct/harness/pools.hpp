#pragma once

// Hypothesis pools for experiments, from static files or a completion backend.

#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "induct/fit/metrics.hpp"
#include "induct/harness/config.hpp"
#include "induct/propose/propose.hpp"

namespace induct::harness {

inline fit::PriorConfig make_prior_config(const ExperimentConfig& c) {
    fit::PriorConfig p = fit::PriorConfig::of(c.prior);
    if (!c.features_file.empty()) p.features = std::make_shared<FileFeatures>(FileFeatures::load(c.features_file));
    if (c.prior == fit::PriorKind::external) p.external_scores = read_score_file(c.score_file);
    return p;
}

/// Replay-only client for source "replay"; a recording live client for source "live".
inline std::shared_ptr<propose::CompletionClient> make_client(const ExperimentConfig& c) {
    const auto& pc = c.proposals;
    if (pc.source == ProposalSource::static_pool) return nullptr;
    const auto replay_dir = pc.replay_dir.empty() ? c.output_dir / "replay" : pc.replay_dir;
    auto store = std::make_shared<propose::ReplayStore>(replay_dir);
    const auto http = propose::http_config_from_json(pc.client);
    if (pc.source == ProposalSource::replay) return std::make_shared<propose::ReplayClient>(store, http.model);
    return std::make_shared<propose::RecordingClient>(std::make_shared<propose::HttpClient>(http), store);
}

/// Reads a pool file, canonicalizes its texts and keeps the first `budget` entries.
/// A nonzero `shuffle_seed` draws them in seeded random order instead of file order.
inline std::vector<Hypothesis> static_pool(const std::filesystem::path& path, ConceptDomain domain, int budget,
                                           std::uint64_t shuffle_seed = 0) {
    if (!std::filesystem::exists(path)) throw EmptyPool("no pool file " + path.string());
    auto pool = io::read_pool_jsonl(path, domain);
    if (shuffle_seed) {
        std::mt19937_64 rng(shuffle_seed);
        fit::fisher_yates(pool, rng);
    }
    if (pool.size() > static_cast<std::size_t>(budget)) pool.resize(static_cast<std::size_t>(budget));
    for (auto& h : pool) h.nl_text = canonicalize_nl(h.nl_text);
    if (pool.empty()) throw EmptyPool("pool file " + path.string() + " is empty");
    return pool;
}

/// Per-example-set number pools, built once and cached.
class NumberPools {
public:
    NumberPools(const ExperimentConfig& c, std::shared_ptr<propose::CompletionClient> client, bool ablation,
                std::uint64_t shuffle_seed = 0)
        : cfg_(c), client_(std::move(client)), ablation_(ablation), shuffle_seed_(shuffle_seed) {}

    std::vector<Hypothesis> operator()(const std::string& set_id, const NumberExampleSet& X) {
        const std::string key = ablation_ ? std::string("*") : set_id + "|" + X.to_prompt_string();
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        return cache_[key] = build(set_id, X);
    }

    fit::NumberPoolProvider provider() {
        return [this](const std::string& id, const NumberExampleSet& X) { return (*this)(id, X); };
    }

private:
    std::vector<Hypothesis> build(const std::string& set_id, const NumberExampleSet& X) const {
        const auto& pc = cfg_.proposals;
        if (pc.source == ProposalSource::static_pool) {
            if (ablation_) {
                if (pc.ablation_pool.empty()) throw ConfigError("ablation needs proposals.ablation_pool");
                return static_pool(pc.ablation_pool, ConceptDomain::number, pc.budget, shuffle_seed_);
            }
            if (pc.pool_dir.empty()) throw ConfigError("static proposals need proposals.pool_dir");
            return static_pool(pc.pool_dir / (set_id + ".jsonl"), ConceptDomain::number, pc.budget, shuffle_seed_);
        }
        propose::ProposalRequest req;
        req.domain = ablation_ ? propose::ProposalDomain::ablation_unconditioned : propose::ProposalDomain::number;
        if (!ablation_) req.numbers = X.values();
        req.budget = pc.budget;
        req.temperature = pc.temperature;
        req.seed = cfg_.seed;
        return propose::propose(req, propose::ClientBackend{client_, pc.concurrency});
    }

    const ExperimentConfig& cfg_;
    std::shared_ptr<propose::CompletionClient> client_;
    bool ablation_;
    std::uint64_t shuffle_seed_;
    std::mutex mu_;
    std::map<std::string, std::vector<Hypothesis>> cache_;
};

/// Pool for one learning curve; each hypothesis carries the batch it was proposed at.
/// Static files keep the first `budget` entries of every batch.
inline std::vector<Hypothesis> shape_pool(const ExperimentConfig& c, const LearningCurve& curve,
                                          const std::shared_ptr<propose::CompletionClient>& client) {
    const auto& pc = c.proposals;
    std::vector<Hypothesis> pool;
    if (pc.source == ProposalSource::static_pool) {
        if (pc.pool_dir.empty()) throw ConfigError("static proposals need proposals.pool_dir");
        const auto path = pc.pool_dir / (curve.concept_id + ".jsonl");
        if (!std::filesystem::exists(path)) throw EmptyPool("no pool file " + path.string());
        std::map<int, int> taken;
        for (auto& h : io::read_pool_jsonl(path, ConceptDomain::shape)) {
            const int b = h.source_batch.value_or(0);
            if (b >= static_cast<int>(curve.batches.size())) continue;
            if (taken[b]++ >= pc.budget) continue;
            h.nl_text = canonicalize_nl(h.nl_text);
            pool.push_back(std::move(h));
        }
    } else {
        for (std::size_t t = 0; t < curve.batches.size(); ++t) {
            propose::ProposalRequest req;
            req.domain = t == 0                               ? propose::ProposalDomain::shape_first_batch
                         : pc.shape_prompt == "propositional" ? propose::ProposalDomain::shape_propositional
                                                              : propose::ProposalDomain::shape_first_order;
            req.batches.assign(curve.batches.begin(), curve.batches.begin() + static_cast<std::ptrdiff_t>(t));
            req.budget = pc.budget;
            req.temperature = pc.temperature;
            req.seed = c.seed;
            req.source_batch = static_cast<int>(t);
            for (auto& h : propose::propose(req, propose::ClientBackend{client, pc.concurrency}))
                pool.push_back(std::move(h));
        }
    }
    if (pool.empty()) throw EmptyPool("no hypotheses for curve " + curve.concept_id);
    return pool;
}

}  // namespace induct::harness
