#pragma once

// Experiment configuration: one JSON file plus dotted-path overrides
// ("fit.epochs=50"). Relative paths resolve against the config file's directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "induct/errors.hpp"
#include "induct/fit/fit.hpp"
#include "induct/fit/number_objective.hpp"
#include "induct/io.hpp"
#include "induct/propose/http_client.hpp"
#include "induct/propose/templates.hpp"

namespace induct::harness {

using json = nlohmann::json;

enum class ProposalSource { static_pool, replay, live };

struct ProposalConfig {
    ProposalSource source = ProposalSource::static_pool;
    std::filesystem::path pool_dir;       // static: <set_id>.jsonl or <concept_id>.jsonl
    std::filesystem::path ablation_pool;  // static: one pool shared by every example set
    std::filesystem::path replay_dir;
    int budget = 100;
    double temperature = 1.0;
    int concurrency = 1;
    std::string shape_prompt = "first_order";  // or "propositional"
    json client = json::object();
};

struct ExperimentConfig {
    ConceptDomain domain = ConceptDomain::number;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::filesystem::path judgments;
    std::vector<std::filesystem::path> curves;
    std::size_t max_batches = 15;
    ProposalConfig proposals;
    fit::PriorKind prior = fit::PriorKind::uniform;
    std::filesystem::path score_file;
    std::filesystem::path features_file;
    fit::Weighting weighting = fit::Weighting::dedup;
    int epochs = -1;  // -1: domain default
    double learning_rate = 0.001;
    std::size_t folds = 10;
    unsigned threads = 0;
    std::optional<fit::Trainable> trainable;
    std::optional<fit::ModelParams> params;  // starting point; fixed when nothing is trainable
    std::vector<int> budgets{1, 3, 10, 30, 100};
    int sweep_seeds = 3;
    std::size_t top_k = 5;
    int llm_samples = 10;
    fit::ShapeTarget shape_target = fit::ShapeTarget::human_rate;
    bool ablation = false;

    json raw;  // merged JSON this was built from
};

/// Sets `path` ("a.b.c") in `j`. The value is parsed as JSON when possible, else kept as a string.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* cur = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("empty key in override " + assignment);
        if (!cur->is_object()) *cur = json::object();
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

namespace config_detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    const std::filesystem::path p = j[key].get<std::string>();
    return p.is_absolute() || base.empty() ? p : base / p;
}

inline void require_exists(const std::filesystem::path& p, const std::string& what) {
    if (!p.empty() && !std::filesystem::exists(p)) throw ConfigError(what + " not found: " + p.string());
}

inline fit::PriorKind prior_kind(const std::string& s) {
    if (s == "uniform") return fit::PriorKind::uniform;
    if (s == "tuned") return fit::PriorKind::tuned;
    if (s == "external") return fit::PriorKind::external;
    throw ConfigError("unknown prior kind '" + s + "'");
}

inline fit::Trainable trainable_from_json(const json& j) {
    fit::Trainable t;
    t.theta = j.value("theta", false);
    t.epsilon = j.value("epsilon", false);
    t.alpha = j.value("alpha", false);
    t.beta = j.value("beta", false);
    t.temperature = j.value("temperature", false);
    t.platt_a = j.value("platt_a", false);
    t.platt_b = j.value("platt_b", false);
    return t;
}

}  // namespace config_detail

inline ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base = {}) {
    using namespace config_detail;
    ExperimentConfig c;
    c.raw = j;
    try {
        const std::string domain = j.value("domain", std::string("number"));
        if (domain != "number" && domain != "shape") throw ConfigError("domain must be number or shape");
        c.domain = domain == "number" ? ConceptDomain::number : ConceptDomain::shape;
        c.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("output_dir")) c.output_dir = resolve(base, j, "output_dir");
        c.judgments = resolve(base, j, "judgments");
        for (const auto& p : j.value("curves", std::vector<std::string>{}))
            c.curves.push_back(std::filesystem::path(p).is_absolute() || base.empty() ? std::filesystem::path(p) : base / p);
        c.max_batches = j.value("max_batches", c.max_batches);

        const json pj = j.value("proposals", json::object());
        const std::string src = pj.value("source", std::string("static"));
        if (src == "static") c.proposals.source = ProposalSource::static_pool;
        else if (src == "replay") c.proposals.source = ProposalSource::replay;
        else if (src == "live") c.proposals.source = ProposalSource::live;
        else throw ConfigError("unknown proposal source '" + src + "'");
        c.proposals.pool_dir = resolve(base, pj, "pool_dir");
        c.proposals.ablation_pool = resolve(base, pj, "ablation_pool");
        c.proposals.replay_dir = resolve(base, pj, "replay_dir");
        c.proposals.budget = pj.value("budget", c.proposals.budget);
        c.proposals.temperature = pj.value("temperature", c.proposals.temperature);
        c.proposals.concurrency = pj.value("concurrency", c.proposals.concurrency);
        c.proposals.shape_prompt = pj.value("shape_prompt", c.proposals.shape_prompt);
        c.proposals.client = pj.value("client", json::object());
        if (c.proposals.budget < 1) throw ConfigError("proposals.budget must be at least 1");
        if (c.proposals.shape_prompt != "first_order" && c.proposals.shape_prompt != "propositional")
            throw ConfigError("proposals.shape_prompt must be first_order or propositional");

        const json prior = j.value("prior", json::object());
        c.prior = prior_kind(prior.value("kind", std::string("uniform")));
        c.score_file = resolve(base, prior, "score_file");
        c.features_file = resolve(base, prior, "features_file");
        if (c.prior == fit::PriorKind::external && c.score_file.empty())
            throw ConfigError("prior.kind external needs prior.score_file");

        const std::string weighting = j.value("weighting", std::string("dedup"));
        if (weighting == "dedup") c.weighting = fit::Weighting::dedup;
        else if (weighting == "importance") c.weighting = fit::Weighting::importance;
        else throw ConfigError("weighting must be dedup or importance");

        const json f = j.value("fit", json::object());
        c.epochs = f.value("epochs", c.epochs);
        c.learning_rate = f.value("learning_rate", c.learning_rate);
        c.folds = f.value("folds", c.folds);
        c.threads = f.value("threads", c.threads);
        if (f.contains("trainable") && !f["trainable"].is_null()) c.trainable = trainable_from_json(f["trainable"]);
        if (j.contains("params") && !j["params"].is_null()) c.params = fit::params_from_json(j["params"]);
        const std::string target = f.value("target", std::string("human"));
        if (target == "human") c.shape_target = fit::ShapeTarget::human_rate;
        else if (target == "ground_truth") c.shape_target = fit::ShapeTarget::ground_truth;
        else throw ConfigError("fit.target must be human or ground_truth");

        c.budgets = j.value("budgets", c.budgets);
        c.sweep_seeds = j.value("sweep_seeds", c.sweep_seeds);
        c.top_k = j.value("top_k", c.top_k);
        c.llm_samples = j.value("llm_samples", c.llm_samples);
        c.ablation = j.value("ablation", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    require_exists(c.judgments, "judgments file");
    for (const auto& p : c.curves) require_exists(p, "learning curve");
    require_exists(c.proposals.pool_dir, "pool directory");
    require_exists(c.proposals.ablation_pool, "ablation pool");
    require_exists(c.score_file, "score file");
    require_exists(c.features_file, "features file");
    if (c.proposals.source == ProposalSource::replay) require_exists(c.proposals.replay_dir, "replay directory");
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    for (const auto& o : overrides) apply_override(j, o);
    return config_from_json(j, path.parent_path());
}

inline fit::FitConfig fit_config(const ExperimentConfig& c) {
    const bool tuned = c.prior == fit::PriorKind::tuned;
    fit::FitConfig f = c.domain == ConceptDomain::number ? fit::FitConfig::number(tuned) : fit::FitConfig::shape(tuned);
    if (c.epochs >= 0) f.epochs = c.epochs;
    f.adam.learning_rate = c.learning_rate;
    f.seed = c.seed;
    if (c.trainable) f.trainable = *c.trainable;
    if (c.weighting == fit::Weighting::importance) f.trainable.temperature = false;
    return f;
}

inline unsigned thread_count(const ExperimentConfig& c) { return c.threads ? c.threads : fit::default_threads(); }

}  // namespace induct::harness
