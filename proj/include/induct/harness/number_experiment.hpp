#pragma once

#include <algorithm>
#include <set>

#include "induct/fit/fit.hpp"
#include "induct/fit/number_objective.hpp"
#include "induct/fit/platt_objective.hpp"
#include "induct/harness/config.hpp"
#include "induct/harness/pools.hpp"
#include "induct/harness/records.hpp"
#include "induct/posterior.hpp"

namespace induct::harness {

struct RunMetrics {
    double r2 = 0.0;
    double mae = 0.0;
    std::size_t n = 0;
    std::size_t folds = 0;
};

inline json metrics_to_json(const RunMetrics& m) {
    return {{"r2", m.r2}, {"mae", m.mae}, {"n", m.n}, {"folds", m.folds}};
}

struct NumberRun {
    RunMetrics metrics;
    std::vector<PredictionRecord> records;
    fit::ModelParams params;  // fit on every datum
    std::vector<double> loss_trace;
    json top_k = json::array();
    json pools = json::array();  // per example set: size, unique, unparsed
};

struct RunOptions {
    bool write_outputs = true;
    std::uint64_t shuffle_seed = 0;                       // static pools drawn in seeded order when nonzero
    std::shared_ptr<propose::CompletionClient> client;    // overrides the configured backend
};

inline fit::ModelParams initial_params(const ExperimentConfig& c, std::size_t dim) {
    fit::ModelParams p = c.params.value_or(fit::ModelParams::initial(dim));
    if (p.theta.size() != dim) p.theta.assign(dim, 0.0);
    return p;
}

inline std::vector<HumanNumberJudgment> load_judgments(const ExperimentConfig& c) {
    if (c.judgments.empty()) throw ConfigError("number experiments need a judgments file");
    auto js = io::read_judgments_csv(c.judgments);
    if (js.empty()) throw FormatError("judgments file has no rows");
    return js;
}

namespace number_detail {

inline std::vector<PredictionRecord> records_from(const fit::NumberObjective& obj, const std::vector<double>& pred,
                                                  const std::vector<std::size_t>* fold_of, const std::string& split) {
    std::vector<PredictionRecord> out;
    for (std::size_t d = 0; d < obj.size(); ++d) {
        PredictionRecord r;
        r.id = obj.datum_id(d);
        r.group = obj.tasks()[obj.datum(d).task].set_id;
        r.item = obj.datum(d).x_test;
        r.prediction = pred[d];
        r.human = obj.target(d);
        r.split = split;
        r.fold = fold_of ? static_cast<int>((*fold_of)[d]) : -1;
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_run(const ExperimentConfig& c, const NumberRun& run, const std::string& tag) {
    const auto dir = c.output_dir;
    io::write_text(dir / "predictions.csv", predictions_csv(run.records));
    io::write_text(dir / "metrics.json",
                   json{{"experiment", tag}, {"metrics", metrics_to_json(run.metrics)}, {"pools", run.pools}}.dump(2) +
                       "\n");
    io::write_text(dir / "params.json", fit::params_to_json(run.params).dump(2) + "\n");
    io::write_text(dir / "top_k.json", run.top_k.dump(2) + "\n");
    std::string trace = "epoch,loss\n";
    for (std::size_t e = 0; e < run.loss_trace.size(); ++e) trace += std::to_string(e) + "," + fmt(run.loss_trace[e]) + "\n";
    io::write_text(dir / "loss.csv", trace);
    emit_plot_data(run.records, dir);
}

}  // namespace number_detail

/// Builds every pool up front so that a missing pool fails before any output is written.
inline fit::NumberObjective build_number_objective(const ExperimentConfig& c,
                                                   const std::vector<HumanNumberJudgment>& judgments,
                                                   NumberPools& pools) {
    for (const auto& j : judgments) pools(j.set_id, j.example_set);
    return fit::NumberObjective(judgments, pools.provider(), make_prior_config(c), thread_count(c), c.weighting);
}

inline json pool_summary(const fit::NumberObjective& obj) {
    json out = json::array();
    for (const auto& t : obj.tasks())
        out.push_back({{"set_id", t.set_id},
                       {"examples", t.examples.to_prompt_string()},
                       {"candidates", t.pool.size()},
                       {"duplicates", t.duplicates},
                       {"unparsed", t.unparsed}});
    return out;
}

inline json top_k_summary(const fit::NumberObjective& obj, const fit::ModelParams& p, std::size_t k) {
    json out = json::array();
    for (std::size_t t = 0; t < obj.tasks().size(); ++t) {
        const auto& task = obj.tasks()[t];
        const auto w = obj.weights(p, t);
        std::vector<std::size_t> order(w.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        json top = json::array();
        for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
            top.push_back({{"nl", task.pool[order[i]].nl}, {"weight", w[order[i]]}});
        out.push_back({{"set_id", task.set_id}, {"examples", task.examples.to_prompt_string()}, {"top", top}});
    }
    return out;
}

/// k-fold cross-validated fit of the full model; holdout predictions per datum.
inline NumberRun run_number_experiment(const ExperimentConfig& c, const RunOptions& opt = {}) {
    const auto judgments = load_judgments(c);
    NumberPools pools(c, opt.client ? opt.client : make_client(c), c.ablation, opt.shuffle_seed);
    const auto obj = build_number_objective(c, judgments, pools);
    const auto fcfg = fit_config(c);
    const auto init = initial_params(c, obj.feature_dim());
    const auto cv = fit::cross_validate(fcfg, obj, init, c.folds);
    const auto all = obj.all_ids();
    const auto final_fit = fit::fit_params(fcfg, obj, init, all);

    NumberRun run;
    run.metrics = {cv.r2, cv.mae, obj.size(), cv.folds.size()};
    run.records = number_detail::records_from(obj, cv.prediction, &cv.fold_of, "holdout");
    run.params = final_fit.params;
    run.loss_trace = final_fit.loss_trace;
    run.top_k = top_k_summary(obj, run.params, c.top_k);
    run.pools = pool_summary(obj);
    if (opt.write_outputs) number_detail::write_run(c, run, c.ablation ? "ablation" : "model");
    return run;
}

/// Predictions with fixed parameters, no fitting.
inline NumberRun evaluate_number(const ExperimentConfig& c, const fit::ModelParams& params, const RunOptions& opt = {}) {
    const auto judgments = load_judgments(c);
    NumberPools pools(c, opt.client ? opt.client : make_client(c), c.ablation, opt.shuffle_seed);
    const auto obj = build_number_objective(c, judgments, pools);
    auto p = params;
    if (p.theta.size() != obj.feature_dim()) p.theta.assign(obj.feature_dim(), 0.0);
    const auto all = obj.all_ids();
    const auto pred = obj.predict(p, all);
    NumberRun run;
    std::vector<double> target;
    for (std::size_t d = 0; d < obj.size(); ++d) target.push_back(obj.target(d));
    run.metrics = {fit::r_squared(pred, target), fit::mean_absolute_error(pred, target), obj.size(), 0};
    run.records = number_detail::records_from(obj, pred, nullptr, "eval");
    run.params = p;
    run.top_k = top_k_summary(obj, p, c.top_k);
    run.pools = pool_summary(obj);
    if (opt.write_outputs) number_detail::write_run(c, run, "eval");
    return run;
}

inline NumberRun run_ablation(ExperimentConfig c, const RunOptions& opt = {}) {
    c.ablation = true;
    return run_number_experiment(c, opt);
}

namespace number_detail {

/// Cross-validated Platt fit over fixed raw probabilities, folds shared with the main model.
inline NumberRun platt_run(const ExperimentConfig& c, const std::vector<HumanNumberJudgment>& judgments,
                           std::vector<double> raw, const std::string& tag, bool write) {
    std::vector<double> target;
    std::vector<std::string> ids;
    for (const auto& j : judgments) {
        target.push_back(j.mean_rating);
        ids.push_back(j.set_id + ":" + std::to_string(j.test_number));
    }
    const fit::PlattObjective obj(raw, target, ids);
    auto fcfg = fit_config(c);
    fcfg.trainable = fit::Trainable::platt_only();
    const auto init = fit::ModelParams::initial(0);
    const auto cv = fit::cross_validate(fcfg, obj, init, c.folds);
    const auto all = obj.all_ids();
    const auto final_fit = fit::fit_params(fcfg, obj, init, all);
    NumberRun run;
    run.metrics = {cv.r2, cv.mae, obj.size(), cv.folds.size()};
    for (std::size_t d = 0; d < judgments.size(); ++d) {
        PredictionRecord r;
        r.id = ids[d];
        r.group = judgments[d].set_id;
        r.item = judgments[d].test_number;
        r.prediction = cv.prediction[d];
        r.human = target[d];
        r.fold = static_cast<int>(cv.fold_of[d]);
        run.records.push_back(std::move(r));
    }
    run.params = final_fit.params;
    run.loss_trace = final_fit.loss_trace;
    if (write) write_run(c, run, tag);
    return run;
}

}  // namespace number_detail

/// Index of the parsed hypothesis with the highest likelihood; ties go to the earliest. nullopt if none parsed.
inline std::optional<std::size_t> max_likelihood_index(const std::vector<Hypothesis>& pool, const NumberExampleSet& X,
                                                       double epsilon) {
    std::optional<std::size_t> best;
    double best_ll = kNegInf;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pool[i].is_parsed()) continue;
        const double ll = number_loglikelihood(pool[i], X, {epsilon});
        if (!best || ll > best_ll) {
            best = i;
            best_ll = ll;
        }
    }
    return best;
}

/// Single maximum-likelihood concept per example set, its indicator passed through a fitted Platt transform.
/// Epsilon stays at its starting value.
inline NumberRun latent_language_baseline(const ExperimentConfig& c, const RunOptions& opt = {}) {
    const auto judgments = load_judgments(c);
    NumberPools pools(c, opt.client ? opt.client : make_client(c), false, opt.shuffle_seed);
    const double eps = initial_params(c, 0).epsilon;
    std::vector<double> raw;
    json chosen = json::array();
    std::set<std::string> reported;
    for (const auto& j : judgments) {
        const auto pool = pools(j.set_id, j.example_set);
        const auto best = max_likelihood_index(pool, j.example_set, eps);
        const bool in = best && cached_extension(require_number(pool[*best]))->contains(j.test_number);
        raw.push_back(in ? 1.0 : 0.0);
        if (reported.insert(j.set_id).second)
            chosen.push_back({{"set_id", j.set_id}, {"nl", best ? json(pool[*best].nl_text) : json()}});
    }
    auto run = number_detail::platt_run(c, judgments, raw, "latent", false);
    run.top_k = chosen;
    if (opt.write_outputs) number_detail::write_run(c, run, "latent");
    return run;
}

/// Fraction of samples starting with 'y' among those starting with 'y' or 'n' (case-insensitive).
inline double yes_ratio(const std::vector<std::string>& samples) {
    int yes = 0, kept = 0;
    for (const auto& s : samples) {
        const auto t = propose::trim(s);
        if (t.empty()) continue;
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(t[0])));
        if (c != 'y' && c != 'n') continue;
        ++kept;
        yes += c == 'y';
    }
    if (!kept) throw AllSamplesDiscarded("no sample began with y or n");
    return static_cast<double>(yes) / kept;
}

inline std::vector<propose::CompletionRequest> yes_no_requests(const HumanNumberJudgment& j, const std::string& model,
                                                               int samples, std::uint64_t seed) {
    std::vector<propose::CompletionRequest> out;
    for (int i = 0; i < samples; ++i) {
        propose::CompletionRequest r;
        r.model = model;
        r.prompt = propose::number_yes_no_prompt(j.example_set.values(), j.test_number);
        r.temperature = 1.0;
        r.max_tokens = 3;
        r.sample = i;
        r.seed = seed;
        out.push_back(std::move(r));
    }
    return out;
}

/// Yes/no sampling from a chat model, y-ratio through a fitted Platt transform.
inline NumberRun direct_llm_baseline(const ExperimentConfig& c, const RunOptions& opt = {}) {
    const auto judgments = load_judgments(c);
    auto client = opt.client ? opt.client : make_client(c);
    if (!client) throw BackendUnavailable("the LLM baseline needs a replay or live backend");
    std::vector<double> raw;
    for (const auto& j : judgments) {
        std::vector<std::string> texts;
        const auto res = propose::complete_all(*client, yes_no_requests(j, client->model(), c.llm_samples, c.seed),
                                               c.proposals.concurrency);
        for (const auto& cs : res)
            for (const auto& x : cs) texts.push_back(x.text);
        raw.push_back(yes_ratio(texts));
    }
    return number_detail::platt_run(c, judgments, raw, "llm", opt.write_outputs);
}

/// Holdout R^2 over budgets and seeds. Static pools are drawn in seeded order per seed.
inline std::vector<BudgetPoint> sweep_budgets(const ExperimentConfig& c, const RunOptions& opt = {}) {
    std::vector<BudgetPoint> out;
    for (int S : c.budgets) {
        BudgetPoint pt;
        pt.budget = S;
        for (int i = 0; i < c.sweep_seeds; ++i) {
            ExperimentConfig run_cfg = c;
            run_cfg.proposals.budget = S;
            run_cfg.seed = c.seed + static_cast<std::uint64_t>(i);
            RunOptions o = opt;
            o.write_outputs = false;
            if (c.proposals.source == ProposalSource::static_pool) o.shuffle_seed = run_cfg.seed + 1;
            pt.r2.push_back(run_number_experiment(run_cfg, o).metrics.r2);
        }
        out.push_back(std::move(pt));
    }
    if (opt.write_outputs) io::write_text(c.output_dir / "budget_r2.csv", budget_csv(out));
    return out;
}

}  // namespace induct::harness
