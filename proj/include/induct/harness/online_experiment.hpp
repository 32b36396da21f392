#pragma once

#include "induct/fit/fit.hpp"
#include "induct/fit/shape_objective.hpp"
#include "induct/harness/config.hpp"
#include "induct/harness/number_experiment.hpp"
#include "induct/harness/pools.hpp"
#include "induct/harness/records.hpp"
#include "induct/posterior.hpp"

namespace induct::harness {

struct OnlineCurveResult {
    std::string concept_id;
    std::vector<double> predictions;   // per trial, batch order
    std::vector<std::string> map_nl;   // per batch; empty when the pool is degenerate
    std::vector<std::size_t> pool_size;  // per batch, before deduplication
};

inline PriorSpec prior_spec(const fit::PriorConfig& prior, const fit::ModelParams& p) {
    switch (prior.kind) {
        case fit::PriorKind::uniform: return PriorSpec::uniform();
        case fit::PriorKind::tuned: return PriorSpec::tuned(p.theta, prior.features);
        case fit::PriorKind::external: return PriorSpec::external(prior.external_scores);
    }
    return PriorSpec::uniform();
}

/// Batch by batch: the pool gains the hypotheses proposed at t, the posterior sees only
/// trials of batches before t, and every trial of batch t is predicted from it.
inline OnlineCurveResult predict_online(const LearningCurve& curve, const std::vector<Hypothesis>& pool,
                                        const PriorSpec& prior, const fit::ModelParams& p) {
    OnlineCurveResult out;
    out.concept_id = curve.concept_id;
    const ShapeLikParams lp{p.epsilon, p.alpha, p.beta};
    std::vector<Trial> history;
    for (std::size_t t = 0; t < curve.batches.size(); ++t) {
        std::vector<Hypothesis> active;
        for (const auto& h : pool)
            if (h.source_batch.value_or(0) <= static_cast<int>(t)) active.push_back(h);
        std::vector<double> ll;
        for (const auto& h : active) ll.push_back(h.is_parsed() ? decayed_sequence_loglik(h, history, lp) : kNegInf);
        const auto state = dedup_weights(active, prior, ll, p.temperature);
        out.pool_size.push_back(active.size());
        out.map_nl.push_back(state.degenerate ? std::string() : state.pool[map_index(state)].nl_text);
        for (const auto& trial : curve.batches[t])
            out.predictions.push_back(state.degenerate ? p.epsilon * p.alpha : predict_response(state, trial, lp));
        history.insert(history.end(), curve.batches[t].begin(), curve.batches[t].end());
    }
    return out;
}

struct OnlineRun {
    std::vector<OnlineCurveResult> curves;
    std::vector<PredictionRecord> records;
    std::vector<BatchSummary> batches;
    fit::ModelParams params;
    std::optional<RunMetrics> holdout;  // present when parameters were fit
    std::vector<double> loss_trace;
};

inline std::vector<LearningCurve> load_curves(const ExperimentConfig& c) {
    if (c.curves.empty()) throw ConfigError("online experiments need at least one learning curve");
    std::vector<LearningCurve> out;
    for (const auto& p : c.curves) out.push_back(io::read_learning_curve(p, c.max_batches));
    return out;
}

inline bool any_trainable(const fit::Trainable& t) {
    return t.theta || t.epsilon || t.alpha || t.beta || t.temperature || t.platt_a || t.platt_b;
}

inline OnlineRun run_online_experiment(const ExperimentConfig& c, const RunOptions& opt = {}) {
    const auto curves = load_curves(c);
    auto client = opt.client ? opt.client : make_client(c);
    std::vector<std::vector<Hypothesis>> pools;
    for (const auto& curve : curves) pools.push_back(shape_pool(c, curve, client));
    const auto prior = make_prior_config(c);

    OnlineRun run;
    const auto fcfg = fit_config(c);
    run.params = initial_params(c, prior.features->dim());
    std::optional<fit::CrossValidation> cv;
    std::unique_ptr<fit::ShapeObjective> obj;
    const bool has_human = std::all_of(curves.begin(), curves.end(),
                                       [](const LearningCurve& lc) { return !lc.human_positive_rate.empty(); });
    const bool fit_wanted = any_trainable(fcfg.trainable) && fcfg.epochs > 0;
    if (fit_wanted) {
        if (c.shape_target == fit::ShapeTarget::human_rate && !has_human)
            throw ConfigError("fitting to human responses needs human_positive_rate in every curve");
        obj = std::make_unique<fit::ShapeObjective>(curves, pools, prior, c.shape_target, thread_count(c));
        if (c.folds >= 2) cv = fit::cross_validate(fcfg, *obj, run.params, c.folds);
        const auto all = obj->all_ids();
        const auto final_fit = fit::fit_params(fcfg, *obj, run.params, all);
        run.params = final_fit.params;
        run.loss_trace = final_fit.loss_trace;
        if (cv) run.holdout = RunMetrics{cv->r2, cv->mae, obj->size(), cv->folds.size()};
    }

    const auto spec = prior_spec(prior, run.params);
    std::map<std::pair<std::string, int>, std::string> map_nl;
    std::size_t datum = 0;
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& curve = curves[ci];
        run.curves.push_back(predict_online(curve, pools[ci], spec, run.params));
        const auto& res = run.curves.back();
        std::size_t j = 0;
        for (std::size_t t = 0; t < curve.batches.size(); ++t) {
            map_nl[{curve.concept_id, static_cast<int>(t)}] = res.map_nl[t];
            for (const auto& trial : curve.batches[t]) {
                PredictionRecord r;
                r.id = curve.concept_id + ":" + std::to_string(j);
                r.group = curve.concept_id;
                r.item = static_cast<int>(j);
                r.batch = static_cast<int>(t);
                r.prediction = cv ? cv->prediction[datum] : res.predictions[j];
                if (!curve.human_positive_rate.empty()) r.human = curve.human_positive_rate[j];
                r.label = trial.label;
                r.split = cv ? "holdout" : "eval";
                r.fold = cv ? static_cast<int>(cv->fold_of[datum]) : -1;
                run.records.push_back(std::move(r));
                ++j;
                ++datum;
            }
        }
    }
    run.batches = summarize_batches(run.records, map_nl);

    if (opt.write_outputs) {
        const auto dir = c.output_dir;
        io::write_text(dir / "predictions.csv", predictions_csv(run.records));
        json m{{"experiment", "online"}, {"params", fit::params_to_json(run.params)}};
        if (run.holdout) m["holdout"] = metrics_to_json(*run.holdout);
        json curves_json = json::array();
        for (const auto& cr : run.curves) curves_json.push_back({{"concept_id", cr.concept_id}, {"map_nl", cr.map_nl}});
        m["curves"] = curves_json;
        io::write_text(dir / "metrics.json", m.dump(2) + "\n");
        io::write_text(dir / "params.json", fit::params_to_json(run.params).dump(2) + "\n");
        emit_plot_data(run.records, dir, map_nl);
    }
    return run;
}

}  // namespace induct::harness
