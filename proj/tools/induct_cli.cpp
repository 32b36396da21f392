// induct: command-line driver for proposal, inference, fitting and baselines.

#include <iostream>

#include "CLI11.hpp"
#include "induct/induct.hpp"

using namespace induct;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--set", c.sets, "override a config key, e.g. --set fit.epochs=200")->take_all();
}

harness::ExperimentConfig load(const Common& c) { return harness::load_config(c.config, c.sets); }

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json number_summary(const harness::NumberRun& run) {
    return {{"metrics", harness::metrics_to_json(run.metrics)},
            {"params", fit::params_to_json(run.params)},
            {"top_k", run.top_k},
            {"pools", run.pools}};
}

json online_summary(const harness::OnlineRun& run) {
    json j{{"params", fit::params_to_json(run.params)}};
    if (run.holdout) j["holdout"] = harness::metrics_to_json(*run.holdout);
    json curves = json::array();
    for (const auto& c : run.curves) curves.push_back({{"concept_id", c.concept_id}, {"map_nl", c.map_nl}});
    j["curves"] = curves;
    return j;
}

std::vector<int> parse_numbers(const std::string& s) {
    std::vector<int> out;
    std::string item;
    for (char ch : s + ",") {
        if (ch == ',' || ch == ';' || ch == ' ') {
            if (!item.empty()) out.push_back(io::parse_int_field(item, "number"));
            item.clear();
        } else {
            item += ch;
        }
    }
    return out;
}

/// Distinct example sets in judgment order.
std::vector<HumanNumberJudgment> distinct_sets(const std::vector<HumanNumberJudgment>& js) {
    std::vector<HumanNumberJudgment> out;
    std::set<std::string> seen;
    for (const auto& j : js)
        if (seen.insert(j.set_id + "|" + j.example_set.to_prompt_string()).second) out.push_back(j);
    return out;
}

int cmd_propose(const Common& common, const std::string& out_dir, const std::string& score_out) {
    const auto c = load(common);
    const auto client = harness::make_client(c);
    const std::filesystem::path dir = out_dir.empty() ? c.output_dir / "pools" : std::filesystem::path(out_dir);
    std::vector<std::string> all_nl;
    json written = json::array();
    if (c.domain == ConceptDomain::number) {
        harness::NumberPools pools(c, client, c.ablation);
        for (const auto& j : distinct_sets(harness::load_judgments(c))) {
            const auto pool = pools(j.set_id, j.example_set);
            const auto path = dir / ((c.ablation ? std::string("ablation") : j.set_id) + ".jsonl");
            io::write_pool_jsonl(path, pool);
            for (const auto& h : pool) all_nl.push_back(h.nl_text);
            written.push_back({{"file", path.string()}, {"size", pool.size()}});
            if (c.ablation) break;
        }
    } else {
        for (const auto& curve : harness::load_curves(c)) {
            const auto pool = harness::shape_pool(c, curve, client);
            const auto path = dir / (curve.concept_id + ".jsonl");
            io::write_pool_jsonl(path, pool);
            for (const auto& h : pool) all_nl.push_back(h.nl_text);
            written.push_back({{"file", path.string()}, {"size", pool.size()}});
        }
    }
    json result{{"pools", written}};
    if (!score_out.empty()) {
        if (!client) throw BackendUnavailable("prior scoring needs a replay or live backend");
        const auto scores = propose::score_nl_prior(all_nl, c.domain, *client);
        io::write_text(score_out, score_file_text(scores));
        result["score_file"] = score_out;
        result["scored"] = scores.size();
    }
    print(result);
    return 0;
}

int cmd_translate(const Common& common, const std::string& text) {
    const auto c = load(common);
    const auto client = harness::make_client(c);
    if (!client) throw BackendUnavailable("translation needs a replay or live backend");
    const auto r = propose::translate_nl_to_dsl(text, c.domain, *client);
    if (const auto* u = std::get_if<Unparsed>(&r)) {
        print({{"nl", text}, {"parsed", false}, {"dsl", u->source}, {"reason", u->reason}});
    } else {
        print({{"nl", text}, {"parsed", true}, {"dsl", format_concept(std::get<ConceptProgram>(r))}});
    }
    return 0;
}

int cmd_infer(const Common& common, const std::string& examples, const std::string& pool_path,
              const std::string& params_path) {
    const auto c = load(common);
    if (c.domain != ConceptDomain::number) throw ConfigError("infer works on the number domain; use eval for curves");
    const NumberExampleSet X(parse_numbers(examples));
    const auto prior = harness::make_prior_config(c);
    fit::ModelParams p = harness::initial_params(c, prior.features->dim());
    if (!params_path.empty()) {
        p = fit::params_from_json(json::parse(io::read_text(params_path)));
        if (p.theta.size() != prior.features->dim()) p.theta.assign(prior.features->dim(), 0.0);
    }
    std::vector<Hypothesis> pool;
    if (!pool_path.empty()) {
        pool = harness::static_pool(pool_path, ConceptDomain::number, c.proposals.budget);
    } else {
        harness::NumberPools pools(c, harness::make_client(c), c.ablation);
        pool = pools("query", X);
    }
    std::vector<double> ll;
    for (const auto& h : pool)
        ll.push_back(h.is_parsed() ? finite_loglik(number_loglikelihood(h, X, {p.epsilon})) : kNegInf);
    const auto spec = harness::prior_spec(prior, p);
    const auto state = c.weighting == fit::Weighting::importance ? importance_weights(pool, spec, ll)
                                                                 : dedup_weights(pool, spec, ll, p.temperature);
    require_nondegenerate(state);
    json preds = json::object();
    for (int x = 1; x <= 100; ++x) preds[std::to_string(x)] = platt(predict_membership(state, x), p.platt_a, p.platt_b);
    json out = posterior_to_json(state);
    out["examples"] = X.to_prompt_string();
    out["predictions"] = preds;
    print(out);
    return 0;
}

int cmd_fit(const Common& common) {
    const auto c = load(common);
    if (c.domain == ConceptDomain::number) print(number_summary(harness::run_number_experiment(c)));
    else print(online_summary(harness::run_online_experiment(c)));
    return 0;
}

int cmd_eval(const Common& common, const std::string& params_path) {
    auto c = load(common);
    if (!params_path.empty()) c.params = fit::params_from_json(json::parse(io::read_text(params_path)));
    if (c.domain == ConceptDomain::number) {
        const auto p = harness::initial_params(c, harness::make_prior_config(c).features->dim());
        print(number_summary(harness::evaluate_number(c, p)));
    } else {
        c.trainable = fit::Trainable{};
        print(online_summary(harness::run_online_experiment(c)));
    }
    return 0;
}

int cmd_replay(const std::string& dir, const std::string& action, const std::string& fp) {
    propose::ReplayStore store(dir);
    if (action == "list") {
        print(store.fingerprints());
        return 0;
    }
    const auto path = std::filesystem::path(dir) / (fp + ".json");
    if (!std::filesystem::exists(path)) throw ReplayMiss("no replay entry " + fp);
    print(json::parse(io::read_text(path)));
    return 0;
}

int cmd_baseline(const Common& common, const std::string& kind) {
    const auto c = load(common);
    if (kind == "latent") print(number_summary(harness::latent_language_baseline(c)));
    else if (kind == "llm") print(number_summary(harness::direct_llm_baseline(c)));
    else print(number_summary(harness::run_ablation(c)));
    return 0;
}

int cmd_sweep(const Common& common) {
    const auto c = load(common);
    json out = json::array();
    for (const auto& pt : harness::sweep_budgets(c)) out.push_back({{"budget", pt.budget}, {"mean", pt.mean()}, {"sem", pt.sem()}, {"r2", pt.r2}});
    print(out);
    return 0;
}

int report(const std::string& code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian concept induction over proposed natural-language hypotheses"};
    app.require_subcommand(1);

    Common common;
    std::string out_dir, score_out, text, examples, pool_path, params_path, replay_dir, replay_action, fingerprint,
        baseline_kind;

    auto* propose_cmd = app.add_subcommand("propose", "draw hypothesis pools and write them as JSON Lines");
    add_common(propose_cmd, common);
    propose_cmd->add_option("-o,--out", out_dir, "directory for pool files (default <output_dir>/pools)");
    propose_cmd->add_option("--score-prior", score_out, "also score every proposal under the text model into this file");

    auto* translate_cmd = app.add_subcommand("translate", "translate one natural-language concept into the DSL");
    add_common(translate_cmd, common);
    translate_cmd->add_option("text", text, "concept text")->required();

    auto* infer_cmd = app.add_subcommand("infer", "posterior and predictions for one number example set");
    add_common(infer_cmd, common);
    infer_cmd->add_option("-x,--examples", examples, "example numbers, e.g. 16,8,2")->required();
    infer_cmd->add_option("--pool", pool_path, "pool file (default: the configured proposal source)");
    infer_cmd->add_option("--params", params_path, "parameter JSON (default: config params or initial values)");

    auto* fit_cmd = app.add_subcommand("fit", "cross-validated fit, then a final fit on all data");
    add_common(fit_cmd, common);

    auto* eval_cmd = app.add_subcommand("eval", "predictions with fixed parameters");
    add_common(eval_cmd, common);
    eval_cmd->add_option("--params", params_path, "parameter JSON");

    auto* replay_cmd = app.add_subcommand("replay", "inspect a replay store");
    replay_cmd->add_option("action", replay_action, "list | show")->required()->check(CLI::IsMember({"list", "show"}));
    replay_cmd->add_option("fingerprint", fingerprint, "entry to show");
    replay_cmd->add_option("-d,--dir", replay_dir, "replay directory")->required()->check(CLI::ExistingDirectory);

    auto* baseline_cmd = app.add_subcommand("baseline", "comparison models on the number domain");
    add_common(baseline_cmd, common);
    baseline_cmd->add_option("kind", baseline_kind, "latent | llm | ablation")
        ->required()
        ->check(CLI::IsMember({"latent", "llm", "ablation"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "holdout R^2 across proposal budgets");
    add_common(sweep_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report("UsageError", e.what());
    }

    try {
        if (*propose_cmd) return cmd_propose(common, out_dir, score_out);
        if (*translate_cmd) return cmd_translate(common, text);
        if (*infer_cmd) return cmd_infer(common, examples, pool_path, params_path);
        if (*fit_cmd) return cmd_fit(common);
        if (*eval_cmd) return cmd_eval(common, params_path);
        if (*replay_cmd) {
            if (replay_action == "show" && fingerprint.empty()) return report("UsageError", "show needs a fingerprint");
            return cmd_replay(replay_dir, replay_action, fingerprint);
        }
        if (*baseline_cmd) return cmd_baseline(common, baseline_kind);
        if (*sweep_cmd) return cmd_sweep(common);
    } catch (const Error& e) {
        return report(e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
        return report("FormatError", e.what());
    } catch (const std::exception& e) {
        return report("InternalError", e.what());
    }
    return 0;
}
