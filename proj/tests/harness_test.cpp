#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>
#include <thread>

#include "induct/induct.hpp"
#include "support/scripted_client.hpp"

using namespace induct;
using namespace induct::harness;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("induct_harness_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

ExperimentConfig number_config(const fs::path& out, std::vector<std::string> extra = {}) {
    extra.push_back("output_dir=\"" + out.string() + "\"");
    return load_config("data/configs/number.json", extra);
}

std::map<std::string, std::string> dir_bytes(const fs::path& d) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(d))
        if (e.is_regular_file()) out[fs::relative(e.path(), d).string()] = io::read_text(e.path());
    return out;
}

}  // namespace

TEST(Config, OverridesAndRelativePaths) {
    const auto c = load_config("data/configs/number.json", {"fit.epochs=7", "prior.kind=uniform", "top_k=2"});
    EXPECT_EQ(c.epochs, 7);
    EXPECT_EQ(c.prior, fit::PriorKind::uniform);
    EXPECT_EQ(c.top_k, 2u);
    EXPECT_TRUE(fs::exists(c.judgments));
    EXPECT_TRUE(fs::is_directory(c.proposals.pool_dir));
}

TEST(Config, MissingInputsAreConfigErrors) {
    EXPECT_THROW(load_config("data/configs/absent.json"), ConfigError);
    EXPECT_THROW(load_config("data/configs/number.json", {"judgments=\"nowhere.csv\""}), ConfigError);
    EXPECT_THROW(load_config("data/configs/number.json", {"prior.kind=\"bogus\""}), ConfigError);
}

TEST(Config, ImportanceWeightingFreezesTemperature) {
    auto c = load_config("data/configs/number.json", {"weighting=\"importance\""});
    EXPECT_FALSE(fit_config(c).trainable.temperature);
    c = load_config("data/configs/number.json");
    EXPECT_TRUE(fit_config(c).trainable.temperature);
}

TEST(NumberHarness, SingleExampleFavoursSmallConsistentConcepts) {
    // X = {16}: 64 shares the small concepts (powers of 2, squares, powers of 4); 23 shares almost nothing.
    const auto c = number_config(fresh_dir("x16"));
    NumberPools pools(c, nullptr, false);
    const NumberExampleSet X({16});
    const auto pool = pools("s01", X);
    std::vector<double> ll;
    for (const auto& h : pool) ll.push_back(finite_loglik(number_loglikelihood(h, X, {0.05})));
    const auto s = dedup_weights(pool, PriorSpec::uniform(), ll);
    EXPECT_GT(predict_membership(s, 64), predict_membership(s, 23) + 0.2);
    EXPECT_GT(predict_membership(s, 16), 0.9);
}

TEST(NumberHarness, EmptyPoolWritesNothing) {
    const auto out = fresh_dir("empty");
    const auto pools = fresh_dir("empty_pools");
    io::write_text(pools / "s01.jsonl", "");
    auto c = number_config(out);
    c.proposals.pool_dir = pools;
    EXPECT_THROW(run_number_experiment(c), EmptyPool);
    EXPECT_TRUE(fs::is_empty(out));
}

TEST(NumberHarness, CrossValidatedRunWritesOutputs) {
    const auto out = fresh_dir("cv");
    const auto c = number_config(out, {"fit.epochs=50", "fit.folds=3"});
    const auto run = run_number_experiment(c);
    EXPECT_EQ(run.metrics.folds, 3u);
    EXPECT_EQ(run.records.size(), run.metrics.n);
    for (const auto* f : {"predictions.csv", "metrics.json", "params.json", "top_k.json", "loss.csv", "number_bars.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    const auto csv = io::split_lines(io::read_text(out / "predictions.csv"));
    EXPECT_EQ(csv.front(), "id,group,item,batch,prediction,human,label,split,fold");
    for (const auto& r : run.records) {
        EXPECT_EQ(r.split, "holdout");
        EXPECT_GE(r.fold, 0);
        EXPECT_LT(r.fold, 3);
    }
}

TEST(NumberHarness, RepeatedRunsAreByteIdentical) {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    run_number_experiment(number_config(a, {"fit.epochs=40", "fit.folds=3"}));
    run_number_experiment(number_config(b, {"fit.epochs=40", "fit.folds=3", "fit.threads=1"}));
    EXPECT_EQ(dir_bytes(a), dir_bytes(b));
}

TEST(NumberHarness, ImportanceObjectiveMatchesPosteriorApi) {
    const auto c = number_config(fresh_dir("imp"));
    const auto judgments = load_judgments(c);
    NumberPools pools(c, nullptr, false);
    const fit::NumberObjective obj(judgments, pools.provider(), fit::PriorConfig::of(fit::PriorKind::uniform), 2,
                                   fit::Weighting::importance);
    auto p = fit::ModelParams::initial(obj.feature_dim());
    p.epsilon = 0.1;
    p.platt_a = 1.4;
    p.platt_b = -0.3;
    const auto ids = obj.all_ids();
    const auto pred = obj.predict(p, ids);
    for (std::size_t d = 0; d < judgments.size(); ++d) {
        const auto& j = judgments[d];
        const auto pool = pools(j.set_id, j.example_set);
        std::vector<double> ll;
        for (const auto& h : pool) ll.push_back(finite_loglik(number_loglikelihood(h, j.example_set, {p.epsilon})));
        const auto s = importance_weights(pool, PriorSpec::uniform(), ll);
        EXPECT_NEAR(pred[d], platt(predict_membership(s, j.test_number), p.platt_a, p.platt_b), 1e-12);
    }
}

TEST(Baselines, LatentLanguagePicksOneConcept) {
    const auto out = fresh_dir("latent");
    const auto c = number_config(out, {"fit.epochs=200", "fit.folds=3"});
    const auto run = latent_language_baseline(c);
    bool found = false;
    for (const auto& e : run.top_k)
        if (e["set_id"] == "s02") {
            found = true;
            // The listed examples are the smallest consistent extension in the pool.
            EXPECT_NE(e["nl"].get<std::string>().find("2, 8, 16, 64"), std::string::npos) << e.dump();
        }
    EXPECT_TRUE(found);
    // The raw signal is an indicator, so each fold predicts at most two distinct values.
    std::map<int, std::set<double>> values;
    for (const auto& r : run.records) values[r.fold].insert(r.prediction);
    for (const auto& [fold, v] : values) EXPECT_LE(v.size(), 2u) << "fold " << fold;
    EXPECT_TRUE(fs::exists(out / "predictions.csv"));
}

TEST(Baselines, YesRatio) {
    EXPECT_DOUBLE_EQ(yes_ratio({"Yes", "no", "maybe", " y."}), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(yes_ratio({"NO", "nope"}), 0.0);
    EXPECT_THROW(yes_ratio({"maybe", "", "unsure"}), AllSamplesDiscarded);
}

TEST(Baselines, DirectLlmUsesYesNoPrompts) {
    auto c = number_config(fresh_dir("llm"), {"fit.epochs=50", "fit.folds=3", "llm_samples=4"});
    std::atomic<int> calls{0};
    auto client = std::make_shared<propose::FunctionClient>("scripted", [&](const propose::CompletionRequest& r) {
        ++calls;
        EXPECT_NE(r.prompt.find("yes/no"), std::string::npos);
        return std::vector<propose::Completion>{{r.sample % 2 ? "No" : "Yes", std::nullopt}};
    });
    RunOptions opt;
    opt.client = client;
    const auto run = direct_llm_baseline(c, opt);
    EXPECT_EQ(calls.load(), static_cast<int>(4 * run.records.size()));
}

TEST(Ablation, PoolIgnoresExamples) {
    const auto c = load_config("data/configs/number_ablation.json");
    NumberPools pools(c, nullptr, true);
    const auto a = pools("s01", NumberExampleSet({16}));
    const auto b = pools("s08", NumberExampleSet({81, 98, 86, 93}));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].nl_text, b[i].nl_text);
}

TEST(Ablation, ScriptedClientIssuesUnconditionedPrompts) {
    auto c = load_config("data/configs/number_ablation.json", {"proposals.source=\"replay\"", "proposals.budget=6"});
    std::vector<std::string> prompts;
    std::mutex mu;
    auto client = std::make_shared<propose::FunctionClient>("scripted", [&](const propose::CompletionRequest& r) {
        if (r.max_tokens == 32) {
            std::lock_guard lock(mu);
            prompts.push_back(r.prompt);
        }
        return fixtures::scripted_answer(r);
    });
    NumberPools pools(c, client, true);
    pools("s01", NumberExampleSet({16}));
    pools("s08", NumberExampleSet({81, 98, 86, 93}));
    ASSERT_FALSE(prompts.empty());
    for (const auto& p : prompts) EXPECT_EQ(p, prompts.front());
    EXPECT_EQ(prompts.front().find("16"), std::string::npos);
}

TEST(Sweep, WritesBudgetTable) {
    const auto out = fresh_dir("sweep");
    auto c = load_config("data/configs/sweep.json",
                         {"output_dir=\"" + out.string() + "\"", "budgets=[2,100]", "sweep_seeds=2", "fit.epochs=20",
                          "fit.folds=3"});
    const auto pts = sweep_budgets(c);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].r2.size(), 2u);
    EXPECT_TRUE(fs::exists(out / "budget_r2.csv"));
}

// ---- online -----------------------------------------------------------------

namespace {

ExperimentConfig shape_config(const fs::path& out, std::vector<std::string> extra = {}) {
    extra.push_back("output_dir=\"" + out.string() + "\"");
    return load_config("data/configs/shape_online.json", extra);
}

LearningCurve green_triangles() { return io::read_learning_curve("data/fixtures/shape/green_triangles.json"); }

}  // namespace

TEST(Online, OraclePoolPredictsLabelsExactly) {
    // With only the true rule in the pool, no noise and no decay, predictions equal the labels.
    const auto curve = green_triangles();
    const std::vector<Hypothesis> pool = {Hypothesis::make("green triangle", ConceptDomain::shape,
                                                           "this.shape == triangle and this.color == green",
                                                           std::nullopt, 0)};
    fit::ModelParams p = fit::ModelParams::initial(0);
    p.epsilon = 0.0;
    p.beta = 0.0;
    const auto res = predict_online(curve, pool, PriorSpec::uniform(), p);
    std::size_t j = 0;
    for (const auto& b : curve.batches)
        for (const auto& t : b) EXPECT_EQ(res.predictions[j++], t.label ? 1.0 : 0.0);
}

TEST(Online, FuturePoolEntriesAreInvisible) {
    const auto curve = green_triangles();
    const std::vector<Hypothesis> pool = {
        Hypothesis::make("green", ConceptDomain::shape, "this.color == green", std::nullopt, 0),
        Hypothesis::make("green triangle", ConceptDomain::shape, "this.shape == triangle and this.color == green",
                         std::nullopt, 5)};
    const auto p = fit::ModelParams::initial(0);
    const auto res = predict_online(curve, pool, PriorSpec::uniform(), p);
    for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(res.map_nl[t], "green");
    EXPECT_EQ(res.pool_size[4], 1u);
    EXPECT_EQ(res.pool_size[5], 2u);
}

TEST(Online, PermutingFutureLabelsLeavesPastUnchanged) {
    const auto c = shape_config(fresh_dir("causal"));
    const auto curve = green_triangles();
    const auto pool = shape_pool(c, curve, nullptr);
    const auto p = *c.params;
    const auto base = predict_online(curve, pool, PriorSpec::uniform(), p);
    std::mt19937_64 rng(11);
    for (std::size_t cut = 1; cut < curve.batches.size(); cut += 3) {
        auto mutated = curve;
        std::vector<bool> labels;
        for (std::size_t t = cut; t < mutated.batches.size(); ++t)
            for (const auto& tr : mutated.batches[t]) labels.push_back(!tr.label);
        std::shuffle(labels.begin(), labels.end(), rng);
        std::size_t k = 0;
        for (std::size_t t = cut; t < mutated.batches.size(); ++t)
            for (auto& tr : mutated.batches[t]) tr.label = labels[k++];
        const auto res = predict_online(mutated, pool, PriorSpec::uniform(), p);
        std::size_t j = 0;
        for (std::size_t t = 0; t <= cut && t < curve.batches.size(); ++t)
            for (std::size_t i = 0; i < curve.batches[t].size(); ++i, ++j)
                EXPECT_EQ(std::bit_cast<std::uint64_t>(res.predictions[j]),
                          std::bit_cast<std::uint64_t>(base.predictions[j]));
    }
}

TEST(Online, LearningCurveCsvHasOneRowPerBatch) {
    const auto out = fresh_dir("curve");
    const auto run = run_online_experiment(shape_config(out));
    const auto lines = io::split_lines(io::read_text(out / "learning_curves.csv"));
    std::size_t rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (lines[i].rfind("green_triangles,", 0) == 0) ++rows;
    EXPECT_EQ(rows, 15u);
    EXPECT_FALSE(run.holdout.has_value());
}

TEST(Online, FittedRunReportsHoldout) {
    const auto out = fresh_dir("curve_fit");
    const auto c = shape_config(out, {"fit.trainable={\"epsilon\":true,\"platt_a\":true,\"platt_b\":true}",
                                      "fit.epochs=20", "fit.folds=2"});
    const auto run = run_online_experiment(c);
    ASSERT_TRUE(run.holdout.has_value());
    EXPECT_EQ(run.holdout->folds, 2u);
    for (const auto& r : run.records) EXPECT_EQ(r.split, "holdout");
}

TEST(Online, ScriptedProposalsCarryBatchIndex) {
    auto c = shape_config(fresh_dir("shape_scripted"), {"proposals.source=\"replay\"", "proposals.budget=4"});
    const auto curve = green_triangles();
    const auto pool = shape_pool(c, curve, fixtures::scripted_client());
    std::set<int> batches;
    for (const auto& h : pool) {
        ASSERT_TRUE(h.source_batch.has_value());
        batches.insert(*h.source_batch);
        EXPECT_TRUE(h.is_parsed()) << h.nl_text;
    }
    EXPECT_EQ(batches.size(), curve.batches.size());
}

// ---- replay -----------------------------------------------------------------

TEST(Replay, ReplayBackedRunsAreByteIdentical) {
    const auto store_dir = fresh_dir("replay_store");
    const auto a = fresh_dir("replay_a"), b = fresh_dir("replay_b");
    const std::vector<std::string> common = {"proposals.source=\"replay\"",
                                             "proposals.replay_dir=\"" + store_dir.string() + "\"",
                                             "proposals.budget=8", "proposals.client={\"model\":\"scripted\"}",
                                             "fit.epochs=30", "fit.folds=3"};
    auto rec_cfg = number_config(fresh_dir("replay_rec"), common);
    RunOptions rec;
    rec.client = std::make_shared<propose::RecordingClient>(fixtures::scripted_client(),
                                                            std::make_shared<propose::ReplayStore>(store_dir));
    run_number_experiment(rec_cfg, rec);
    EXPECT_FALSE(propose::ReplayStore(store_dir).fingerprints().empty());

    run_number_experiment(number_config(a, common));
    run_number_experiment(number_config(b, common));
    EXPECT_EQ(dir_bytes(a), dir_bytes(b));
}

TEST(Replay, MissingEntryFailsLoudly) {
    const auto c = number_config(fresh_dir("replay_miss"), {"proposals.source=\"replay\"",
                                                            "proposals.replay_dir=\"" + fresh_dir("empty_store").string() + "\""});
    EXPECT_THROW(run_number_experiment(c), ReplayMiss);
}

// ---- live client against a local server -------------------------------------

TEST(HttpClient, ChatSamplingAndEchoScoring) {
    httplib::Server server;
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        const auto body = nlohmann::json::parse(req.body);
        EXPECT_EQ(body["n"], 1);
        nlohmann::json out{{"choices",
                            {{{"message", {{"content", "a power of 2"}}},
                              {"logprobs", {{"content", {{{"logprob", -0.5}}, {{"logprob", -0.25}}}}}}}}}};
        res.set_content(out.dump(), "application/json");
    });
    int attempts = 0;
    server.Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (++attempts == 1) {
            res.status = 503;
            return;
        }
        const auto body = nlohmann::json::parse(req.body);
        const std::string prompt = body["prompt"];
        nlohmann::json lp{{"token_logprobs", {nullptr, -1.0, -2.0}}, {"text_offset", {0, 7, 9}}};
        res.set_content(nlohmann::json{{"choices", {{{"logprobs", lp}}}}}.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("INDUCT_TEST_KEY", "secret", 1);
    propose::HttpClientConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
    cfg.model = "local";
    cfg.api_key_env = "INDUCT_TEST_KEY";
    cfg.retry.initial_backoff = std::chrono::milliseconds(1);
    propose::HttpClient client(cfg);

    propose::CompletionRequest r;
    r.model = "local";
    r.prompt = "numbers";
    r.logprobs = true;
    const auto got = client.complete(r);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].text, "a power of 2");
    EXPECT_DOUBLE_EQ(*got[0].logprob, -0.75);
    EXPECT_EQ(seen_auth, "Bearer secret");

    propose::CompletionRequest s;
    s.kind = "score";
    s.prompt = "prefix ";
    s.continuation = "even";
    const auto scored = client.complete(s);
    EXPECT_EQ(attempts, 2);
    EXPECT_DOUBLE_EQ(*scored[0].logprob, -3.0);

    server.stop();
    th.join();
}

TEST(HttpClient, MissingKeyIsBackendUnavailable) {
    ::unsetenv("INDUCT_ABSENT_KEY");
    propose::HttpClientConfig cfg;
    cfg.api_key_env = "INDUCT_ABSENT_KEY";
    EXPECT_THROW(propose::HttpClient{cfg}, BackendUnavailable);
}
