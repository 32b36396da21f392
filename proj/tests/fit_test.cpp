#include <gtest/gtest.h>

#include <set>

#include "induct/fit/fit.hpp"
#include "induct/fit/number_objective.hpp"
#include "induct/fit/platt_objective.hpp"
#include "induct/fit/shape_objective.hpp"
#include "induct/posterior.hpp"
#include "support/random_fixtures.hpp"

using namespace induct;
using namespace induct::fit;

TEST(Loss, BceExamples) {
    EXPECT_NEAR(weighted_bce_loss(1 - 1e-6, 1.0), 0.0, 1e-5);
    EXPECT_NEAR(weighted_bce_loss(0.5, 0.5), std::log(2.0), 1e-12);
    EXPECT_NEAR(weighted_bce_loss(0.5, 0.0), std::log(2.0), 1e-12);
    EXPECT_TRUE(std::isfinite(weighted_bce_loss(0.0, 1.0)));
    EXPECT_GE(weighted_bce_loss(0.3, 0.3), 0.0);
}

TEST(Reparam, Examples) {
    EXPECT_EQ(reparam(0, Constraint::unit_interval), 0.5);
    EXPECT_EQ(reparam(0, Constraint::positive), 1.0);
    EXPECT_LT(reparam(-20, Constraint::unit_interval), 1e-8);
    for (double u : {-1e6, -50.0, 0.0, 50.0, 1e6}) {
        const double e = reparam(u, Constraint::unit_interval);
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
        EXPECT_GE(reparam(u, Constraint::positive), 0.0);
    }
}

TEST(Adam, Steps) {
    std::vector<double> x{1.0, -2.0};
    Adam a({}, 2);
    a.step(x, {0.0, 0.0});
    EXPECT_EQ(x, (std::vector<double>{1.0, -2.0}));
    Adam b({}, 2);
    std::vector<double> y{0.0, 0.0};
    b.step(y, {3.0, -0.5});
    EXPECT_NEAR(y[0], -0.001, 1e-9);
    EXPECT_NEAR(y[1], 0.001, 1e-9);
    const double after_one = y[0];
    b.step(y, {3.0, -0.5});
    EXPECT_LT(y[0], after_one);
    EXPECT_GT(y[1], 0.001);
}

TEST(KFold, Partition) {
    std::vector<std::size_t> ids(10);
    std::iota(ids.begin(), ids.end(), 0);
    for (const auto& f : kfold_split(ids, 10, 1)) EXPECT_EQ(f.holdout.size(), 1u);
    std::vector<std::size_t> big(103);
    std::iota(big.begin(), big.end(), 0);
    const auto folds = kfold_split(big, 10, 7);
    std::multiset<std::size_t> all;
    std::size_t lo = 1000, hi = 0;
    for (const auto& f : folds) {
        all.insert(f.holdout.begin(), f.holdout.end());
        lo = std::min(lo, f.holdout.size());
        hi = std::max(hi, f.holdout.size());
        EXPECT_EQ(f.train.size() + f.holdout.size(), 103u);
        for (auto h : f.holdout) EXPECT_FALSE(std::binary_search(f.train.begin(), f.train.end(), h));
    }
    EXPECT_EQ(all, std::multiset<std::size_t>(big.begin(), big.end()));
    EXPECT_LE(hi - lo, 1u);
    const auto again = kfold_split(big, 10, 7);
    for (std::size_t i = 0; i < folds.size(); ++i) EXPECT_EQ(folds[i].holdout, again[i].holdout);
    EXPECT_NE(kfold_split(big, 10, 8)[0].holdout, folds[0].holdout);
    EXPECT_THROW(kfold_split(ids, 11, 1), InvalidK);
    EXPECT_THROW(kfold_split(ids, 1, 1), InvalidK);
}

TEST(Metrics, RSquared) {
    const std::vector<double> t{0, 1, 1};
    EXPECT_EQ(r_squared(t, t), 1.0);
    const std::vector<double> mean(3, 2.0 / 3);
    EXPECT_NEAR(r_squared(mean, t), 0.0, 1e-15);
    EXPECT_NEAR(r_squared(std::vector<double>{0, 0.5, 1}, t), 0.625, 1e-12);
    EXPECT_THROW(r_squared(std::vector<double>{1, 2}, std::vector<double>{1, 1}), DegenerateTargets);
    EXPECT_THROW(r_squared(std::vector<double>{1}, std::vector<double>{1}), DegenerateTargets);
}

TEST(Layout, PackUnpack) {
    const ParamLayout layout(fixtures::all_trainable(), 4);
    ModelParams p = ModelParams::initial(4);
    p.theta = {1, 2, 3, 4};
    p.epsilon = 0.2;
    p.beta = 3;
    const auto u = layout.pack(p);
    EXPECT_EQ(u.size(), 10u);
    const auto back = layout.unpack(u, ModelParams::initial(4));
    EXPECT_NEAR(back.epsilon, 0.2, 1e-15);
    EXPECT_NEAR(back.beta, 3, 1e-14);
    EXPECT_EQ(layout.name(4), "epsilon");
    EXPECT_EQ(layout.name(9), "platt_b");
    std::vector<double> extreme(10, 1e6);
    const auto q = layout.unpack(extreme, p);
    EXPECT_LE(q.epsilon, 1.0);
    EXPECT_GE(q.epsilon, 0.0);
}

TEST(NumberObjective, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 8; ++trial) {
        const auto pr = fixtures::random_number_problem(rng);
        NumberObjective obj(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned));
        const auto p = fixtures::random_params(rng, obj.feature_dim());
        const auto ids = obj.all_ids();
        const auto chk = check_gradient(obj, p, Trainable::number(true), ids);
        EXPECT_TRUE(chk.passed) << chk.worst_name << " rel " << chk.max_rel_error << " analytic "
                                << chk.analytic[chk.worst] << " numeric " << chk.numeric[chk.worst];
    }
}

TEST(NumberObjective, ExternalPriorGradient) {
    std::mt19937_64 rng(5);
    const auto pr = fixtures::random_number_problem(rng);
    std::map<std::string, double> scores;
    for (const auto& [id, pool] : pr.pools)
        for (const auto& h : pool) scores[h.canonical()] = fixtures::uniform(rng, -5, 0);
    PriorConfig prior{PriorKind::external, default_extractor(), scores};
    NumberObjective obj(pr.data, pr.provider(), prior);
    const auto p = fixtures::random_params(rng, obj.feature_dim());
    const auto ids = obj.all_ids();
    EXPECT_TRUE(check_gradient(obj, p, Trainable::number(false), ids).passed);
}

TEST(NumberObjective, ThetaGradientZeroWhenFeaturesShared) {
    std::mt19937_64 rng(9);
    auto pr = fixtures::random_number_problem(rng);
    for (auto& [id, pool] : pr.pools)
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i].nl_text = "same words " + std::string(i, '.');
    NumberObjective obj(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned));
    ModelGrad g(obj.feature_dim());
    const auto ids = obj.all_ids();
    obj.loss_and_grad(fixtures::random_params(rng, obj.feature_dim()), ids, &g);
    for (double v : g.theta) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(NumberObjective, MatchesPosteriorApi) {
    std::mt19937_64 rng(12);
    const auto pr = fixtures::random_number_problem(rng);
    NumberObjective obj(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned));
    const auto p = fixtures::random_params(rng, obj.feature_dim());
    const auto ids = obj.all_ids();
    const auto preds = obj.predict(p, ids);
    for (std::size_t d = 0; d < pr.data.size(); ++d) {
        const auto& j = pr.data[d];
        const auto& pool = pr.pools.at(j.set_id);
        std::vector<double> ll;
        for (const auto& h : pool) ll.push_back(number_loglikelihood(h, j.example_set, {p.epsilon}));
        const auto state = dedup_weights(pool, PriorSpec::tuned(p.theta), ll, p.temperature);
        const double expect = platt(predict_membership(state, j.test_number), p.platt_a, p.platt_b);
        EXPECT_NEAR(preds[d], expect, 1e-12);
    }
}

TEST(NumberObjective, LossDecreasesUnderAdam) {
    std::mt19937_64 rng(21);
    const auto pr = fixtures::random_number_problem(rng, 4, 10, 10);
    NumberObjective obj(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned));
    FitConfig cfg = FitConfig::number(true);
    cfg.epochs = 50;
    cfg.adam.learning_rate = 0.01;
    const auto ids = obj.all_ids();
    const auto res = fit_params(cfg, obj, ModelParams::initial(obj.feature_dim()), ids);
    ASSERT_EQ(res.loss_trace.size(), 50u);
    EXPECT_LT(res.loss_trace.back(), res.loss_trace.front());
}

TEST(NumberObjective, ZeroTrainableKeepsParams) {
    std::mt19937_64 rng(2);
    const auto pr = fixtures::random_number_problem(rng);
    NumberObjective obj(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned));
    FitConfig cfg;
    cfg.trainable = Trainable::none();
    const auto init = fixtures::random_params(rng, obj.feature_dim());
    const auto ids = obj.all_ids();
    EXPECT_EQ(fit_params(cfg, obj, init, ids).params, init);
}

TEST(NumberObjective, ThreadCountDoesNotChangeResults) {
    std::mt19937_64 rng(31);
    const auto pr = fixtures::random_number_problem(rng, 6, 10, 8);
    NumberObjective one(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned), 1);
    NumberObjective many(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned), 8);
    FitConfig cfg = FitConfig::number(true);
    cfg.epochs = 30;
    const auto ids = one.all_ids();
    const auto a = fit_params(cfg, one, ModelParams::initial(one.feature_dim()), ids);
    const auto b = fit_params(cfg, many, ModelParams::initial(many.feature_dim()), ids);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.loss_trace, b.loss_trace);
}

TEST(NumberObjective, CrossValidationHoldoutHygiene) {
    std::mt19937_64 rng(41);
    const auto pr = fixtures::random_number_problem(rng, 4, 8, 10);
    NumberObjective obj(pr.data, pr.provider(), PriorConfig::of(PriorKind::tuned));
    FitConfig cfg = FitConfig::number(true);
    cfg.epochs = 5;
    const auto cv = cross_validate(cfg, obj, ModelParams::initial(obj.feature_dim()), 10);
    const auto folds = kfold_split(obj.all_ids(), 10, cfg.seed);
    for (std::size_t d = 0; d < obj.size(); ++d) {
        const auto& f = folds[cv.fold_of[d]];
        EXPECT_TRUE(std::binary_search(f.holdout.begin(), f.holdout.end(), d));
        EXPECT_FALSE(std::binary_search(f.train.begin(), f.train.end(), d));
    }
    const auto again = cross_validate(cfg, obj, ModelParams::initial(obj.feature_dim()), 10);
    EXPECT_EQ(cv.prediction, again.prediction);
}

TEST(ShapeObjective, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 8; ++trial) {
        const auto pr = fixtures::random_shape_problem(rng);
        ShapeObjective obj(pr.curves, pr.pools, PriorConfig::of(PriorKind::tuned));
        const auto p = fixtures::random_params(rng, obj.feature_dim());
        const auto ids = obj.all_ids();
        const auto chk = check_gradient(obj, p, Trainable::shape(true), ids);
        EXPECT_TRUE(chk.passed) << chk.worst_name << " rel " << chk.max_rel_error << " analytic "
                                << chk.analytic[chk.worst] << " numeric " << chk.numeric[chk.worst];
    }
}

TEST(ShapeObjective, MatchesPosteriorApi) {
    std::mt19937_64 rng(13);
    const auto pr = fixtures::random_shape_problem(rng, 2, 5, 10);
    ShapeObjective obj(pr.curves, pr.pools, PriorConfig::of(PriorKind::tuned));
    const auto p = fixtures::random_params(rng, obj.feature_dim());
    const auto ids = obj.all_ids();
    const auto preds = obj.predict(p, ids);
    std::size_t d = 0;
    for (std::size_t c = 0; c < pr.curves.size(); ++c) {
        std::vector<Trial> history;
        for (std::size_t b = 0; b < pr.curves[c].batches.size(); ++b) {
            std::vector<Hypothesis> pool;
            for (const auto& h : pr.pools[c])
                if (h.source_batch.value_or(0) <= static_cast<int>(b)) pool.push_back(h);
            std::vector<double> ll;
            const ShapeLikParams lp{p.epsilon, p.alpha, p.beta};
            for (const auto& h : pool) ll.push_back(decayed_sequence_loglik(h, history, lp));
            const auto state = dedup_weights(pool, PriorSpec::tuned(p.theta), ll, p.temperature);
            for (const auto& t : pr.curves[c].batches[b]) {
                const double expect = state.degenerate ? p.epsilon * p.alpha : predict_response(state, t, lp);
                EXPECT_NEAR(preds[d++], expect, 1e-12);
            }
            history.insert(history.end(), pr.curves[c].batches[b].begin(), pr.curves[c].batches[b].end());
        }
    }
    EXPECT_EQ(d, obj.size());
}

TEST(ShapeObjective, GroundTruthTargets) {
    std::mt19937_64 rng(3);
    const auto pr = fixtures::random_shape_problem(rng);
    ShapeObjective obj(pr.curves, pr.pools, PriorConfig::of(PriorKind::uniform), ShapeTarget::ground_truth);
    for (std::size_t d = 0; d < obj.size(); ++d) EXPECT_TRUE(obj.target(d) == 0.0 || obj.target(d) == 1.0);
    const auto ids = obj.all_ids();
    EXPECT_TRUE(check_gradient(obj, fixtures::random_params(rng, obj.feature_dim()), Trainable::shape(false), ids).passed);
}

TEST(PlattObjective, GradientAndFit) {
    std::mt19937_64 rng(4);
    std::vector<double> raw, target;
    std::vector<std::string> ids;
    for (int i = 0; i < 200; ++i) {
        const double r = fixtures::uniform(rng, 0.01, 0.99);
        raw.push_back(r);
        target.push_back(platt(r, 1.7, -0.4));
        ids.push_back(std::to_string(i));
    }
    PlattObjective obj(raw, target, ids);
    const auto all = obj.all_ids();
    ModelParams init = ModelParams::initial(0);
    EXPECT_TRUE(check_gradient(obj, init, Trainable::platt_only(), all).passed);
    FitConfig cfg;
    cfg.trainable = Trainable::platt_only();
    cfg.epochs = 3000;
    cfg.adam.learning_rate = 0.01;
    const auto res = fit_params(cfg, obj, init, all);
    EXPECT_NEAR(res.params.platt_a, 1.7, 0.05);
    EXPECT_NEAR(res.params.platt_b, -0.4, 0.05);
}
