#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "induct/likelihood.hpp"

using namespace induct;

namespace {
Hypothesis num(std::string dsl) { return Hypothesis::make(dsl, ConceptDomain::number, dsl); }
Hypothesis shp(std::string dsl) { return Hypothesis::make(dsl, ConceptDomain::shape, dsl); }
ShapeObject obj(Shape s, Color c, int z) { return ShapeObject::make(s, c, z); }
}  // namespace

TEST(NumberLikelihood, Examples) {
    EXPECT_NEAR(number_loglikelihood(num("even(x)"), NumberExampleSet({4}), {0.02}), std::log(0.0198), 1e-12);
    EXPECT_NEAR(number_loglikelihood(num("even(x)"), NumberExampleSet({7}), {1.0}), std::log(0.01), 1e-12);
    EXPECT_NEAR(number_loglikelihood(num("square(x)"), NumberExampleSet({7}), {1.0}), std::log(0.01), 1e-12);
    const double v = number_loglikelihood(num("even(x)"), NumberExampleSet({3}), {0.0});
    EXPECT_TRUE(std::isinf(v) && v < 0);
    EXPECT_EQ(finite_loglik(v), kLogZeroSentinel);
}

TEST(NumberLikelihood, EmptyExtensionIsNoiseOnly) {
    EXPECT_NEAR(number_loglikelihood(num("x < 1"), NumberExampleSet({5, 6}), {0.1}), 2 * std::log(0.001), 1e-12);
}

TEST(NumberLikelihood, UnparsedIsZeroAndShapeIsMismatch) {
    const auto bad = Hypothesis::make("?", ConceptDomain::number, "junk(");
    EXPECT_EQ(number_loglikelihood(bad, NumberExampleSet({1}), {0.1}), kNegInf);
    EXPECT_THROW(number_loglikelihood(shp("this.size > 1"), NumberExampleSet({1}), {0.1}), DomainMismatch);
}

TEST(NumberLikelihood, SizePrinciple) {
    // power of 2 (7 members) vs even (50) on consistent data; gap grows linearly in K.
    const std::vector<int> xs{16, 8, 2, 64, 32, 4};
    const double eps = 0.05;
    double prev_gap = 0.0, first_gap = 0.0;
    for (std::size_t K = 1; K <= xs.size(); ++K) {
        const NumberExampleSet X(std::vector<int>(xs.begin(), xs.begin() + static_cast<long>(K)));
        const double gap = number_loglikelihood(num("power(2, x)"), X, {eps}) - number_loglikelihood(num("even(x)"), X, {eps});
        EXPECT_GT(gap, 0.0);
        if (K == 1) first_gap = gap;
        else EXPECT_NEAR(gap - prev_gap, first_gap, 1e-9);
        prev_gap = gap;
    }
}

TEST(TrialResponse, Examples) {
    const auto t = obj(Shape::triangle, Color::green, 1);
    const auto tr = Trial::make({t}, t, true);
    EXPECT_DOUBLE_EQ(trial_response_prob(shp("this.color == blue"), tr, {1.0, 0.3, 0}), 0.3);
    EXPECT_DOUBLE_EQ(trial_response_prob(shp("this.color == green"), tr, {1.0, 0.3, 0}), 0.3);
    EXPECT_DOUBLE_EQ(trial_response_prob(shp("this.color == green"), tr, {0.0, 0.3, 0}), 1.0);
    EXPECT_NEAR(trial_response_prob(shp("this.color == blue"), tr, {0.1, 0.3, 0}), 0.03, 1e-15);
    const auto neg = Trial::make({t}, t, false);
    EXPECT_NEAR(trial_response_prob(shp("this.color == blue"), neg, {0.1, 0.3, 0}), 0.97, 1e-15);
    EXPECT_THROW(trial_response_prob(num("even(x)"), tr, {0.1, 0.3, 0}), DomainMismatch);
}

TEST(TrialResponse, StrictlyInsideUnitInterval) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(1e-9, 1 - 1e-9);
    for (int i = 0; i < 10000; ++i) {
        const double e = u(rng), a = u(rng);
        for (bool holds : {false, true})
            for (bool label : {false, true}) {
                const double q = response_prob(holds, label, e, a);
                ASSERT_GT(q, 0.0);
                ASSERT_LT(q, 1.0);
            }
    }
}

TEST(Decay, Examples) {
    EXPECT_DOUBLE_EQ(decay_weight(3, 1, 1.0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(decay_weight(3, 2, 1.0), 0.5);
    EXPECT_EQ(decay_weight(3, 3, 1.0), 1.0);
    EXPECT_EQ(decay_weight(3, 1, 0.0), 1.0);
}

TEST(Decay, SequenceLikelihood) {
    const auto a = obj(Shape::triangle, Color::green, 1), b = obj(Shape::circle, Color::blue, 2);
    const std::vector<Trial> trials{Trial::make({a, b}, a, true), Trial::make({a, b}, b, false),
                                    Trial::make({b}, b, true)};
    const auto h = shp("this.color == green");
    const ShapeLikParams p{0.1, 0.3, 1.0};
    EXPECT_EQ(decayed_sequence_loglik(h, {}, p), 0.0);
    double by_hand = 0.0;
    const double w[] = {1.0 / 3, 0.5, 1.0};
    for (int k = 0; k < 3; ++k) by_hand += w[k] * std::log(trial_response_prob(h, trials[static_cast<std::size_t>(k)], p));
    EXPECT_NEAR(decayed_sequence_loglik(h, trials, p), by_hand, 1e-12);
    double iid = 0.0;
    for (const auto& t : trials) iid += std::log(trial_response_prob(h, t, {0.1, 0.3, 0.0}));
    EXPECT_NEAR(decayed_sequence_loglik(h, trials, {0.1, 0.3, 0.0}), iid, 1e-12);
    const double v = decayed_sequence_loglik(h, trials, {0.0, 0.3, 0.0});
    EXPECT_TRUE(std::isinf(v));
}

TEST(Decay, RandomLaws) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t K = 1 + rng() % 80;
        const double beta = std::uniform_real_distribution<double>(0, 5)(rng);
        ASSERT_EQ(decay_weight(K, K, beta), 1.0);
        for (std::size_t k = 1; k < K; ++k) {
            ASSERT_EQ(decay_weight(K, k, beta), std::pow(static_cast<double>(1 + K - k), -beta));
            ASSERT_LE(decay_weight(K, k, beta), decay_weight(K, k + 1, beta));
        }
    }
}

TEST(MemoCache, ConcurrentGetOrCompute) {
    MemoCache<int, int> cache;
    std::atomic<int> computed{0};
    std::vector<std::thread> threads;
    std::vector<int> seen(8 * 100);
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] {
            for (int k = 0; k < 100; ++k)
                seen[static_cast<std::size_t>(t * 100 + k)] = *cache.get_or_compute(k % 10, [&] {
                    ++computed;
                    return (k % 10) * 7;
                });
        });
    for (auto& th : threads) th.join();
    for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], static_cast<int>(i % 100 % 10) * 7);
    EXPECT_EQ(cache.size(), 10u);
    EXPECT_GE(computed.load(), 10);
}
