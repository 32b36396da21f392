#include <gtest/gtest.h>

#include <random>

#include "induct/concept_model.hpp"
#include "induct/io.hpp"

using namespace induct;

TEST(Canonicalize, Examples) {
    EXPECT_EQ(canonicalize_nl("The number is  Even."), "the number is even");
    EXPECT_EQ(canonicalize_nl("even"), "even");
    EXPECT_EQ(canonicalize_nl("  Power of 2 "), "power of 2");
    EXPECT_EQ(canonicalize_nl("a\tb\n c"), "a b c");
    EXPECT_EQ(canonicalize_nl("even. ."), "even");
    EXPECT_EQ(canonicalize_nl(""), "");
}

TEST(Canonicalize, Idempotent) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "aBc .\t\nXyZ..  12";
    for (int i = 0; i < 20000; ++i) {
        std::string s;
        const int n = static_cast<int>(rng() % 16);
        for (int k = 0; k < n; ++k) s += alphabet[rng() % alphabet.size()];
        const auto once = canonicalize_nl(s);
        ASSERT_EQ(canonicalize_nl(once), once) << '"' << s << '"';
    }
}

TEST(Hypothesis, MakeParsesOrKeepsUnparsed) {
    const auto h = Hypothesis::make("Even numbers.", ConceptDomain::number, "even(x)", -1.5, 2);
    ASSERT_TRUE(h.is_parsed());
    EXPECT_EQ(h.parsed()->domain(), ConceptDomain::number);
    EXPECT_EQ(h.canonical(), "even numbers");
    EXPECT_EQ(*h.proposal_logprob, -1.5);
    EXPECT_EQ(*h.source_batch, 2);

    const auto bad = Hypothesis::make("weird", ConceptDomain::number, "lucky(x)");
    EXPECT_FALSE(bad.is_parsed());
    EXPECT_EQ(bad.program_text(), "lucky(x)");

    EXPECT_THROW(Hypothesis::make("  . ", ConceptDomain::number, "even(x)"), FormatError);
    EXPECT_FALSE(Hypothesis::make("x", ConceptDomain::shape, "even(x)").is_parsed());
}

TEST(Hypothesis, Duplicates) {
    const auto a = Hypothesis::make("Even", ConceptDomain::number, "even(x)");
    const auto b = Hypothesis::make("even.", ConceptDomain::number, "x mod 2 == 0");
    const auto c = Hypothesis::make("odd", ConceptDomain::number, "odd(x)");
    EXPECT_TRUE(is_duplicate(a, b));
    EXPECT_FALSE(is_duplicate(a, c));
}

TEST(NumberExampleSet, Validates) {
    EXPECT_EQ(NumberExampleSet({16, 8, 2, 64}).to_prompt_string(), "16, 8, 2, 64");
    EXPECT_THROW(NumberExampleSet(std::vector<int>{}), FormatError);
    EXPECT_THROW(NumberExampleSet({0}), FormatError);
    EXPECT_THROW(NumberExampleSet({101}), FormatError);
}

TEST(Trial, Validates) {
    const auto a = ShapeObject::make(Shape::circle, Color::blue, 1);
    const auto b = ShapeObject::make(Shape::triangle, Color::green, 3);
    EXPECT_NO_THROW(Trial::make({a, b}, b, true));
    EXPECT_THROW(Trial::make({a}, b, true), FormatError);
    EXPECT_THROW(Trial::make({}, a, true), FormatError);
    EXPECT_THROW(Trial::make({a, a, a, a, a, a}, a, true), FormatError);
    EXPECT_THROW(ShapeObject::make(Shape::circle, Color::blue, 4), FormatError);
    EXPECT_EQ(b.describe(), "(large green triangle)");
}

TEST(Ratings, Normalize) {
    EXPECT_DOUBLE_EQ(normalize_rating(1), 0.0);
    EXPECT_DOUBLE_EQ(normalize_rating(7), 1.0);
    EXPECT_DOUBLE_EQ(normalize_rating(4), 0.5);
    EXPECT_THROW(normalize_rating(0.5), FormatError);
    EXPECT_THROW(normalize_rating(std::nan("")), FormatError);
}

TEST(Io, PoolRoundTrip) {
    std::vector<Hypothesis> pool{Hypothesis::make("even", ConceptDomain::number, "even(x)", -0.25, std::nullopt),
                                 Hypothesis::make("odd, \"quoted\"", ConceptDomain::number, "odd(x)"),
                                 Hypothesis::make("nonsense", ConceptDomain::number, "blah(")};
    const auto text = io::pool_to_jsonl(pool);
    const auto back = io::parse_pool_jsonl(text, ConceptDomain::number);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0].nl_text, "even");
    EXPECT_EQ(*back[0].proposal_logprob, -0.25);
    EXPECT_EQ(back[1].nl_text, "odd, \"quoted\"");
    EXPECT_FALSE(back[1].proposal_logprob);
    EXPECT_FALSE(back[2].is_parsed());
    EXPECT_EQ(io::pool_to_jsonl(back), text);
    EXPECT_THROW(io::parse_pool_jsonl("{\"dsl\": \"even(x)\"}\n", ConceptDomain::number), FormatError);
    EXPECT_THROW(io::parse_pool_jsonl("not json\n", ConceptDomain::number), FormatError);
}

TEST(Io, Judgments) {
    const auto js = io::parse_judgments_csv(
        "set_id,examples,test_number,mean_rating\n"
        "s1,16;8;2;64,32,6.4\n"
        "s1,16;8;2;64,23,1\n");
    ASSERT_EQ(js.size(), 2u);
    EXPECT_EQ(js[0].example_set.values(), (std::vector<int>{16, 8, 2, 64}));
    EXPECT_NEAR(js[0].mean_rating, 0.9, 1e-12);
    EXPECT_EQ(js[1].test_number, 23);
    EXPECT_THROW(io::parse_judgments_csv("a,b\n"), FormatError);
    EXPECT_THROW(io::parse_judgments_csv("set_id,examples,test_number,mean_rating\ns,1,0,3\n"), FormatError);
    EXPECT_THROW(io::parse_judgments_csv("set_id,examples,test_number,mean_rating\ns,1,5,9\n"), FormatError);
}

TEST(Io, LearningCurve) {
    const auto j = nlohmann::json::parse(R"({
      "concept_id": "c1", "ground_truth_nl": "green triangles",
      "batches": [
        [{"shape":"triangle","color":"green","size":1,"label":1},{"shape":"circle","color":"blue","size":2,"label":0}],
        [{"shape":"rectangle","color":"yellow","size":3,"label":false}]
      ],
      "human_positive_rate": [0.9, 0.1, 0.05]})");
    const auto c = io::learning_curve_from_json(j);
    ASSERT_EQ(c.batches.size(), 2u);
    EXPECT_EQ(c.trial_count(), 3u);
    EXPECT_TRUE(c.batches[0][0].label);
    EXPECT_EQ(c.batches[0][1].batch.size(), 2u);
    EXPECT_EQ(io::learning_curve_to_json(c), io::learning_curve_to_json(io::learning_curve_from_json(io::learning_curve_to_json(c))));
    const auto short_c = io::learning_curve_from_json(j, 1);
    EXPECT_EQ(short_c.trial_count(), 2u);
    EXPECT_EQ(short_c.human_positive_rate.size(), 2u);
    auto bad = j;
    bad["human_positive_rate"] = {0.5};
    EXPECT_THROW(io::learning_curve_from_json(bad), FormatError);
    bad = j;
    bad["batches"][0][0]["color"] = "red";
    EXPECT_THROW(io::learning_curve_from_json(bad), FormatError);
}
