#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "induct/dsl/concept_program.hpp"
#include "induct/errors.hpp"
#include "induct/shapes.hpp"

namespace induct {

/// Lowercase, trim, collapse internal whitespace runs, drop one trailing period.
/// Idempotent. This string is the deduplication key for hypotheses.
inline std::string canonicalize_nl(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(c));
    }
    // A run like "even. ." needs repeated stripping to stay idempotent.
    while (!out.empty() && out.back() == '.') {
        out.pop_back();
        while (!out.empty() && out.back() == ' ') out.pop_back();
    }
    return out;
}

/// Program text that could not be parsed; kept so diagnostics can show it.
struct Unparsed {
    std::string source;
    std::string reason;

    bool operator==(const Unparsed&) const = default;
};

struct Hypothesis {
    std::string nl_text;
    std::variant<ConceptProgram, Unparsed> program;
    std::optional<double> proposal_logprob;
    std::optional<int> source_batch;

    const ConceptProgram* parsed() const { return std::get_if<ConceptProgram>(&program); }
    bool is_parsed() const { return parsed() != nullptr; }
    std::string canonical() const { return canonicalize_nl(nl_text); }

    /// Source text of the program, parsed or not.
    std::string program_text() const {
        if (const auto* p = parsed()) return format_concept(*p);
        return std::get<Unparsed>(program).source;
    }

    /// Builds a hypothesis from NL text and program source in `domain`.
    /// A program that fails to parse becomes Unparsed instead of throwing.
    static Hypothesis make(std::string_view nl, ConceptDomain domain, std::string_view dsl,
                           std::optional<double> logq = std::nullopt, std::optional<int> batch = std::nullopt) {
        Hypothesis h;
        h.nl_text = std::string(nl);
        if (canonicalize_nl(h.nl_text).empty()) throw FormatError("hypothesis text is empty");
        try {
            h.program = parse_concept(domain, dsl);
        } catch (const SyntaxError& e) {
            h.program = Unparsed{std::string(dsl), e.what()};
        }
        h.proposal_logprob = logq;
        h.source_batch = batch;
        return h;
    }
};

inline bool is_duplicate(const Hypothesis& a, const Hypothesis& b) { return a.canonical() == b.canonical(); }

/// Example numbers X_1..X_K, each in 1..100.
class NumberExampleSet {
public:
    NumberExampleSet() = default;
    explicit NumberExampleSet(std::vector<int> examples) : examples_(std::move(examples)) {
        if (examples_.empty()) throw FormatError("number example set is empty");
        for (int x : examples_)
            if (x < 1 || x > 100) throw FormatError("number example " + std::to_string(x) + " is outside 1..100");
    }

    const std::vector<int>& values() const { return examples_; }
    std::size_t size() const { return examples_.size(); }

    /// "16, 8, 2, 64"
    std::string to_prompt_string() const {
        std::string out;
        for (std::size_t i = 0; i < examples_.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(examples_[i]);
        }
        return out;
    }

    bool operator==(const NumberExampleSet&) const = default;

private:
    std::vector<int> examples_;
};

/// One (B, T, Y) datum of the logical-concept task.
struct Trial {
    std::vector<ShapeObject> batch;
    ShapeObject test;
    bool label = false;

    static Trial make(std::vector<ShapeObject> batch, ShapeObject test, bool label) {
        if (batch.empty() || batch.size() > 5)
            throw FormatError("trial batch must hold 1 to 5 objects, got " + std::to_string(batch.size()));
        bool found = false;
        for (const auto& o : batch) found = found || o == test;
        if (!found) throw FormatError("trial test object " + test.describe() + " is not in its batch");
        return Trial{std::move(batch), test, label};
    }

    bool operator==(const Trial&) const = default;
};

struct HumanNumberJudgment {
    std::string set_id;
    NumberExampleSet example_set;
    int test_number = 1;
    double mean_rating = 0.0;  // normalized to [0, 1]
};

/// Maps a raw 1..7 rating mean onto [0, 1].
inline double normalize_rating(double raw) {
    if (!(raw >= 1.0 && raw <= 7.0)) throw FormatError("rating " + std::to_string(raw) + " is outside 1..7");
    return (raw - 1.0) / 6.0;
}

struct LearningCurve {
    std::string concept_id;
    std::string ground_truth_nl;
    /// Trials grouped by batch; every object of a batch is one trial.
    std::vector<std::vector<Trial>> batches;
    /// Per trial, in batch order.
    std::vector<double> human_positive_rate;

    std::size_t trial_count() const {
        std::size_t n = 0;
        for (const auto& b : batches) n += b.size();
        return n;
    }

    /// Keeps the first `max_batches` batches and their human rates.
    void truncate(std::size_t max_batches) {
        if (batches.size() <= max_batches) return;
        batches.resize(max_batches);
        human_positive_rate.resize(trial_count());
    }
};

}  // namespace induct
