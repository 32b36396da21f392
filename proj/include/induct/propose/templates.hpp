#pragma once

// Prompt templates and their instantiation. Placeholders are {{EXAMPLES}},
// {{CONCEPT}} and {{TEST}}; every rendered prompt has no trailing newline.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "induct/concept_model.hpp"
#include "induct/errors.hpp"

namespace induct::propose {

enum class ProposalDomain { number, shape_propositional, shape_first_order, shape_first_batch, ablation_unconditioned };

inline std::string_view to_string(ProposalDomain d) {
    switch (d) {
        case ProposalDomain::number: return "number";
        case ProposalDomain::shape_propositional: return "shape_propositional";
        case ProposalDomain::shape_first_order: return "shape_first_order";
        case ProposalDomain::shape_first_batch: return "shape_first_batch";
        case ProposalDomain::ablation_unconditioned: return "ablation_unconditioned";
    }
    return "?";
}

inline ProposalDomain proposal_domain_from_string(std::string_view s) {
    for (auto d : {ProposalDomain::number, ProposalDomain::shape_propositional, ProposalDomain::shape_first_order,
                   ProposalDomain::shape_first_batch, ProposalDomain::ablation_unconditioned})
        if (to_string(d) == s) return d;
    throw TemplateMismatch("unknown proposal domain '" + std::string(s) + "'");
}

inline ConceptDomain concept_domain(ProposalDomain d) {
    return d == ProposalDomain::number || d == ProposalDomain::ablation_unconditioned ? ConceptDomain::number
                                                                                      : ConceptDomain::shape;
}

struct ProposalRequest {
    ProposalDomain domain = ProposalDomain::number;
    std::vector<int> numbers;                   // number domain
    std::vector<std::vector<Trial>> batches;    // shape domains: observed batches
    int budget = 1;
    double temperature = 1.0;
    std::uint64_t seed = 0;
    std::optional<int> source_batch;  // stamped on every returned hypothesis
};

namespace templates {

inline constexpr std::string_view kNumberProposal = R"(# Python 3
# Here are a few example number concepts:
# -- The number is even
# -- The number is between 30 and 45
# -- The number is a power of 3
# -- The number is less than 10
# 
# Here are some random examples of numbers belonging to a different number concept:
# {{EXAMPLES}}
# The above are examples of the following number concept:
# -- The number is )";

inline constexpr std::string_view kNumberAblation = R"(# Python 3
# Here are a few example number concepts:
# -- The number is even
# -- The number is between 30 and 45
# -- The number is a power of 3
# -- The number is less than 10
# -- The number is )";

inline constexpr std::string_view kShapeFirstOrder = R"(Here three simple concepts, which specify when an object is 'positive' relative to an example collection of other objects. Before giving the rule for each concept, we give examples of collections of objects, and which objects in the collection are 'positive'.

Concept #1:
    An Example of Concept #1:
        POSITIVES: (big yellow rectangle)
        NEGATIVES: (big green circle), (medium yellow rectangle)
    Another Example of Concept #1:
        POSITIVES: (medium yellow rectangle)
        NEGATIVES: (big red circle), (small green circle)
Rule for Concept #1: Something is positive if it is the biggest yellow object in the example.


Concept #2:
    An Example of Concept #2:
        POSITIVES: (small yellow circle), (medium yellow rectangle)
        NEGATIVES: (big green circle), (big blue rectangle)
    Another Example of Concept #2:
        POSITIVES: (big blue circle), (medium blue rectangle)
        NEGATIVES: (small green circle), (medium yellow rectangle), 
Rule for Concept #2: Something is positive if there is another object with the same color in the example.

Concept #3:
    An Example of Concept #3:
        POSITIVES: (small yellow circle), (medium yellow rectangle)
        NEGATIVES: (big green circle), (big blue rectangle)
    Another Example of Concept #3:
        POSITIVES: (small blue circle), (small blue triangle), (medium blue rectangle)
        NEGATIVES: (medium green triangle), (big yellow rectangle)
    Another Example of Concept #3:
        POSITIVES: (big red rectangle), (medium red rectangle), (big red triangle)
        NEGATIVES: (medium green triangle), (big yellow rectangle) 
Rule for Concept #3: Something is positive if it is the same color as the smallest triangle in the example.

Now here are some examples of another concept called Concept #4, but this time we don't know the rule. Infer ten different possible rules, and make those ten rules as simple and general as you can. Your simple general rules might talk about shapes, colors, and sizes, and might make comparisons between these features within a single example, but it doesn't have to. Remember that a rule should say when something is positive, and should mention the other objects in the example, and should be consisting with what you see below.

Concept #4:
{{EXAMPLES}}
Rule for Concept #4: Something is positive if...

Now make a numbered list of 10 possible rules for Concept #4. Start by writing "1. Something is positive if". End each line with a period.)";

inline constexpr std::string_view kShapePropositional = R"(Here are some example concepts defined by a logical rule:

Rule: a triangle.
Rule: a green rectangle.
Rule: big or a rectangle (unless that rectangle is blue).
Rule: not both big and green.
Rule: either big or green, but not both.
Rule: either a rectangle or not yellow.
Rule: a circle.


Now please produce a logical rule for a new concept. Your rule should be consistent with the following examples. It must be true of all the positive examples, and not true of all the negative examples. The examples are organized into a table with one column for each feature (size, color, shape):

{{EXAMPLES}}

Please produce a simple rule that is consistent with the above table. Make your rule as SHORT, SIMPLE, and GENERAL as possible. Do NOT make it more complicated than it has to be, or refer to features that you absolutely do not have to refer to. Begin by writing "Rule: " and then the rule, followed by a period.)";

inline constexpr std::string_view kShapeFirstBatch = R"(Here are some example concepts defined by a logical rule:

Rule: color is purple.
Rule: shape is not a hexagon.
Rule: color is purple and size is small.
Rule: size is tiny or shape is square.
Rule: size is not enormous.
Rule: color is red.

Please propose a some new concepts, defined by a logical rule. These new concepts can only refer to the following features:
- shape: triangle, rectangle, circle
- color: green, blue, yellow
- size: small, medium, large

Please make your rules short and simple, and please write your response on a single line that begins with the text "Rule: ". Provide 100 possible rules.)";

inline constexpr std::string_view kNumberYesNo = R"(Here are a few example number concepts:
-- The number is even
-- The number is between 30 and 45
-- The number is a power of 3
-- The number is less than 10

Here are some random examples of numbers belonging to a possibly different number concept:
{{EXAMPLES}}

Question: Does the number {{TEST}} belong to the same concept as the above numbers?
Answer (one word, yes/no):)";

inline constexpr std::string_view kShapeYesNo = R"(Here are some example concepts defined by a logical rule:

Rule for Concept #1: Something is positive if it is the biggest yellow object in the example
Rule for Concept #2: Something is positive if there is another object with the same color in the example
Rule for Concept #3: Something is positive if it is the same color as the smallest triangle in the example

Now please look at the following examples for a new logical rule.

{{EXAMPLES}}

Now we get a new collection of examples for Concept #4:
{{BATCH}}
Question: Based on the above example, is a {{TEST}} in the concept?
Answer (one word, just write yes/no):)";

inline constexpr std::string_view kNumberPrior = R"(# Here is an example number concept:
# The number is {{CONCEPT}})";

inline constexpr std::string_view kShapePrior = R"(# Here are some simple example shape concepts:
# 1. neither a triangle nor a green rectangle
# 2. not blue and large.
# 3. if it is large, then it must be yellow.
# 4. small and blue
# 5. either big or green.
# 6. {{CONCEPT}})";

// Translation prompts target the concept DSL; completions stop at the first line break.
inline constexpr std::string_view kNumberTranslate = R"(# Concept language over one integer x.
# Predicates: even(x), odd(x), prime(x), square(x), cube(x), power(b, x), multiple(m, x),
#   between(lo, hi, x), ends_in(d, x), contains_digit(d, x), in_set({a, b, c}, x)
# Operators: and, or, not, == != < <= > >=, + - * mod ^
# power(b, x) holds when x is a power of b; between is inclusive.
#
# Concept: the number is even
even(x)
# Concept: the number is between 30 and 45
between(30, 45, x)
# Concept: the number is a power of 3
power(3, x)
# Concept: the number is less than 10
x < 10
# Concept: the number is a multiple of 4 or ends in 7
multiple(4, x) or ends_in(7, x)
# Concept: the number is 2, 5 or 11
in_set({2, 5, 11}, x)
# Concept: the number is a square number that is not even
square(x) and not even(x)
#
# Concept: the number is {{CONCEPT}}
)";

inline constexpr std::string_view kShapeTranslate = R"(# Concept language over a collection of objects. `this` is the object being judged.
# Attributes: o.shape in {triangle, rectangle, circle}; o.color in {yellow, green, blue};
#   o.size is 1 (small), 2 (medium) or 3 (large).
# Quantifiers: forall(v in D, body), exists(v in D, body), count(v in D, body)
#   where D is others (every object except this), all (every object), colors, shapes or sizes.
# Operators: and, or, not, == !=, < <= > >=, + -
#
# Rule: Something is positive if it is not a small object, and not a green object.
this.size != 1 and this.color != green
# Rule: Something is positive if it is a blue circle.
this.color == blue and this.shape == circle
# Rule: Something is positive if it is the biggest yellow object in the example.
this.color == yellow and forall(o in others, o.color != yellow or o.size < this.size)
# Rule: Something is positive if there is another object with the same color in the example.
exists(o in others, o.color == this.color)
# Rule: Something is positive if it is the same color as the smallest triangle in the example.
exists(o in all, o.shape == triangle and o.color == this.color and forall(p in all, p.shape != triangle or p.size >= o.size))
# Rule: Something is positive if it has the most common shape in the example.
forall(s in shapes, count(o in all, o.shape == this.shape) >= count(o in all, o.shape == s))
# Rule: Something is positive if there are exactly two rectangles in the example.
count(o in all, o.shape == rectangle) == 2
#
# Rule: {{CONCEPT}}
)";

}  // namespace templates

/// Replaces every `{{key}}` occurrence. Each key must occur at least once.
inline std::string instantiate(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
    std::string out(tmpl);
    for (const auto& [key, value] : values) {
        const std::string marker = "{{" + key + "}}";
        std::size_t pos = out.find(marker);
        if (pos == std::string::npos) throw TemplateMismatch("template has no {{" + key + "}} slot");
        while (pos != std::string::npos) {
            out.replace(pos, marker.size(), value);
            pos = out.find(marker, pos + value.size());
        }
    }
    return out;
}

// ---- example serialization ---------------------------------------------------

inline std::string format_object(const ShapeObject& o) { return o.describe(); }

inline std::string format_object_list(const std::vector<ShapeObject>& objs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < objs.size(); ++i) {
        if (i) out += sep;
        out += format_object(objs[i]);
    }
    return out;
}

/// "    An Example of Concept #4:" blocks with POSITIVES / NEGATIVES lines.
inline std::string format_batches_first_order(const std::vector<std::vector<Trial>>& batches) {
    std::string out;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        std::vector<ShapeObject> pos, neg;
        for (const auto& t : batches[b]) (t.label ? pos : neg).push_back(t.test);
        if (b) out += '\n';
        out += b == 0 ? "    An Example of Concept #4:\n" : "    Another Example of Concept #4:\n";
        out += "        POSITIVES: " + (pos.empty() ? std::string("none") : format_object_list(pos, ", ")) + "\n";
        out += "        NEGATIVES: " + (neg.empty() ? std::string("none") : format_object_list(neg, ", "));
    }
    return out;
}

/// One row per observed trial: size | color | shape | positive.
inline std::string format_truth_table(const std::vector<std::vector<Trial>>& batches) {
    std::string out = "size | color | shape | positive";
    for (const auto& batch : batches)
        for (const auto& t : batch)
            out += "\n" + std::string(size_word(t.test.size)) + " | " + std::string(to_string(t.test.color)) + " | " +
                   std::string(to_string(t.test.shape)) + " | " + (t.label ? "yes" : "no");
    return out;
}

inline std::string format_numbers(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(xs[i]);
    }
    return out;
}

inline std::string build_prompt(const ProposalRequest& req) {
    switch (req.domain) {
        case ProposalDomain::number:
            if (req.numbers.empty()) throw TemplateMismatch("number prompt needs example numbers");
            return instantiate(templates::kNumberProposal, {{"EXAMPLES", format_numbers(req.numbers)}});
        case ProposalDomain::ablation_unconditioned: return std::string(templates::kNumberAblation);
        case ProposalDomain::shape_first_order:
            if (req.batches.empty()) throw TemplateMismatch("first-order prompt needs at least one batch");
            return instantiate(templates::kShapeFirstOrder, {{"EXAMPLES", format_batches_first_order(req.batches)}});
        case ProposalDomain::shape_propositional:
            if (req.batches.empty()) throw TemplateMismatch("propositional prompt needs at least one batch");
            return instantiate(templates::kShapePropositional, {{"EXAMPLES", format_truth_table(req.batches)}});
        case ProposalDomain::shape_first_batch: return std::string(templates::kShapeFirstBatch);
    }
    throw TemplateMismatch("unknown proposal domain");
}

inline std::string number_yes_no_prompt(const std::vector<int>& xs, int test) {
    return instantiate(templates::kNumberYesNo, {{"EXAMPLES", format_numbers(xs)}, {"TEST", std::to_string(test)}});
}

inline std::string shape_yes_no_prompt(const std::vector<std::vector<Trial>>& history,
                                       const std::vector<ShapeObject>& batch, const ShapeObject& test) {
    return instantiate(templates::kShapeYesNo, {{"EXAMPLES", format_batches_first_order(history)},
                                                {"BATCH", format_object_list(batch, " ")},
                                                {"TEST", format_object(test)}});
}

inline std::string translation_prompt(ConceptDomain domain, std::string_view nl) {
    return instantiate(domain == ConceptDomain::number ? templates::kNumberTranslate : templates::kShapeTranslate,
                       {{"CONCEPT", std::string(nl)}});
}

/// Context preceding the concept text when scoring a prior; the concept follows it directly.
inline std::string prior_prefix(ConceptDomain domain) {
    const auto tmpl = domain == ConceptDomain::number ? templates::kNumberPrior : templates::kShapePrior;
    return std::string(tmpl.substr(0, tmpl.find("{{CONCEPT}}")));
}

}  // namespace induct::propose
