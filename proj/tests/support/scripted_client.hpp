#pragma once

// Deterministic stand-in for a chat model. Number proposal requests draw from a
// fixed catalog (keyed by prompt hash and sample index); translation requests
// look the concept up in the same catalog. Shape first-order requests return
// a numbered rule list.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "induct/propose/client.hpp"
#include "induct/propose/replay.hpp"

namespace fixtures {

inline const std::vector<std::pair<std::string, std::string>>& number_catalog() {
    static const std::vector<std::pair<std::string, std::string>> c = {
        {"even", "even(x)"},
        {"odd", "odd(x)"},
        {"a power of 2", "power(2, x)"},
        {"a square number", "square(x)"},
        {"a multiple of 10", "multiple(10, x)"},
        {"a multiple of 5", "multiple(5, x)"},
        {"less than 50", "x < 50"},
        {"prime", "prime(x)"},
        {"a multiple of 3", "multiple(3, x)"},
        {"ending in 6", "ends_in(6, x)"},
        {"a power of 4", "power(4, x)"},
        {"between 10 and 30", "between(10, 30, x)"},
    };
    return c;
}

inline const std::vector<std::pair<std::string, std::string>>& shape_catalog() {
    static const std::vector<std::pair<std::string, std::string>> c = {
        {"Something is positive if it is a green triangle.", "this.shape == triangle and this.color == green"},
        {"Something is positive if it is green.", "this.color == green"},
        {"Something is positive if it is a triangle.", "this.shape == triangle"},
        {"Something is positive if it is blue.", "this.color == blue"},
        {"Something is positive if it is large.", "this.size == 3"},
        {"Something is positive if it is the largest object in the example.",
         "forall(o in others, o.size <= this.size)"},
    };
    return c;
}

inline std::string after_last(const std::string& text, const std::string& marker) {
    const auto pos = text.rfind(marker);
    if (pos == std::string::npos) return {};
    std::string rest = text.substr(pos + marker.size());
    return rest.substr(0, rest.find('\n'));
}

inline std::string lookup_dsl(const std::vector<std::pair<std::string, std::string>>& cat, const std::string& nl) {
    for (const auto& [k, v] : cat)
        if (nl.find(k) != std::string::npos || k.find(nl) != std::string::npos) return v;
    return "no translation";
}

inline std::vector<induct::propose::Completion> scripted_answer(const induct::propose::CompletionRequest& r) {
    using induct::propose::Completion;
    if (r.prompt.rfind("# Concept language over one integer", 0) == 0)
        return {Completion{lookup_dsl(number_catalog(), after_last(r.prompt, "# Concept: the number is ")), -0.5}};
    if (r.prompt.rfind("# Concept language over a collection", 0) == 0) {
        const auto nl = after_last(r.prompt, "# Rule: ");
        for (const auto& [k, v] : shape_catalog())
            if (k.find(nl) != std::string::npos || nl.find(k.substr(0, k.size() - 1)) != std::string::npos)
                return {Completion{v, -0.5}};
        return {Completion{"no translation", -0.5}};
    }
    const auto h = std::hash<std::string>{}(r.prompt);
    if (r.max_tokens == 32) {
        const auto& cat = number_catalog();
        const auto& nl = cat[(h + static_cast<std::size_t>(r.sample) * 7) % cat.size()].first;
        return {Completion{nl + "\nmore text", -1.0 - 0.25 * static_cast<double>(r.sample % 5)}};
    }
    const auto& cat = shape_catalog();
    std::string list;
    for (std::size_t i = 0; i < cat.size(); ++i)
        list += std::to_string(i + 1) + ". " + cat[(h + i + static_cast<std::size_t>(r.sample)) % cat.size()].first + "\n";
    if (r.temperature == 0.0) {
        std::string rules;
        for (const auto& [k, v] : cat) rules += "Rule: " + k + "\n";
        return {Completion{rules, std::nullopt}};
    }
    return {Completion{list, std::nullopt}};
}

inline std::shared_ptr<induct::propose::FunctionClient> scripted_client(std::string model = "scripted") {
    return std::make_shared<induct::propose::FunctionClient>(std::move(model), scripted_answer);
}

}  // namespace fixtures
