#pragma once

#include <cctype>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace induct::propose {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::string strip_trailing_period(std::string s) {
    s = trim(s);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return trim(s);
}

inline std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        out.emplace_back(text.substr(start, end - start));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

/// Lines of the form "<int>. <text>", numbering and trailing period removed, in order.
inline std::vector<std::string> parse_rule_list(std::string_view completion) {
    static const std::regex item(R"(^\s*\d+\.\s+(.*\S)\s*$)");
    std::vector<std::string> rules;
    for (const auto& line : lines_of(completion)) {
        std::smatch m;
        if (!std::regex_match(line, m, item)) continue;
        std::string r = strip_trailing_period(m[1].str());
        if (!r.empty()) rules.push_back(std::move(r));
    }
    return rules;
}

/// Lines starting with "Rule:", prefix and trailing period removed.
inline std::vector<std::string> parse_prefixed_rules(std::string_view completion) {
    std::vector<std::string> rules;
    for (const auto& raw : lines_of(completion)) {
        const std::string line = trim(raw);
        if (line.rfind("Rule:", 0) != 0) continue;
        std::string r = strip_trailing_period(line.substr(5));
        if (!r.empty()) rules.push_back(std::move(r));
    }
    return rules;
}

/// First line of a free-text completion, trimmed, trailing period removed.
inline std::string first_line_concept(std::string_view completion) {
    return strip_trailing_period(lines_of(completion).front());
}

inline std::vector<std::string> round_robin_take(const std::vector<std::vector<std::string>>& lists, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t depth = 0; out.size() < n; ++depth) {
        bool any = false;
        for (const auto& l : lists) {
            if (depth >= l.size()) continue;
            any = true;
            if (out.size() == n) break;
            out.push_back(l[depth]);
        }
        if (!any) break;
    }
    return out;
}

/// Removes a leading "Something is positive if" (any case) before prior scoring.
inline std::string strip_positive_prefix(std::string_view rule) {
    static constexpr std::string_view prefix = "something is positive if";
    std::string t = trim(rule);
    if (t.size() >= prefix.size()) {
        std::string head = t.substr(0, prefix.size());
        for (char& c : head) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (head == prefix) return trim(std::string_view(t).substr(prefix.size()));
    }
    return t;
}

}  // namespace induct::propose
