#pragma once

// Readers and writers for the on-disk data formats:
//   hypothesis pool   JSON Lines {"nl", "dsl", "logq": number|null, "batch": int|null}
//   number judgments  CSV  set_id,examples,test_number,mean_rating  (raw 1-7 means)
//   learning curve    JSON {"concept_id", "ground_truth_nl", "batches", "human_positive_rate"}

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "induct/concept_model.hpp"
#include "induct/errors.hpp"

namespace induct::io {

using json = nlohmann::json;

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

// ---- hypothesis pools -------------------------------------------------------

inline json hypothesis_to_json(const Hypothesis& h) {
    json j;
    j["nl"] = h.nl_text;
    j["dsl"] = h.program_text();
    j["logq"] = h.proposal_logprob ? json(*h.proposal_logprob) : json(nullptr);
    j["batch"] = h.source_batch ? json(*h.source_batch) : json(nullptr);
    return j;
}

inline Hypothesis hypothesis_from_json(const json& j, ConceptDomain domain) {
    if (!j.is_object() || !j.contains("nl") || !j["nl"].is_string())
        throw FormatError("pool entry needs a string \"nl\" field");
    const std::string dsl = j.contains("dsl") && j["dsl"].is_string() ? j["dsl"].get<std::string>() : "";
    std::optional<double> logq;
    if (j.contains("logq") && !j["logq"].is_null()) logq = j["logq"].get<double>();
    std::optional<int> batch;
    if (j.contains("batch") && !j["batch"].is_null()) batch = j["batch"].get<int>();
    return Hypothesis::make(j["nl"].get<std::string>(), domain, dsl, logq, batch);
}

inline std::vector<Hypothesis> parse_pool_jsonl(std::string_view text, ConceptDomain domain) {
    std::vector<Hypothesis> out;
    std::size_t lineno = 0;
    for (const auto& line : split_lines(text)) {
        ++lineno;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            out.push_back(hypothesis_from_json(json::parse(line), domain));
        } catch (const json::exception& e) {
            throw FormatError("pool line " + std::to_string(lineno) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError("pool line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Hypothesis> read_pool_jsonl(const std::filesystem::path& path, ConceptDomain domain) {
    return parse_pool_jsonl(read_text(path), domain);
}

inline std::string pool_to_jsonl(const std::vector<Hypothesis>& pool) {
    std::string out;
    for (const auto& h : pool) {
        out += hypothesis_to_json(h).dump();
        out += '\n';
    }
    return out;
}

inline void write_pool_jsonl(const std::filesystem::path& path, const std::vector<Hypothesis>& pool) {
    write_text(path, pool_to_jsonl(pool));
}

// ---- CSV ------------------------------------------------------------------------

/// Splits one CSV record; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline int parse_int_field(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError("bad integer for " + std::string(what) + ": '" + s + "'");
    }
}

inline double parse_double_field(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError("bad number for " + std::string(what) + ": '" + s + "'");
    }
}

// ---- number judgments -------------------------------------------------------

inline constexpr std::string_view kJudgmentsHeader = "set_id,examples,test_number,mean_rating";

inline std::vector<HumanNumberJudgment> parse_judgments_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != kJudgmentsHeader)
        throw FormatError("judgments CSV must start with header '" + std::string(kJudgmentsHeader) + "'");
    std::vector<HumanNumberJudgment> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv_record(lines[i]);
        const std::string where = "judgments line " + std::to_string(i + 1);
        if (f.size() != 4) throw FormatError(where + ": expected 4 fields");
        std::vector<int> xs;
        std::stringstream ss(f[1]);
        std::string item;
        while (std::getline(ss, item, ';'))
            if (!item.empty()) xs.push_back(parse_int_field(item, "examples"));
        HumanNumberJudgment j;
        j.set_id = f[0];
        try {
            j.example_set = NumberExampleSet(std::move(xs));
            j.test_number = parse_int_field(f[2], "test_number");
            if (j.test_number < 1 || j.test_number > 100) throw FormatError("test_number outside 1..100");
            j.mean_rating = normalize_rating(parse_double_field(f[3], "mean_rating"));
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }
        out.push_back(std::move(j));
    }
    return out;
}

inline std::vector<HumanNumberJudgment> read_judgments_csv(const std::filesystem::path& path) {
    return parse_judgments_csv(read_text(path));
}

// ---- learning curves ----------------------------------------------------------

inline ShapeObject shape_object_from_json(const json& j) {
    const auto shape = shape_from_string(j.at("shape").get<std::string>());
    const auto color = color_from_string(j.at("color").get<std::string>());
    if (!shape) throw FormatError("unknown shape '" + j.at("shape").get<std::string>() + "'");
    if (!color) throw FormatError("unknown color '" + j.at("color").get<std::string>() + "'");
    return ShapeObject::make(*shape, *color, j.at("size").get<int>());
}

inline json shape_object_to_json(const ShapeObject& o) {
    return json{{"shape", to_string(o.shape)}, {"color", to_string(o.color)}, {"size", o.size}};
}

inline LearningCurve learning_curve_from_json(const json& j, std::size_t max_batches = 15) {
    LearningCurve c;
    try {
        c.concept_id = j.at("concept_id").get<std::string>();
        c.ground_truth_nl = j.value("ground_truth_nl", std::string());
        for (const auto& jb : j.at("batches")) {
            std::vector<ShapeObject> objs;
            std::vector<bool> labels;
            for (const auto& jo : jb) {
                objs.push_back(shape_object_from_json(jo));
                const auto& lab = jo.at("label");
                labels.push_back(lab.is_boolean() ? lab.get<bool>() : lab.get<int>() != 0);
            }
            std::vector<Trial> trials;
            for (std::size_t i = 0; i < objs.size(); ++i) trials.push_back(Trial::make(objs, objs[i], labels[i]));
            c.batches.push_back(std::move(trials));
        }
        c.human_positive_rate = j.value("human_positive_rate", std::vector<double>{});
    } catch (const json::exception& e) {
        throw FormatError("learning curve: " + std::string(e.what()));
    }
    if (!c.human_positive_rate.empty() && c.human_positive_rate.size() != c.trial_count())
        throw FormatError("learning curve " + c.concept_id + ": human_positive_rate has " +
                          std::to_string(c.human_positive_rate.size()) + " entries for " +
                          std::to_string(c.trial_count()) + " trials");
    for (double r : c.human_positive_rate)
        if (!(r >= 0.0 && r <= 1.0)) throw FormatError("learning curve " + c.concept_id + ": rate outside [0,1]");
    c.truncate(max_batches);
    return c;
}

inline LearningCurve read_learning_curve(const std::filesystem::path& path, std::size_t max_batches = 15) {
    try {
        return learning_curve_from_json(json::parse(read_text(path)), max_batches);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline json learning_curve_to_json(const LearningCurve& c) {
    json batches = json::array();
    for (const auto& b : c.batches) {
        json jb = json::array();
        for (const auto& t : b) {
            json o = shape_object_to_json(t.test);
            o["label"] = t.label ? 1 : 0;
            jb.push_back(std::move(o));
        }
        batches.push_back(std::move(jb));
    }
    return json{{"concept_id", c.concept_id},
                {"ground_truth_nl", c.ground_truth_nl},
                {"batches", std::move(batches)},
                {"human_positive_rate", c.human_positive_rate}};
}

}  // namespace induct::io
