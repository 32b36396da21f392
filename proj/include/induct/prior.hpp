#pragma once

// Priors over natural-language hypotheses. All log-weights are unnormalized;
// normalization happens over a pool.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

#include "induct/concept_model.hpp"
#include "induct/errors.hpp"
#include "induct/io.hpp"

namespace induct {

inline constexpr std::size_t kFeatureDim = 384;
inline constexpr std::uint64_t kDefaultHashSeed = 0x5eed'1f0c'a11c'e5edULL;

using FeatureVector = std::vector<double>;

class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual FeatureVector extract(std::string_view nl_text) const = 0;
    virtual std::size_t dim() const { return kFeatureDim; }
};

/// Lowercase alphanumeric word tokens.
inline std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// 64-bit FNV-1a with the seed folded into the offset basis.
inline std::uint64_t seeded_fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    // murmur3 finalizer
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
}

/// Signed hashed bag of unigrams and bigrams, L2-normalized.
/// Text without any word token maps to the zero vector.
class HashedFeatures : public FeatureExtractor {
public:
    explicit HashedFeatures(std::uint64_t seed = kDefaultHashSeed, std::size_t dim = kFeatureDim)
        : seed_(seed), dim_(dim) {}

    FeatureVector extract(std::string_view nl_text) const override {
        FeatureVector v(dim_, 0.0);
        const auto words = word_tokens(nl_text);
        auto add = [&](const std::string& key) {
            const std::uint64_t h = seeded_fnv1a(key, seed_);
            v[static_cast<std::size_t>(h % dim_)] += (h >> 63) ? -1.0 : 1.0;
        };
        for (std::size_t i = 0; i < words.size(); ++i) {
            add("u:" + words[i]);
            if (i + 1 < words.size()) add("b:" + words[i] + " " + words[i + 1]);
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm > 0) {
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
        }
        return v;
    }

    std::size_t dim() const override { return dim_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::size_t dim_;
};

/// Precomputed vectors keyed by canonical NL, from JSON Lines {"nl", "vec"}.
class FileFeatures : public FeatureExtractor {
public:
    explicit FileFeatures(std::unordered_map<std::string, FeatureVector> table, std::size_t dim = kFeatureDim)
        : table_(std::move(table)), dim_(dim) {
        for (const auto& [k, v] : table_)
            if (v.size() != dim_)
                throw FormatError("feature vector for '" + k + "' has " + std::to_string(v.size()) +
                                  " entries, expected " + std::to_string(dim_));
    }

    static FileFeatures load(const std::filesystem::path& path, std::size_t dim = kFeatureDim) {
        std::unordered_map<std::string, FeatureVector> table;
        for (const auto& line : io::split_lines(io::read_text(path))) {
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            try {
                const auto j = nlohmann::json::parse(line);
                table[canonicalize_nl(j.at("nl").get<std::string>())] = j.at("vec").get<FeatureVector>();
            } catch (const nlohmann::json::exception& e) {
                throw FormatError(path.string() + ": " + e.what());
            }
        }
        return FileFeatures(std::move(table), dim);
    }

    FeatureVector extract(std::string_view nl_text) const override {
        const auto key = canonicalize_nl(nl_text);
        const auto it = table_.find(key);
        if (it == table_.end()) throw MissingFeature("no feature vector for '" + key + "'");
        return it->second;
    }

    std::size_t dim() const override { return dim_; }

private:
    std::unordered_map<std::string, FeatureVector> table_;
    std::size_t dim_;
};

inline std::shared_ptr<const FeatureExtractor> default_extractor() {
    static const auto kDefault = std::make_shared<const HashedFeatures>();
    return kDefault;
}

inline FeatureVector extract_features(std::string_view nl_text) { return default_extractor()->extract(nl_text); }

struct UniformPrior {};

struct TunedPrior {
    std::vector<double> theta;
    std::shared_ptr<const FeatureExtractor> features = default_extractor();
};

struct ExternalPrior {
    std::map<std::string, double> scores;  // canonical NL -> log-probability
};

struct PriorSpec {
    std::variant<UniformPrior, TunedPrior, ExternalPrior> kind;

    static PriorSpec uniform() { return {UniformPrior{}}; }
    static PriorSpec tuned(std::vector<double> theta,
                           std::shared_ptr<const FeatureExtractor> features = default_extractor()) {
        if (theta.size() != features->dim())
            throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, features have " +
                              std::to_string(features->dim()));
        return {TunedPrior{std::move(theta), std::move(features)}};
    }
    static PriorSpec external(std::map<std::string, double> scores) {
        std::map<std::string, double> canon;
        for (auto& [k, v] : scores) canon[canonicalize_nl(k)] = v;
        return {ExternalPrior{std::move(canon)}};
    }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double external_score(const ExternalPrior& p, std::string_view nl) {
    const auto key = canonicalize_nl(nl);
    const auto it = p.scores.find(key);
    if (it == p.scores.end()) throw MissingFeature("no external prior score for '" + key + "'");
    return it->second;
}

inline double prior_logweight(const PriorSpec& spec, const Hypothesis& h) {
    if (std::holds_alternative<UniformPrior>(spec.kind)) return 0.0;
    if (const auto* t = std::get_if<TunedPrior>(&spec.kind)) return dot(t->theta, t->features->extract(h.nl_text));
    return external_score(std::get<ExternalPrior>(spec.kind), h.nl_text);
}

/// Gradient of theta . phi(h) with respect to theta.
inline FeatureVector prior_logweight_grad_theta(const std::vector<double>&, const Hypothesis& h,
                                                const FeatureExtractor& features = *default_extractor()) {
    return features.extract(h.nl_text);
}

/// External score file: JSON Lines {"nl", "logp"}.
inline std::map<std::string, double> read_score_file(const std::filesystem::path& path) {
    std::map<std::string, double> scores;
    for (const auto& line : io::split_lines(io::read_text(path))) {
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            scores[canonicalize_nl(j.at("nl").get<std::string>())] = j.at("logp").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
    }
    return scores;
}

inline std::string score_file_text(const std::map<std::string, double>& scores) {
    std::string out;
    for (const auto& [nl, lp] : scores) out += nlohmann::json{{"nl", nl}, {"logp", lp}}.dump() + "\n";
    return out;
}

}  // namespace induct
