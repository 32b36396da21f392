#pragma once

// Content-addressed store of raw completions. One JSON file per request
// fingerprint: {"fingerprint", "prompt", "params", "completions": [{"text", "logprob"}]}.

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "induct/errors.hpp"
#include "induct/io.hpp"

namespace induct::propose {

using json = nlohmann::json;

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

struct Completion {
    std::string text;
    std::optional<double> logprob;  // total log-probability of `text`, when reported

    bool operator==(const Completion&) const = default;
};

/// One request to a text model. kind "complete" samples continuations of
/// `prompt`; kind "score" asks for log p(continuation | prompt).
struct CompletionRequest {
    std::string kind = "complete";
    std::string model;
    std::string prompt;
    std::string continuation;
    double temperature = 1.0;
    int max_tokens = 256;
    std::vector<std::string> stop;
    bool logprobs = false;
    int sample = 0;  // index among repeated draws of the same prompt
    std::uint64_t seed = 0;

    json params() const {
        json p{{"kind", kind},         {"model", model}, {"temperature", temperature}, {"max_tokens", max_tokens},
               {"stop", stop},         {"logprobs", logprobs}, {"sample", sample},     {"seed", seed}};
        if (kind == "score") p["continuation"] = continuation;
        return p;
    }

    std::string fingerprint() const { return sha256_hex(json{{"prompt", prompt}, {"params", params()}}.dump()); }
};

inline json completions_to_json(const std::vector<Completion>& cs) {
    json arr = json::array();
    for (const auto& c : cs) arr.push_back({{"text", c.text}, {"logprob", c.logprob ? json(*c.logprob) : json()}});
    return arr;
}

inline std::vector<Completion> completions_from_json(const json& arr) {
    std::vector<Completion> out;
    for (const auto& c : arr) {
        Completion x;
        x.text = c.at("text").get<std::string>();
        if (c.contains("logprob") && !c["logprob"].is_null()) x.logprob = c["logprob"].get<double>();
        out.push_back(std::move(x));
    }
    return out;
}

/// Append-only. The first entry stored under a fingerprint wins; later inserts return it.
/// An empty directory path keeps entries in memory only.
class ReplayStore {
public:
    explicit ReplayStore(std::filesystem::path dir = {}) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path& directory() const { return dir_; }

    std::optional<std::vector<Completion>> lookup(const CompletionRequest& req) const {
        const auto fp = req.fingerprint();
        std::lock_guard lock(mu_);
        return lookup_locked(fp);
    }

    std::vector<Completion> insert(const CompletionRequest& req, const std::vector<Completion>& completions) {
        const auto fp = req.fingerprint();
        std::lock_guard lock(mu_);
        if (auto existing = lookup_locked(fp)) return *existing;
        if (!dir_.empty()) {
            const json entry{{"fingerprint", fp},
                             {"prompt", req.prompt},
                             {"params", req.params()},
                             {"completions", completions_to_json(completions)}};
            const auto tmp = dir_ / (fp + ".json.tmp");
            io::write_text(tmp, entry.dump(2) + "\n");
            std::filesystem::rename(tmp, dir_ / (fp + ".json"));
        }
        cache_[fp] = completions;
        return completions;
    }

    /// Fingerprints of every stored entry, sorted.
    std::vector<std::string> fingerprints() const {
        std::lock_guard lock(mu_);
        std::vector<std::string> out;
        for (const auto& [fp, _] : cache_) out.push_back(fp);
        if (!dir_.empty())
            for (const auto& e : std::filesystem::directory_iterator(dir_))
                if (e.path().extension() == ".json" && !cache_.count(e.path().stem().string()))
                    out.push_back(e.path().stem().string());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::optional<std::vector<Completion>> lookup_locked(const std::string& fp) const {
        if (auto it = cache_.find(fp); it != cache_.end()) return it->second;
        if (dir_.empty()) return std::nullopt;
        const auto path = dir_ / (fp + ".json");
        if (!std::filesystem::exists(path)) return std::nullopt;
        try {
            const auto j = json::parse(io::read_text(path));
            auto cs = completions_from_json(j.at("completions"));
            cache_[fp] = cs;
            return cs;
        } catch (const json::exception& e) {
            throw FormatError("replay entry " + path.string() + ": " + e.what());
        }
    }

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::vector<Completion>> cache_;
};

}  // namespace induct::propose
