#pragma once

// Live client for an OpenAI-compatible HTTP API. Chat completions serve
// sampling requests; scoring uses the legacy completions endpoint with echo.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include <cstdlib>
#include <string>

#include "induct/propose/client.hpp"

namespace induct::propose {

struct HttpClientConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4";
    std::string api_key_env = "INDUCT_API_KEY";
    int timeout_seconds = 120;
    RetryPolicy retry;
};

inline HttpClientConfig http_config_from_json(const json& j) {
    HttpClientConfig c;
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.retry.attempts = j.value("retry_attempts", c.retry.attempts);
    c.retry.initial_backoff = std::chrono::milliseconds(j.value("retry_initial_ms", 1000));
    return c;
}

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // without trailing slash
};

inline ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must start with http:// or https://: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl u{url.substr(0, path_start), path_start == std::string::npos ? "" : url.substr(path_start)};
    while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
    return u;
}

class HttpClient : public CompletionClient {
public:
    explicit HttpClient(HttpClientConfig cfg) : cfg_(std::move(cfg)), url_(parse_url(cfg_.endpoint)) {
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        if (!key || !*key) throw BackendUnavailable("environment variable " + cfg_.api_key_env + " is not set");
        key_ = key;
    }

    std::string model() const override { return cfg_.model; }

    std::vector<Completion> complete(const CompletionRequest& req) override {
        return with_retry(cfg_.retry, [&] { return req.kind == "score" ? score_once(req) : sample_once(req); },
                          real_sleep, req.seed ^ static_cast<std::uint64_t>(req.sample));
    }

private:
    json post(const std::string& route, const json& body) {
        httplib::Client cli(url_.origin);
        cli.set_connection_timeout(cfg_.timeout_seconds);
        cli.set_read_timeout(cfg_.timeout_seconds);
        cli.set_bearer_token_auth(key_);
        auto res = cli.Post(url_.path + route, body.dump(), "application/json");
        if (!res) throw TransientError("request to " + route + " failed: " + httplib::to_string(res.error()));
        if (res->status == 429 || res->status >= 500)
            throw TransientError("HTTP " + std::to_string(res->status) + " from " + route);
        if (res->status == 401 || res->status == 403)
            throw BackendUnavailable("HTTP " + std::to_string(res->status) + ": credentials rejected");
        if (res->status == 404 && route == "/completions")
            throw MissingLogprobSupport("endpoint has no completions route for scoring");
        if (res->status != 200)
            throw BackendUnavailable("HTTP " + std::to_string(res->status) + " from " + route + ": " + res->body);
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw BackendUnavailable("malformed response from " + route + ": " + e.what());
        }
    }

    std::vector<Completion> sample_once(const CompletionRequest& req) {
        json body{{"model", cfg_.model},
                  {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
                  {"temperature", req.temperature},
                  {"max_tokens", req.max_tokens},
                  {"n", 1},
                  {"seed", req.seed + static_cast<std::uint64_t>(req.sample)}};
        if (!req.stop.empty()) body["stop"] = req.stop;
        if (req.logprobs) body["logprobs"] = true;
        const json res = post("/chat/completions", body);
        std::vector<Completion> out;
        for (const auto& choice : res.value("choices", json::array())) {
            Completion c;
            c.text = choice.at("message").value("content", std::string());
            if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
                choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array()) {
                double total = 0.0;
                for (const auto& tok : choice["logprobs"]["content"]) total += tok.at("logprob").get<double>();
                c.logprob = total;
            }
            out.push_back(std::move(c));
        }
        if (out.empty()) throw BackendUnavailable("response had no choices");
        return out;
    }

    std::vector<Completion> score_once(const CompletionRequest& req) {
        const json body{{"model", cfg_.model}, {"prompt", req.prompt + req.continuation}, {"max_tokens", 0},
                        {"echo", true},        {"logprobs", 0},                          {"temperature", 0}};
        const json res = post("/completions", body);
        const auto& choices = res.value("choices", json::array());
        if (choices.empty() || !choices[0].contains("logprobs") || !choices[0]["logprobs"].is_object())
            throw MissingLogprobSupport("endpoint did not return prompt token log-probabilities");
        const auto& lp = choices[0]["logprobs"];
        const auto& tokens = lp.at("token_logprobs");
        const auto& offsets = lp.at("text_offset");
        double total = 0.0;
        for (std::size_t i = 0; i < tokens.size(); ++i)
            if (offsets[i].get<std::size_t>() >= req.prompt.size() && !tokens[i].is_null())
                total += tokens[i].get<double>();
        return {Completion{req.continuation, total}};
    }

    HttpClientConfig cfg_;
    ParsedUrl url_;
    std::string key_;
};

}  // namespace induct::propose
