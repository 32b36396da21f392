#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <random>
#include <thread>
#include <vector>

#include "induct/errors.hpp"
#include "induct/propose/replay.hpp"

namespace induct::propose {

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string model() const = 0;
    virtual std::vector<Completion> complete(const CompletionRequest& req) = 0;
};

/// Serves requests from a replay store only.
class ReplayClient : public CompletionClient {
public:
    ReplayClient(std::shared_ptr<ReplayStore> store, std::string model)
        : store_(std::move(store)), model_(std::move(model)) {}

    std::string model() const override { return model_; }

    std::vector<Completion> complete(const CompletionRequest& req) override {
        if (auto hit = store_->lookup(req)) return *hit;
        throw ReplayMiss("no replay entry for fingerprint " + req.fingerprint());
    }

private:
    std::shared_ptr<ReplayStore> store_;
    std::string model_;
};

/// Answers from the store when possible; otherwise asks `inner` and records the answer first.
class RecordingClient : public CompletionClient {
public:
    RecordingClient(std::shared_ptr<CompletionClient> inner, std::shared_ptr<ReplayStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}

    std::string model() const override { return inner_->model(); }

    std::vector<Completion> complete(const CompletionRequest& req) override {
        if (auto hit = store_->lookup(req)) return *hit;
        return store_->insert(req, inner_->complete(req));
    }

private:
    std::shared_ptr<CompletionClient> inner_;
    std::shared_ptr<ReplayStore> store_;
};

/// Client backed by a callback; useful for scripted proposals.
class FunctionClient : public CompletionClient {
public:
    using Fn = std::function<std::vector<Completion>(const CompletionRequest&)>;
    FunctionClient(std::string model, Fn fn) : model_(std::move(model)), fn_(std::move(fn)) {}

    std::string model() const override { return model_; }
    std::vector<Completion> complete(const CompletionRequest& req) override { return fn_(req); }

private:
    std::string model_;
    Fn fn_;
};

/// Raised by transports for failures worth retrying (connection errors, 429, 5xx).
class TransientError : public Error {
public:
    explicit TransientError(const std::string& message) : Error("TransientError", message) {}
};

struct RetryPolicy {
    int attempts = 5;
    std::chrono::milliseconds initial_backoff{1000};
    double multiplier = 2.0;
    double jitter = 0.25;  // fraction of the delay, drawn uniformly in [-jitter, +jitter]
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Calls `fn` until it succeeds or the attempts run out. TransientError is retried
/// with exponential jittered backoff; anything else propagates at once.
template <class F>
auto with_retry(const RetryPolicy& policy, F&& fn, const Sleeper& sleep = real_sleep, std::uint64_t seed = 0)
    -> decltype(fn()) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-policy.jitter, policy.jitter);
    double delay = static_cast<double>(policy.initial_backoff.count());
    std::string last;
    for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
        try {
            return fn();
        } catch (const TransientError& e) {
            last = e.what();
            if (attempt == policy.attempts) break;
            sleep(std::chrono::milliseconds(static_cast<long long>(delay * (1.0 + jitter(rng)))));
            delay *= policy.multiplier;
        }
    }
    throw BackendUnavailable("giving up after " + std::to_string(policy.attempts) + " attempts: " + last);
}

/// Runs every request with up to `concurrency` in flight; results keep request order.
inline std::vector<std::vector<Completion>> complete_all(CompletionClient& client,
                                                         const std::vector<CompletionRequest>& reqs,
                                                         int concurrency = 1) {
    std::vector<std::vector<Completion>> out(reqs.size());
    const int workers = std::max(1, std::min<int>(concurrency, static_cast<int>(reqs.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < reqs.size(); ++i) out[i] = client.complete(reqs[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(reqs.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < reqs.size(); i = next++) {
                try {
                    out[i] = client.complete(reqs[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace induct::propose
