#pragma once

#include <algorithm>
#include <atomic>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "induct/fit/params.hpp"
#include "induct/numerics.hpp"

namespace induct::fit {

/// A differentiable model of a fixed list of data points. Loss and gradient
/// are sums over the requested subset; the gradient is taken with respect to
/// the unconstrained coordinates of ModelParams.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t size() const = 0;
    virtual double target(std::size_t datum) const = 0;
    virtual std::string datum_id(std::size_t datum) const = 0;
    virtual std::size_t feature_dim() const = 0;

    /// grad may be null when only the loss is needed.
    virtual double loss_and_grad(const ModelParams& p, std::span<const std::size_t> subset, ModelGrad* grad) const = 0;

    virtual std::vector<double> predict(const ModelParams& p, std::span<const std::size_t> subset) const = 0;

    std::vector<std::size_t> all_ids() const {
        std::vector<std::size_t> ids(size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
        return ids;
    }
};

inline unsigned default_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

/// Runs f(g) for g in [0, n) on up to `threads` workers. Each call writes
/// only to its own slot, so results do not depend on the worker count.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t g = 0; g < n; ++g) f(g);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t g = next++; g < n; g = next++) f(g);
    };
    std::vector<std::thread> pool;
    const unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    for (unsigned t = 1; t < k; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

/// Pairwise reduction of per-group partials in group order.
inline ModelGrad reduce_grads(std::span<const ModelGrad> parts, std::size_t dim) {
    if (parts.empty()) return ModelGrad(dim);
    if (parts.size() == 1) {
        ModelGrad g(dim);
        g += parts[0];
        return g;
    }
    const std::size_t half = parts.size() / 2;
    ModelGrad left = reduce_grads(parts.first(half), dim);
    left += reduce_grads(parts.subspan(half), dim);
    return left;
}

}  // namespace induct::fit
