#pragma once

// Number Game objective: per example set, a deduplicated pool weighted by
// prior and likelihood at temperature T, a posterior predictive for each
// test number, and a Platt transform, scored by BCE against human ratings.

#include <bitset>
#include <functional>
#include <map>
#include <memory>
#include <unordered_set>

#include "induct/concept_model.hpp"
#include "induct/fit/metrics.hpp"
#include "induct/fit/objective.hpp"
#include "induct/likelihood.hpp"
#include "induct/prior.hpp"

namespace induct::fit {

enum class PriorKind { uniform, tuned, external };
enum class Weighting { dedup, importance };

struct PriorConfig {
    PriorKind kind = PriorKind::uniform;
    std::shared_ptr<const FeatureExtractor> features = default_extractor();
    std::map<std::string, double> external_scores;  // canonical NL -> log p

    static PriorConfig of(PriorKind k) {
        PriorConfig c;
        c.kind = k;
        return c;
    }
};

using NumberPoolProvider = std::function<std::vector<Hypothesis>(const std::string& set_id, const NumberExampleSet&)>;

class NumberObjective : public Objective {
public:
    struct Candidate {
        std::string nl;
        FeatureVector phi;
        double base_prior = 0.0;
        double log_q = 0.0;  // subtracted under importance weighting
        int size = 0;
        int n_in = 0;
        int n_out = 0;
        std::bitset<101> members;
    };

    struct Task {
        std::string set_id;
        NumberExampleSet examples;
        std::vector<Candidate> pool;
        std::size_t unparsed = 0;
        std::size_t duplicates = 0;
        std::vector<std::size_t> data;
    };

    struct Datum {
        std::size_t task;
        int x_test;
        double target;
    };

    NumberObjective(const std::vector<HumanNumberJudgment>& judgments, const NumberPoolProvider& pools,
                    PriorConfig prior, unsigned threads = default_threads(), Weighting weighting = Weighting::dedup)
        : prior_(std::move(prior)), threads_(threads), weighting_(weighting) {
        std::map<std::string, std::size_t> task_of;
        for (const auto& j : judgments) {
            const std::string key = j.set_id + "|" + j.example_set.to_prompt_string();
            auto it = task_of.find(key);
            if (it == task_of.end()) {
                it = task_of.emplace(key, tasks_.size()).first;
                tasks_.push_back(build_task(j.set_id, j.example_set, pools(j.set_id, j.example_set)));
            }
            tasks_[it->second].data.push_back(data_.size());
            data_.push_back({it->second, j.test_number, j.mean_rating});
            ids_.push_back(j.set_id + ":" + std::to_string(j.test_number));
        }
    }

    std::size_t size() const override { return data_.size(); }
    double target(std::size_t d) const override { return data_[d].target; }
    std::string datum_id(std::size_t d) const override { return ids_[d]; }
    std::size_t feature_dim() const override { return prior_.features->dim(); }
    const std::vector<Task>& tasks() const { return tasks_; }
    const Datum& datum(std::size_t d) const { return data_[d]; }
    const PriorConfig& prior() const { return prior_; }

    double loss_and_grad(const ModelParams& p, std::span<const std::size_t> subset, ModelGrad* grad) const override {
        const auto groups = group(subset);
        std::vector<double> losses(tasks_.size(), 0.0);
        std::vector<ModelGrad> grads(grad ? tasks_.size() : 0);
        parallel_for(tasks_.size(), threads_, [&](std::size_t t) {
            if (groups[t].empty()) return;
            if (grad) grads[t] = ModelGrad(feature_dim());
            losses[t] = eval_task(p, t, groups[t], grad ? &grads[t] : nullptr, nullptr);
        });
        if (grad) *grad = reduce_grads(grads, feature_dim());
        return pairwise_sum(losses);
    }

    std::vector<double> predict(const ModelParams& p, std::span<const std::size_t> subset) const override {
        const auto groups = group(subset);
        std::vector<std::vector<double>> preds(tasks_.size());
        parallel_for(tasks_.size(), threads_, [&](std::size_t t) {
            if (!groups[t].empty()) eval_task(p, t, groups[t], nullptr, &preds[t]);
        });
        std::vector<double> out(subset.size());
        const auto pos = positions(subset);
        for (std::size_t i = 0; i < subset.size(); ++i) {
            const std::size_t t = data_[subset[i]].task;
            out[i] = preds[t][pos[i]];
        }
        return out;
    }

    /// Normalized weights of task t's pool.
    std::vector<double> weights(const ModelParams& p, std::size_t t) const {
        std::vector<double> l, w;
        logits(p, tasks_[t], l);
        std::vector<double> z(l.size());
        for (std::size_t s = 0; s < l.size(); ++s) z[s] = l[s] / p.temperature;
        softmax_into(z, w);
        return w;
    }

private:
    Task build_task(const std::string& set_id, const NumberExampleSet& X, const std::vector<Hypothesis>& pool) const {
        Task task{set_id, X, {}, 0, 0, {}};
        std::unordered_set<std::string> seen;
        for (const auto& h : pool) {
            if (weighting_ == Weighting::importance) {
                if (!h.proposal_logprob)
                    throw MissingLogQ("hypothesis '" + h.nl_text + "' has no proposal log-probability");
            } else if (!seen.insert(h.canonical()).second) {
                ++task.duplicates;
                continue;
            }
            if (!h.is_parsed()) {
                ++task.unparsed;
                continue;
            }
            Candidate c;
            c.nl = h.nl_text;
            if (weighting_ == Weighting::importance) c.log_q = *h.proposal_logprob;
            const auto ext = cached_extension(require_number(h));
            c.size = ext->size();
            for (int x : ext->members()) c.members.set(static_cast<std::size_t>(x));
            for (int x : X.values()) (ext->contains(x) ? c.n_in : c.n_out) += 1;
            if (prior_.kind == PriorKind::tuned) c.phi = prior_.features->extract(h.nl_text);
            if (prior_.kind == PriorKind::external) c.base_prior = external_score(ExternalPrior{prior_.external_scores}, h.nl_text);
            task.pool.push_back(std::move(c));
        }
        return task;
    }

    std::vector<std::vector<std::size_t>> group(std::span<const std::size_t> subset) const {
        std::vector<std::vector<std::size_t>> g(tasks_.size());
        for (std::size_t d : subset) g[data_[d].task].push_back(d);
        return g;
    }

    std::vector<std::size_t> positions(std::span<const std::size_t> subset) const {
        std::vector<std::size_t> count(tasks_.size(), 0), pos(subset.size());
        for (std::size_t i = 0; i < subset.size(); ++i) pos[i] = count[data_[subset[i]].task]++;
        return pos;
    }

    /// log[(1-eps) 1[x in C]/|C| + eps/100] for x inside and outside C.
    static double log_in(const Candidate& c, double eps) {
        return std::log((1.0 - eps) / c.size + eps / kNumberDomainSize);
    }

    void logits(const ModelParams& p, const Task& task, std::vector<double>& l) const {
        const double log_out = std::log(p.epsilon / kNumberDomainSize);
        l.resize(task.pool.size());
        for (std::size_t s = 0; s < task.pool.size(); ++s) {
            const auto& c = task.pool[s];
            double v = c.n_out * log_out + (c.n_in ? c.n_in * log_in(c, p.epsilon) : 0.0);
            if (prior_.kind == PriorKind::tuned) v += dot(p.theta, c.phi);
            else v += c.base_prior;
            l[s] = v - c.log_q;
        }
    }

    double eval_task(const ModelParams& p, std::size_t t, const std::vector<std::size_t>& data, ModelGrad* g,
                     std::vector<double>* preds) const {
        const Task& task = tasks_[t];
        const std::size_t S = task.pool.size();
        std::vector<double> l, w;
        logits(p, task, l);
        std::vector<double> z(S);
        for (std::size_t s = 0; s < S; ++s) z[s] = l[s] / p.temperature;
        const bool ok = S > 0 && softmax_into(z, w);
        std::vector<double> c(S, 0.0);
        double loss = 0.0;
        for (std::size_t d : data) {
            const int x = data_[d].x_test;
            double m = 0.0;
            if (ok)
                for (std::size_t s = 0; s < S; ++s)
                    if (task.pool[s].members.test(static_cast<std::size_t>(x))) m += w[s];
            const double mc = std::clamp(m, kClampDelta, 1.0 - kClampDelta);
            const double gx = logit(mc);
            const double pred = logistic(p.platt_b + p.platt_a * gx);
            if (preds) preds->push_back(pred);
            const double r = data_[d].target;
            loss += weighted_bce_loss(pred, r);
            if (!g) continue;
            const double dy = weighted_bce_grad(pred, r) * pred * (1.0 - pred);
            g->platt_b += dy;
            g->platt_a += dy * gx;
            if (!ok || m <= kClampDelta || m >= 1.0 - kClampDelta) continue;
            const double dm = dy * p.platt_a / (m * (1.0 - m));
            for (std::size_t s = 0; s < S; ++s) {
                const double ind = task.pool[s].members.test(static_cast<std::size_t>(x)) ? 1.0 : 0.0;
                c[s] += dm * w[s] * (ind - m);
            }
        }
        if (g && ok) backprop_logits(p, task, l, c, *g);
        return loss;
    }

    /// c[s] = dLoss/dz_s where z_s = l_s / T.
    void backprop_logits(const ModelParams& p, const Task& task, const std::vector<double>& l,
                         const std::vector<double>& c, ModelGrad& g) const {
        const double T = p.temperature, eps = p.epsilon;
        double lmax = kNegInf;
        for (double v : l) lmax = std::max(lmax, v);
        for (std::size_t s = 0; s < task.pool.size(); ++s) {
            if (c[s] == 0.0) continue;
            const auto& cand = task.pool[s];
            const double dl = c[s] / T;
            if (prior_.kind == PriorKind::tuned)
                for (std::size_t k = 0; k < cand.phi.size(); ++k) g.theta[k] += dl * cand.phi[k];
            // d l_s / d logit(eps)
            double de = cand.n_out * (1.0 - eps);
            if (cand.n_in) {
                const double mix = (1.0 - eps) / cand.size + eps / kNumberDomainSize;
                de += cand.n_in * eps * (1.0 - eps) * (1.0 / kNumberDomainSize - 1.0 / cand.size) / mix;
            }
            g.epsilon += dl * de;
            g.temperature += -dl * (l[s] - lmax);
        }
    }

    PriorConfig prior_;
    unsigned threads_;
    Weighting weighting_ = Weighting::dedup;
    std::vector<Task> tasks_;
    std::vector<Datum> data_;
    std::vector<std::string> ids_;
};

}  // namespace induct::fit
