#pragma once

// Online logical-concept objective. For batch t of a learning curve the pool
// holds every hypothesis proposed at batches <= t, weighted by prior and the
// decayed likelihood of all trials from batches < t; each trial of batch t is
// predicted as (1 - eps) P + eps alpha with P the posterior agreement.

#include <array>
#include <functional>
#include <unordered_set>

#include "induct/concept_model.hpp"
#include "induct/fit/metrics.hpp"
#include "induct/fit/number_objective.hpp"
#include "induct/fit/objective.hpp"
#include "induct/likelihood.hpp"
#include "induct/prior.hpp"

namespace induct::fit {

enum class ShapeTarget { human_rate, ground_truth };

class ShapeObjective : public Objective {
public:
    struct Candidate {
        std::string nl;
        int batch = 0;
        FeatureVector phi;
        double base_prior = 0.0;
        std::vector<char> holds;  // per trial of the curve
    };

    struct Curve {
        LearningCurve source;
        std::vector<Candidate> pool;  // in proposal order
        std::vector<Trial> trials;
        std::vector<int> trial_batch;
        std::size_t unparsed = 0;
    };

    struct Datum {
        std::size_t curve;
        std::size_t trial;
        double target;
    };

    /// pools[c] lists the hypotheses for curve c; source_batch (0-based,
    /// absent = 0) decides when each one joins the pool.
    ShapeObjective(std::vector<LearningCurve> curves, const std::vector<std::vector<Hypothesis>>& pools,
                   PriorConfig prior, ShapeTarget target = ShapeTarget::human_rate,
                   unsigned threads = default_threads())
        : prior_(std::move(prior)), threads_(threads) {
        if (pools.size() != curves.size()) throw ConfigError("need one hypothesis pool per learning curve");
        for (std::size_t c = 0; c < curves.size(); ++c) {
            Curve cv;
            cv.source = std::move(curves[c]);
            for (std::size_t b = 0; b < cv.source.batches.size(); ++b)
                for (const auto& t : cv.source.batches[b]) {
                    cv.trials.push_back(t);
                    cv.trial_batch.push_back(static_cast<int>(b));
                }
            const bool have_rates = !cv.source.human_positive_rate.empty();
            if (target == ShapeTarget::human_rate && !have_rates)
                throw FormatError("learning curve " + cv.source.concept_id + " has no human response rates");
            std::unordered_set<std::string> seen;
            for (const auto& h : pools[c]) {
                if (!seen.insert(h.canonical()).second) continue;
                if (!h.is_parsed()) {
                    ++cv.unparsed;
                    continue;
                }
                Candidate cand;
                cand.nl = h.nl_text;
                cand.batch = h.source_batch.value_or(0);
                const auto& e = require_shape(h);
                for (const Trial& t : cv.trials) cand.holds.push_back(concept_holds(e, t) ? 1 : 0);
                if (prior_.kind == PriorKind::tuned) cand.phi = prior_.features->extract(h.nl_text);
                if (prior_.kind == PriorKind::external)
                    cand.base_prior = external_score(ExternalPrior{prior_.external_scores}, h.nl_text);
                cv.pool.push_back(std::move(cand));
            }
            curves_.push_back(std::move(cv));
        }
        for (std::size_t c = 0; c < curves_.size(); ++c) {
            const auto& cv = curves_[c];
            for (std::size_t j = 0; j < cv.trials.size(); ++j) {
                const double r = target == ShapeTarget::human_rate ? cv.source.human_positive_rate[j]
                                                                   : (cv.trials[j].label ? 1.0 : 0.0);
                groups_.push_back({c, static_cast<std::size_t>(cv.trial_batch[j])});
                data_.push_back({c, j, r});
            }
        }
        std::sort(groups_.begin(), groups_.end());
        groups_.erase(std::unique(groups_.begin(), groups_.end()), groups_.end());
        for (std::size_t d = 0; d < data_.size(); ++d)
            group_of_.push_back(static_cast<std::size_t>(
                std::lower_bound(groups_.begin(), groups_.end(),
                                 std::pair{data_[d].curve, static_cast<std::size_t>(curves_[data_[d].curve].trial_batch[data_[d].trial])}) -
                groups_.begin()));
    }

    std::size_t size() const override { return data_.size(); }
    double target(std::size_t d) const override { return data_[d].target; }
    std::string datum_id(std::size_t d) const override {
        return curves_[data_[d].curve].source.concept_id + ":" + std::to_string(data_[d].trial);
    }
    std::size_t feature_dim() const override { return prior_.features->dim(); }
    const std::vector<Curve>& curves() const { return curves_; }
    const Datum& datum(std::size_t d) const { return data_[d]; }

    double loss_and_grad(const ModelParams& p, std::span<const std::size_t> subset, ModelGrad* grad) const override {
        const auto by_group = split(subset);
        std::vector<double> losses(groups_.size(), 0.0);
        std::vector<ModelGrad> grads(grad ? groups_.size() : 0);
        parallel_for(groups_.size(), threads_, [&](std::size_t g) {
            if (by_group[g].empty()) return;
            if (grad) grads[g] = ModelGrad(feature_dim());
            losses[g] = eval_group(p, g, by_group[g], grad ? &grads[g] : nullptr, nullptr);
        });
        if (grad) *grad = reduce_grads(grads, feature_dim());
        return pairwise_sum(losses);
    }

    std::vector<double> predict(const ModelParams& p, std::span<const std::size_t> subset) const override {
        const auto by_group = split(subset);
        std::vector<std::vector<double>> preds(groups_.size());
        parallel_for(groups_.size(), threads_, [&](std::size_t g) {
            if (!by_group[g].empty()) eval_group(p, g, by_group[g], nullptr, &preds[g]);
        });
        std::vector<std::size_t> cursor(groups_.size(), 0);
        std::vector<double> out;
        for (std::size_t d : subset) {
            const std::size_t g = group_of_[d];
            out.push_back(preds[g][cursor[g]++]);
        }
        return out;
    }

private:
    // Response classes (label, holds): 0 = (1,1), 1 = (1,0), 2 = (0,1), 3 = (0,0).
    static int response_class(bool label, bool holds) { return label ? (holds ? 0 : 1) : (holds ? 2 : 3); }

    std::vector<std::vector<std::size_t>> split(std::span<const std::size_t> subset) const {
        std::vector<std::vector<std::size_t>> out(groups_.size());
        for (std::size_t d : subset) out[group_of_[d]].push_back(d);
        return out;
    }

    double eval_group(const ModelParams& p, std::size_t gi, const std::vector<std::size_t>& data, ModelGrad* g,
                      std::vector<double>* preds) const {
        const auto [ci, batch] = groups_[gi];
        const Curve& cv = curves_[ci];
        const double eps = p.epsilon, alpha = p.alpha, T = p.temperature;

        std::size_t K = 0;
        while (K < cv.trials.size() && cv.trial_batch[K] < static_cast<int>(batch)) ++K;

        const std::array<double, 4> q{1.0 - eps + eps * alpha, eps * alpha, eps * (1.0 - alpha), 1.0 - eps * alpha};
        const std::array<double, 4> dq_de{-1.0 + alpha, alpha, 1.0 - alpha, -alpha};
        const std::array<double, 4> dq_da{eps, eps, -eps, -eps};
        std::array<double, 4> logq;
        for (int k = 0; k < 4; ++k) logq[k] = std::log(q[k]);
        std::vector<double> omega(K), domega(K);
        for (std::size_t k = 1; k <= K; ++k) {
            omega[k - 1] = decay_weight(K, k, p.beta);
            domega[k - 1] = -std::log(static_cast<double>(1 + K - k)) * omega[k - 1];
        }

        std::vector<std::size_t> active;
        for (std::size_t s = 0; s < cv.pool.size(); ++s)
            if (cv.pool[s].batch <= static_cast<int>(batch)) active.push_back(s);
        const std::size_t S = active.size();
        std::vector<std::array<double, 4>> A(S), B(S);
        std::vector<double> l(S);
        for (std::size_t i = 0; i < S; ++i) {
            const auto& cand = cv.pool[active[i]];
            A[i].fill(0.0);
            B[i].fill(0.0);
            for (std::size_t k = 0; k < K; ++k) {
                const int cls = response_class(cv.trials[k].label, cand.holds[k] != 0);
                A[i][static_cast<std::size_t>(cls)] += omega[k];
                B[i][static_cast<std::size_t>(cls)] += domega[k];
            }
            double v = prior_.kind == PriorKind::tuned ? dot(p.theta, cand.phi) : cand.base_prior;
            for (std::size_t c = 0; c < 4; ++c) v += A[i][c] * logq[c];
            l[i] = v;
        }
        std::vector<double> z(S), w;
        for (std::size_t i = 0; i < S; ++i) z[i] = l[i] / T;
        const bool ok = S > 0 && softmax_into(z, w);

        std::vector<double> c(S, 0.0);
        double loss = 0.0;
        for (std::size_t d : data) {
            const std::size_t j = data_[d].trial;
            double P = 0.0;
            if (ok)
                for (std::size_t i = 0; i < S; ++i)
                    if (cv.pool[active[i]].holds[j]) P += w[i];
            const double pred = ok ? (1.0 - eps) * P + eps * alpha : eps * alpha;
            if (preds) preds->push_back(pred);
            const double r = data_[d].target;
            loss += weighted_bce_loss(pred, r);
            if (!g) continue;
            const double dpred = weighted_bce_grad(pred, r);
            if (dpred == 0.0) continue;
            g->epsilon += dpred * (ok ? alpha - P : alpha) * eps * (1.0 - eps);
            g->alpha += dpred * eps * alpha * (1.0 - alpha);
            if (!ok) continue;
            const double dP = dpred * (1.0 - eps);
            for (std::size_t i = 0; i < S; ++i) {
                const double ind = cv.pool[active[i]].holds[j] ? 1.0 : 0.0;
                c[i] += dP * w[i] * (ind - P);
            }
        }
        if (!g || !ok) return loss;

        double lmax = kNegInf;
        for (double v : l) lmax = std::max(lmax, v);
        for (std::size_t i = 0; i < S; ++i) {
            if (c[i] == 0.0) continue;
            const double dl = c[i] / T;
            const auto& cand = cv.pool[active[i]];
            if (prior_.kind == PriorKind::tuned)
                for (std::size_t k = 0; k < cand.phi.size(); ++k) g->theta[k] += dl * cand.phi[k];
            double de = 0.0, da = 0.0, db = 0.0;
            for (std::size_t cls = 0; cls < 4; ++cls) {
                de += A[i][cls] * dq_de[cls] / q[cls];
                da += A[i][cls] * dq_da[cls] / q[cls];
                db += B[i][cls] * logq[cls];
            }
            g->epsilon += dl * de * eps * (1.0 - eps);
            g->alpha += dl * da * alpha * (1.0 - alpha);
            g->beta += dl * db * p.beta;
            g->temperature += -dl * (l[i] - lmax);
        }
        return loss;
    }

    PriorConfig prior_;
    unsigned threads_;
    std::vector<Curve> curves_;
    std::vector<Datum> data_;
    std::vector<std::pair<std::size_t, std::size_t>> groups_;  // (curve, batch)
    std::vector<std::size_t> group_of_;
};

}  // namespace induct::fit
