#pragma once

#include "induct/fit/metrics.hpp"
#include "induct/fit/objective.hpp"
#include "induct/posterior.hpp"

namespace induct::fit {

/// Fixed raw probabilities passed through a learnable Platt transform.
class PlattObjective : public Objective {
public:
    PlattObjective(std::vector<double> raw, std::vector<double> targets, std::vector<std::string> ids)
        : raw_(std::move(raw)), targets_(std::move(targets)), ids_(std::move(ids)) {
        if (raw_.size() != targets_.size() || raw_.size() != ids_.size())
            throw ConfigError("raw predictions, targets and ids differ in length");
    }

    std::size_t size() const override { return raw_.size(); }
    double target(std::size_t d) const override { return targets_[d]; }
    std::string datum_id(std::size_t d) const override { return ids_[d]; }
    std::size_t feature_dim() const override { return 0; }
    double raw(std::size_t d) const { return raw_[d]; }

    double loss_and_grad(const ModelParams& p, std::span<const std::size_t> subset, ModelGrad* grad) const override {
        std::vector<double> losses;
        losses.reserve(subset.size());
        for (std::size_t d : subset) {
            const double g = logit(clamp_prob(raw_[d]));
            const double pred = logistic(p.platt_b + p.platt_a * g);
            losses.push_back(weighted_bce_loss(pred, targets_[d]));
            if (grad) {
                const double dy = weighted_bce_grad(pred, targets_[d]) * pred * (1.0 - pred);
                grad->platt_a += dy * g;
                grad->platt_b += dy;
            }
        }
        return pairwise_sum(losses);
    }

    std::vector<double> predict(const ModelParams& p, std::span<const std::size_t> subset) const override {
        std::vector<double> out;
        for (std::size_t d : subset) out.push_back(platt(raw_[d], p.platt_a, p.platt_b));
        return out;
    }

private:
    std::vector<double> raw_, targets_;
    std::vector<std::string> ids_;
};

}  // namespace induct::fit
