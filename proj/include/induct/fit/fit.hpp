#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "induct/errors.hpp"
#include "induct/fit/adam.hpp"
#include "induct/fit/metrics.hpp"
#include "induct/fit/objective.hpp"
#include "induct/fit/params.hpp"

namespace induct::fit {

struct FitConfig {
    AdamConfig adam;
    int epochs = 1000;
    std::uint64_t seed = 0;
    Trainable trainable;

    static FitConfig number(bool tuned_prior) {
        FitConfig c;
        c.epochs = 1000;
        c.trainable = Trainable::number(tuned_prior);
        return c;
    }
    static FitConfig shape(bool tuned_prior) {
        FitConfig c;
        c.epochs = 100;
        c.trainable = Trainable::shape(tuned_prior);
        return c;
    }
};

struct HoldoutPrediction {
    std::size_t datum;
    std::string id;
    double prediction;
    double target;
};

struct FitResult {
    ModelParams params;
    std::vector<double> loss_trace;
    std::vector<HoldoutPrediction> holdout;
};

inline void require_finite(double loss, const std::vector<double>& g, const ParamLayout& layout) {
    if (!std::isfinite(loss)) throw NonFinite("loss is not finite");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!std::isfinite(g[i])) throw NonFinite("gradient of " + layout.name(i) + " is not finite");
}

/// Loss and packed gradient at unconstrained point u.
inline double packed_loss_and_grad(const Objective& obj, const ParamLayout& layout, const ModelParams& base,
                                   const std::vector<double>& u, std::span<const std::size_t> subset,
                                   std::vector<double>* grad) {
    const ModelParams p = layout.unpack(u, base);
    ModelGrad g(obj.feature_dim());
    const double loss = obj.loss_and_grad(p, subset, grad ? &g : nullptr);
    if (grad) *grad = layout.pack_grad(g);
    return loss;
}

/// Full-batch Adam on the trainable coordinates over `train`; predictions for
/// `holdout` come from the final parameters. `loss_trace[e]` is the training
/// loss evaluated before update e.
inline FitResult fit_params(const FitConfig& cfg, const Objective& obj, const ModelParams& init,
                            std::span<const std::size_t> train, std::span<const std::size_t> holdout = {}) {
    if (cfg.epochs < 0) throw ConfigError("epochs must be non-negative");
    if (!(cfg.adam.learning_rate > 0)) throw ConfigError("learning rate must be positive");
    const ParamLayout layout(cfg.trainable, obj.feature_dim());
    FitResult res;
    std::vector<double> u = layout.pack(init);
    if (layout.size() > 0 && !train.empty()) {
        Adam adam(cfg.adam, u.size());
        std::vector<double> g;
        for (int e = 0; e < cfg.epochs; ++e) {
            const double loss = packed_loss_and_grad(obj, layout, init, u, train, &g);
            require_finite(loss, g, layout);
            res.loss_trace.push_back(loss);
            adam.step(u, g);
        }
    }
    res.params = layout.size() > 0 ? layout.unpack(u, init) : init;
    if (!holdout.empty()) {
        const auto preds = obj.predict(res.params, holdout);
        for (std::size_t i = 0; i < holdout.size(); ++i)
            res.holdout.push_back({holdout[i], obj.datum_id(holdout[i]), preds[i], obj.target(holdout[i])});
    }
    return res;
}

struct CrossValidation {
    std::vector<FitResult> folds;
    std::vector<double> prediction;  // per datum, from the fold that held it out
    std::vector<std::size_t> fold_of;  // per datum
    std::vector<double> target;
    double r2 = 0.0;
    double mae = 0.0;
};

inline CrossValidation cross_validate(const FitConfig& cfg, const Objective& obj, const ModelParams& init,
                                      std::size_t k = 10) {
    CrossValidation cv;
    const auto split = kfold_split(obj.all_ids(), k, cfg.seed);
    cv.prediction.assign(obj.size(), 0.0);
    cv.fold_of.assign(obj.size(), 0);
    for (std::size_t d = 0; d < obj.size(); ++d) cv.target.push_back(obj.target(d));
    for (std::size_t f = 0; f < split.size(); ++f) {
        cv.folds.push_back(fit_params(cfg, obj, init, split[f].train, split[f].holdout));
        for (const auto& h : cv.folds.back().holdout) {
            cv.prediction[h.datum] = h.prediction;
            cv.fold_of[h.datum] = f;
        }
    }
    cv.r2 = r_squared(cv.prediction, cv.target);
    cv.mae = mean_absolute_error(cv.prediction, cv.target);
    return cv;
}

struct GradientCheck {
    double max_rel_error = 0.0;
    std::size_t worst = 0;
    std::string worst_name;
    std::vector<double> analytic, numeric;
    bool passed = true;
};

/// Central differences with step h on every trainable coordinate. A
/// coordinate passes when |a - n| <= rel * max(|a|, |n|) or |a - n| <= abs_floor.
inline GradientCheck check_gradient(const Objective& obj, const ModelParams& p, const Trainable& flags,
                                    std::span<const std::size_t> subset, double h = 1e-4, double rel = 1e-3,
                                    double abs_floor = 1e-6) {
    const ParamLayout layout(flags, obj.feature_dim());
    std::vector<double> u = layout.pack(p);
    GradientCheck out;
    packed_loss_and_grad(obj, layout, p, u, subset, &out.analytic);
    out.numeric.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto up = u, down = u;
        up[i] += h;
        down[i] -= h;
        out.numeric[i] = (packed_loss_and_grad(obj, layout, p, up, subset, nullptr) -
                          packed_loss_and_grad(obj, layout, p, down, subset, nullptr)) /
                         (2 * h);
        const double a = out.analytic[i], n = out.numeric[i];
        const double diff = std::abs(a - n);
        const double scale = std::max(std::abs(a), std::abs(n));
        const double r = scale > 0 ? diff / scale : 0.0;
        if (diff <= abs_floor) continue;
        if (diff > rel * scale) out.passed = false;
        if (r > out.max_rel_error) {
            out.max_rel_error = r;
            out.worst = i;
            out.worst_name = layout.name(i);
        }
    }
    return out;
}

inline nlohmann::json fit_result_to_json(const FitResult& r) {
    nlohmann::json hold = nlohmann::json::array();
    for (const auto& h : r.holdout) hold.push_back({{"id", h.id}, {"prediction", h.prediction}, {"target", h.target}});
    return {{"params", params_to_json(r.params)}, {"loss_trace", r.loss_trace}, {"holdout", hold}};
}

inline std::string loss_trace_csv(const std::vector<double>& trace) {
    std::string out = "epoch,loss\n";
    char buf[64];
    for (std::size_t e = 0; e < trace.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, trace[e]);
        out += buf;
    }
    return out;
}

}  // namespace induct::fit
