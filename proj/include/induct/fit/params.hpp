#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "induct/errors.hpp"
#include "induct/numerics.hpp"

namespace induct::fit {

struct ModelParams {
    std::vector<double> theta;
    double epsilon = 0.5;
    double alpha = 0.5;
    double beta = 1.0;
    double temperature = 1.0;
    double platt_a = 1.0;
    double platt_b = 0.0;

    /// theta = 0, eps = alpha = 0.5, beta = T = 1, a = 1, b = 0.
    static ModelParams initial(std::size_t feature_dim) {
        ModelParams p;
        p.theta.assign(feature_dim, 0.0);
        return p;
    }

    bool operator==(const ModelParams&) const = default;
};

struct Trainable {
    bool theta = false;
    bool epsilon = false;
    bool alpha = false;
    bool beta = false;
    bool temperature = false;
    bool platt_a = false;
    bool platt_b = false;

    static Trainable none() { return {}; }
    static Trainable number(bool tuned_prior) { return {tuned_prior, true, false, false, true, true, true}; }
    static Trainable shape(bool tuned_prior) { return {tuned_prior, true, true, true, true, false, false}; }
    static Trainable platt_only() { return {false, false, false, false, false, true, true}; }
};

enum class Constraint { unit_interval, positive };

inline double reparam(double u, Constraint kind) {
    return kind == Constraint::unit_interval ? logistic(u) : std::exp(u);
}

inline double inverse_reparam(double v, Constraint kind) {
    return kind == Constraint::unit_interval ? logit(v) : std::log(v);
}

/// Gradient with respect to the unconstrained coordinates.
struct ModelGrad {
    std::vector<double> theta;
    double epsilon = 0.0;  // d/d logit(eps)
    double alpha = 0.0;    // d/d logit(alpha)
    double beta = 0.0;     // d/d log(beta)
    double temperature = 0.0;  // d/d log(T)
    double platt_a = 0.0;
    double platt_b = 0.0;

    explicit ModelGrad(std::size_t dim = 0) : theta(dim, 0.0) {}

    ModelGrad& operator+=(const ModelGrad& o) {
        if (theta.size() < o.theta.size()) theta.resize(o.theta.size(), 0.0);
        for (std::size_t i = 0; i < o.theta.size(); ++i) theta[i] += o.theta[i];
        epsilon += o.epsilon;
        alpha += o.alpha;
        beta += o.beta;
        temperature += o.temperature;
        platt_a += o.platt_a;
        platt_b += o.platt_b;
        return *this;
    }
};

/// Flattens the trainable unconstrained coordinates into one vector, in the
/// order theta, eps, alpha, beta, T, a, b.
class ParamLayout {
public:
    ParamLayout(Trainable flags, std::size_t feature_dim) : flags_(flags), dim_(feature_dim) {}

    std::size_t size() const {
        return (flags_.theta ? dim_ : 0) + flags_.epsilon + flags_.alpha + flags_.beta + flags_.temperature +
               flags_.platt_a + flags_.platt_b;
    }

    std::vector<double> pack(const ModelParams& p) const {
        std::vector<double> u;
        u.reserve(size());
        if (flags_.theta) {
            if (p.theta.size() != dim_) throw ConfigError("theta dimension does not match the feature dimension");
            u.insert(u.end(), p.theta.begin(), p.theta.end());
        }
        if (flags_.epsilon) u.push_back(inverse_reparam(p.epsilon, Constraint::unit_interval));
        if (flags_.alpha) u.push_back(inverse_reparam(p.alpha, Constraint::unit_interval));
        if (flags_.beta) u.push_back(inverse_reparam(p.beta, Constraint::positive));
        if (flags_.temperature) u.push_back(inverse_reparam(p.temperature, Constraint::positive));
        if (flags_.platt_a) u.push_back(p.platt_a);
        if (flags_.platt_b) u.push_back(p.platt_b);
        return u;
    }

    ModelParams unpack(const std::vector<double>& u, ModelParams base) const {
        std::size_t i = 0;
        if (flags_.theta) {
            base.theta.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(dim_));
            i = dim_;
        }
        if (flags_.epsilon) base.epsilon = reparam(u[i++], Constraint::unit_interval);
        if (flags_.alpha) base.alpha = reparam(u[i++], Constraint::unit_interval);
        if (flags_.beta) base.beta = reparam(u[i++], Constraint::positive);
        if (flags_.temperature) base.temperature = reparam(u[i++], Constraint::positive);
        if (flags_.platt_a) base.platt_a = u[i++];
        if (flags_.platt_b) base.platt_b = u[i++];
        return base;
    }

    std::vector<double> pack_grad(const ModelGrad& g) const {
        std::vector<double> out;
        out.reserve(size());
        if (flags_.theta) {
            for (std::size_t k = 0; k < dim_; ++k) out.push_back(k < g.theta.size() ? g.theta[k] : 0.0);
        }
        if (flags_.epsilon) out.push_back(g.epsilon);
        if (flags_.alpha) out.push_back(g.alpha);
        if (flags_.beta) out.push_back(g.beta);
        if (flags_.temperature) out.push_back(g.temperature);
        if (flags_.platt_a) out.push_back(g.platt_a);
        if (flags_.platt_b) out.push_back(g.platt_b);
        return out;
    }

    /// Name of coordinate i, e.g. "theta[12]" or "epsilon".
    std::string name(std::size_t i) const {
        if (flags_.theta) {
            if (i < dim_) return "theta[" + std::to_string(i) + "]";
            i -= dim_;
        }
        for (auto [on, label] : {std::pair{flags_.epsilon, "epsilon"}, {flags_.alpha, "alpha"}, {flags_.beta, "beta"},
                                 {flags_.temperature, "temperature"}, {flags_.platt_a, "platt_a"},
                                 {flags_.platt_b, "platt_b"}}) {
            if (!on) continue;
            if (i == 0) return label;
            --i;
        }
        return "?";
    }

    const Trainable& flags() const { return flags_; }

private:
    Trainable flags_;
    std::size_t dim_;
};

inline nlohmann::json params_to_json(const ModelParams& p) {
    return {{"theta", p.theta},           {"epsilon", p.epsilon}, {"alpha", p.alpha},     {"beta", p.beta},
            {"temperature", p.temperature}, {"platt_a", p.platt_a}, {"platt_b", p.platt_b}};
}

inline ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.theta = j.value("theta", std::vector<double>{});
    p.epsilon = j.value("epsilon", p.epsilon);
    p.alpha = j.value("alpha", p.alpha);
    p.beta = j.value("beta", p.beta);
    p.temperature = j.value("temperature", p.temperature);
    p.platt_a = j.value("platt_a", p.platt_a);
    p.platt_b = j.value("platt_b", p.platt_b);
    if (!(p.epsilon >= 0 && p.epsilon <= 1) || !(p.alpha >= 0 && p.alpha <= 1) || !(p.beta >= 0) ||
        !(p.temperature > 0))
        throw ConfigError("model parameters out of range");
    return p;
}

}  // namespace induct::fit
