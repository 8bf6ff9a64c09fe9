#include "chargedpoint/optimizers.hpp"

#include <cmath>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) {
        throw InvalidParameterError(std::string(what) + " must be > 0");
    }
}

void require_unit_interval(double v, const char* what) {
    if (!(v >= 0.0) || v >= 1.0) {
        throw InvalidParameterError(std::string(what) + " must lie in [0, 1)");
    }
}

}  // namespace

SgdState sgd_init(const ParamSet& params, double lr, double momentum, bool nesterov,
                  double decay) {
    require_positive(lr, "lr");
    require_unit_interval(momentum, "momentum");
    if (!(decay >= 0.0)) {
        throw InvalidParameterError("decay must be >= 0");
    }
    return SgdState{lr, momentum, nesterov, decay, zeros_like(params)};
}

void sgd_step(SgdState& state, ParamSet& params, const ParamSet& grad, std::int64_t iter) {
    require_conformable(params, grad);
    require_conformable(params, state.velocity);
    const double eta = state.lr / (1.0 + state.decay * static_cast<double>(iter));
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        auto& w = params.groups[gi].values;
        auto& v = state.velocity.groups[gi].values;
        const auto& g = grad.groups[gi].values;
        for (std::size_t k = 0; k < w.size(); ++k) {
            v[k] = state.momentum * v[k] - eta * g[k];
            if (state.nesterov) {
                w[k] += state.momentum * v[k] - eta * g[k];
            } else {
                w[k] += v[k];
            }
        }
    }
}

AdaGradState adagrad_init(const ParamSet& params, double lr, double eps) {
    require_positive(lr, "lr");
    require_positive(eps, "eps");
    return AdaGradState{lr, eps, zeros_like(params)};
}

void adagrad_step(AdaGradState& state, ParamSet& params, const ParamSet& grad) {
    require_conformable(params, grad);
    require_conformable(params, state.accumulator);
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        auto& w = params.groups[gi].values;
        auto& acc = state.accumulator.groups[gi].values;
        const auto& g = grad.groups[gi].values;
        for (std::size_t k = 0; k < w.size(); ++k) {
            acc[k] += g[k] * g[k];
            w[k] -= state.lr * g[k] / std::sqrt(acc[k] + state.eps);
        }
    }
}

AdaDeltaState adadelta_init(const ParamSet& params, double lr, double rho, double eps) {
    require_positive(lr, "lr");
    require_positive(eps, "eps");
    if (!(rho > 0.0) || rho >= 1.0) {
        throw InvalidParameterError("rho must lie in (0, 1)");
    }
    return AdaDeltaState{lr, rho, eps, zeros_like(params), zeros_like(params)};
}

void adadelta_step(AdaDeltaState& state, ParamSet& params, const ParamSet& grad) {
    require_conformable(params, grad);
    require_conformable(params, state.grad_acc);
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        auto& w = params.groups[gi].values;
        auto& ga = state.grad_acc.groups[gi].values;
        auto& ua = state.update_acc.groups[gi].values;
        const auto& g = grad.groups[gi].values;
        for (std::size_t k = 0; k < w.size(); ++k) {
            ga[k] = state.rho * ga[k] + (1.0 - state.rho) * g[k] * g[k];
            const double delta =
                -(std::sqrt(ua[k] + state.eps) / std::sqrt(ga[k] + state.eps)) * g[k];
            ua[k] = state.rho * ua[k] + (1.0 - state.rho) * delta * delta;
            w[k] += state.lr * delta;
        }
    }
}

AdamState adam_init(const ParamSet& params, double lr, double beta1, double beta2, double eps) {
    require_positive(lr, "lr");
    require_positive(eps, "eps");
    if (!(beta1 > 0.0) || beta1 >= 1.0 || !(beta2 > 0.0) || beta2 >= 1.0) {
        throw InvalidParameterError("beta1 and beta2 must lie in (0, 1)");
    }
    return AdamState{lr, beta1, beta2, eps, zeros_like(params), zeros_like(params), 0};
}

void adam_step(AdamState& state, ParamSet& params, const ParamSet& grad) {
    require_conformable(params, grad);
    require_conformable(params, state.m);
    const auto t = static_cast<double>(++state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        auto& w = params.groups[gi].values;
        auto& m = state.m.groups[gi].values;
        auto& v = state.v.groups[gi].values;
        const auto& g = grad.groups[gi].values;
        for (std::size_t k = 0; k < w.size(); ++k) {
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
            const double m_hat = m[k] / bc1;
            const double v_hat = v[k] / bc2;
            w[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    }
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Sgd: return "sgd";
        case OptimizerKind::SgdAccelerated: return "sgd-accelerated";
        case OptimizerKind::AdaGrad: return "adagrad";
        case OptimizerKind::AdaDelta: return "adadelta";
        case OptimizerKind::Adam: return "adam";
    }
    throw InvalidParameterError("unknown optimizer kind");
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
    if (name == "sgd") return OptimizerKind::Sgd;
    if (name == "sgd-accelerated") return OptimizerKind::SgdAccelerated;
    if (name == "adagrad") return OptimizerKind::AdaGrad;
    if (name == "adadelta") return OptimizerKind::AdaDelta;
    if (name == "adam") return OptimizerKind::Adam;
    throw InvalidParameterError("unknown optimizer name '" + name + "'");
}

Optimizer::Optimizer(SgdState state) : state_(std::move(state)) {}
Optimizer::Optimizer(AdaGradState state) : state_(std::move(state)) {}
Optimizer::Optimizer(AdaDeltaState state) : state_(std::move(state)) {}
Optimizer::Optimizer(AdamState state) : state_(std::move(state)) {}

void Optimizer::step(ParamSet& params, const ParamSet& grad) {
    std::visit(
        [&](auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SgdState>) {
                sgd_step(s, params, grad, iter_);
            } else if constexpr (std::is_same_v<S, AdaGradState>) {
                adagrad_step(s, params, grad);
            } else if constexpr (std::is_same_v<S, AdaDeltaState>) {
                adadelta_step(s, params, grad);
            } else {
                adam_step(s, params, grad);
            }
        },
        state_);
    ++iter_;
}

}  // namespace chargedpoint
