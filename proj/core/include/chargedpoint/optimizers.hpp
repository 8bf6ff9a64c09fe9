#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "chargedpoint/param_set.hpp"

namespace chargedpoint {

// Plain and momentum SGD with optional Nesterov lookahead and inverse-time
// learning-rate decay. The effective rate at step `iter` (counted from 0)
// is lr / (1 + decay * iter).
struct SgdState {
    double lr = 0.01;
    double momentum = 0.0;
    bool nesterov = false;
    double decay = 0.0;
    ParamSet velocity;
};

SgdState sgd_init(const ParamSet& params, double lr, double momentum = 0.0,
                  bool nesterov = false, double decay = 0.0);
void sgd_step(SgdState& state, ParamSet& params, const ParamSet& grad, std::int64_t iter);

// AdaGrad with the accumulator seeded at zero. eps sits inside the square
// root (params -= lr * g / sqrt(acc + eps)), which bounds the first-step
// magnitude by lr * |g| / sqrt(eps) instead of normalizing tiny gradients
// up to a full lr-sized step.
struct AdaGradState {
    double lr = 0.01;
    double eps = 1e-4;
    ParamSet accumulator;
};

AdaGradState adagrad_init(const ParamSet& params, double lr = 0.01, double eps = 1e-4);
void adagrad_step(AdaGradState& state, ParamSet& params, const ParamSet& grad);

// AdaDelta: RMS-ratio steps with decaying accumulators of squared gradients
// and squared updates. lr is a final scale on the applied delta (1.0 leaves
// the method parameter-free as published).
struct AdaDeltaState {
    double lr = 1.0;
    double rho = 0.95;
    double eps = 1e-6;
    ParamSet grad_acc;
    ParamSet update_acc;
};

AdaDeltaState adadelta_init(const ParamSet& params, double lr = 1.0, double rho = 0.95,
                            double eps = 1e-6);
void adadelta_step(AdaDeltaState& state, ParamSet& params, const ParamSet& grad);

// Adam with bias-corrected first and second moments.
struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    ParamSet m;
    ParamSet v;
    std::int64_t step_count = 0;
};

AdamState adam_init(const ParamSet& params, double lr = 0.001, double beta1 = 0.9,
                    double beta2 = 0.999, double eps = 1e-8);
void adam_step(AdamState& state, ParamSet& params, const ParamSet& grad);

// The five update rules the experiment harness selects between. Sgd and
// SgdAccelerated share SgdState (the latter adds momentum 0.9 + Nesterov).
enum class OptimizerKind { Sgd, SgdAccelerated, AdaGrad, AdaDelta, Adam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

// Type-erased wrapper owning one optimizer state plus the step counter fed
// to the SGD decay schedule. One instance drives one training run.
class Optimizer {
public:
    explicit Optimizer(SgdState state);
    explicit Optimizer(AdaGradState state);
    explicit Optimizer(AdaDeltaState state);
    explicit Optimizer(AdamState state);

    void step(ParamSet& params, const ParamSet& grad);
    std::int64_t steps_taken() const { return iter_; }

private:
    std::variant<SgdState, AdaGradState, AdaDeltaState, AdamState> state_;
    std::int64_t iter_ = 0;
};

}  // namespace chargedpoint
