#pragma once

#include <cstdint>

#include "chargedpoint/param_set.hpp"
#include "chargedpoint/rng.hpp"

namespace chargedpoint {

// Settings for the charged-point repulsion penalty. The penalty places a
// slowly trailing copy of the parameters ("the charged point") behind the
// optimizer and adds a decaying inverse-distance term to the loss, so flat
// critical regions stop being fixed points while long-run behavior is
// untouched.
struct CpnConfig {
    double beta = 1.0;         // per-step exponential decay rate, >= 0
    double lambda = 0.1;       // penalty weight in the total loss, >= 0
    double p = 1.0;            // norm order for group distances, >= 1
    double alpha = 0.1;        // trailing-point EMA coefficient, in (0, 1)
    double eps_sigma = 1e-4;   // std-dev of the init offset noise, > 0
    double denom_floor = 1e-12;  // lower bound on the distance sum, > 0
};

// Trailing-point state. `decay` caches e^{-beta*t} and is advanced by one
// multiplication with `decay_step` = e^{-beta} per merge, which keeps the
// per-step penalty ratio exactly e^{-beta} instead of re-rounding the
// exponential at every t.
struct CpnState {
    CpnConfig config;
    ParamSet trailing;
    std::int64_t t = 1;
    double decay = 0.0;
    double decay_step = 0.0;
};

// Validates the config and offsets the trailing point from `params` by
// i.i.d. N(0, eps_sigma^2) noise so the initial distance is nonzero with
// probability 1. t starts at 1.
CpnState cpn_init(const ParamSet& params, const CpnConfig& config, SeededRng& rng);

// D = sum over groups of || W_i - trailing_i ||_p. Summing per-group norms
// is not the norm of the concatenation (they agree only at p = 1).
double cpn_distance_sum(const CpnState& state, const ParamSet& params);

// R_t = e^{-beta*t} / max(D, denom_floor).
double cpn_penalty(const CpnState& state, const ParamSet& params);

// Analytic gradient of R_t with respect to the live parameters; the
// trailing point is a constant. Entry k of group i receives
//   -e^{-beta*t} * sign(d_k) |d_k|^{p-1} / (||d_i||_p^{p-1} * D^2)
// with d = W - trailing, sign(0) = 0, and a zero contribution from any
// group whose distance is zero. If D <= denom_floor the whole gradient is
// zero (the penalty is flat at its cap).
ParamSet cpn_penalty_grad(const CpnState& state, const ParamSet& params);

// base_grad + lambda * cpn_penalty_grad. lambda = 0 returns base_grad
// unchanged so a disabled penalty is bitwise-free.
ParamSet cpn_total_grad(const CpnState& state, const ParamSet& params,
                        const ParamSet& base_grad);

// trailing <- alpha * trailing + (1 - alpha) * params; t <- t + 1. Call
// after the optimizer step with the pre-step parameter values.
void cpn_merge_update(CpnState& state, const ParamSet& params);

}  // namespace chargedpoint
