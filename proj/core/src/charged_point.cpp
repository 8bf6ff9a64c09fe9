#include "chargedpoint/charged_point.hpp"

#include <cmath>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

namespace {

void validate_config(const CpnConfig& c) {
    if (!(c.beta >= 0.0)) throw InvalidParameterError("beta must be >= 0");
    if (!(c.lambda >= 0.0)) throw InvalidParameterError("lambda must be >= 0");
    if (!(c.p >= 1.0)) throw InvalidParameterError("p must be >= 1");
    if (!(c.alpha > 0.0) || c.alpha >= 1.0) {
        throw InvalidParameterError("alpha must lie in (0, 1)");
    }
    if (!(c.eps_sigma > 0.0)) throw InvalidParameterError("eps_sigma must be > 0");
    if (!(c.denom_floor > 0.0)) throw InvalidParameterError("denom_floor must be > 0");
}

double sign(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

CpnState cpn_init(const ParamSet& params, const CpnConfig& config, SeededRng& rng) {
    validate_config(config);
    CpnState state;
    state.config = config;
    state.trailing = params;
    axpy_in_place(1.0, gaussian_noise_like(params, config.eps_sigma, rng), state.trailing);
    state.t = 1;
    state.decay_step = std::exp(-config.beta);
    state.decay = state.decay_step;
    return state;
}

double cpn_distance_sum(const CpnState& state, const ParamSet& params) {
    require_conformable(params, state.trailing);
    double d = 0.0;
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        ParamGroup diff = params.groups[gi];
        const auto& tv = state.trailing.groups[gi].values;
        for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= tv[k];
        d += group_pnorm(diff, state.config.p);
    }
    return d;
}

double cpn_penalty(const CpnState& state, const ParamSet& params) {
    const double d = cpn_distance_sum(state, params);
    return state.decay / std::max(d, state.config.denom_floor);
}

ParamSet cpn_penalty_grad(const CpnState& state, const ParamSet& params) {
    require_conformable(params, state.trailing);
    const double p = state.config.p;
    ParamSet grad = zeros_like(params);

    std::vector<double> group_norms(params.groups.size(), 0.0);
    double d = 0.0;
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        ParamGroup diff = params.groups[gi];
        const auto& tv = state.trailing.groups[gi].values;
        for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= tv[k];
        group_norms[gi] = group_pnorm(diff, p);
        d += group_norms[gi];
    }
    if (d <= state.config.denom_floor) return grad;

    const double scale = -state.decay / (d * d);
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        if (group_norms[gi] == 0.0) continue;
        auto& gv = grad.groups[gi].values;
        const auto& wv = params.groups[gi].values;
        const auto& tv = state.trailing.groups[gi].values;
        if (p == 1.0) {
            for (std::size_t k = 0; k < gv.size(); ++k) {
                gv[k] = scale * sign(wv[k] - tv[k]);
            }
        } else {
            const double norm_pow = std::pow(group_norms[gi], p - 1.0);
            for (std::size_t k = 0; k < gv.size(); ++k) {
                const double diff = wv[k] - tv[k];
                gv[k] = scale * sign(diff) * std::pow(std::abs(diff), p - 1.0) / norm_pow;
            }
        }
    }
    return grad;
}

ParamSet cpn_total_grad(const CpnState& state, const ParamSet& params,
                        const ParamSet& base_grad) {
    require_conformable(params, base_grad);
    if (state.config.lambda == 0.0) return base_grad;
    ParamSet total = base_grad;
    axpy_in_place(state.config.lambda, cpn_penalty_grad(state, params), total);
    return total;
}

void cpn_merge_update(CpnState& state, const ParamSet& params) {
    require_conformable(params, state.trailing);
    const double alpha = state.config.alpha;
    for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
        auto& tv = state.trailing.groups[gi].values;
        const auto& wv = params.groups[gi].values;
        for (std::size_t k = 0; k < tv.size(); ++k) {
            tv[k] = alpha * tv[k] + (1.0 - alpha) * wv[k];
        }
    }
    state.t += 1;
    state.decay *= state.decay_step;
}

}  // namespace chargedpoint
