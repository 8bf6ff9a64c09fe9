#include "chargedpoint/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

namespace {

constexpr double kProbClip = 1e-12;

void validate_spec(const MlpSpec& spec) {
    if (spec.layer_sizes.size() < 2) {
        throw InvalidParameterError("MlpSpec needs at least input and output sizes");
    }
    for (std::size_t n : spec.layer_sizes) {
        if (n == 0) throw InvalidParameterError("MlpSpec layer sizes must be positive");
    }
    if (!(spec.dropout_prob >= 0.0) || spec.dropout_prob >= 1.0) {
        throw InvalidParameterError("dropout_prob must lie in [0, 1)");
    }
}

// out = a * w + row-broadcast bias, with a (B x n_in) and w (n_in x n_out).
Matrix affine(const Matrix& a, const std::vector<double>& w, const std::vector<double>& b,
              std::size_t n_in, std::size_t n_out) {
    Matrix out(a.rows, n_out);
    for (std::size_t r = 0; r < a.rows; ++r) {
        double* out_row = &out.data[r * n_out];
        for (std::size_t j = 0; j < n_out; ++j) out_row[j] = b[j];
        const double* a_row = &a.data[r * n_in];
        for (std::size_t i = 0; i < n_in; ++i) {
            const double av = a_row[i];
            if (av == 0.0) continue;
            const double* w_row = &w[i * n_out];
            for (std::size_t j = 0; j < n_out; ++j) out_row[j] += av * w_row[j];
        }
    }
    return out;
}

double clip_prob(double v) { return std::clamp(v, kProbClip, 1.0 - kProbClip); }

}  // namespace

Mlp mlp_init(const MlpSpec& spec, SeededRng& rng) {
    validate_spec(spec);
    Mlp net;
    net.spec = spec;
    for (std::size_t k = 0; k + 1 < spec.layer_sizes.size(); ++k) {
        const std::size_t n_in = spec.layer_sizes[k];
        const std::size_t n_out = spec.layer_sizes[k + 1];
        ParamGroup w;
        w.name = "W" + std::to_string(k);
        w.shape = {n_in, n_out};
        w.values.resize(n_in * n_out);
        const double limit = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
        for (auto& v : w.values) v = rng.uniform(-limit, limit);
        net.params.groups.push_back(std::move(w));

        ParamGroup b;
        b.name = "b" + std::to_string(k);
        b.shape = {n_out};
        b.values.assign(n_out, 0.0);
        net.params.groups.push_back(std::move(b));
    }
    return net;
}

std::pair<Matrix, ForwardCache> mlp_forward(const Mlp& net, const Batch& batch,
                                            bool train_mode, SeededRng& rng) {
    const auto& sizes = net.spec.layer_sizes;
    if (batch.inputs.cols != sizes.front()) {
        throw StructuralMismatchError("mlp_forward: input width " +
                                      std::to_string(batch.inputs.cols) + " != layer size " +
                                      std::to_string(sizes.front()));
    }
    const std::size_t n_layers = sizes.size() - 1;
    const bool use_dropout = train_mode && net.spec.dropout_prob > 0.0;
    const double keep = 1.0 - net.spec.dropout_prob;

    ForwardCache cache;
    cache.inputs = batch.inputs;
    cache.train_mode = train_mode;
    cache.pre_activations.reserve(n_layers);
    cache.activations.reserve(n_layers);

    Matrix a = batch.inputs;
    for (std::size_t k = 0; k < n_layers; ++k) {
        const auto& w = net.params.group("W" + std::to_string(k)).values;
        const auto& b = net.params.group("b" + std::to_string(k)).values;
        Matrix z = affine(a, w, b, sizes[k], sizes[k + 1]);
        cache.pre_activations.push_back(z);

        const bool is_output = (k + 1 == n_layers);
        if (!is_output) {
            for (auto& v : z.data) v = std::max(0.0, v);
            if (use_dropout) {
                Matrix mask(z.rows, z.cols);
                for (std::size_t i = 0; i < mask.data.size(); ++i) {
                    mask.data[i] = rng.uniform() < net.spec.dropout_prob ? 0.0 : 1.0 / keep;
                    z.data[i] *= mask.data[i];
                }
                cache.dropout_masks.push_back(std::move(mask));
            }
        } else if (net.spec.output_activation == OutputActivation::Softmax) {
            for (std::size_t r = 0; r < z.rows; ++r) {
                double* row = &z.data[r * z.cols];
                const double m = *std::max_element(row, row + z.cols);
                double sum = 0.0;
                for (std::size_t c = 0; c < z.cols; ++c) {
                    row[c] = std::exp(row[c] - m);
                    sum += row[c];
                }
                for (std::size_t c = 0; c < z.cols; ++c) row[c] /= sum;
            }
        } else {
            for (auto& v : z.data) v = 1.0 / (1.0 + std::exp(-v));
        }
        cache.activations.push_back(z);
        a = cache.activations.back();
    }
    return {cache.activations.back(), cache};
}

double mlp_loss(const Matrix& outputs, const Matrix& targets, LossKind kind) {
    if (outputs.rows != targets.rows || outputs.cols != targets.cols || outputs.rows == 0) {
        throw StructuralMismatchError("mlp_loss: outputs and targets must share a nonempty shape");
    }
    double total = 0.0;
    if (kind == LossKind::CategoricalCE) {
        for (std::size_t i = 0; i < outputs.data.size(); ++i) {
            if (targets.data[i] != 0.0) {
                total -= targets.data[i] * std::log(clip_prob(outputs.data[i]));
            }
        }
        return total / static_cast<double>(outputs.rows);
    }
    for (std::size_t i = 0; i < outputs.data.size(); ++i) {
        const double o = clip_prob(outputs.data[i]);
        const double t = targets.data[i];
        total -= t * std::log(o) + (1.0 - t) * std::log(1.0 - o);
    }
    return total / static_cast<double>(outputs.data.size());
}

ParamSet mlp_backward(const Mlp& net, const ForwardCache& cache, const Matrix& targets,
                      LossKind kind) {
    const auto& sizes = net.spec.layer_sizes;
    const std::size_t n_layers = sizes.size() - 1;
    if (cache.activations.size() != n_layers || cache.pre_activations.size() != n_layers) {
        throw StructuralMismatchError("mlp_backward: cache does not match the network depth");
    }
    const Matrix& outputs = cache.activations.back();
    if (targets.rows != outputs.rows || targets.cols != outputs.cols) {
        throw StructuralMismatchError("mlp_backward: targets do not match cached outputs");
    }
    if ((kind == LossKind::CategoricalCE) !=
        (net.spec.output_activation == OutputActivation::Softmax)) {
        throw InvalidParameterError(
            "mlp_backward: loss kind must match the output activation");
    }
    const bool had_dropout = !cache.dropout_masks.empty();
    if (had_dropout && cache.dropout_masks.size() != n_layers - 1) {
        throw StructuralMismatchError("mlp_backward: dropout masks do not match the depth");
    }

    // Matched softmax+CE and sigmoid+BCE both collapse to (o - t) at the
    // output pre-activation; only the averaging denominator differs.
    const double denom = kind == LossKind::CategoricalCE
                             ? static_cast<double>(outputs.rows)
                             : static_cast<double>(outputs.data.size());
    Matrix delta(outputs.rows, outputs.cols);
    for (std::size_t i = 0; i < delta.data.size(); ++i) {
        delta.data[i] = (outputs.data[i] - targets.data[i]) / denom;
    }

    ParamSet grad = zeros_like(net.params);
    for (std::size_t k = n_layers; k-- > 0;) {
        const std::size_t n_in = sizes[k];
        const std::size_t n_out = sizes[k + 1];
        const Matrix& a_prev = k == 0 ? cache.inputs : cache.activations[k - 1];

        auto& gw = grad.group("W" + std::to_string(k)).values;
        auto& gb = grad.group("b" + std::to_string(k)).values;
        for (std::size_t r = 0; r < delta.rows; ++r) {
            const double* d_row = &delta.data[r * n_out];
            const double* a_row = &a_prev.data[r * n_in];
            for (std::size_t j = 0; j < n_out; ++j) gb[j] += d_row[j];
            for (std::size_t i = 0; i < n_in; ++i) {
                const double av = a_row[i];
                if (av == 0.0) continue;
                double* gw_row = &gw[i * n_out];
                for (std::size_t j = 0; j < n_out; ++j) gw_row[j] += av * d_row[j];
            }
        }

        if (k == 0) break;
        const auto& w = net.params.group("W" + std::to_string(k)).values;
        Matrix next(delta.rows, n_in);
        for (std::size_t r = 0; r < delta.rows; ++r) {
            const double* d_row = &delta.data[r * n_out];
            double* n_row = &next.data[r * n_in];
            for (std::size_t i = 0; i < n_in; ++i) {
                const double* w_row = &w[i * n_out];
                double s = 0.0;
                for (std::size_t j = 0; j < n_out; ++j) s += d_row[j] * w_row[j];
                n_row[i] = s;
            }
        }
        const Matrix& z_prev = cache.pre_activations[k - 1];
        for (std::size_t i = 0; i < next.data.size(); ++i) {
            if (had_dropout) next.data[i] *= cache.dropout_masks[k - 1].data[i];
            if (z_prev.data[i] <= 0.0) next.data[i] = 0.0;
        }
        delta = std::move(next);
    }
    return grad;
}

}  // namespace chargedpoint
