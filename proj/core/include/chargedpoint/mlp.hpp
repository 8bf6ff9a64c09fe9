#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "chargedpoint/matrix.hpp"
#include "chargedpoint/param_set.hpp"
#include "chargedpoint/rng.hpp"

namespace chargedpoint {

enum class HiddenActivation { ReLU };
enum class OutputActivation { Softmax, Sigmoid };
enum class LossKind { CategoricalCE, BinaryCE };

// Architecture of a dense feed-forward net: layer_sizes runs input →
// hidden… → output. Dropout applies to hidden activations only.
struct MlpSpec {
    std::vector<std::size_t> layer_sizes;
    HiddenActivation hidden_activation = HiddenActivation::ReLU;
    OutputActivation output_activation = OutputActivation::Softmax;
    double dropout_prob = 0.0;
};

// Parameters live in one ParamSet with groups "W{k}" of shape
// (layer_sizes[k], layer_sizes[k+1]), row-major, and "b{k}" of length
// layer_sizes[k+1], so the penalty/optimizer stack can treat the net like
// any other parameter collection.
struct Mlp {
    MlpSpec spec;
    ParamSet params;
};

// One minibatch. Categorical targets are one-hot rows; binary targets are
// per-unit values in [0, 1].
struct Batch {
    Matrix inputs;
    Matrix targets;
};

// Everything mlp_backward needs from the matching forward call:
// pre-activations and post-processing activations per layer, plus the
// scaled dropout masks (empty when dropout was off or in eval mode).
struct ForwardCache {
    Matrix inputs;
    std::vector<Matrix> pre_activations;
    std::vector<Matrix> activations;
    std::vector<Matrix> dropout_masks;
    bool train_mode = false;
};

// Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero
// biases. Weight entries are drawn group by group in row-major order, so
// a fixed rng seed pins every parameter.
Mlp mlp_init(const MlpSpec& spec, SeededRng& rng);

// Affine + ReLU per hidden layer, then Softmax or Sigmoid on the output
// layer. In train mode with dropout_prob > 0, inverted dropout zeroes each
// hidden unit with probability dropout_prob and scales survivors by
// 1/(1 - dropout_prob); eval mode consumes no rng draws and is bitwise
// identical to a dropout-free forward.
std::pair<Matrix, ForwardCache> mlp_forward(const Mlp& net, const Batch& batch,
                                            bool train_mode, SeededRng& rng);

// Mean cross-entropy. CategoricalCE averages the per-row −Σ t log o over
// the batch; BinaryCE averages −[t log o + (1−t) log(1−o)] over batch and
// units. Probabilities are clipped to [1e-12, 1 − 1e-12] before the logs.
double mlp_loss(const Matrix& outputs, const Matrix& targets, LossKind kind);

// Gradient of mlp_loss for every parameter group, backpropagated through
// the cached forward pass (dropout masks included). The loss kind must
// match the output activation (CategoricalCE with Softmax, BinaryCE with
// Sigmoid) so the combined output-delta (outputs − targets) scaling is
// exact.
ParamSet mlp_backward(const Mlp& net, const ForwardCache& cache, const Matrix& targets,
                      LossKind kind);

}  // namespace chargedpoint
