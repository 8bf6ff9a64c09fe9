#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chargedpoint/analysis.hpp"
#include "chargedpoint/charged_point.hpp"
#include "chargedpoint/dataset.hpp"
#include "chargedpoint/mlp.hpp"
#include "chargedpoint/optimizers.hpp"

namespace chargedpoint {

// A run escapes the plateau once |loss| exceeds this.
inline constexpr double kEscapeThreshold = 1.0;

// A run is flagged diverged once any coordinate leaves [-1e12, 1e12] or
// turns non-finite; the offending iterate is dropped and the run stops at
// the last finite one. The guard sits orders of magnitude above the
// deepest legitimate escape trajectories.
inline constexpr double kDivergenceGuard = 1e12;

// Default seed for every experiment entry point.
inline constexpr std::uint64_t kDefaultSeed = 7;

// Hyperparameters for one optimizer instance. `kind` selects the rule;
// fields the rule does not use are ignored (momentum/nesterov/decay are
// SGD-only, rho is AdaDelta-only, the betas are Adam-only). eps = 0 means
// the optimizer's own default.
struct OptimizerSettings {
    OptimizerKind kind = OptimizerKind::Sgd;
    double lr = 0.01;
    double momentum = 0.0;
    bool nesterov = false;
    double decay = 0.0;
    double rho = 0.95;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 0.0;
};

Optimizer make_optimizer(const OptimizerSettings& settings, const ParamSet& params);

// Saddle-escape run on the monkey saddle.
struct ToyConfig {
    OptimizerSettings optimizer;
    std::optional<CpnConfig> cpn;
    std::int64_t iterations = 120;
    std::uint64_t seed = kDefaultSeed;
    std::array<double, 2> start{1e-4, -1e-4};
};

// The benchmark's named configurations: per optimizer, the published
// learning settings plus (for the penalized variant) the matching penalty
// settings. The two SGD rows pair with a small init offset (sigma 0.01);
// the adaptive rows pair with a unit one, which keeps the offset from
// polluting their squared-gradient accumulators.
ToyConfig toy_preset(OptimizerKind kind, bool with_cpn);

struct ToyRow {
    std::int64_t iter = 0;
    double x = 0.0;
    double y = 0.0;
    double loss = 0.0;
    double penalty = 0.0;
    double grad_norm = 0.0;
};

struct ToyResult {
    std::vector<ToyRow> rows;
    double final_loss = 0.0;
    std::int64_t escape_iter = -1;  // first iter with |loss| > threshold, -1 if never
    bool diverged = false;
};

// Runs the configured optimizer from `start`, logging one row per finite
// iterate (row 0 is the start point). When the penalty is active each
// step computes the combined gradient, steps the optimizer, then merges
// the pre-step parameters into the trailing point. The penalty column
// logs the R value used by that step (0 when disabled).
ToyResult run_toy(const ToyConfig& config);

// One line of the cross-optimizer comparison.
struct SummaryRow {
    std::string algorithm;
    bool cpn = false;
    double final_loss = 0.0;
    std::int64_t escape_iter = -1;
};

// Penalty settings used by both MLP experiments.
CpnConfig mlp_cpn_preset();

// Paired baseline/penalized MLP training from identical initial weights.
struct MlpTrainConfig {
    MlpSpec spec{{64, 32, 32, 10}, HiddenActivation::ReLU, OutputActivation::Softmax, 0.2};
    LossKind loss = LossKind::CategoricalCE;
    OptimizerSettings optimizer{OptimizerKind::Sgd, 0.001};
    CpnConfig cpn = mlp_cpn_preset();
    int epochs = 5;
    int batch_size = 128;
    std::uint64_t seed = kDefaultSeed;
};

// Row 0 carries the pre-training full-set loss; each later row carries the
// mean minibatch training loss of that epoch plus the penalty and total
// gradient norm at the epoch's last step.
struct EpochRow {
    std::int64_t iter = 0;
    double loss = 0.0;
    double penalty = 0.0;
    double grad_norm = 0.0;
};

struct MlpTrainRun {
    std::vector<EpochRow> rows;
    double first_step_penalty = 0.0;
    double last_step_penalty = 0.0;
};

struct MlpTrainResult {
    MlpTrainRun baseline;
    MlpTrainRun cpn;
};

MlpTrainResult run_mlp_train(const MlpTrainConfig& config, const Dataset& data);

// Paired full-batch training to a near-critical point, then per-group
// Hessian spectra at the endpoint.
struct SpectrumConfig {
    MlpSpec spec{{64, 8, 10}, HiddenActivation::ReLU, OutputActivation::Softmax, 0.0};
    LossKind loss = LossKind::CategoricalCE;
    double lr = 0.1;
    double grad_tol = 1e-4;
    std::int64_t max_iterations = 3000;
    CpnConfig cpn = mlp_cpn_preset();
    std::uint64_t seed = kDefaultSeed;
};

struct GroupSpectrum {
    std::string group;
    SpectrumReport report;
};

struct SpectrumRun {
    bool converged = false;
    std::int64_t iterations = 0;
    double final_loss = 0.0;
    double final_grad_norm = 0.0;
    std::vector<GroupSpectrum> groups;
};

struct SpectrumResult {
    SpectrumRun baseline;
    SpectrumRun cpn;
};

// Requires a single-hidden-layer spec with dropout off. Convergence is
// judged on the 2-norm of the loss gradient alone (the penalty term decays
// and is excluded), since the spectra are only meaningful near a critical
// point of the loss; a run that still moves at the iteration cap is
// reported with converged = false rather than rejected.
SpectrumResult run_mlp_spectrum(const SpectrumConfig& config, const Dataset& data);

// JSON round-trip for the penalty settings, keys beta, lambda, p, alpha,
// eps_sigma, denom_floor. Unknown or missing keys raise FormatError.
std::string cpn_config_to_json(const CpnConfig& config);
CpnConfig cpn_config_from_json(const std::string& text);

// Shortest round-trip decimal rendering, locale-free, so equal doubles
// always print identically.
std::string format_double(double v);

// CSV emitters. All write a one-line header, '\n' line ends, and numbers
// via format_double, so a rerun with the same seed is byte-identical.
void write_toy_trajectory_csv(const std::filesystem::path& path,
                              const std::vector<ToyRow>& rows);
void write_epoch_csv(const std::filesystem::path& path, const std::vector<EpochRow>& rows);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumRun& run);

}  // namespace chargedpoint
