#include "chargedpoint/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "json.hpp"

#include "chargedpoint/errors.hpp"
#include "chargedpoint/surface.hpp"

namespace chargedpoint {

namespace {

double resolve_eps(double requested, double fallback) {
    return requested > 0.0 ? requested : fallback;
}

bool finite_in_guard(const ParamSet& params) {
    for (const auto& g : params.groups) {
        for (double v : g.values) {
            if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard) return false;
        }
    }
    return true;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, SeededRng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i-- > 1;) {
        const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
        std::swap(order[i], order[j]);
    }
    return order;
}

Batch slice_batch(const Dataset& data, const std::vector<std::size_t>& order,
                  std::size_t from, std::size_t to) {
    Batch batch;
    batch.inputs = Matrix(to - from, data.inputs.cols);
    batch.targets = Matrix(to - from, data.targets.cols);
    for (std::size_t r = from; r < to; ++r) {
        const std::size_t src = order[r];
        for (std::size_t c = 0; c < data.inputs.cols; ++c) {
            batch.inputs(r - from, c) = data.inputs(src, c);
        }
        for (std::size_t c = 0; c < data.targets.cols; ++c) {
            batch.targets(r - from, c) = data.targets(src, c);
        }
    }
    return batch;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

}  // namespace

Optimizer make_optimizer(const OptimizerSettings& s, const ParamSet& params) {
    switch (s.kind) {
        case OptimizerKind::Sgd:
        case OptimizerKind::SgdAccelerated:
            return Optimizer(sgd_init(params, s.lr, s.momentum, s.nesterov, s.decay));
        case OptimizerKind::AdaGrad:
            return Optimizer(adagrad_init(params, s.lr, resolve_eps(s.eps, 1e-4)));
        case OptimizerKind::AdaDelta:
            return Optimizer(adadelta_init(params, s.lr, s.rho, resolve_eps(s.eps, 1e-6)));
        case OptimizerKind::Adam:
            return Optimizer(
                adam_init(params, s.lr, s.beta1, s.beta2, resolve_eps(s.eps, 1e-8)));
    }
    throw InvalidParameterError("unknown optimizer kind");
}

ToyConfig toy_preset(OptimizerKind kind, bool with_cpn) {
    ToyConfig config;
    config.optimizer.kind = kind;
    CpnConfig cpn;
    cpn.p = 1.0;
    switch (kind) {
        case OptimizerKind::Sgd:
            config.optimizer.lr = 0.01;
            cpn.alpha = 0.1;
            cpn.beta = 1.0;
            cpn.lambda = 0.1;
            cpn.eps_sigma = 0.01;
            break;
        case OptimizerKind::SgdAccelerated:
            config.optimizer.lr = 0.01;
            config.optimizer.momentum = 0.9;
            config.optimizer.nesterov = true;
            cpn.alpha = 0.1;
            cpn.beta = 1.0;
            cpn.lambda = 0.1;
            cpn.eps_sigma = 0.01;
            break;
        case OptimizerKind::AdaGrad:
            config.optimizer.lr = 0.01;
            cpn.alpha = 0.5;
            cpn.beta = 1.0;
            cpn.lambda = 0.001;
            cpn.eps_sigma = 1.0;
            break;
        case OptimizerKind::AdaDelta:
            config.optimizer.lr = 1.0;
            config.optimizer.rho = 0.95;
            cpn.alpha = 0.5;
            cpn.beta = 1.0;
            cpn.lambda = 0.001;
            cpn.eps_sigma = 1.0;
            break;
        case OptimizerKind::Adam:
            config.optimizer.lr = 0.01;
            cpn.alpha = 0.5;
            cpn.beta = 1.0;
            cpn.lambda = 0.001;
            cpn.eps_sigma = 1.0;
            break;
    }
    if (with_cpn) config.cpn = cpn;
    return config;
}

ToyResult run_toy(const ToyConfig& config) {
    if (config.iterations < 1) {
        throw InvalidParameterError("run_toy: iterations must be >= 1");
    }
    const MonkeySaddle surface;
    ParamSet params = to_param_set({config.start[0], config.start[1]});
    Optimizer optimizer = make_optimizer(config.optimizer, params);

    std::optional<CpnState> cpn;
    if (config.cpn) {
        SeededRng root(config.seed);
        SeededRng noise = root.stream("eps-noise");
        cpn = cpn_init(params, *config.cpn, noise);
    }

    ToyResult result;
    const auto log_row = [&](std::int64_t iter, double penalty, double grad_norm) {
        const auto& x = params.group("x").values;
        result.rows.push_back(
            ToyRow{iter, x[0], x[1], surface.value(x), penalty, grad_norm});
    };

    {
        const ParamSet base = gradient_at(surface, params);
        const double penalty0 = cpn ? cpn_penalty(*cpn, params) : 0.0;
        const ParamSet total = cpn ? cpn_total_grad(*cpn, params, base) : base;
        log_row(0, penalty0, flat_l2_norm(total));
    }

    for (std::int64_t i = 1; i <= config.iterations; ++i) {
        const ParamSet base = gradient_at(surface, params);
        const double penalty = cpn ? cpn_penalty(*cpn, params) : 0.0;
        const ParamSet total = cpn ? cpn_total_grad(*cpn, params, base) : base;
        const ParamSet pre = params;
        optimizer.step(params, total);
        if (cpn) cpn_merge_update(*cpn, pre);
        if (!finite_in_guard(params)) {
            result.diverged = true;
            params = pre;
            break;
        }
        log_row(i, penalty, flat_l2_norm(total));
    }

    result.final_loss = result.rows.back().loss;
    for (const auto& row : result.rows) {
        if (std::abs(row.loss) > kEscapeThreshold) {
            result.escape_iter = row.iter;
            break;
        }
    }
    return result;
}

CpnConfig mlp_cpn_preset() {
    CpnConfig cpn;
    cpn.beta = 0.001;
    cpn.lambda = 0.1;
    cpn.p = 1.0;
    cpn.alpha = 0.95;
    cpn.eps_sigma = 1e-4;
    return cpn;
}

namespace {

MlpTrainRun run_mlp_train_leg(const MlpTrainConfig& config, const Dataset& data,
                              bool with_cpn) {
    SeededRng root(config.seed);
    SeededRng weight_rng = root.stream("weight-init");
    SeededRng dropout_rng = root.stream("dropout");
    SeededRng shuffle_rng = root.stream("data-shuffle");

    Mlp net = mlp_init(config.spec, weight_rng);
    Optimizer optimizer = make_optimizer(config.optimizer, net.params);
    std::optional<CpnState> cpn;
    if (with_cpn) {
        SeededRng noise = root.stream("eps-noise");
        cpn = cpn_init(net.params, config.cpn, noise);
    }

    const Batch full{data.inputs, data.targets};
    MlpTrainRun run;
    {
        auto [outputs, cache] = mlp_forward(net, full, false, dropout_rng);
        const double loss0 = mlp_loss(outputs, full.targets, config.loss);
        const ParamSet base = mlp_backward(net, cache, full.targets, config.loss);
        const double penalty0 = cpn ? cpn_penalty(*cpn, net.params) : 0.0;
        const ParamSet total = cpn ? cpn_total_grad(*cpn, net.params, base) : base;
        run.rows.push_back(EpochRow{0, loss0, penalty0, flat_l2_norm(total)});
    }

    const std::size_t n = data.size();
    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    std::int64_t step = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const std::vector<std::size_t> order = shuffled_indices(n, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        double last_penalty = 0.0;
        double last_grad_norm = 0.0;
        for (std::size_t from = 0; from < n; from += batch_size) {
            const std::size_t to = std::min(n, from + batch_size);
            const Batch batch = slice_batch(data, order, from, to);
            auto [outputs, cache] = mlp_forward(net, batch, true, dropout_rng);
            loss_sum += mlp_loss(outputs, batch.targets, config.loss);
            const ParamSet base = mlp_backward(net, cache, batch.targets, config.loss);
            const double penalty = cpn ? cpn_penalty(*cpn, net.params) : 0.0;
            const ParamSet total = cpn ? cpn_total_grad(*cpn, net.params, base) : base;
            const ParamSet pre = net.params;
            optimizer.step(net.params, total);
            if (cpn) cpn_merge_update(*cpn, pre);
            ++batches;
            ++step;
            if (step == 1) run.first_step_penalty = penalty;
            last_penalty = penalty;
            last_grad_norm = flat_l2_norm(total);
        }
        run.rows.push_back(EpochRow{epoch, loss_sum / static_cast<double>(batches),
                                    last_penalty, last_grad_norm});
        run.last_step_penalty = last_penalty;
    }
    return run;
}

}  // namespace

MlpTrainResult run_mlp_train(const MlpTrainConfig& config, const Dataset& data) {
    if (config.epochs < 1 || config.batch_size < 1) {
        throw InvalidParameterError("run_mlp_train: epochs and batch_size must be >= 1");
    }
    if (data.size() == 0) {
        throw InvalidParameterError("run_mlp_train: dataset is empty");
    }
    MlpTrainResult result;
    result.baseline = run_mlp_train_leg(config, data, false);
    result.cpn = run_mlp_train_leg(config, data, true);
    return result;
}

namespace {

SpectrumRun run_spectrum_leg(const SpectrumConfig& config, const Dataset& data,
                             bool with_cpn) {
    SeededRng root(config.seed);
    SeededRng weight_rng = root.stream("weight-init");
    Mlp net = mlp_init(config.spec, weight_rng);
    std::optional<CpnState> cpn;
    if (with_cpn) {
        SeededRng noise = root.stream("eps-noise");
        cpn = cpn_init(net.params, config.cpn, noise);
    }
    SgdState sgd = sgd_init(net.params, config.lr);
    SeededRng unused(0);
    const Batch full{data.inputs, data.targets};

    SpectrumRun run;
    double grad_norm = 0.0;
    std::int64_t iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        auto [outputs, cache] = mlp_forward(net, full, false, unused);
        const ParamSet base = mlp_backward(net, cache, full.targets, config.loss);
        grad_norm = flat_l2_norm(base);
        if (grad_norm < config.grad_tol) {
            run.converged = true;
            break;
        }
        const ParamSet total = cpn ? cpn_total_grad(*cpn, net.params, base) : base;
        const ParamSet pre = net.params;
        sgd_step(sgd, net.params, total, iter);
        if (cpn) cpn_merge_update(*cpn, pre);
    }
    run.iterations = iter;

    {
        auto [outputs, cache] = mlp_forward(net, full, false, unused);
        run.final_loss = mlp_loss(outputs, full.targets, config.loss);
        const ParamSet base = mlp_backward(net, cache, full.targets, config.loss);
        run.final_grad_norm = flat_l2_norm(base);
    }

    for (const auto& group : net.params.groups) {
        const GradFn grad_fn = [&](const std::vector<double>& x) {
            Mlp probe = net;
            probe.params.group(group.name).values = x;
            SeededRng probe_rng(0);
            auto [outputs, cache] = mlp_forward(probe, full, false, probe_rng);
            ParamSet grad = mlp_backward(probe, cache, full.targets, config.loss);
            return grad.group(group.name).values;
        };
        const Matrix hess = fd_hessian(grad_fn, group.values);
        const std::vector<double> eig = sym_eigenvalues(hess);
        run.groups.push_back(GroupSpectrum{group.name, spectrum_report(eig)});
    }
    return run;
}

}  // namespace

SpectrumResult run_mlp_spectrum(const SpectrumConfig& config, const Dataset& data) {
    if (config.spec.layer_sizes.size() != 3) {
        throw InvalidParameterError("run_mlp_spectrum: spec must have one hidden layer");
    }
    if (config.spec.dropout_prob != 0.0) {
        throw InvalidParameterError("run_mlp_spectrum: dropout must be off");
    }
    if (data.size() == 0) {
        throw InvalidParameterError("run_mlp_spectrum: dataset is empty");
    }
    if (!(config.lr > 0.0) || !(config.grad_tol > 0.0) || config.max_iterations < 1) {
        throw InvalidParameterError("run_mlp_spectrum: invalid loop settings");
    }
    SpectrumResult result;
    result.baseline = run_spectrum_leg(config, data, false);
    result.cpn = run_spectrum_leg(config, data, true);
    return result;
}

std::string cpn_config_to_json(const CpnConfig& config) {
    nlohmann::json j;
    j["beta"] = config.beta;
    j["lambda"] = config.lambda;
    j["p"] = config.p;
    j["alpha"] = config.alpha;
    j["eps_sigma"] = config.eps_sigma;
    j["denom_floor"] = config.denom_floor;
    return j.dump();
}

CpnConfig cpn_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("penalty config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw FormatError("penalty config must be a JSON object");
    }
    const char* const keys[] = {"beta", "lambda", "p", "alpha", "eps_sigma", "denom_floor"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(keys), std::end(keys), key) == std::end(keys)) {
            throw FormatError("penalty config has unknown key '" + key + "'");
        }
        if (!value.is_number()) {
            throw FormatError("penalty config key '" + key + "' must be a number");
        }
    }
    CpnConfig config;
    try {
        config.beta = j.at("beta").get<double>();
        config.lambda = j.at("lambda").get<double>();
        config.p = j.at("p").get<double>();
        config.alpha = j.at("alpha").get<double>();
        config.eps_sigma = j.at("eps_sigma").get<double>();
        config.denom_floor = j.at("denom_floor").get<double>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError("penalty config must define beta, lambda, p, alpha, eps_sigma, "
                          "denom_floor");
    }
    return config;
}

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        throw NumericalFailureError("format_double: conversion failed");
    }
    return std::string(buf, end);
}

void write_toy_trajectory_csv(const std::filesystem::path& path,
                              const std::vector<ToyRow>& rows) {
    std::ofstream out = open_csv(path);
    out << "iter,x,y,loss,penalty,grad_norm\n";
    for (const auto& r : rows) {
        out << r.iter << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
            << format_double(r.loss) << ',' << format_double(r.penalty) << ','
            << format_double(r.grad_norm) << '\n';
    }
}

void write_epoch_csv(const std::filesystem::path& path, const std::vector<EpochRow>& rows) {
    std::ofstream out = open_csv(path);
    out << "iter,loss,penalty,grad_norm\n";
    for (const auto& r : rows) {
        out << r.iter << ',' << format_double(r.loss) << ',' << format_double(r.penalty)
            << ',' << format_double(r.grad_norm) << '\n';
    }
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows) {
    std::ofstream out = open_csv(path);
    out << "algorithm,cpn,final_loss,escape_iter\n";
    for (const auto& r : rows) {
        out << r.algorithm << ',' << (r.cpn ? "true" : "false") << ','
            << format_double(r.final_loss) << ',' << r.escape_iter << '\n';
    }
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumRun& run) {
    std::ofstream out = open_csv(path);
    out << "group,index,eigenvalue\n";
    for (const auto& gs : run.groups) {
        for (std::size_t i = 0; i < gs.report.eigenvalues.size(); ++i) {
            out << gs.group << ',' << i << ',' << format_double(gs.report.eigenvalues[i])
                << '\n';
        }
    }
}

}  // namespace chargedpoint
