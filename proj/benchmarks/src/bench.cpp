#include <benchmark/benchmark.h>

#include "chargedpoint/analysis.hpp"
#include "chargedpoint/charged_point.hpp"
#include "chargedpoint/mlp.hpp"
#include "chargedpoint/optimizers.hpp"
#include "chargedpoint/rng.hpp"

namespace cp = chargedpoint;

namespace {

cp::ParamSet make_params(std::size_t n, std::uint64_t seed) {
    cp::ParamSet params;
    params.groups.push_back(cp::ParamGroup{"w", std::vector<double>(n), {n}});
    cp::SeededRng rng(seed);
    for (auto& v : params.groups[0].values) v = rng.normal(1.0);
    return params;
}

void BM_SgdStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    cp::ParamSet params = make_params(n, 1);
    const cp::ParamSet grad = make_params(n, 2);
    cp::SgdState sgd = cp::sgd_init(params, 0.01, 0.9, true, 1e-6);
    std::int64_t iter = 0;
    for (auto _ : state) {
        cp::sgd_step(sgd, params, grad, iter++);
        benchmark::DoNotOptimize(params.groups[0].values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SgdStep)->Arg(1024)->Arg(65536);

void BM_AdamStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    cp::ParamSet params = make_params(n, 1);
    const cp::ParamSet grad = make_params(n, 2);
    cp::AdamState adam = cp::adam_init(params, 0.001);
    for (auto _ : state) {
        cp::adam_step(adam, params, grad);
        benchmark::DoNotOptimize(params.groups[0].values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_AdamStep)->Arg(1024)->Arg(65536);

void BM_PenaltyGrad(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const cp::ParamSet params = make_params(n, 1);
    cp::SeededRng rng(3);
    const cp::CpnState cpn = cp::cpn_init(params, cp::CpnConfig{}, rng);
    for (auto _ : state) {
        cp::ParamSet grad = cp::cpn_penalty_grad(cpn, params);
        benchmark::DoNotOptimize(grad.groups[0].values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PenaltyGrad)->Arg(1024)->Arg(65536);

void BM_MergeUpdate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const cp::ParamSet params = make_params(n, 1);
    cp::SeededRng rng(3);
    cp::CpnState cpn = cp::cpn_init(params, cp::CpnConfig{}, rng);
    for (auto _ : state) {
        cp::cpn_merge_update(cpn, params);
        benchmark::DoNotOptimize(cpn.trailing.groups[0].values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MergeUpdate)->Arg(1024)->Arg(65536);

void BM_SymEigenvalues(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    cp::Matrix h(n, n);
    cp::SeededRng rng(4);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            h(i, j) = rng.normal(1.0);
            h(j, i) = h(i, j);
        }
    }
    for (auto _ : state) {
        std::vector<double> eig = cp::sym_eigenvalues(h);
        benchmark::DoNotOptimize(eig.data());
    }
}
BENCHMARK(BM_SymEigenvalues)->Arg(16)->Arg(64);

void BM_MlpForwardBackward(benchmark::State& state) {
    const cp::MlpSpec spec{{64, 32, 32, 10}, cp::HiddenActivation::ReLU,
                           cp::OutputActivation::Softmax, 0.0};
    cp::SeededRng rng(5);
    const cp::Mlp net = cp::mlp_init(spec, rng);
    cp::Batch batch;
    batch.inputs = cp::Matrix(128, 64);
    batch.targets = cp::Matrix(128, 10);
    for (auto& v : batch.inputs.data) v = rng.uniform();
    for (std::size_t r = 0; r < 128; ++r) batch.targets(r, r % 10) = 1.0;
    cp::SeededRng fwd_rng(6);
    for (auto _ : state) {
        auto [outputs, cache] = cp::mlp_forward(net, batch, false, fwd_rng);
        cp::ParamSet grad =
            cp::mlp_backward(net, cache, batch.targets, cp::LossKind::CategoricalCE);
        benchmark::DoNotOptimize(grad.groups[0].values.data());
    }
    state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_MlpForwardBackward);

}  // namespace

BENCHMARK_MAIN();
