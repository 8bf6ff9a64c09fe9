#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chargedpoint/dataset.hpp"
#include "chargedpoint/errors.hpp"
#include "chargedpoint/experiment.hpp"
#include "chargedpoint/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chargedpoint;
using cptest::bits;
namespace fs = std::filesystem;

namespace {

const OptimizerKind kAllKinds[] = {OptimizerKind::Sgd, OptimizerKind::SgdAccelerated,
                                   OptimizerKind::AdaGrad, OptimizerKind::AdaDelta,
                                   OptimizerKind::Adam};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() : dir_(fs::temp_directory_path() / "chargedpoint-exp-tests") {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~TempDir() { fs::remove_all(dir_); }
    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    fs::path dir_;
};

Dataset small_synthetic(std::uint64_t seed, int classes, int dim, int n) {
    SeededRng root(seed);
    SeededRng stream = root.stream("synthetic-data");
    return make_synthetic(classes, dim, n, stream);
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("format_double renders shortest round-trip decimals") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.25) == "-0.25");
    CHECK(format_double(0.0) == "0");

    const double samples[] = {0.1,    1.0 / 3.0, -13.45441294884429, 1e300,
                              5e-324, -2.5e-10,  6.02214076e23};
    for (const double v : samples) {
        const std::string text = format_double(v);
        const double parsed = std::strtod(text.c_str(), nullptr);
        CHECK(bits(parsed) == bits(v));
    }

    SeededRng rng(500);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-30.0, 30.0));
        const std::string text = format_double(v);
        const double parsed = std::strtod(text.c_str(), nullptr);
        CHECK(bits(parsed) == bits(v));
    }
}

TEST_CASE("penalty config json round-trips") {
    CpnConfig c;
    c.beta = 0.123456789123456789;
    c.lambda = 1e-3;
    c.p = 2.0;
    c.alpha = 0.95;
    c.eps_sigma = 1e-4;
    c.denom_floor = 1e-12;
    const std::string text = cpn_config_to_json(c);
    for (const char* key : {"beta", "lambda", "p", "alpha", "eps_sigma", "denom_floor"}) {
        CHECK(text.find(key) != std::string::npos);
    }
    const CpnConfig back = cpn_config_from_json(text);
    CHECK(bits(back.beta) == bits(c.beta));
    CHECK(bits(back.lambda) == bits(c.lambda));
    CHECK(bits(back.p) == bits(c.p));
    CHECK(bits(back.alpha) == bits(c.alpha));
    CHECK(bits(back.eps_sigma) == bits(c.eps_sigma));
    CHECK(bits(back.denom_floor) == bits(c.denom_floor));
}

TEST_CASE("penalty config json rejects malformed input") {
    CHECK_THROWS_AS(cpn_config_from_json("{"), FormatError);
    CHECK_THROWS_AS(cpn_config_from_json("[1, 2]"), FormatError);
    CHECK_THROWS_AS(cpn_config_from_json(
                        R"({"beta":1,"lambda":1,"p":1,"alpha":0.5,"eps_sigma":1e-4,)"
                        R"("denom_floor":1e-12,"gamma":3})"),
                    FormatError);
    CHECK_THROWS_AS(cpn_config_from_json(R"({"beta":1})"), FormatError);
    CHECK_THROWS_AS(cpn_config_from_json(
                        R"({"beta":"one","lambda":1,"p":1,"alpha":0.5,"eps_sigma":1e-4,)"
                        R"("denom_floor":1e-12})"),
                    FormatError);
}

TEST_CASE("toy presets carry the published settings") {
    const ToyConfig sgd = toy_preset(OptimizerKind::Sgd, true);
    CHECK(sgd.optimizer.kind == OptimizerKind::Sgd);
    CHECK(sgd.optimizer.lr == 0.01);
    CHECK(sgd.optimizer.momentum == 0.0);
    REQUIRE(sgd.cpn.has_value());
    CHECK(sgd.cpn->beta == 1.0);
    CHECK(sgd.cpn->lambda == 0.1);
    CHECK(sgd.cpn->p == 1.0);
    CHECK(sgd.cpn->alpha == 0.1);
    CHECK(sgd.cpn->eps_sigma == 0.01);

    const ToyConfig acc = toy_preset(OptimizerKind::SgdAccelerated, true);
    CHECK(acc.optimizer.momentum == 0.9);
    CHECK(acc.optimizer.nesterov);
    CHECK(acc.cpn->eps_sigma == 0.01);

    const ToyConfig adagrad = toy_preset(OptimizerKind::AdaGrad, true);
    CHECK(adagrad.optimizer.lr == 0.01);
    CHECK(adagrad.cpn->lambda == 0.001);
    CHECK(adagrad.cpn->alpha == 0.5);
    CHECK(adagrad.cpn->eps_sigma == 1.0);

    const ToyConfig adadelta = toy_preset(OptimizerKind::AdaDelta, true);
    CHECK(adadelta.optimizer.lr == 1.0);
    CHECK(adadelta.optimizer.rho == 0.95);
    CHECK(adadelta.cpn->eps_sigma == 1.0);

    const ToyConfig adam = toy_preset(OptimizerKind::Adam, true);
    CHECK(adam.optimizer.lr == 0.01);
    CHECK(adam.cpn->lambda == 0.001);

    const ToyConfig bare = toy_preset(OptimizerKind::Adam, false);
    CHECK_FALSE(bare.cpn.has_value());
    CHECK(bare.iterations == 120);
    CHECK(bare.seed == kDefaultSeed);
    CHECK(bare.start[0] == 1e-4);
    CHECK(bare.start[1] == -1e-4);
}

TEST_CASE("mlp penalty preset") {
    const CpnConfig c = mlp_cpn_preset();
    CHECK(c.beta == 0.001);
    CHECK(c.lambda == 0.1);
    CHECK(c.p == 1.0);
    CHECK(c.alpha == 0.95);
    CHECK(c.eps_sigma == 1e-4);
}

TEST_CASE("run_toy logs the start row and every finite iterate") {
    const ToyResult r = run_toy(toy_preset(OptimizerKind::Adam, false));
    REQUIRE(r.rows.size() == 121);
    CHECK(r.rows[0].iter == 0);
    CHECK(r.rows[0].x == 1e-4);
    CHECK(r.rows[0].y == -1e-4);
    CHECK(r.rows[0].penalty == 0.0);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const ToyRow& row = r.rows[i];
        CHECK(row.iter == static_cast<std::int64_t>(i));
        CHECK(std::isfinite(row.x));
        CHECK(std::isfinite(row.y));
        CHECK(std::isfinite(row.loss));
        CHECK(std::abs(row.x) <= kDivergenceGuard);
        CHECK(std::abs(row.y) <= kDivergenceGuard);
        CHECK(row.grad_norm >= 0.0);
    }
    CHECK(r.final_loss == r.rows.back().loss);
    CHECK_FALSE(r.diverged);
}

TEST_CASE("escape iteration is the first loss beyond the threshold") {
    const ToyResult r = run_toy(toy_preset(OptimizerKind::Adam, false));
    std::int64_t expected = -1;
    for (const ToyRow& row : r.rows) {
        if (std::abs(row.loss) > kEscapeThreshold) {
            expected = row.iter;
            break;
        }
    }
    CHECK(r.escape_iter == expected);
    CHECK(r.escape_iter == 62);

    const ToyResult stuck = run_toy(toy_preset(OptimizerKind::Sgd, false));
    CHECK(stuck.escape_iter == -1);
}

TEST_CASE("both runs of a pair start from the same point") {
    for (const OptimizerKind kind : kAllKinds) {
        const ToyResult base = run_toy(toy_preset(kind, false));
        const ToyResult cpn = run_toy(toy_preset(kind, true));
        CHECK(bits(base.rows[0].x) == bits(cpn.rows[0].x));
        CHECK(bits(base.rows[0].y) == bits(cpn.rows[0].y));
        CHECK(bits(base.rows[0].loss) == bits(cpn.rows[0].loss));
        CHECK(base.rows[0].penalty == 0.0);
        CHECK(cpn.rows[0].penalty > 0.0);
    }
}

TEST_CASE("zero-lambda penalty leaves the trajectory bitwise unchanged") {
    ToyConfig with = toy_preset(OptimizerKind::Sgd, true);
    with.cpn->lambda = 0.0;
    ToyConfig without = toy_preset(OptimizerKind::Sgd, false);
    const ToyResult a = run_toy(with);
    const ToyResult b = run_toy(without);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(bits(a.rows[i].x) == bits(b.rows[i].x));
        CHECK(bits(a.rows[i].y) == bits(b.rows[i].y));
        CHECK(bits(a.rows[i].loss) == bits(b.rows[i].loss));
        CHECK(bits(a.rows[i].grad_norm) == bits(b.rows[i].grad_norm));
    }
}

TEST_CASE("frozen adam baseline") {
    const ToyResult r = run_toy(toy_preset(OptimizerKind::Adam, false));
    CHECK(bits(r.final_loss) == bits(-13.45441294884429));
}

TEST_CASE("frozen comparison table") {
    const ToyResult sgd = run_toy(toy_preset(OptimizerKind::Sgd, true));
    CHECK(sgd.escape_iter == 1);
    CHECK(sgd.final_loss < -1e8);

    const ToyResult acc = run_toy(toy_preset(OptimizerKind::SgdAccelerated, true));
    CHECK(acc.escape_iter == 1);
    CHECK(acc.final_loss < -1e8);

    const ToyResult adagrad = run_toy(toy_preset(OptimizerKind::AdaGrad, true));
    CHECK(adagrad.escape_iter == -1);
    CHECK(bits(adagrad.final_loss) == bits(-0.06471442119259271));

    const ToyResult adadelta = run_toy(toy_preset(OptimizerKind::AdaDelta, true));
    CHECK(adadelta.escape_iter == 46);

    const ToyResult adam = run_toy(toy_preset(OptimizerKind::Adam, true));
    CHECK(adam.escape_iter == 62);
    CHECK(bits(adam.final_loss) == bits(-13.635724158840027));
}

TEST_CASE("run_toy is deterministic") {
    const ToyResult a = run_toy(toy_preset(OptimizerKind::AdaDelta, true));
    const ToyResult b = run_toy(toy_preset(OptimizerKind::AdaDelta, true));
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(bits(a.rows[i].x) == bits(b.rows[i].x));
        CHECK(bits(a.rows[i].y) == bits(b.rows[i].y));
    }
}

TEST_CASE("run_toy validates the iteration count") {
    ToyConfig c = toy_preset(OptimizerKind::Sgd, false);
    c.iterations = 0;
    CHECK_THROWS_AS(run_toy(c), InvalidParameterError);
    c.iterations = -5;
    CHECK_THROWS_AS(run_toy(c), InvalidParameterError);
}

TEST_CASE("divergence guard stops a blown-up run") {
    ToyConfig c = toy_preset(OptimizerKind::Sgd, true);
    c.optimizer.lr = 1e9;
    const ToyResult r = run_toy(c);
    CHECK(r.diverged);
    CHECK(r.rows.size() < 121);
    for (const ToyRow& row : r.rows) {
        CHECK(std::isfinite(row.loss));
        CHECK(std::abs(row.x) <= kDivergenceGuard);
        CHECK(std::abs(row.y) <= kDivergenceGuard);
    }
}

TEST_CASE("make_optimizer fills in the per-rule default eps") {
    ParamSet params = cptest::scalar_set(1.0);
    OptimizerSettings s;
    s.kind = OptimizerKind::Adam;
    s.lr = 0.002;
    s.eps = 0.0;
    Optimizer from_settings = make_optimizer(s, params);
    ParamSet p1 = params;
    Optimizer direct(adam_init(params, 0.002, 0.9, 0.999, 1e-8));
    ParamSet p2 = params;
    SeededRng rng(7);
    for (int i = 0; i < 10; ++i) {
        const ParamSet g = cptest::scalar_set(rng.uniform(-1.0, 1.0));
        from_settings.step(p1, g);
        direct.step(p2, g);
        CHECK(bits(p1.groups[0].values[0]) == bits(p2.groups[0].values[0]));
    }
}

TEST_CASE("trajectory csv golden") {
    TempDir tmp;
    const fs::path p = tmp.path("trajectory.csv");
    std::vector<ToyRow> rows;
    rows.push_back({0, 0.5, -0.25, 1.0, 0.0, 2.5});
    rows.push_back({1, 0.125, 2.0, -3.5, 0.0625, 0.75});
    write_toy_trajectory_csv(p, rows);
    CHECK(slurp(p) ==
          "iter,x,y,loss,penalty,grad_norm\n"
          "0,0.5,-0.25,1,0,2.5\n"
          "1,0.125,2,-3.5,0.0625,0.75\n");
}

TEST_CASE("epoch csv golden") {
    TempDir tmp;
    const fs::path p = tmp.path("epochs.csv");
    std::vector<EpochRow> rows;
    rows.push_back({0, 2.5, 0.0, 1.25});
    rows.push_back({1, 1.75, 0.5, 0.125});
    write_epoch_csv(p, rows);
    CHECK(slurp(p) ==
          "iter,loss,penalty,grad_norm\n"
          "0,2.5,0,1.25\n"
          "1,1.75,0.5,0.125\n");
}

TEST_CASE("summary csv golden") {
    TempDir tmp;
    const fs::path p = tmp.path("summary.csv");
    std::vector<SummaryRow> rows;
    rows.push_back({"adam", true, -0.5, 62});
    rows.push_back({"sgd", false, 0.25, -1});
    write_summary_csv(p, rows);
    CHECK(slurp(p) ==
          "algorithm,cpn,final_loss,escape_iter\n"
          "adam,true,-0.5,62\n"
          "sgd,false,0.25,-1\n");
}

TEST_CASE("spectrum csv golden") {
    TempDir tmp;
    const fs::path p = tmp.path("spectrum.csv");
    SpectrumRun run;
    GroupSpectrum g;
    g.group = "W0";
    g.report.eigenvalues = {-1.5, 0.25};
    run.groups.push_back(g);
    write_spectrum_csv(p, run);
    CHECK(slurp(p) ==
          "group,index,eigenvalue\n"
          "W0,0,-1.5\n"
          "W0,1,0.25\n");
}

TEST_CASE("csv writers raise on unwritable paths") {
    CHECK_THROWS_AS(write_epoch_csv("/nonexistent-dir/epochs.csv", {}), IoError);
}

TEST_CASE("paired mlp training shares its initial evaluation") {
    const Dataset data = small_synthetic(kDefaultSeed, 10, 64, 512);
    MlpTrainConfig config;
    config.epochs = 10;
    config.optimizer.lr = 0.01;
    config.spec.dropout_prob = 0.0;
    const MlpTrainResult result = run_mlp_train(config, data);

    REQUIRE(result.baseline.rows.size() == 11);
    REQUIRE(result.cpn.rows.size() == 11);
    CHECK(bits(result.baseline.rows[0].loss) == bits(result.cpn.rows[0].loss));
    CHECK(result.baseline.rows[0].penalty == 0.0);
    CHECK(result.cpn.rows[0].penalty > 0.0);

    for (const MlpTrainRun* run : {&result.baseline, &result.cpn}) {
        int violations = 0;
        for (std::size_t i = 2; i < run->rows.size(); ++i) {
            if (run->rows[i].loss >= run->rows[i - 1].loss) ++violations;
        }
        CHECK(violations <= 1);
        CHECK(run->rows.back().loss < run->rows[1].loss);
        for (const EpochRow& row : run->rows) CHECK(std::isfinite(row.loss));
    }

    CHECK(result.baseline.first_step_penalty == 0.0);
    CHECK(result.baseline.last_step_penalty == 0.0);
    CHECK(result.cpn.first_step_penalty > 0.0);
    CHECK(result.cpn.first_step_penalty > result.cpn.last_step_penalty);
    CHECK(result.cpn.last_step_penalty > 0.0);
}

TEST_CASE("spectrum run reports per-group eigenvalues") {
    const Dataset data = small_synthetic(3, 10, 16, 128);
    SpectrumConfig config;
    config.spec.layer_sizes = {16, 4, 10};
    config.lr = 0.1;
    config.grad_tol = 1e-3;
    config.max_iterations = 200;
    const SpectrumResult result = run_mlp_spectrum(config, data);

    for (const SpectrumRun* run : {&result.baseline, &result.cpn}) {
        REQUIRE(run->groups.size() == 4);
        CHECK(run->groups[0].group == "W0");
        CHECK(run->groups[1].group == "b0");
        CHECK(run->groups[2].group == "W1");
        CHECK(run->groups[3].group == "b1");
        CHECK(run->groups[0].report.eigenvalues.size() == 64);
        CHECK(run->groups[1].report.eigenvalues.size() == 4);
        CHECK(run->groups[2].report.eigenvalues.size() == 40);
        CHECK(run->groups[3].report.eigenvalues.size() == 10);
        for (const GroupSpectrum& g : run->groups) {
            const SpectrumReport& rep = g.report;
            CHECK(rep.n_negative + rep.n_near_zero + rep.n_positive ==
                  rep.eigenvalues.size());
            CHECK(std::is_sorted(rep.eigenvalues.begin(), rep.eigenvalues.end()));
            CHECK(rep.lambda_min == rep.eigenvalues.front());
            CHECK(rep.lambda_max == rep.eigenvalues.back());
        }
        CHECK(run->iterations >= 1);
        CHECK(std::isfinite(run->final_loss));
        CHECK(run->final_grad_norm >= 0.0);
    }
}

TEST_CASE("spectrum run is reproducible") {
    const Dataset data = small_synthetic(3, 10, 16, 128);
    SpectrumConfig config;
    config.spec.layer_sizes = {16, 4, 10};
    config.grad_tol = 1e-3;
    config.max_iterations = 150;
    const SpectrumResult a = run_mlp_spectrum(config, data);
    const SpectrumResult b = run_mlp_spectrum(config, data);
    CHECK(bits(a.baseline.final_loss) == bits(b.baseline.final_loss));
    CHECK(bits(a.cpn.final_loss) == bits(b.cpn.final_loss));
    for (std::size_t gi = 0; gi < a.baseline.groups.size(); ++gi) {
        CHECK(a.baseline.groups[gi].report.eigenvalues ==
              b.baseline.groups[gi].report.eigenvalues);
        CHECK(a.cpn.groups[gi].report.eigenvalues == b.cpn.groups[gi].report.eigenvalues);
    }
}

TEST_CASE("spectrum config validation") {
    const Dataset data = small_synthetic(3, 10, 16, 64);
    SpectrumConfig config;
    config.spec.layer_sizes = {16, 4, 4, 10};
    CHECK_THROWS_AS(run_mlp_spectrum(config, data), InvalidParameterError);

    config = SpectrumConfig{};
    config.spec.layer_sizes = {16, 4, 10};
    config.spec.dropout_prob = 0.2;
    CHECK_THROWS_AS(run_mlp_spectrum(config, data), InvalidParameterError);

    config = SpectrumConfig{};
    config.spec.layer_sizes = {16, 4, 10};
    config.lr = 0.0;
    CHECK_THROWS_AS(run_mlp_spectrum(config, data), InvalidParameterError);

    config = SpectrumConfig{};
    config.spec.layer_sizes = {16, 4, 10};
    config.grad_tol = 0.0;
    CHECK_THROWS_AS(run_mlp_spectrum(config, data), InvalidParameterError);

    config = SpectrumConfig{};
    config.spec.layer_sizes = {16, 4, 10};
    config.max_iterations = 0;
    CHECK_THROWS_AS(run_mlp_spectrum(config, data), InvalidParameterError);
}

}  // TEST_SUITE
