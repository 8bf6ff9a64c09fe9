#include <cmath>
#include <vector>

#include "chargedpoint/errors.hpp"
#include "chargedpoint/rng.hpp"
#include "chargedpoint/surface.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chargedpoint;
using cptest::close_rel;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

Matrix diag(const std::vector<double>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

// Central-difference gradient of s.value.
std::vector<double> fd_gradient(const Surface& s, std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double saved = x[k];
        x[k] = saved + h;
        const double fp = s.value(x);
        x[k] = saved - h;
        const double fm = s.value(x);
        x[k] = saved;
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_SUITE("surfaces") {

TEST_CASE("monkey saddle hand values") {
    MonkeySaddle s;
    CHECK(s.dim() == 2);
    CHECK(s.value({1.0, 2.0}) == doctest::Approx(-11.0).epsilon(1e-15));
    CHECK(s.value({0.0, 0.0}) == 0.0);

    const std::vector<double> g = s.gradient({1.0, 2.0});
    CHECK(g[0] == doctest::Approx(-9.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-12.0).epsilon(1e-15));

    const Matrix h = s.hessian({1.0, 2.0});
    CHECK(h(0, 0) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(h(0, 1) == doctest::Approx(-12.0).epsilon(1e-15));
    CHECK(h(1, 0) == doctest::Approx(-12.0).epsilon(1e-15));
    CHECK(h(1, 1) == doctest::Approx(-6.0).epsilon(1e-15));
}

TEST_CASE("monkey saddle origin is a fully flat critical point") {
    MonkeySaddle s;
    const std::vector<double> g = s.gradient({0.0, 0.0});
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
    const Matrix h = s.hessian({0.0, 0.0});
    for (double v : h.data) CHECK(v == 0.0);
}

TEST_CASE("monkey saddle near-origin start point gradient") {
    MonkeySaddle s;
    const std::vector<double> g = s.gradient({1e-4, -1e-4});
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(6e-8).epsilon(1e-12));
}

TEST_CASE("monkey saddle is odd") {
    MonkeySaddle s;
    SeededRng rng(17);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-2.0, 2.0);
        const double y = rng.uniform(-2.0, 2.0);
        CHECK(s.value({-x, -y}) == -s.value({x, y}));
    }
}

TEST_CASE("surfaces reject wrong dimension") {
    MonkeySaddle m;
    CHECK_THROWS_AS(m.value({1.0}), StructuralMismatchError);
    CHECK_THROWS_AS(m.gradient({1.0, 2.0, 3.0}), StructuralMismatchError);
    QuadraticForm q(diag({1.0, 2.0, 3.0}));
    CHECK_THROWS_AS(q.value({1.0, 2.0}), StructuralMismatchError);
}

TEST_CASE("quadratic form hand values") {
    QuadraticForm q(mat2(4.0, 1.0, 1.0, 3.0));
    CHECK(q.dim() == 2);
    CHECK(q.value({1.0, 2.0}) == doctest::Approx(10.0).epsilon(1e-15));
    const std::vector<double> g = q.gradient({1.0, 2.0});
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(7.0).epsilon(1e-15));
    const Matrix h = q.hessian({1.0, 2.0});
    CHECK(h(0, 0) == 4.0);
    CHECK(h(0, 1) == 1.0);
    CHECK(h(1, 0) == 1.0);
    CHECK(h(1, 1) == 3.0);
}

TEST_CASE("quadratic form rejects asymmetric or non-square input") {
    CHECK_THROWS_AS(QuadraticForm(mat2(1.0, 2.0, 3.0, 4.0)), StructuralMismatchError);
    CHECK_THROWS_AS(QuadraticForm(Matrix(2, 3)), StructuralMismatchError);
    CHECK_THROWS_AS(QuadraticForm(Matrix(0, 0)), StructuralMismatchError);
}

TEST_CASE("analytic gradients match finite differences") {
    MonkeySaddle monkey;
    QuadraticForm quad(mat2(4.0, 1.0, 1.0, 3.0));
    const Surface* surfaces[] = {&monkey, &quad};
    SeededRng rng(31);
    for (const Surface* s : surfaces) {
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(s->dim());
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            const std::vector<double> a = s->gradient(x);
            const std::vector<double> fd = fd_gradient(*s, x, 1e-6);
            for (std::size_t k = 0; k < x.size(); ++k) {
                CHECK(close_rel(fd[k], a[k], 1e-6));
            }
        }
    }
}

TEST_CASE("analytic hessians match finite differences of the gradient") {
    MonkeySaddle monkey;
    QuadraticForm quad(mat2(4.0, 1.0, 1.0, 3.0));
    const Surface* surfaces[] = {&monkey, &quad};
    SeededRng rng(32);
    for (const Surface* s : surfaces) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(s->dim());
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            const Matrix h = s->hessian(x);
            const double step = 1e-5;
            for (std::size_t k = 0; k < x.size(); ++k) {
                std::vector<double> xp = x;
                std::vector<double> xm = x;
                xp[k] += step;
                xm[k] -= step;
                const std::vector<double> gp = s->gradient(xp);
                const std::vector<double> gm = s->gradient(xm);
                for (std::size_t j = 0; j < x.size(); ++j) {
                    const double fd = (gp[j] - gm[j]) / (2.0 * step);
                    CHECK(std::abs(fd - h(j, k)) < 1e-4);
                }
            }
        }
    }
}

TEST_CASE("stability threshold is the inverse top eigenvalue") {
    CHECK(stability_threshold(diag({4.0, 1.0})) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(stability_threshold(diag({10.0, -3.0})) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(stability_threshold(diag({1.0, 1.0, 1.0, 1.0, 1.0})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(stability_threshold(diag({-1.0, -2.0})), UndefinedThresholdError);
}

TEST_CASE("gradient descent converges under the threshold and diverges past twice it") {
    QuadraticForm q(diag({4.0, 1.0}));
    const double thr = stability_threshold(q.hessian({0.0, 0.0}));

    std::vector<double> x{1.0, 1.0};
    const double eta_ok = 0.9 * thr;
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> g = q.gradient(x);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] -= eta_ok * g[k];
    }
    CHECK(std::abs(x[0]) < 1e-12);
    CHECK(std::abs(x[1]) < 1e-12);

    x = {1.0, 1.0};
    const double eta_bad = 2.1 * thr;
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> g = q.gradient(x);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] -= eta_bad * g[k];
    }
    CHECK(std::abs(x[0]) > 1e6);
}

TEST_CASE("param-set view round-trips surface points") {
    const std::vector<double> x{0.5, -1.25};
    ParamSet p = to_param_set(x);
    CHECK(p.groups.size() == 1);
    CHECK(p.groups[0].name == "x");
    CHECK(from_param_set(p) == x);

    MonkeySaddle s;
    CHECK(value_at(s, p) == s.value(x));
    const ParamSet g = gradient_at(s, p);
    CHECK(g.groups[0].values == s.gradient(x));
}

}  // TEST_SUITE
