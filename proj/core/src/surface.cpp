#include "chargedpoint/surface.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "chargedpoint/analysis.hpp"
#include "chargedpoint/errors.hpp"

namespace chargedpoint {

namespace {

void require_dim(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw StructuralMismatchError("surface expects dimension " + std::to_string(expected) +
                                      ", got " + std::to_string(got));
    }
}

}  // namespace

double MonkeySaddle::value(const std::vector<double>& x) const {
    require_dim(2, x.size());
    return x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1];
}

std::vector<double> MonkeySaddle::gradient(const std::vector<double>& x) const {
    require_dim(2, x.size());
    return {3.0 * x[0] * x[0] - 3.0 * x[1] * x[1], -6.0 * x[0] * x[1]};
}

Matrix MonkeySaddle::hessian(const std::vector<double>& x) const {
    require_dim(2, x.size());
    Matrix h(2, 2);
    h(0, 0) = 6.0 * x[0];
    h(0, 1) = -6.0 * x[1];
    h(1, 0) = -6.0 * x[1];
    h(1, 1) = -6.0 * x[0];
    return h;
}

QuadraticForm::QuadraticForm(Matrix h) : h_(std::move(h)) {
    if (h_.rows != h_.cols || h_.rows == 0) {
        throw StructuralMismatchError("QuadraticForm needs a nonempty square matrix");
    }
    for (std::size_t i = 0; i < h_.rows; ++i) {
        for (std::size_t j = i + 1; j < h_.cols; ++j) {
            if (std::abs(h_(i, j) - h_(j, i)) > 1e-12) {
                throw StructuralMismatchError("QuadraticForm matrix is not symmetric");
            }
        }
    }
}

double QuadraticForm::value(const std::vector<double>& x) const {
    require_dim(h_.rows, x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < h_.rows; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < h_.cols; ++j) row += h_(i, j) * x[j];
        acc += x[i] * row;
    }
    return 0.5 * acc;
}

std::vector<double> QuadraticForm::gradient(const std::vector<double>& x) const {
    require_dim(h_.rows, x.size());
    std::vector<double> g(h_.rows, 0.0);
    for (std::size_t i = 0; i < h_.rows; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < h_.cols; ++j) row += h_(i, j) * x[j];
        g[i] = row;
    }
    return g;
}

Matrix QuadraticForm::hessian(const std::vector<double>& x) const {
    require_dim(h_.rows, x.size());
    return h_;
}

double stability_threshold(const Matrix& h) {
    std::vector<double> eig = sym_eigenvalues(h);
    double lambda_max = eig.back();
    if (!(lambda_max > 0.0)) {
        throw UndefinedThresholdError("stability threshold needs a positive eigenvalue");
    }
    return 1.0 / lambda_max;
}

ParamSet to_param_set(const std::vector<double>& x) {
    ParamSet p;
    p.groups.push_back(ParamGroup{"x", x, {x.size()}});
    return p;
}

std::vector<double> from_param_set(const ParamSet& p) {
    return p.group("x").values;
}

double value_at(const Surface& s, const ParamSet& p) {
    return s.value(p.group("x").values);
}

ParamSet gradient_at(const Surface& s, const ParamSet& p) {
    ParamSet g = p;
    g.group("x").values = s.gradient(p.group("x").values);
    return g;
}

}  // namespace chargedpoint
