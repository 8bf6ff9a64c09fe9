#pragma once

#include <vector>

#include "chargedpoint/matrix.hpp"
#include "chargedpoint/param_set.hpp"

namespace chargedpoint {

// Common interface for low-dimensional differentiable test surfaces used by
// the experiment harness and the curvature analysis tools.
class Surface {
public:
    virtual ~Surface() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(const std::vector<double>& x) const = 0;
    virtual std::vector<double> gradient(const std::vector<double>& x) const = 0;
    virtual Matrix hessian(const std::vector<double>& x) const = 0;
};

// f(x, y) = x^3 - 3 x y^2. The origin is a degenerate critical point (a
// monkey saddle): gradient and Hessian both vanish there, so curvature
// offers first-order methods no escape direction.
class MonkeySaddle final : public Surface {
public:
    std::size_t dim() const override { return 2; }
    double value(const std::vector<double>& x) const override;
    std::vector<double> gradient(const std::vector<double>& x) const override;
    Matrix hessian(const std::vector<double>& x) const override;
};

// f(x) = 1/2 x^T H x for a fixed symmetric H, the local quadratic model of
// any twice-differentiable objective. H must be square and symmetric within
// 1e-12; violations raise StructuralMismatchError at construction.
class QuadraticForm final : public Surface {
public:
    explicit QuadraticForm(Matrix h);

    std::size_t dim() const override { return h_.rows; }
    double value(const std::vector<double>& x) const override;
    std::vector<double> gradient(const std::vector<double>& x) const override;
    Matrix hessian(const std::vector<double>& x) const override;

private:
    Matrix h_;
};

// Step-size bound 1 / lambda_max(H) above which gradient descent on the
// quadratic model is treated as divergent. Throws UndefinedThresholdError
// when H has no positive eigenvalue. Note the classical contraction bound
// for quadratic gradient descent is 2 / lambda_max; this function keeps the
// stricter constant and callers that want the classical one double it.
double stability_threshold(const Matrix& h);

// ParamSet view of a surface point: one group named "x" holding the
// coordinates. Lets the penalty/optimizer stack treat a surface exactly
// like a parametric model.
ParamSet to_param_set(const std::vector<double>& x);
std::vector<double> from_param_set(const ParamSet& p);
double value_at(const Surface& s, const ParamSet& p);
ParamSet gradient_at(const Surface& s, const ParamSet& p);

}  // namespace chargedpoint
