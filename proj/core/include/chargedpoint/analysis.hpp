#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "chargedpoint/matrix.hpp"

namespace chargedpoint {

// Nature of a critical point as read off the Hessian spectrum.
enum class CriticalKind { LocalMin, LocalMax, Saddle, Degenerate };

std::string to_string(CriticalKind kind);

// Summary of one Hessian spectrum: the sorted eigenvalues, sign counts
// under a near-zero tolerance, the extremes, and the resulting critical-
// point classification.
struct SpectrumReport {
    std::vector<double> eigenvalues;
    std::size_t n_negative = 0;
    std::size_t n_near_zero = 0;
    std::size_t n_positive = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    CriticalKind classification = CriticalKind::Degenerate;
};

using GradFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Central-difference Hessian estimate: column k probes grad_fn at
// x +- h e_k, and the result is symmetrized as (H + H^T)/2. Non-finite
// gradient entries raise NumericalFailureError.
Matrix fd_hessian(const GradFn& grad_fn, const std::vector<double>& x, double h = 1e-5);

// All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi
// rotations run until the off-diagonal Frobenius norm drops below 1e-12
// relative to max(1, ||H||_F). Input must be symmetric within 1e-9
// relative; asymmetric input raises StructuralMismatchError.
std::vector<double> sym_eigenvalues(const Matrix& h);

// All eigenvalues above tol: LocalMin. All below -tol: LocalMax. Mixed
// signs beyond tol: Saddle. Anything else has eigenvalues inside the
// tolerance band and is Degenerate.
CriticalKind classify_critical(const std::vector<double>& eigenvalues, double tol = 1e-6);

// Fraction of the 2^n sign-orthants whose signs are uniform, i.e. the
// share of sign patterns a definite Hessian can produce: 2^(1-n).
double definite_orthant_fraction(int n);

SpectrumReport spectrum_report(const std::vector<double>& eigenvalues, double tol = 1e-6);

}  // namespace chargedpoint
