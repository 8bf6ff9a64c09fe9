#include "chargedpoint/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

std::string to_string(CriticalKind kind) {
    switch (kind) {
        case CriticalKind::LocalMin: return "local-min";
        case CriticalKind::LocalMax: return "local-max";
        case CriticalKind::Saddle: return "saddle";
        case CriticalKind::Degenerate: return "degenerate";
    }
    throw InvalidParameterError("unknown critical kind");
}

Matrix fd_hessian(const GradFn& grad_fn, const std::vector<double>& x, double h) {
    if (!(h > 0.0)) throw InvalidParameterError("fd_hessian: h must be > 0");
    const std::size_t n = x.size();
    Matrix raw(n, n);
    std::vector<double> probe = x;
    for (std::size_t k = 0; k < n; ++k) {
        probe[k] = x[k] + h;
        const std::vector<double> plus = grad_fn(probe);
        probe[k] = x[k] - h;
        const std::vector<double> minus = grad_fn(probe);
        probe[k] = x[k];
        if (plus.size() != n || minus.size() != n) {
            throw StructuralMismatchError("fd_hessian: gradient dimension mismatch");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double entry = (plus[j] - minus[j]) / (2.0 * h);
            if (!std::isfinite(entry)) {
                throw NumericalFailureError("fd_hessian: non-finite gradient difference");
            }
            raw(j, k) = entry;
        }
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = 0.5 * (raw(i, j) + raw(j, i));
        }
    }
    return out;
}

namespace {

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            if (i != j) s += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

// One two-sided Jacobi rotation zeroing a(p,q), applied to rows and
// columns p and q of the symmetric working copy.
void jacobi_rotate(Matrix& a, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const double tau = s / (1.0 + c);

    const double app = a(p, p);
    const double aqq = a(q, q);
    a(p, p) = app - t * apq;
    a(q, q) = aqq + t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t k = 0; k < a.rows; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = akp - s * (akq + tau * akp);
        a(p, k) = a(k, p);
        a(k, q) = akq + s * (akp - tau * akq);
        a(q, k) = a(k, q);
    }
}

}  // namespace

std::vector<double> sym_eigenvalues(const Matrix& h) {
    if (h.rows != h.cols || h.rows == 0) {
        throw StructuralMismatchError("sym_eigenvalues needs a nonempty square matrix");
    }
    const std::size_t n = h.rows;
    double max_abs = 0.0;
    for (double v : h.data) max_abs = std::max(max_abs, std::abs(v));
    const double sym_tol = 1e-9 * std::max(1.0, max_abs);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(h(i, j) - h(j, i)) > sym_tol) {
                throw StructuralMismatchError("sym_eigenvalues: matrix is not symmetric");
            }
        }
    }

    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = 0.5 * (h(i, j) + h(j, i));
        }
    }

    const double stop = 1e-12 * std::max(1.0, frobenius(a));
    const int max_sweeps = 100;
    int sweep = 0;
    while (off_diagonal_norm(a) >= stop) {
        if (++sweep > max_sweeps) {
            throw NumericalFailureError("sym_eigenvalues: Jacobi sweeps did not converge");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                jacobi_rotate(a, p, q);
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

CriticalKind classify_critical(const std::vector<double>& eigenvalues, double tol) {
    if (eigenvalues.empty()) {
        throw InvalidParameterError("classify_critical: empty eigenvalue list");
    }
    if (!(tol > 0.0)) throw InvalidParameterError("classify_critical: tol must be > 0");
    bool any_pos = false;
    bool any_neg = false;
    bool any_near_zero = false;
    for (double v : eigenvalues) {
        if (v > tol) {
            any_pos = true;
        } else if (v < -tol) {
            any_neg = true;
        } else {
            any_near_zero = true;
        }
    }
    if (any_pos && any_neg) return CriticalKind::Saddle;
    if (any_near_zero) return CriticalKind::Degenerate;
    return any_pos ? CriticalKind::LocalMin : CriticalKind::LocalMax;
}

double definite_orthant_fraction(int n) {
    if (n < 1) throw InvalidParameterError("definite_orthant_fraction: n must be >= 1");
    return std::ldexp(1.0, 1 - n);
}

SpectrumReport spectrum_report(const std::vector<double>& eigenvalues, double tol) {
    if (eigenvalues.empty()) {
        throw InvalidParameterError("spectrum_report: empty eigenvalue list");
    }
    SpectrumReport report;
    report.eigenvalues = eigenvalues;
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end());
    for (double v : report.eigenvalues) {
        if (std::abs(v) <= tol) {
            ++report.n_near_zero;
        } else if (v > 0.0) {
            ++report.n_positive;
        } else {
            ++report.n_negative;
        }
    }
    report.lambda_min = report.eigenvalues.front();
    report.lambda_max = report.eigenvalues.back();
    report.classification = classify_critical(report.eigenvalues, tol);
    return report;
}

}  // namespace chargedpoint
