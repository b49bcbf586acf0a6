#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "maxent/dual_solver.hpp"
#include "maxent/entropy.hpp"

namespace maxent {

// Certified error bounds for a candidate state against a max-entropy
// solution. Fields needing finite multipliers are absent for boundary-limit
// solutions; the exact-Pinsker bound is present only for feasible candidates.
struct CertificateReport {
    double relative_entropy = 0.0;  // may carry the +infinity signal
    double entropy_gap = 0.0;       // S(sigma) - S(rho)
    Eigen::VectorXd moment_mismatch;
    std::optional<double> identity_residual;
    std::optional<double> pinsker_exact_bound;
    std::optional<double> pinsker_mixed_bound;
    double trace_distance = 0.0;
    double fannes_bound = 0.0;
    std::optional<double> observable_rate_bound;
};

namespace detail {

inline void require_interior(const GibbsSolution& sol, const char* what) {
    if (sol.classification != SolutionKind::InteriorConverged) {
        throw IdentityUnavailableError(std::string(what) +
                                       " needs finite multipliers; the solution is a boundary limit");
    }
}

inline double sqrt_clamped(double radicand) {
    return std::sqrt(std::max(0.0, radicand));  // floating-point noise must not poison the root
}

}  // namespace detail

struct IdentityCheck {
    double lhs;       // D(rho || sigma)
    double rhs;       // entropy gap + lambda . (m(rho) - m)
    double residual;  // |lhs - rhs|
};

// The exact identity D(rho||sigma) = S(sigma) - S(rho) + lambda . Delta m,
// both sides computed independently. Finite-multiplier solutions only.
inline IdentityCheck entropy_gap_identity(const DensityMatrix& rho, const GibbsSolution& solution,
                                          const MomentVector& m) {
    detail::require_interior(solution, "entropy gap identity");
    if (rho.dim() != solution.sigma.dim()) {
        throw DimensionError("entropy_gap_identity: state dimensions differ");
    }
    const double lhs = relative_entropy(rho, solution.sigma);
    const MomentVector delta = moment_map(rho, solution.constraints) - m;
    const double rhs = (solution.entropy - von_neumann_entropy(rho)) + solution.lambda.dot(delta);
    return {lhs, rhs, std::abs(lhs - rhs)};
}

// ||rho - sigma||_1 <= sqrt(2 (S(sigma) - S(rho))) for rho in C(m).
inline double pinsker_exact_rate(const DensityMatrix& rho, const GibbsSolution& solution) {
    const MomentVector delta = moment_map(rho, solution.constraints) - solution.target_moments;
    if (delta.norm() > solution.grad_tol) {
        throw PreconditionError("pinsker_exact_rate needs a feasible rho (moment residual " +
                                std::to_string(delta.norm()) + ")");
    }
    return detail::sqrt_clamped(2.0 * (solution.entropy - von_neumann_entropy(rho)));
}

// ||rho - sigma||_1 <= sqrt(2 |S(sigma) - S(rho)|) + sqrt(2 ||lambda|| ||Delta m||),
// Euclidean norms paired by Cauchy-Schwarz.
inline double pinsker_mixed_rate(const DensityMatrix& rho, const GibbsSolution& solution,
                                 const MomentVector& m) {
    detail::require_interior(solution, "mixed Pinsker rate");
    const double gap = solution.entropy - von_neumann_entropy(rho);
    const MomentVector delta = moment_map(rho, solution.constraints) - m;
    return std::sqrt(2.0 * std::abs(gap)) +
           std::sqrt(2.0 * solution.lambda.norm() * delta.norm());
}

struct ObservableRate {
    double lhs;    // |tr((rho - sigma) A)|
    double bound;  // sqrt(2 (gap + lambda . Delta m))
};

// Observable deviation bound for A in V = span{I, X_i} with ||A|| <= 1.
// Membership is enforced by projecting A onto V under the Hilbert-Schmidt
// inner product and requiring the residual below 1e-9.
inline ObservableRate observable_rate(const DensityMatrix& rho, const GibbsSolution& solution,
                                      const MomentVector& m, const HermitianOperator& a) {
    detail::require_interior(solution, "observable rate");
    const ConstraintSet& cs = solution.constraints;
    if (a.dim() != cs.dim()) {
        throw DimensionError("observable_rate: observable dimension differs");
    }
    if (operator_norm(a) > 1.0 + 1e-12) {
        throw PreconditionError("observable_rate needs ||A|| <= 1");
    }

    // Project A onto the real span of {I, X_1..X_k}.
    const int k = cs.size();
    Eigen::MatrixXd gram(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    std::vector<const Matrix*> basis;
    Matrix eye = Matrix::Identity(cs.dim(), cs.dim());
    basis.push_back(&eye);
    for (int i = 0; i < k; ++i) basis.push_back(&cs.observable(i).entries());
    for (int i = 0; i <= k; ++i) {
        rhs(i) = trace_product(*basis[i], a.entries()).real();
        for (int j = i; j <= k; ++j) {
            const double g = trace_product(*basis[i], *basis[j]).real();
            gram(i, j) = g;
            gram(j, i) = g;
        }
    }
    const Eigen::VectorXd coeff = gram.completeOrthogonalDecomposition().solve(rhs);
    Matrix projected = Matrix::Zero(cs.dim(), cs.dim());
    for (int i = 0; i <= k; ++i) projected += coeff(i) * (*basis[i]);
    const double residual = (a.entries() - projected).norm();
    if (residual > 1e-9 * std::max(1.0, a.entries().norm())) {
        throw PreconditionError("observable_rate: A is not in span{I, X_i} (residual " +
                                std::to_string(residual) + ")");
    }

    const double gap = solution.entropy - von_neumann_entropy(rho);
    const MomentVector delta = moment_map(rho, cs) - m;
    const double lhs =
        std::abs(trace_product(rho.entries() - solution.sigma.entries(), a.entries()).real());
    return {lhs, detail::sqrt_clamped(2.0 * (gap + solution.lambda.dot(delta)))};
}

struct FannesCheck {
    double entropy_diff;  // |S(rho) - S(sigma)|
    double bound;         // delta ln(d-1) + h2(delta), delta = ||rho - sigma||_1 / 2
};

// Entropy continuity: |S(rho) - S(sigma)| <= delta ln(d-1) + h2(delta).
// For d = 2 the first term vanishes.
inline FannesCheck fannes_audenaert(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionError("fannes_audenaert: state dimensions differ");
    }
    if (rho.dim() < 2) {
        throw PreconditionError("fannes_audenaert needs dimension >= 2");
    }
    const double delta = 0.5 * trace_norm_distance(rho, sigma);
    const double bound = delta * std::log(static_cast<double>(rho.dim() - 1)) + binary_entropy(delta);
    return {std::abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma)), bound};
}

// Aggregate report. Unavailable fields stay empty rather than erroring.
inline CertificateReport certify(const DensityMatrix& rho, const GibbsSolution& solution,
                                 const MomentVector& m) {
    if (rho.dim() != solution.sigma.dim()) {
        throw DimensionError("certify: state dimensions differ");
    }
    CertificateReport report;
    report.relative_entropy = relative_entropy(rho, solution.sigma);
    report.entropy_gap = solution.entropy - von_neumann_entropy(rho);
    report.moment_mismatch = moment_map(rho, solution.constraints) - m;
    report.trace_distance = trace_norm_distance(rho, solution.sigma);
    report.fannes_bound = fannes_audenaert(rho, solution.sigma).bound;

    if (report.moment_mismatch.norm() <= solution.grad_tol) {
        report.pinsker_exact_bound = detail::sqrt_clamped(2.0 * report.entropy_gap);
    }
    if (solution.classification == SolutionKind::InteriorConverged) {
        const double linear = solution.lambda.dot(report.moment_mismatch);
        if (std::isfinite(report.relative_entropy)) {
            report.identity_residual =
                std::abs(report.relative_entropy - (report.entropy_gap + linear));
        }
        report.pinsker_mixed_bound =
            std::sqrt(2.0 * std::abs(report.entropy_gap)) +
            std::sqrt(2.0 * solution.lambda.norm() * report.moment_mismatch.norm());
        report.observable_rate_bound = detail::sqrt_clamped(2.0 * (report.entropy_gap + linear));
    }
    return report;
}

}  // namespace maxent
