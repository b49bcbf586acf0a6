#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxent/constraints.hpp"
#include "maxent/entropy.hpp"
#include "maxent/operators.hpp"

namespace maxent {

struct SolverOptions {
    double grad_tol = 1e-9;
    int max_newton_iters = 200;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double lambda_norm_cap = 1e3;
    int boundary_path_length = 40;   // epsilon_j = 2^-j, j = 1..length
    double boundary_stop_tol = 1e-7; // consecutive trace distance along the path
    std::optional<MomentVector> interior_anchor;  // default: moments of I/d
    bool record_path_states = false;
    FeasibilityOptions feasibility;
};

enum class SolutionKind { InteriorConverged, BoundaryLimit };

inline const char* to_string(SolutionKind k) {
    return k == SolutionKind::InteriorConverged ? "interior-converged" : "boundary-limit";
}

struct PathPoint {
    double epsilon;
    MomentVector moments;
    double lambda_norm;
    double delta_trace;  // ||sigma_j - sigma_{j-1}||_1; NaN on the first row
};

// The max-entropy solution for one (constraints, m) instance. Carries the
// instance so downstream certification can recompute moments and assemble
// H_lambda without extra plumbing.
struct GibbsSolution {
    ConstraintSet constraints;
    MomentVector target_moments;
    Eigen::VectorXd lambda;
    DensityMatrix sigma;
    double log_partition = 0.0;
    MomentVector achieved_moments;
    double moment_residual = 0.0;
    double entropy = 0.0;
    SolutionKind classification = SolutionKind::InteriorConverged;
    int iterations = 0;
    double grad_tol = 1e-9;  // tolerance the solve ran at
    std::vector<PathPoint> path_trace;          // boundary-limit only
    std::vector<DensityMatrix> path_states;     // when requested
    bool lambda_diverging = false;
};

// phi(lambda) = ln tr exp(-H_lambda), evaluated with the spectral shift
// phi = -s + ln sum_a exp(-(h_a - s)), s = min eigenvalue of H_lambda.
inline double log_partition(const ConstraintSet& constraints, const Eigen::VectorXd& lambda) {
    auto spec = spectral_decomposition(constraints.assemble_matrix(lambda));
    const double s = spec.eigenvalues.minCoeff();
    const double sum = (-(spec.eigenvalues.array() - s)).exp().sum();
    return -s + std::log(sum);
}

namespace detail {

// One spectral pass shared by the dual value, gradient, Hessian and state.
struct DualEval {
    double phi;
    Eigen::VectorXd sigma_eigenvalues;  // ascending with H_lambda's eigenvalues
    Matrix eigenvectors;
    MomentVector sigma_moments;
};

inline DualEval dual_eval(const ConstraintSet& cs, const Eigen::VectorXd& lambda) {
    auto spec = spectral_decomposition(cs.assemble_matrix(lambda));
    const double s = spec.eigenvalues.minCoeff();
    Eigen::VectorXd w = (-(spec.eigenvalues.array() - s)).exp();
    const double z = w.sum();
    w /= z;

    DualEval ev;
    ev.phi = -s + std::log(z);
    ev.sigma_eigenvalues = std::move(w);
    ev.eigenvectors = std::move(spec.eigenvectors);
    ev.sigma_moments.resize(cs.size());
    for (int i = 0; i < cs.size(); ++i) {
        const Matrix xi = ev.eigenvectors.adjoint() * cs.observable(i).entries() * ev.eigenvectors;
        double mi = 0.0;
        for (int a = 0; a < cs.dim(); ++a) mi += ev.sigma_eigenvalues(a) * xi(a, a).real();
        ev.sigma_moments(i) = mi;
    }
    return ev;
}

// Logarithmic mean with the degenerate-pair limit L(p, p) = p.
inline double log_mean(double p, double q) {
    if (p <= 0.0 || q <= 0.0) return 0.0;
    const double dl = std::log(p) - std::log(q);
    if (std::abs(dl) < 1e-9) return 0.5 * (p + q);
    return (p - q) / dl;
}

inline Eigen::MatrixXd km_hessian(const ConstraintSet& cs, const DualEval& ev) {
    const int k = cs.size();
    const int d = cs.dim();
    std::vector<Matrix> rotated(k);
    for (int i = 0; i < k; ++i) {
        rotated[i] = ev.eigenvectors.adjoint() * cs.observable(i).entries() * ev.eigenvectors;
    }
    Eigen::MatrixXd hess(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            Complex acc = 0.0;
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) {
                    const double l = log_mean(ev.sigma_eigenvalues(a), ev.sigma_eigenvalues(b));
                    if (l != 0.0) acc += l * rotated[i](a, b) * rotated[j](b, a);
                }
            }
            const double v = acc.real() - ev.sigma_moments(i) * ev.sigma_moments(j);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

// Minimum-norm solution of H step = -grad via eigenvalue thresholding
// (pseudo-inverse semantics keeps the step defined under a dependent span).
// The cutoff and the near-singular regularizer are relative to the largest
// eigenvalue: deep in a boundary approach the whole Hessian shrinks like the
// smallest Gibbs weight and an absolute floor would discard it wholesale.
inline Eigen::VectorXd newton_step(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const double wmax = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd step = Eigen::VectorXd::Zero(grad.size());
    if (wmax <= 0.0) return step;
    const double cut = 1e-12 * wmax;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double w = es.eigenvalues()(i);
        if (w > cut) {
            const double coef = es.eigenvectors().col(i).dot(grad) / (w + cut);
            step -= coef * es.eigenvectors().col(i);
        }
    }
    return step;
}

inline DensityMatrix state_from_eval(const DualEval& ev) {
    return DensityMatrix::from_spectrum(ev.eigenvectors, ev.sigma_eigenvalues);
}

inline double spectrum_entropy(const Eigen::VectorXd& p) {
    double s = 0.0;
    for (int a = 0; a < p.size(); ++a) {
        if (p(a) > kEntropyCutoff) s -= p(a) * std::log(p(a));
    }
    return s;
}

inline GibbsSolution make_solution(const ConstraintSet& cs, const MomentVector& m,
                                   const Eigen::VectorXd& lambda, const DualEval& ev,
                                   SolutionKind kind, int iters, const SolverOptions& opts) {
    GibbsSolution sol{cs, m, lambda, state_from_eval(ev)};
    sol.log_partition = ev.phi;
    sol.achieved_moments = ev.sigma_moments;
    sol.moment_residual = (ev.sigma_moments - m).norm();
    sol.entropy = spectrum_entropy(ev.sigma_eigenvalues);
    sol.classification = kind;
    sol.iterations = iters;
    sol.grad_tol = opts.grad_tol;
    return sol;
}

inline GibbsSolution solve_interior_from(const ConstraintSet& cs, const MomentVector& m,
                                         Eigen::VectorXd lambda, const SolverOptions& opts) {
    DualEval ev = dual_eval(cs, lambda);
    double value = ev.phi + lambda.dot(m);
    Eigen::VectorXd best_lambda = lambda;
    double best_residual = (m - ev.sigma_moments).norm();

    for (int iter = 1; iter <= opts.max_newton_iters; ++iter) {
        const Eigen::VectorXd grad = m - ev.sigma_moments;  // grad of phi(l) + <l, m>
        const double residual = grad.norm();
        if (residual < best_residual) {
            best_residual = residual;
            best_lambda = lambda;
        }
        if (residual <= opts.grad_tol) {
            return make_solution(cs, m, lambda, ev, SolutionKind::InteriorConverged, iter - 1, opts);
        }

        Eigen::VectorXd step = newton_step(km_hessian(cs, ev), grad);
        double slope = grad.dot(step);
        if (!(slope < 0.0)) {  // degenerate Hessian left no descent: fall back to steepest descent
            step = -grad;
            slope = -residual * residual;
        }

        double t = 1.0;
        Eigen::VectorXd next;
        DualEval next_ev;
        double next_value = value;
        bool accepted = false;
        while (t > 1e-16) {
            next = lambda + t * step;
            next_ev = dual_eval(cs, next);
            next_value = next_ev.phi + next.dot(m);
            if (next_value <= value + opts.armijo_c1 * t * slope) {
                accepted = true;
                break;
            }
            // Near the optimum the predicted decrease drops below what the
            // objective can resolve in double precision; accept on gradient
            // contraction instead (Newton is locally contractive here).
            if (t * std::abs(slope) <= 1e-14 * (1.0 + std::abs(value)) &&
                (m - next_ev.sigma_moments).norm() < residual) {
                accepted = true;
                break;
            }
            t *= opts.backtrack;
        }
        if (!accepted) {
            throw NonConvergenceError("Newton line search stalled at residual " +
                                          std::to_string(best_residual),
                                      best_lambda, best_residual);
        }
        lambda = std::move(next);
        ev = std::move(next_ev);
        value = next_value;
        if (lambda.norm() > opts.lambda_norm_cap) {
            throw BoundarySuspectedError(
                "multiplier norm exceeded the cap; moment data looks boundary", lambda);
        }
    }
    throw NonConvergenceError("Newton exhausted max_newton_iters at residual " +
                                  std::to_string(best_residual),
                              best_lambda, best_residual);
}

}  // namespace detail

// Gradient of phi: -m(sigma_lambda).
inline Eigen::VectorXd dual_gradient(const ConstraintSet& constraints,
                                     const Eigen::VectorXd& lambda) {
    return -detail::dual_eval(constraints, lambda).sigma_moments;
}

// Hessian of phi: the Kubo-Mori covariance
//   Hess_ij = sum_ab L(p_a, p_b) (X_i)_ab (X_j)_ba - m_i(sigma) m_j(sigma)
// in the H_lambda eigenbasis, with L the logarithmic mean. Symmetric positive
// semidefinite up to roundoff.
inline Eigen::MatrixXd dual_hessian(const ConstraintSet& constraints,
                                    const Eigen::VectorXd& lambda) {
    auto ev = detail::dual_eval(constraints, lambda);
    return detail::km_hessian(constraints, ev);
}

// Newton iteration on F(lambda) = phi(lambda) + <lambda, m> from lambda = 0
// with Armijo backtracking. Requires interior moment data; a multiplier norm
// beyond the cap raises BoundarySuspectedError so the caller can re-classify.
inline GibbsSolution solve_interior(const ConstraintSet& constraints, const MomentVector& m,
                                    const SolverOptions& opts = {}) {
    if (m.size() != constraints.size()) {
        throw DimensionError("solve_interior: moment length differs from constraint count");
    }
    return detail::solve_interior_from(constraints, m, Eigen::VectorXd::Zero(m.size()), opts);
}

// Path-following toward boundary data: solve at m_j = (1 - eps_j) m + eps_j
// m_int with eps_j = 2^-j, warm-starting each Newton solve from the previous
// multipliers, until consecutive iterates are 1e-7-close in trace norm.
inline GibbsSolution solve_boundary(const ConstraintSet& constraints, const MomentVector& m,
                                    const SolverOptions& opts = {}) {
    if (m.size() != constraints.size()) {
        throw DimensionError("solve_boundary: moment length differs from constraint count");
    }
    const MomentVector anchor = opts.interior_anchor.value_or(
        moment_map(DensityMatrix::maximally_mixed(constraints.dim()), constraints));
    if (anchor.size() != m.size()) {
        throw ValidationError("interior anchor length differs from constraint count");
    }
    if ((m - anchor).norm() <= opts.grad_tol) {
        return solve_interior(constraints, m, opts);  // degenerate call: the anchor itself
    }

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(m.size());
    std::optional<GibbsSolution> prev;
    std::vector<PathPoint> trace;
    std::vector<DensityMatrix> states;
    bool monotone_growth = true;
    double max_lambda_norm = 0.0;
    int total_iters = 0;

    for (int j = 1; j <= opts.boundary_path_length; ++j) {
        const double eps = std::ldexp(1.0, -j);  // 2^-j
        const MomentVector mj = (1.0 - eps) * m + eps * anchor;
        // Deep path points sit closer together than the user's moment
        // tolerance; tighten the inner solve so they stay distinguishable.
        SolverOptions inner = opts;
        inner.grad_tol = std::max(1e-13, std::min(opts.grad_tol, 1e-2 * eps));
        std::optional<GibbsSolution> sol;
        try {
            sol = detail::solve_interior_from(constraints, mj, warm, inner);
        } catch (const BoundarySuspectedError&) {
            // The cap fired inside the schedule; keep the best state so far.
            break;
        } catch (const NonConvergenceError&) {
            if (prev) break;  // return the last completed path point
            throw;
        }
        total_iters += sol->iterations;
        warm = sol->lambda;

        const double lnorm = sol->lambda.norm();
        if (!trace.empty() && lnorm < trace.back().lambda_norm) monotone_growth = false;
        max_lambda_norm = std::max(max_lambda_norm, lnorm);

        double delta = std::numeric_limits<double>::quiet_NaN();
        if (prev) delta = trace_norm_distance(sol->sigma, prev->sigma);
        trace.push_back({eps, mj, lnorm, delta});
        if (opts.record_path_states) states.push_back(sol->sigma);

        const bool done = prev && delta <= opts.boundary_stop_tol;
        prev = std::move(sol);
        if (done) break;
    }

    if (!prev) {
        throw NonConvergenceError("boundary path produced no iterate", warm, m.norm());
    }
    GibbsSolution out = std::move(*prev);
    out.target_moments = m;
    out.moment_residual = (out.achieved_moments - m).norm();
    out.classification = SolutionKind::BoundaryLimit;
    out.grad_tol = opts.grad_tol;  // the caller-facing tolerance, not the inner one
    out.iterations = total_iters;
    out.path_trace = std::move(trace);
    out.path_states = std::move(states);
    out.lambda_diverging = monotone_growth && max_lambda_norm > opts.lambda_norm_cap / 10.0;
    return out;
}

// Dispatch on feasibility: interior data goes to Newton, boundary data to the
// path follower, infeasible data raises InfeasibleError with the witness.
inline GibbsSolution max_entropy(const ConstraintSet& constraints, const MomentVector& m,
                                 const SolverOptions& opts = {}) {
    const FeasibilityVerdict verdict = check_feasibility(constraints, m, opts.feasibility);
    switch (verdict.status) {
        case Feasibility::Infeasible:
            throw InfeasibleError("target moments lie outside the moment body (margin " +
                                      std::to_string(verdict.margin) + ")",
                                  verdict.witness_direction);
        case Feasibility::Interior:
            try {
                return solve_interior(constraints, m, opts);
            } catch (const BoundarySuspectedError&) {
                return solve_boundary(constraints, m, opts);  // re-classified by the cap
            }
        case Feasibility::Boundary:
        default:
            return solve_boundary(constraints, m, opts);
    }
}

// Feasibility verdict plus, for feasible data, the max-entropy state as the
// achieving witness.
inline FeasibilityVerdict check_feasibility_with_witness(const ConstraintSet& constraints,
                                                         const MomentVector& m,
                                                         const SolverOptions& opts = {}) {
    FeasibilityVerdict verdict = check_feasibility(constraints, m, opts.feasibility);
    if (verdict.status == Feasibility::Infeasible) return verdict;
    if (verdict.status == Feasibility::Interior) {
        try {
            verdict.witness_state = solve_interior(constraints, m, opts).sigma;
        } catch (const BoundarySuspectedError&) {
            verdict.witness_state = solve_boundary(constraints, m, opts).sigma;
        }
    } else {
        verdict.witness_state = solve_boundary(constraints, m, opts).sigma;
    }
    return verdict;
}

}  // namespace maxent
