#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxent/entropy.hpp"
#include "maxent/operators.hpp"
#include "maxent/rng.hpp"

namespace maxent {

using MomentVector = Eigen::VectorXd;

inline constexpr double kSpanRankTol = 1e-9;

// An ordered list of observables X_1..X_k on a common dimension, spanning the
// operator system V = span{I, X_1..X_k}. Linear independence of that spanning
// set is decided once at construction from the Gram matrix rank under the
// trace inner product.
class ConstraintSet {
public:
    explicit ConstraintSet(std::vector<HermitianOperator> observables,
                           std::vector<std::string> names = {})
        : observables_(std::move(observables)), names_(std::move(names)) {
        if (observables_.empty()) {
            throw ValidationError("ConstraintSet needs at least one observable");
        }
        dim_ = observables_.front().dim();
        for (const auto& x : observables_) {
            if (x.dim() != dim_) {
                throw DimensionError("all observables must share one dimension");
            }
        }
        if (!names_.empty() && static_cast<int>(names_.size()) != size()) {
            throw ValidationError("names, when given, must match the observable count");
        }
        independent_ = compute_independence();
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(observables_.size()); }  // k
    const HermitianOperator& observable(int i) const { return observables_[i]; }
    const std::vector<HermitianOperator>& observables() const { return observables_; }
    const std::vector<std::string>& names() const { return names_; }

    // True when {I, X_1..X_k} is linearly independent; a dependent span makes
    // the moment body lower-dimensional and every point of it boundary-like.
    bool span_independent() const { return independent_; }

    // H_lambda = sum_i lambda_i X_i.
    HermitianOperator assemble(const Eigen::VectorXd& lambda) const {
        return HermitianOperator(assemble_matrix(lambda));
    }

    // Same combination without the wrapper; real coefficients keep hermiticity
    // exact, so hot paths skip the construction checks.
    Matrix assemble_matrix(const Eigen::VectorXd& lambda) const {
        if (lambda.size() != size()) {
            throw DimensionError("multiplier length differs from constraint count");
        }
        Matrix h = Matrix::Zero(dim_, dim_);
        for (int i = 0; i < size(); ++i) {
            h += lambda(i) * observables_[i].entries();
        }
        return h;
    }

private:
    bool compute_independence() const {
        const int k = size();
        Eigen::MatrixXd gram(k + 1, k + 1);
        std::vector<const Matrix*> basis;
        Matrix eye = Matrix::Identity(dim_, dim_);
        basis.push_back(&eye);
        for (const auto& x : observables_) basis.push_back(&x.entries());
        for (int i = 0; i <= k; ++i) {
            for (int j = i; j <= k; ++j) {
                const double v = trace_product(*basis[i], *basis[j]).real();
                gram(i, j) = v;
                gram(j, i) = v;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const double top = es.eigenvalues().maxCoeff();
        const double tol = kSpanRankTol * std::max(1.0, top);
        int rank = 0;
        for (int i = 0; i <= k; ++i) {
            if (es.eigenvalues()(i) > tol) ++rank;
        }
        return rank == k + 1;
    }

    int dim_ = 0;
    std::vector<HermitianOperator> observables_;
    std::vector<std::string> names_;
    bool independent_ = true;
};

// m_i(rho) = tr(rho X_i); the imaginary residue must stay below 1e-10.
inline MomentVector moment_map(const DensityMatrix& rho, const ConstraintSet& constraints) {
    if (rho.dim() != constraints.dim()) {
        throw DimensionError("moment_map: state and constraints disagree on dimension");
    }
    MomentVector m(constraints.size());
    for (int i = 0; i < constraints.size(); ++i) {
        const Complex t = trace_product(rho.entries(), constraints.observable(i).entries());
        if (std::abs(t.imag()) >= 1e-10) {
            throw BackendError("moment has imaginary residue " + std::to_string(t.imag()));
        }
        m(i) = t.real();
    }
    return m;
}

// Support function of the moment body: h(lambda) = lambda_max(sum lambda_i X_i).
inline double support_function(const ConstraintSet& constraints, const Eigen::VectorXd& lambda) {
    return lambda_max(constraints.assemble(lambda));
}

enum class Feasibility { Interior, Boundary, Infeasible };

inline const char* to_string(Feasibility f) {
    switch (f) {
        case Feasibility::Interior: return "interior";
        case Feasibility::Boundary: return "boundary";
        case Feasibility::Infeasible: return "infeasible";
    }
    return "unknown";
}

struct FeasibilityVerdict {
    Feasibility status = Feasibility::Interior;
    // Minimal support-function slack over the unit sphere; negative means a
    // violated direction exists.
    double margin = 0.0;
    // For infeasible data: a direction with <lambda, m> > lambda_max(H_lambda).
    Eigen::VectorXd witness_direction;
    // For feasible data: filled by check_feasibility_with_witness (dual solver).
    std::optional<DensityMatrix> witness_state;
    // Set when {I, X_i} is linearly dependent: the moment body is
    // lower-dimensional and no point has a positive sphere margin.
    bool dependent_span = false;
};

struct FeasibilityOptions {
    double feas_tol = 1e-7;
    int max_iter = 5000;     // subgradient budget per start direction
    double step_scale = 1.0; // subgradient step c/sqrt(t)
};

namespace detail {

// Subgradient of g(lambda) = lambda_max(H_lambda) - <lambda, m>: moments of
// the normalized projector onto the top eigenspace (eigenvalues within 1e-9
// of the max), minus m. Averaging over the eigenspace keeps the direction
// stable at degenerate top eigenvalues.
struct SphereEval {
    double value;
    Eigen::VectorXd subgradient;
};

inline SphereEval eval_slack(const ConstraintSet& cs, const MomentVector& m,
                             const Eigen::VectorXd& lambda) {
    auto spec = spectral_decomposition(cs.assemble_matrix(lambda));
    const int d = cs.dim();
    const double top = spec.eigenvalues(d - 1);
    int first = d - 1;
    while (first > 0 && top - spec.eigenvalues(first - 1) <= 1e-9) --first;
    const int count = d - first;

    Eigen::VectorXd grad(cs.size());
    const Matrix top_block = spec.eigenvectors.rightCols(count);
    for (int i = 0; i < cs.size(); ++i) {
        const Matrix xi = top_block.adjoint() * cs.observable(i).entries() * top_block;
        grad(i) = xi.trace().real() / count - m(i);
    }
    return {top - lambda.dot(m), std::move(grad)};
}

struct SphereMinResult {
    double margin;
    Eigen::VectorXd argmin;
    bool converged;
};

// Minimize g over the unit sphere from one start: a diminishing-step
// projected subgradient phase followed by a projected-gradient descent with
// Armijo backtracking to sharpen the margin near smooth minima.
inline SphereMinResult minimize_slack_from(const ConstraintSet& cs, const MomentVector& m,
                                           Eigen::VectorXd start, const FeasibilityOptions& opts) {
    Eigen::VectorXd lambda = start.normalized();
    SphereEval cur = eval_slack(cs, m, lambda);
    double best_value = cur.value;
    Eigen::VectorXd best_lambda = lambda;

    const double c = opts.step_scale * std::max(1.0, m.norm());
    const int subgrad_iters = std::min(100, opts.max_iter);
    for (int t = 1; t <= subgrad_iters; ++t) {
        lambda = (lambda - (c / std::sqrt(static_cast<double>(t))) * cur.subgradient).normalized();
        cur = eval_slack(cs, m, lambda);
        if (cur.value < best_value) {
            best_value = cur.value;
            best_lambda = lambda;
        }
    }

    lambda = best_lambda;
    cur = eval_slack(cs, m, lambda);
    bool converged = false;
    int stalls = 0;
    double step = 1.0;
    const int refine_budget = std::max(0, std::min(200, opts.max_iter - subgrad_iters));
    for (int t = 0; t < refine_budget; ++t) {
        Eigen::VectorXd tangent = cur.subgradient - cur.subgradient.dot(lambda) * lambda;
        const double tnorm = tangent.norm();
        if (tnorm < 1e-12) {
            converged = true;
            break;
        }
        step = std::min(4.0 * step, 1.0 / std::max(1.0, tnorm));
        bool moved = false;
        double gain = 0.0;
        while (step > 1e-14) {
            Eigen::VectorXd trial = (lambda - step * tangent).normalized();
            SphereEval te = eval_slack(cs, m, trial);
            if (te.value <= cur.value - 1e-4 * step * tnorm * tnorm) {
                gain = cur.value - te.value;
                lambda = std::move(trial);
                cur = std::move(te);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (cur.value < best_value) {
            best_value = cur.value;
            best_lambda = lambda;
        }
        if (!moved || gain <= 1e-15 * (1.0 + std::abs(cur.value))) {
            if (++stalls >= 2) {  // stationary at this resolution (possibly nonsmooth)
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    return {best_value, std::move(best_lambda), converged};
}

}  // namespace detail

// Decide whether m lies inside, on the boundary of, or outside the moment
// body by minimizing g(lambda) = lambda_max(H_lambda) - <lambda, m> over the
// unit sphere (positive homogeneity reduces the universally quantified
// support condition to the sphere). The verdict carries no witness state;
// check_feasibility_with_witness adds one via the dual solver.
inline FeasibilityVerdict check_feasibility(const ConstraintSet& constraints,
                                            const MomentVector& m,
                                            const FeasibilityOptions& opts = {}) {
    const int k = constraints.size();
    if (m.size() != k) {
        throw DimensionError("check_feasibility: moment length differs from constraint count");
    }

    double margin;
    Eigen::VectorXd argmin;
    if (k == 1) {
        // The unit sphere is {+1, -1}; evaluate both.
        Eigen::VectorXd plus(1), minus(1);
        plus << 1.0;
        minus << -1.0;
        const double gp = support_function(constraints, plus) - m(0);
        const double gm = support_function(constraints, minus) + m(0);
        margin = std::min(gp, gm);
        argmin = gp <= gm ? plus : minus;
    } else {
        std::vector<Eigen::VectorXd> starts;
        if (m.norm() > 1e-14) starts.push_back(m.normalized());
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
            e(i) = 1.0;
            starts.push_back(e);
            starts.push_back(-e);
        }
        bool any_converged = false;
        margin = std::numeric_limits<double>::infinity();
        for (auto& s : starts) {
            auto res = detail::minimize_slack_from(constraints, m, s, opts);
            any_converged = any_converged || res.converged;
            if (res.margin < margin) {
                margin = res.margin;
                argmin = std::move(res.argmin);
            }
        }
        if (!any_converged) {
            throw IndeterminateVerdictError(
                "sphere minimization did not settle within the iteration budget", margin);
        }
    }

    FeasibilityVerdict verdict;
    verdict.margin = margin;
    verdict.dependent_span = !constraints.span_independent();
    if (margin < -opts.feas_tol) {
        verdict.status = Feasibility::Infeasible;
        verdict.witness_direction = std::move(argmin);
    } else if (margin <= opts.feas_tol) {
        verdict.status = Feasibility::Boundary;
    } else {
        verdict.status = Feasibility::Interior;
    }
    return verdict;
}

// Moment vectors of Haar-random pure states; a brute-force inner
// approximation of the moment body. Deterministic per seed.
inline std::vector<MomentVector> pure_state_moment_cloud(const ConstraintSet& constraints,
                                                         int samples, std::uint64_t seed) {
    if (samples < 1) throw PreconditionError("pure_state_moment_cloud: samples >= 1 required");
    Rng rng(seed);
    std::vector<MomentVector> cloud;
    cloud.reserve(samples);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXcd psi = rng.haar_vector(constraints.dim());
        MomentVector m(constraints.size());
        for (int i = 0; i < constraints.size(); ++i) {
            m(i) = (psi.adjoint() * constraints.observable(i).entries() * psi)(0, 0).real();
        }
        cloud.push_back(std::move(m));
    }
    return cloud;
}

}  // namespace maxent
