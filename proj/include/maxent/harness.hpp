#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "maxent/bounds.hpp"
#include "maxent/dual_solver.hpp"
#include "maxent/rng.hpp"

namespace maxent {

enum class SequenceKind { MixToSigma, MomentJitter, BoundaryApproach };

inline const char* to_string(SequenceKind k) {
    switch (k) {
        case SequenceKind::MixToSigma: return "mix";
        case SequenceKind::MomentJitter: return "jitter";
        case SequenceKind::BoundaryApproach: return "boundary";
    }
    return "unknown";
}

struct SequenceSpec {
    SequenceKind kind = SequenceKind::MixToSigma;
    int length = 100;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
};

// One measured row per sequence element.
struct ConvergenceRecord {
    struct Row {
        int n;
        double moment_error;        // ||m(rho_n) - m||_2
        double entropy_gap;         // S(sigma) - S(rho_n)
        double relative_entropy;    // D(rho_n || sigma), may be +inf
        double trace_distance;      // ||rho_n - sigma||_1
        double pinsker_mixed_bound; // +inf when sigma has no finite multipliers
    };
    std::vector<Row> rows;
    // Exact-identity residual per n; filled for interior solutions only.
    std::vector<double> identity_residual;
    double final_threshold = 0.0;  // the asserted final trace distance limit
    bool final_ok = true;
};

// Sequences realizing the convergence hypotheses. Deterministic per seed.
//  - mix:      rho_n = (1 - t_n) sigma + t_n tau_n, t_n = noise/n, tau_n Ginibre.
//  - jitter:   Gibbs states at m + (noise/n) u_n, u_n random unit directions,
//              resampled (up to 50 tries) if the jittered data is not interior.
//  - boundary: the path states sigma^(j) of the boundary follower.
inline std::vector<DensityMatrix> generate_sequence(const GibbsSolution& solution,
                                                    const ConstraintSet& constraints,
                                                    const SequenceSpec& spec) {
    if (spec.length < 1) throw PreconditionError("sequence length must be >= 1");
    Rng rng(spec.seed);
    std::vector<DensityMatrix> seq;
    seq.reserve(spec.length);

    switch (spec.kind) {
        case SequenceKind::MixToSigma: {
            for (int n = 1; n <= spec.length; ++n) {
                const double t = std::min(1.0, spec.noise_scale / n);
                if (t == 0.0) {
                    seq.push_back(solution.sigma);
                    continue;
                }
                const DensityMatrix tau = rng.ginibre_state(constraints.dim());
                seq.push_back(DensityMatrix((1.0 - t) * solution.sigma.entries() +
                                            t * tau.entries()));
            }
            break;
        }
        case SequenceKind::MomentJitter: {
            SolverOptions opts;
            opts.grad_tol = solution.grad_tol;
            for (int n = 1; n <= spec.length; ++n) {
                const double scale = spec.noise_scale / n;
                bool placed = false;
                for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
                    const MomentVector jittered =
                        solution.target_moments + scale * rng.unit_vector(constraints.size());
                    if (check_feasibility(constraints, jittered).status != Feasibility::Interior) {
                        continue;
                    }
                    try {
                        seq.push_back(solve_interior(constraints, jittered, opts).sigma);
                        placed = true;
                    } catch (const BoundarySuspectedError&) {
                    }
                }
                if (!placed) {
                    throw ValidationError("moment jitter found no feasible direction in 50 tries");
                }
            }
            break;
        }
        case SequenceKind::BoundaryApproach: {
            std::vector<DensityMatrix> states = solution.path_states;
            if (states.empty() && !solution.path_trace.empty()) {
                // Re-walk the recorded path geometry: same depth, same warm
                // starts, stop only where the original stopped.
                SolverOptions opts;
                opts.grad_tol = solution.grad_tol;
                opts.record_path_states = true;
                opts.boundary_path_length = static_cast<int>(solution.path_trace.size());
                opts.boundary_stop_tol = 0.0;
                states = solve_boundary(constraints, solution.target_moments, opts).path_states;
            }
            if (states.empty()) {
                throw ValidationError("boundary-approach sequence needs a path-following solution");
            }
            for (int n = 0; n < spec.length && n < static_cast<int>(states.size()); ++n) {
                seq.push_back(states[n]);
            }
            break;
        }
    }
    return seq;
}

// Evaluate the full record over a generated sequence and assert a final
// trace distance derived from the sequence construction: 2 noise/N for mix
// sequences (trace-norm convexity), 1e-4 for the boundary path, and the last
// mixed-Pinsker bound for jittered moments.
inline ConvergenceRecord run_convergence(const GibbsSolution& solution,
                                         const ConstraintSet& constraints, const MomentVector& m,
                                         const SequenceSpec& spec) {
    const std::vector<DensityMatrix> seq = generate_sequence(solution, constraints, spec);
    const bool interior = solution.classification == SolutionKind::InteriorConverged;

    ConvergenceRecord record;
    record.rows.reserve(seq.size());
    for (int idx = 0; idx < static_cast<int>(seq.size()); ++idx) {
        const DensityMatrix& rho = seq[idx];
        ConvergenceRecord::Row row;
        row.n = idx + 1;
        row.moment_error = (moment_map(rho, constraints) - m).norm();
        row.entropy_gap = solution.entropy - von_neumann_entropy(rho);
        row.relative_entropy = relative_entropy(rho, solution.sigma);
        row.trace_distance = trace_norm_distance(rho, solution.sigma);
        row.pinsker_mixed_bound = interior ? pinsker_mixed_rate(rho, solution, m)
                                           : std::numeric_limits<double>::infinity();
        record.rows.push_back(row);
        if (interior) {
            record.identity_residual.push_back(entropy_gap_identity(rho, solution, m).residual);
        }
    }

    switch (spec.kind) {
        case SequenceKind::MixToSigma:
            record.final_threshold = 2.0 * spec.noise_scale / spec.length + 1e-12;
            break;
        case SequenceKind::BoundaryApproach:
            record.final_threshold = 1e-4;
            break;
        case SequenceKind::MomentJitter:
            record.final_threshold = record.rows.back().pinsker_mixed_bound + 1e-8;
            break;
    }
    record.final_ok = record.rows.back().trace_distance <= record.final_threshold;
    return record;
}

struct EquivalenceVerdict {
    bool holds = true;
    double max_moment_violation = 0.0;   // over rows and observables
    double max_entropy_violation = 0.0;  // over rows
};

// Forward direction of the trace-norm equivalence, checked quantitatively on
// every row: |tr(rho_n X_i) - tr(sigma X_i)| <= ||rho_n - sigma||_1 ||X_i||
// (Hoelder) and |S(rho_n) - S(sigma)| within the entropy continuity bound.
inline EquivalenceVerdict equivalence_check(const GibbsSolution& solution,
                                            const ConstraintSet& constraints,
                                            const MomentVector& m, const SequenceSpec& spec) {
    (void)m;  // the limit moments are the ones sigma attains
    const std::vector<DensityMatrix> seq = generate_sequence(solution, constraints, spec);
    std::vector<double> obs_norms(constraints.size());
    for (int i = 0; i < constraints.size(); ++i) {
        obs_norms[i] = operator_norm(constraints.observable(i));
    }

    EquivalenceVerdict verdict;
    for (const DensityMatrix& rho : seq) {
        const double dist = trace_norm_distance(rho, solution.sigma);
        const MomentVector mr = moment_map(rho, constraints);
        for (int i = 0; i < constraints.size(); ++i) {
            const double lhs = std::abs(mr(i) - solution.achieved_moments(i));
            const double violation = lhs - (dist * obs_norms[i] + 1e-10);
            verdict.max_moment_violation = std::max(verdict.max_moment_violation, violation);
            if (violation > 0.0) verdict.holds = false;
        }
        const FannesCheck fc = fannes_audenaert(rho, solution.sigma);
        const double eviolation = fc.entropy_diff - (fc.bound + 1e-8);
        verdict.max_entropy_violation = std::max(verdict.max_entropy_violation, eviolation);
        if (eviolation > 0.0) verdict.holds = false;
    }
    return verdict;
}

namespace detail {

// Shortest decimal that round-trips the IEEE double exactly; infinities keep
// the in-band "inf" token.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline void write_csv(const ConvergenceRecord& record, std::ostream& out) {
    out << "n,moment_error,entropy_gap,relative_entropy,trace_distance,pinsker_mixed_bound\n";
    for (const auto& row : record.rows) {
        out << row.n << ',' << detail::format_double(row.moment_error) << ','
            << detail::format_double(row.entropy_gap) << ','
            << detail::format_double(row.relative_entropy) << ','
            << detail::format_double(row.trace_distance) << ','
            << detail::format_double(row.pinsker_mixed_bound) << '\n';
    }
}

}  // namespace maxent
