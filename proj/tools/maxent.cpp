// Command-line front end: feasibility, solve, certify, converge and
// channel-check over JSON problem files.
//
// Exit codes: 0 success (feasible data / checks passed), 2 parse or
// validation failure, 3 mathematically infeasible moments, 4 solver
// non-convergence or numerical failure, 5 bound self-check violation.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "maxent/maxent.hpp"

namespace {

using maxent::io::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoConvergence = 4;
constexpr int kExitSelfCheck = 5;

struct CommonFlags {
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::uint64_t seed = 0;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--tol", flags.tol, "Newton gradient tolerance override");
    cmd->add_option("--max-iter", flags.max_iter, "Newton iteration cap override");
    cmd->add_option("--seed", flags.seed, "random seed for sampled subcommands");
    cmd->add_option("--out", flags.out, "write the result file here instead of stdout");
    cmd->add_flag("--quiet", flags.quiet, "suppress the stdout summary");
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw maxent::ValidationError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw maxent::ValidationError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

maxent::io::Problem load_problem(const std::string& path, const CommonFlags& flags) {
    maxent::io::Problem problem = maxent::io::parse_problem(load_json(path));
    if (flags.tol) problem.options.grad_tol = *flags.tol;
    if (flags.max_iter) problem.options.max_newton_iters = *flags.max_iter;
    return problem;
}

void emit_result(const json& result, const CommonFlags& flags, const std::string& summary) {
    const std::string text = maxent::io::dump_result(result);
    if (!flags.out.empty()) {
        std::ofstream out(flags.out, std::ios::binary);
        if (!out) throw maxent::ValidationError("cannot write file: " + flags.out);
        out << text;
        if (!flags.quiet) std::cout << summary << " -> " << flags.out << "\n";
    } else if (!flags.quiet) {
        std::cout << text;
    }
}

int run_feasibility(const std::string& problem_path, const CommonFlags& flags) {
    auto problem = load_problem(problem_path, flags);
    const maxent::FeasibilityVerdict verdict = maxent::check_feasibility_with_witness(
        problem.constraints, problem.target_moments, problem.options);

    json result = maxent::io::result_envelope("feasibility");
    result.update(maxent::io::encode_verdict(verdict));
    std::ostringstream summary;
    summary << "feasibility: " << maxent::to_string(verdict.status)
            << " (margin " << verdict.margin << ")";
    emit_result(result, flags, summary.str());
    return verdict.status == maxent::Feasibility::Infeasible ? kExitInfeasible : kExitOk;
}

int run_solve(const std::string& problem_path, const CommonFlags& flags) {
    auto problem = load_problem(problem_path, flags);
    json result = maxent::io::result_envelope("solve");
    try {
        const maxent::GibbsSolution solution =
            maxent::max_entropy(problem.constraints, problem.target_moments, problem.options);
        result["solution"] = maxent::io::encode_solution(solution);
        std::ostringstream summary;
        summary << "solve: " << maxent::to_string(solution.classification) << ", entropy "
                << solution.entropy;
        emit_result(result, flags, summary.str());
        return kExitOk;
    } catch (const maxent::InfeasibleError& e) {
        result["status"] = "infeasible";
        result["witness_direction"] = maxent::io::encode_vector(e.witness);
        emit_result(result, flags, "solve: infeasible");
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
}

int run_certify(const std::string& problem_path, const std::string& state_path,
                const CommonFlags& flags) {
    auto problem = load_problem(problem_path, flags);
    const maxent::DensityMatrix rho = maxent::io::parse_state(load_json(state_path));
    if (rho.dim() != problem.constraints.dim()) {
        throw maxent::ValidationError("state dimension differs from the problem dimension");
    }
    const maxent::GibbsSolution solution =
        maxent::max_entropy(problem.constraints, problem.target_moments, problem.options);
    const maxent::CertificateReport report =
        maxent::certify(rho, solution, problem.target_moments);

    // Bound self-checks; a violation is a library defect, not a user error.
    std::vector<std::string> violations;
    if (report.identity_residual && *report.identity_residual > 1e-8) {
        violations.push_back("identity residual above 1e-8");
    }
    if (report.pinsker_exact_bound &&
        report.trace_distance > *report.pinsker_exact_bound + 1e-8) {
        violations.push_back("trace distance exceeds the exact Pinsker bound");
    }
    if (report.pinsker_mixed_bound && std::isfinite(report.relative_entropy)) {
        const double linear = solution.lambda.dot(report.moment_mismatch);
        if (report.entropy_gap + linear >= 0.0 &&
            report.trace_distance > *report.pinsker_mixed_bound + 1e-8) {
            violations.push_back("trace distance exceeds the mixed Pinsker bound");
        }
    }
    if (std::abs(report.entropy_gap) > report.fannes_bound + 1e-8) {
        violations.push_back("entropy gap exceeds the Fannes-Audenaert bound");
    }

    json result = maxent::io::result_envelope("certify");
    result["solution"] = maxent::io::encode_solution(solution);
    result["certificate"] = maxent::io::encode_certificate(report);
    if (!violations.empty()) result["self_check_violations"] = violations;
    std::ostringstream summary;
    summary << "certify: trace distance " << report.trace_distance;
    emit_result(result, flags, summary.str());
    for (const auto& v : violations) std::cerr << "self-check violation: " << v << "\n";
    return violations.empty() ? kExitOk : kExitSelfCheck;
}

int run_converge(const std::string& problem_path, const std::string& kind_name, int length,
                 double noise, const std::string& csv_out, const CommonFlags& flags) {
    auto problem = load_problem(problem_path, flags);
    maxent::SequenceSpec spec;
    spec.length = length;
    spec.noise_scale = noise;
    spec.seed = flags.seed;
    if (kind_name == "mix") {
        spec.kind = maxent::SequenceKind::MixToSigma;
    } else if (kind_name == "jitter") {
        spec.kind = maxent::SequenceKind::MomentJitter;
    } else if (kind_name == "boundary") {
        spec.kind = maxent::SequenceKind::BoundaryApproach;
    } else {
        throw maxent::ValidationError("unknown sequence kind: " + kind_name);
    }

    maxent::SolverOptions options = problem.options;
    options.record_path_states = spec.kind == maxent::SequenceKind::BoundaryApproach;
    const maxent::GibbsSolution solution =
        maxent::max_entropy(problem.constraints, problem.target_moments, options);
    const maxent::ConvergenceRecord record =
        maxent::run_convergence(solution, problem.constraints, problem.target_moments, spec);

    if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary);
        if (!out) throw maxent::ValidationError("cannot write file: " + csv_out);
        maxent::write_csv(record, out);
        if (!flags.quiet) {
            std::cout << "converge: " << record.rows.size() << " rows, final distance "
                      << record.rows.back().trace_distance << " -> " << csv_out << "\n";
        }
    } else {
        maxent::write_csv(record, std::cout);
    }
    if (!record.final_ok) {
        std::cerr << "self-check violation: final trace distance "
                  << record.rows.back().trace_distance << " above threshold "
                  << record.final_threshold << "\n";
        return kExitSelfCheck;
    }
    return kExitOk;
}

int run_channel_check(const std::string& problem_path, const std::string& channel_path,
                      int trials, const CommonFlags& flags) {
    auto problem = load_problem(problem_path, flags);
    const int d = problem.constraints.dim();
    std::optional<maxent::KrausChannel> fixed;
    if (!channel_path.empty()) {
        fixed = maxent::io::parse_channel(load_json(channel_path));
        if (fixed->dim_in() != d) {
            throw maxent::ValidationError("channel input dimension differs from the problem");
        }
    }
    const maxent::GibbsSolution solution =
        maxent::max_entropy(problem.constraints, problem.target_moments, problem.options);

    maxent::Rng rng(flags.seed);
    json rows = json::array();
    double max_contraction = 0.0, max_adjoint = 0.0, max_duality = 0.0;
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const maxent::KrausChannel channel =
            fixed ? *fixed : maxent::random_channel(d, d, 2, flags.seed * 7919 + t + 1);
        const maxent::DensityMatrix rho = rng.ginibre_state(d);
        const auto [clhs, crhs] = maxent::contraction_check(channel, rho, solution.sigma);
        const maxent::HermitianOperator b = rng.hermitian_contraction(channel.dim_out());
        const auto [alhs, arhs] = maxent::adjoint_norm_check(channel, b);
        const double pairing_out =
            maxent::trace_product(maxent::apply(channel, rho).entries(), b.entries()).real();
        const double pairing_in =
            maxent::trace_product(rho.entries(), maxent::adjoint_apply(channel, b).entries())
                .real();
        const double duality = std::abs(pairing_out - pairing_in);

        max_contraction = std::max(max_contraction, clhs - crhs);
        max_adjoint = std::max(max_adjoint, alhs - arhs);
        max_duality = std::max(max_duality, duality);
        if (clhs > crhs + 1e-9 || alhs > arhs + 1e-9 || duality > 1e-10) ++violations;
        rows.push_back(json{{"trial", t},
                            {"contraction_lhs", maxent::io::encode_double(clhs)},
                            {"contraction_rhs", maxent::io::encode_double(crhs)},
                            {"adjoint_lhs", maxent::io::encode_double(alhs)},
                            {"adjoint_rhs", maxent::io::encode_double(arhs)},
                            {"duality_residual", maxent::io::encode_double(duality)}});
    }

    json result = maxent::io::result_envelope("channel-check");
    result["trials"] = trials;
    result["violations"] = violations;
    if (fixed) result["adjoint_unital"] = fixed->adjoint_unital();
    result["max_contraction_excess"] = maxent::io::encode_double(max_contraction);
    result["max_adjoint_excess"] = maxent::io::encode_double(max_adjoint);
    result["max_duality_residual"] = maxent::io::encode_double(max_duality);
    result["rows"] = std::move(rows);
    std::ostringstream summary;
    summary << "channel-check: " << trials << " trials, " << violations << " violations";
    emit_result(result, flags, summary.str());
    return violations == 0 ? kExitOk : kExitSelfCheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-entropy Gibbs state inference"};
    app.require_subcommand(1);

    std::function<int()> action;

    CommonFlags feas_flags;
    std::string feas_problem;
    auto* feas = app.add_subcommand("feasibility", "classify target moments against the moment body");
    feas->add_option("problem", feas_problem, "problem file")->required();
    add_common(feas, feas_flags);
    feas->callback([&] { action = [&] { return run_feasibility(feas_problem, feas_flags); }; });

    CommonFlags solve_flags;
    std::string solve_problem;
    auto* solve = app.add_subcommand("solve", "compute the max-entropy Gibbs state");
    solve->add_option("problem", solve_problem, "problem file")->required();
    add_common(solve, solve_flags);
    solve->callback([&] { action = [&] { return run_solve(solve_problem, solve_flags); }; });

    CommonFlags cert_flags;
    std::string cert_problem, cert_state;
    auto* cert = app.add_subcommand("certify", "bound a candidate state against the solution");
    cert->add_option("problem", cert_problem, "problem file")->required();
    cert->add_option("state", cert_state, "density matrix file")->required();
    add_common(cert, cert_flags);
    cert->callback(
        [&] { action = [&] { return run_certify(cert_problem, cert_state, cert_flags); }; });

    CommonFlags conv_flags;
    std::string conv_problem, conv_kind = "mix", conv_csv;
    int conv_n = 100;
    double conv_noise = 1.0;
    auto* conv = app.add_subcommand("converge", "simulate a convergent state sequence");
    conv->add_option("problem", conv_problem, "problem file")->required();
    conv->add_option("--kind", conv_kind, "mix | jitter | boundary");
    conv->add_option("--n", conv_n, "sequence length");
    conv->add_option("--noise", conv_noise, "noise scale");
    conv->add_option("--csv-out", conv_csv, "write the record CSV here");
    add_common(conv, conv_flags);
    conv->callback([&] {
        action = [&] {
            return run_converge(conv_problem, conv_kind, conv_n, conv_noise, conv_csv, conv_flags);
        };
    });

    CommonFlags chan_flags;
    std::string chan_problem, chan_channel;
    int chan_trials = 100;
    auto* chan = app.add_subcommand("channel-check", "data-processing checks under CPTP maps");
    chan->add_option("problem", chan_problem, "problem file")->required();
    chan->add_option("channel", chan_channel, "Kraus channel file (random channels if omitted)");
    chan->add_option("--trials", chan_trials, "number of random trials");
    add_common(chan, chan_flags);
    chan->callback([&] {
        action = [&] {
            return run_channel_check(chan_problem, chan_channel, chan_trials, chan_flags);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        return action();
    } catch (const maxent::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const maxent::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const maxent::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const maxent::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const maxent::IndeterminateVerdictError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const maxent::BoundarySuspectedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const maxent::BackendError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
}
