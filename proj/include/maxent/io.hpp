#pragma once

#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "maxent/bounds.hpp"
#include "maxent/channels.hpp"
#include "maxent/constraints.hpp"
#include "maxent/dual_solver.hpp"

namespace maxent::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr double kParseHermitianTol = 1e-8;
inline constexpr int kMaxFileDim = 4096;  // reject absurd dims before allocating d x d

// Non-finite doubles travel as in-band string tokens; everything else as
// plain JSON numbers (serialized losslessly by the shortest round-trip form).
inline json encode_double(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

inline double decode_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ValidationError("expected a number or one of \"inf\", \"-inf\", \"nan\"");
}

namespace detail {

inline void require_object(const json& j, const char* where) {
    if (!j.is_object()) throw ValidationError(std::string(where) + ": expected a JSON object");
}

// Strict schema: every required key present, no key outside required+optional.
inline void require_keys(const json& j, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional, const char* where) {
    require_object(j, where);
    for (const char* key : required) {
        if (!j.contains(key)) {
            throw ValidationError(std::string(where) + ": missing field \"" + key + "\"");
        }
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : required) known = known || item.key() == key;
        for (const char* key : optional) known = known || item.key() == key;
        if (!known) {
            throw ValidationError(std::string(where) + ": unknown field \"" + item.key() + "\"");
        }
    }
}

inline Eigen::MatrixXd decode_real_array(const json& j, int rows, int cols, const char* where) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows) {
        throw ValidationError(std::string(where) + ": expected " + std::to_string(rows) + " rows");
    }
    Eigen::MatrixXd out(rows, cols);
    for (int a = 0; a < rows; ++a) {
        const json& row = j[a];
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            throw ValidationError(std::string(where) + ": row " + std::to_string(a) +
                                  " must hold " + std::to_string(cols) + " numbers");
        }
        for (int b = 0; b < cols; ++b) {
            if (!row[b].is_number()) {
                throw ValidationError(std::string(where) + ": matrix entries must be numbers");
            }
            out(a, b) = row[b].get<double>();
        }
    }
    return out;
}

}  // namespace detail

// Matrices are carried as separate real and imaginary row-major arrays.
inline json encode_matrix(const Matrix& m) {
    json real = json::array();
    json imag = json::array();
    for (int a = 0; a < m.rows(); ++a) {
        json r_row = json::array();
        json i_row = json::array();
        for (int b = 0; b < m.cols(); ++b) {
            r_row.push_back(m(a, b).real());
            i_row.push_back(m(a, b).imag());
        }
        real.push_back(std::move(r_row));
        imag.push_back(std::move(i_row));
    }
    return json{{"real", std::move(real)}, {"imag", std::move(imag)}};
}

inline Matrix decode_matrix(const json& j, int rows, int cols, const char* where) {
    detail::require_keys(j, {"real", "imag"}, {"name"}, where);
    const Eigen::MatrixXd real = detail::decode_real_array(j["real"], rows, cols, where);
    const Eigen::MatrixXd imag = detail::decode_real_array(j["imag"], rows, cols, where);
    return real.cast<Complex>() + Complex(0.0, 1.0) * imag.cast<Complex>();
}

inline json encode_vector(const Eigen::VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(encode_double(v(i)));
    return out;
}

inline Eigen::VectorXd decode_vector(const json& j, const char* where) {
    if (!j.is_array()) throw ValidationError(std::string(where) + ": expected an array");
    Eigen::VectorXd v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = decode_double(j[i]);
    return v;
}

struct Problem {
    ConstraintSet constraints;
    MomentVector target_moments;
    SolverOptions options;
};

// Problem files: dim, named observable matrices, target moments, optional
// solver overrides. Matrices must be Hermitian within 1e-8 (then symmetrized)
// and unknown fields are rejected.
inline Problem parse_problem(const json& root) {
    detail::require_keys(root, {"dim", "observables", "target_moments"}, {"options"}, "problem");
    if (!root["dim"].is_number_integer() || root["dim"].get<int>() < 1 ||
        root["dim"].get<int>() > kMaxFileDim) {
        throw ValidationError("problem: dim must be a positive integer at most " +
                              std::to_string(kMaxFileDim));
    }
    const int d = root["dim"].get<int>();

    const json& obs = root["observables"];
    if (!obs.is_array() || obs.empty()) {
        throw ValidationError("problem: observables must be a nonempty array");
    }
    std::vector<HermitianOperator> observables;
    std::vector<std::string> names;
    for (int i = 0; i < static_cast<int>(obs.size()); ++i) {
        const std::string where = "observable " + std::to_string(i);
        Matrix m = decode_matrix(obs[i], d, d, where.c_str());
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > kParseHermitianTol) {
            throw ValidationError(where + " is not Hermitian (residual " + std::to_string(herm) + ")");
        }
        observables.emplace_back(Matrix(0.5 * (m + m.adjoint())));
        names.push_back(obs[i].contains("name") ? obs[i]["name"].get<std::string>()
                                                : "X" + std::to_string(i + 1));
    }

    const json& tm = root["target_moments"];
    if (!tm.is_array() || tm.size() != obs.size()) {
        throw ValidationError("problem: target_moments must match the observable count");
    }
    MomentVector target(static_cast<int>(tm.size()));
    for (int i = 0; i < target.size(); ++i) {
        if (!tm[i].is_number()) throw ValidationError("problem: target_moments must be numbers");
        target(i) = tm[i].get<double>();
    }

    SolverOptions options;
    if (root.contains("options")) {
        const json& opt = root["options"];
        detail::require_keys(opt, {},
                             {"tol", "max_iter", "feas_tol", "lambda_norm_cap", "boundary_tol"},
                             "problem options");
        if (opt.contains("tol")) options.grad_tol = opt["tol"].get<double>();
        if (opt.contains("max_iter")) options.max_newton_iters = opt["max_iter"].get<int>();
        if (opt.contains("feas_tol")) options.feasibility.feas_tol = opt["feas_tol"].get<double>();
        if (opt.contains("lambda_norm_cap")) {
            options.lambda_norm_cap = opt["lambda_norm_cap"].get<double>();
        }
        if (opt.contains("boundary_tol")) {
            options.boundary_stop_tol = opt["boundary_tol"].get<double>();
        }
    }
    return {ConstraintSet(std::move(observables), std::move(names)), std::move(target), options};
}

// State files: dim plus one matrix in the real/imag format.
inline DensityMatrix parse_state(const json& root) {
    detail::require_keys(root, {"dim", "real", "imag"}, {}, "state");
    if (!root["dim"].is_number_integer() || root["dim"].get<int>() < 1 ||
        root["dim"].get<int>() > kMaxFileDim) {
        throw ValidationError("state: dim must be a positive integer at most " +
                              std::to_string(kMaxFileDim));
    }
    const int d = root["dim"].get<int>();
    json mat{{"real", root["real"]}, {"imag", root["imag"]}};
    Matrix m = decode_matrix(mat, d, d, "state");
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kParseHermitianTol) {
        throw ValidationError("state is not Hermitian (residual " + std::to_string(herm) + ")");
    }
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

// Channel files: Kraus operators, each dim_out x dim_in.
inline KrausChannel parse_channel(const json& root) {
    detail::require_keys(root, {"dim_in", "dim_out", "kraus"}, {}, "channel");
    for (const char* key : {"dim_in", "dim_out"}) {
        if (!root[key].is_number_integer() || root[key].get<int>() < 1 ||
            root[key].get<int>() > kMaxFileDim) {
            throw ValidationError(std::string("channel: ") + key +
                                  " must be a positive integer at most " +
                                  std::to_string(kMaxFileDim));
        }
    }
    const int din = root["dim_in"].get<int>();
    const int dout = root["dim_out"].get<int>();
    const json& ops = root["kraus"];
    if (!ops.is_array() || ops.empty()) {
        throw ValidationError("channel: kraus must be a nonempty array");
    }
    std::vector<Matrix> kraus;
    for (int i = 0; i < static_cast<int>(ops.size()); ++i) {
        const std::string where = "kraus " + std::to_string(i);
        kraus.push_back(decode_matrix(ops[i], dout, din, where.c_str()));
    }
    return KrausChannel(din, dout, std::move(kraus));
}

inline json encode_verdict(const FeasibilityVerdict& verdict) {
    json out;
    out["status"] = to_string(verdict.status);
    out["margin"] = encode_double(verdict.margin);
    out["dependent_span"] = verdict.dependent_span;
    if (verdict.status == Feasibility::Infeasible) {
        out["witness_direction"] = encode_vector(verdict.witness_direction);
    }
    if (verdict.witness_state) {
        out["witness_state"] = encode_matrix(verdict.witness_state->entries());
    }
    return out;
}

inline json encode_certificate(const CertificateReport& report) {
    auto opt = [](const std::optional<double>& v) {
        return v ? encode_double(*v) : json("unavailable");
    };
    json out;
    out["relative_entropy"] = encode_double(report.relative_entropy);
    out["entropy_gap"] = encode_double(report.entropy_gap);
    out["moment_mismatch"] = encode_vector(report.moment_mismatch);
    out["identity_residual"] = opt(report.identity_residual);
    out["pinsker_exact_bound"] = opt(report.pinsker_exact_bound);
    out["pinsker_mixed_bound"] = opt(report.pinsker_mixed_bound);
    out["trace_distance"] = encode_double(report.trace_distance);
    out["fannes_bound"] = encode_double(report.fannes_bound);
    out["observable_rate_bound"] = opt(report.observable_rate_bound);
    return out;
}

inline json encode_solution(const GibbsSolution& solution) {
    json out;
    out["classification"] = to_string(solution.classification);
    out["lambda"] = encode_vector(solution.lambda);
    out["sigma"] = encode_matrix(solution.sigma.entries());
    out["log_partition"] = encode_double(solution.log_partition);
    out["entropy"] = encode_double(solution.entropy);
    out["achieved_moments"] = encode_vector(solution.achieved_moments);
    out["moment_residual"] = encode_double(solution.moment_residual);
    out["iterations"] = solution.iterations;
    out["lambda_diverging"] = solution.lambda_diverging;
    if (!solution.path_trace.empty()) {
        json trace = json::array();
        for (const auto& p : solution.path_trace) {
            trace.push_back(json{{"epsilon", encode_double(p.epsilon)},
                                 {"moments", encode_vector(p.moments)},
                                 {"lambda_norm", encode_double(p.lambda_norm)},
                                 {"delta_trace", encode_double(p.delta_trace)}});
        }
        out["path_trace"] = std::move(trace);
    }
    return out;
}

inline json result_envelope(const char* command) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = command;
    return out;
}

// Canonical result-file text: two-space indentation, sorted keys, trailing
// newline. Fixed-seed runs reproduce this byte for byte.
inline std::string dump_result(const json& j) { return j.dump(2) + "\n"; }

}  // namespace maxent::io
