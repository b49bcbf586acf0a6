#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "maxent/entropy.hpp"
#include "maxent/operators.hpp"
#include "maxent/rng.hpp"

namespace maxent {

inline constexpr double kCompletenessTol = 1e-9;

// A CPTP map in Kraus form: rho -> sum_j K_j rho K_j^dag with
// sum_j K_j^dag K_j = I on the input space.
class KrausChannel {
public:
    KrausChannel(int dim_in, int dim_out, std::vector<Matrix> kraus_ops)
        : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus_ops)) {
        if (dim_in_ < 1 || dim_out_ < 1 || kraus_.empty()) {
            throw ValidationError("KrausChannel needs positive dimensions and at least one operator");
        }
        for (const auto& k : kraus_) {
            if (k.rows() != dim_out_ || k.cols() != dim_in_) {
                throw DimensionError("Kraus operator shape differs from (dim_out, dim_in)");
            }
        }
        if (completeness_residual() > kCompletenessTol) {
            throw ValidationError("Kraus operators violate trace preservation: residual " +
                                  std::to_string(completeness_residual()));
        }
    }

    int dim_in() const { return dim_in_; }
    int dim_out() const { return dim_out_; }
    const std::vector<Matrix>& kraus() const { return kraus_; }

    // max |(sum K^dag K - I)_ab|
    double completeness_residual() const {
        Matrix acc = Matrix::Zero(dim_in_, dim_in_);
        for (const auto& k : kraus_) acc += k.adjoint() * k;
        return (acc - Matrix::Identity(dim_in_, dim_in_)).cwiseAbs().maxCoeff();
    }

    // Phi*(I_r) = I_d, trace preservation seen from the Heisenberg side; the
    // flag adjoint users report alongside adjoint_apply results.
    bool adjoint_unital(double tol = 1e-9) const { return completeness_residual() <= tol; }

    static KrausChannel identity(int d) {
        return KrausChannel(d, d, {Matrix::Identity(d, d)});
    }

private:
    int dim_in_;
    int dim_out_;
    std::vector<Matrix> kraus_;
};

inline DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho) {
    if (rho.dim() != channel.dim_in()) {
        throw DimensionError("apply: state dimension differs from channel input");
    }
    Matrix out = Matrix::Zero(channel.dim_out(), channel.dim_out());
    for (const auto& k : channel.kraus()) out += k * rho.entries() * k.adjoint();
    const double trace = out.trace().real();
    if (std::abs(trace - 1.0) > 1e-10) {
        throw BackendError("channel output trace drifted to " + std::to_string(trace));
    }
    return DensityMatrix(out / trace);
}

// Heisenberg-picture adjoint: B -> sum_j K_j^dag B K_j.
inline HermitianOperator adjoint_apply(const KrausChannel& channel, const HermitianOperator& b) {
    if (b.dim() != channel.dim_out()) {
        throw DimensionError("adjoint_apply: observable dimension differs from channel output");
    }
    Matrix out = Matrix::Zero(channel.dim_in(), channel.dim_in());
    for (const auto& k : channel.kraus()) out += k.adjoint() * b.entries() * k;
    return HermitianOperator(std::move(out));
}

// Data processing for the trace norm: returns
// (||Phi(rho) - Phi(sigma)||_1, ||rho - sigma||_1); lhs <= rhs.
inline std::pair<double, double> contraction_check(const KrausChannel& channel,
                                                   const DensityMatrix& rho,
                                                   const DensityMatrix& sigma) {
    const double lhs = trace_norm_distance(apply(channel, rho), apply(channel, sigma));
    const double rhs = trace_norm_distance(rho, sigma);
    return {lhs, rhs};
}

// Adjoint contractivity on the operator norm: (||Phi*(B)||, ||B||); lhs <= rhs.
inline std::pair<double, double> adjoint_norm_check(const KrausChannel& channel,
                                                    const HermitianOperator& b) {
    return {operator_norm(adjoint_apply(channel, b)), operator_norm(b)};
}

// Haar-random Stinespring channel: W: C^d -> C^r (x) C^e drawn from the QR
// factorization of a Gaussian matrix, Kraus operators K_j = (I_r (x) <j|) W.
// Column phases are pinned by making each column's largest coordinate real
// positive, so the scalar channel comes out as exactly (1). Completeness is
// exact by construction.
inline KrausChannel random_channel(int dim_in, int dim_out, int env_dim, std::uint64_t seed) {
    if (env_dim < 1) throw PreconditionError("random_channel needs env_dim >= 1");
    if (dim_out * env_dim < dim_in) {
        throw PreconditionError("random_channel: no isometry exists for r*e < d");
    }
    Rng rng(seed);
    Matrix g = rng.complex_gaussian_matrix(dim_out * env_dim, dim_in);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(dim_out * env_dim, dim_in);
    for (int i = 0; i < dim_in; ++i) {
        int lead = 0;
        for (int a = 1; a < q.rows(); ++a) {
            if (std::abs(q(a, i)) > std::abs(q(lead, i))) lead = a;
        }
        const Complex pivot = q(lead, i);
        const double mag = std::abs(pivot);
        if (mag > 0.0) q.col(i) *= std::conj(pivot) / mag;
    }

    std::vector<Matrix> kraus(env_dim, Matrix(dim_out, dim_in));
    for (int j = 0; j < env_dim; ++j) {
        for (int a = 0; a < dim_out; ++a) {
            kraus[j].row(a) = q.row(a * env_dim + j);
        }
    }
    return KrausChannel(dim_in, dim_out, std::move(kraus));
}

}  // namespace maxent
