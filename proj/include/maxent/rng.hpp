#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "maxent/operators.hpp"

namespace maxent {

// Deterministic random source. Gaussians come from Box-Muller over the
// standardized mt19937_64 stream, so a fixed seed reproduces the same values
// on every platform (std::normal_distribution does not guarantee that).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_()) * 0x1.0p-64;
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        const double u1 = (static_cast<double>(engine_()) + 1.0) * 0x1.0p-64;  // (0, 1]
        const double u2 = static_cast<double>(engine_()) * 0x1.0p-64;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    Matrix complex_gaussian_matrix(int rows, int cols) {
        Matrix g(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) g(i, j) = complex_gaussian();
        return g;
    }

    // Haar-random unit vector: normalized complex Gaussian entries.
    Eigen::VectorXcd haar_vector(int d) {
        Eigen::VectorXcd psi(d);
        for (int i = 0; i < d; ++i) psi(i) = complex_gaussian();
        return psi / psi.norm();
    }

    // Full-rank random state G G^dag / tr(G G^dag) (Ginibre ensemble).
    DensityMatrix ginibre_state(int d) {
        Matrix g = complex_gaussian_matrix(d, d);
        Matrix w = g * g.adjoint();
        return DensityMatrix(w / w.trace().real());
    }

    // GUE-style Hermitian matrix with O(1) spectrum.
    HermitianOperator gaussian_hermitian(int d) {
        Matrix g = complex_gaussian_matrix(d, d);
        return HermitianOperator((g + g.adjoint()) / (2.0 * std::sqrt(static_cast<double>(d))));
    }

    // Random Hermitian contraction, ||B|| <= 1.
    HermitianOperator hermitian_contraction(int d) {
        HermitianOperator b = gaussian_hermitian(d);
        const double norm = operator_norm(b);
        if (norm <= 1.0) return b;
        return (1.0 / norm) * b;
    }

    Eigen::VectorXd unit_vector(int k) {
        Eigen::VectorXd v(k);
        for (int i = 0; i < k; ++i) v(i) = gaussian();
        const double n = v.norm();
        if (n == 0.0) return unit_vector(k);
        return v / n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace maxent
