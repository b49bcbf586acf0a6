#pragma once

#include <cmath>
#include <limits>

#include "maxent/operators.hpp"

namespace maxent {

// All entropies are in nats.
inline constexpr double kEntropyCutoff = 1e-14;  // eigenvalues below contribute 0 ln 0 = 0
inline constexpr double kKernelTol = 1e-12;      // sigma eigenvalues below define ker(sigma)
inline constexpr double kKernelMassTol = 1e-10;  // rho mass on ker(sigma) above => infinite divergence

inline double infinity_signal() { return std::numeric_limits<double>::infinity(); }

// Binary entropy in nats with h(0) = h(1) = 0.
inline double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0 && p < 1.0) {
        h = -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
    }
    return h;
}

// S(rho) = -sum_a p_a ln p_a over the cached spectrum; result in [0, ln d].
inline double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (int a = 0; a < rho.dim(); ++a) {
        const double p = rho.eigenvalues()(a);
        if (p > kEntropyCutoff) s -= p * std::log(p);
    }
    return s;
}

// D(rho||sigma) = tr(rho ln rho) - tr(rho ln sigma), evaluated in sigma's
// eigenbasis. Returns the +infinity signal when rho carries more than 1e-10
// mass on the kernel of sigma (eigenvalues below 1e-12).
inline double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionError("relative_entropy: state dimensions differ");
    }
    const Matrix rho_in_sigma_basis =
        sigma.eigenvectors().adjoint() * rho.entries() * sigma.eigenvectors();

    double kernel_mass = 0.0;
    double cross = 0.0;  // tr(rho ln sigma) over the support of sigma
    for (int b = 0; b < sigma.dim(); ++b) {
        const double q = sigma.eigenvalues()(b);
        const double weight = rho_in_sigma_basis(b, b).real();
        if (q < kKernelTol) {
            kernel_mass += weight;
        } else {
            cross += weight * std::log(q);
        }
    }
    if (kernel_mass > kKernelMassTol) return infinity_signal();

    return -von_neumann_entropy(rho) - cross;
}

// ||rho - sigma||_1 = sum of |eigenvalues| of the difference; in [0, 2].
// The difference is put in a canonical sign first (first nonzero entry made
// positive), so both argument orders decompose the same matrix and the
// metric is exactly symmetric.
inline double trace_norm_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionError("trace_norm_distance: state dimensions differ");
    }
    Matrix diff = rho.entries() - sigma.entries();
    for (int a = 0; a < diff.rows(); ++a) {
        for (int b = 0; b < diff.cols(); ++b) {
            const Complex v = diff(a, b);
            if (v.real() != 0.0 || v.imag() != 0.0) {
                const double lead = v.real() != 0.0 ? v.real() : v.imag();
                if (lead < 0.0) diff = -diff;
                a = static_cast<int>(diff.rows());
                break;
            }
        }
    }
    auto spec = spectral_decomposition(diff);
    return spec.eigenvalues.cwiseAbs().sum();
}

// Trace norm of a Hermitian operator.
inline double trace_norm(const HermitianOperator& a) {
    return spectral_decomposition(a.entries()).eigenvalues.cwiseAbs().sum();
}

}  // namespace maxent
