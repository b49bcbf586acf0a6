#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "maxent/errors.hpp"

namespace maxent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Tolerances of the construction contracts.
inline constexpr double kHermitianTol = 1e-10;   // entrywise |A - A^dag|
inline constexpr double kEigenvalueFloor = -1e-10;  // states must not dip below
inline constexpr double kTraceTol = 1e-10;       // |tr(rho) - 1| at construction

// tr(AB) without forming the product.
inline Complex trace_product(const Matrix& a, const Matrix& b) {
    return a.cwiseProduct(b.transpose()).sum();
}

// Eigensystem of a Hermitian matrix, eigenvalues ascending, orthonormal
// eigenvector columns.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;
};

inline SpectralDecomposition spectral_decomposition(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw BackendError("hermitian eigendecomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// A d x d self-adjoint matrix. Construction accepts input Hermitian to
// entrywise tolerance 1e-10 and stores the exactly symmetrized (A + A^dag)/2.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries) {
        if (entries.rows() != entries.cols() || entries.rows() < 1) {
            throw DimensionError("HermitianOperator needs a square matrix of dim >= 1");
        }
        const double residual = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
        if (residual > kHermitianTol) {
            throw ValidationError("matrix is not Hermitian: max |A - A^dag| = " +
                                  std::to_string(residual));
        }
        entries_ = 0.5 * (entries + entries.adjoint()).eval();
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }

    static HermitianOperator identity(int d) {
        return HermitianOperator(Matrix::Identity(d, d));
    }
    static HermitianOperator zero(int d) {
        return HermitianOperator(Matrix::Zero(d, d));
    }

private:
    Matrix entries_;
};

inline HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw DimensionError("operator dimensions differ");
    return HermitianOperator(a.entries() + b.entries());
}

inline HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw DimensionError("operator dimensions differ");
    return HermitianOperator(a.entries() - b.entries());
}

inline HermitianOperator operator*(double c, const HermitianOperator& a) {
    return HermitianOperator(c * a.entries());
}

inline double lambda_max(const HermitianOperator& h) {
    return spectral_decomposition(h.entries()).eigenvalues.maxCoeff();
}

inline double lambda_min(const HermitianOperator& h) {
    return spectral_decomposition(h.entries()).eigenvalues.minCoeff();
}

// Operator norm: max |eigenvalue| for a Hermitian argument.
inline double operator_norm(const HermitianOperator& h) {
    return spectral_decomposition(h.entries()).eigenvalues.cwiseAbs().maxCoeff();
}

// A positive semidefinite unit-trace operator. Construction clamps
// eigenvalues in [-1e-10, 0) to zero and renormalizes the trace exactly;
// anything below the floor or a trace off by more than 1e-10 is rejected.
// The eigensystem is computed once and cached.
class DensityMatrix {
public:
    explicit DensityMatrix(const Matrix& entries) {
        if (entries.rows() != entries.cols() || entries.rows() < 1) {
            throw DimensionError("DensityMatrix needs a square matrix of dim >= 1");
        }
        const double herm = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
        if (herm > kHermitianTol) {
            throw ValidationError("state is not Hermitian: max |A - A^dag| = " +
                                  std::to_string(herm));
        }
        const double trace = entries.trace().real();
        if (std::abs(trace - 1.0) > kTraceTol) {
            throw ValidationError("state trace differs from 1 by " +
                                  std::to_string(std::abs(trace - 1.0)));
        }
        Matrix sym = 0.5 * (entries + entries.adjoint());
        auto spec = spectral_decomposition(sym);
        if (spec.eigenvalues.minCoeff() < kEigenvalueFloor) {
            throw ValidationError("state has eigenvalue " +
                                  std::to_string(spec.eigenvalues.minCoeff()) +
                                  " below the positivity floor");
        }
        init_from_spectrum(std::move(spec.eigenvectors), std::move(spec.eigenvalues));
    }

    // Trusted path for states assembled from an eigensystem already in hand
    // (Gibbs construction, channel outputs). Same clamp-and-renormalize rules.
    static DensityMatrix from_spectrum(Matrix eigenvectors, Eigen::VectorXd eigenvalues) {
        if (eigenvalues.minCoeff() < kEigenvalueFloor) {
            throw ValidationError("spectrum has eigenvalue below the positivity floor");
        }
        if (std::abs(eigenvalues.sum() - 1.0) > kTraceTol) {
            throw ValidationError("spectrum trace differs from 1 beyond tolerance");
        }
        DensityMatrix rho;
        rho.init_from_spectrum(std::move(eigenvectors), std::move(eigenvalues));
        return rho;
    }

    static DensityMatrix maximally_mixed(int d) {
        return from_spectrum(Matrix::Identity(d, d),
                             Eigen::VectorXd::Constant(d, 1.0 / d));
    }

    static DensityMatrix pure(const Eigen::VectorXcd& psi) {
        const double norm = psi.norm();
        if (norm <= 0.0) throw ValidationError("pure state needs a nonzero vector");
        Eigen::VectorXcd unit = psi / norm;
        return DensityMatrix(unit * unit.adjoint());
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    // Ascending, nonnegative, summing to 1.
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }

private:
    DensityMatrix() = default;

    void init_from_spectrum(Matrix eigenvectors, Eigen::VectorXd eigenvalues) {
        eigenvalues = eigenvalues.cwiseMax(0.0);
        eigenvalues /= eigenvalues.sum();
        Matrix rebuilt = eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
        entries_ = 0.5 * (rebuilt + rebuilt.adjoint());
        eigenvectors_ = std::move(eigenvectors);
        eigenvalues_ = std::move(eigenvalues);
    }

    Matrix entries_;
    Matrix eigenvectors_;
    Eigen::VectorXd eigenvalues_;
};

// Stable matrix exponential of -H: factor = exp(-H + sI) with s the smallest
// eigenvalue of H, so the factor's top eigenvalue is exactly 1 and
// exp(-H) = exp(-s) * factor. No overflow for any Hermitian H.
struct ShiftedExp {
    HermitianOperator factor;
    double log_scale;
};

inline ShiftedExp matrix_exp_shifted(const HermitianOperator& h) {
    auto spec = spectral_decomposition(h.entries());
    const double shift = spec.eigenvalues.minCoeff();
    Eigen::VectorXd exps = (-(spec.eigenvalues.array() - shift)).exp();
    Matrix g = spec.eigenvectors * exps.asDiagonal() * spec.eigenvectors.adjoint();
    return {HermitianOperator(std::move(g)), shift};
}

}  // namespace maxent
