// Independent oracles for the test suites. Everything here deliberately
// avoids the library's spectral code paths: the matrix exponential is Taylor
// scaling-and-squaring, the top eigenvalue comes from power iteration, and
// derivatives come from central finite differences.
#pragma once

#include <cmath>
#include <complex>

#include "maxent/constraints.hpp"
#include "maxent/dual_solver.hpp"
#include "maxent/operators.hpp"

namespace oracle {

// exp(A) by scaling-and-squaring with a Taylor core.
inline maxent::Matrix matrix_exp(const maxent::Matrix& a) {
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    while (norm > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    const maxent::Matrix x = a / std::ldexp(1.0, squarings);
    maxent::Matrix term = maxent::Matrix::Identity(a.rows(), a.cols());
    maxent::Matrix sum = term;
    for (int k = 1; k <= 24; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

// Largest eigenvalue of a Hermitian matrix by shifted power iteration.
inline double power_iteration_lambda_max(const maxent::Matrix& a, int iters = 20000) {
    const int d = static_cast<int>(a.rows());
    const double shift = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    const maxent::Matrix b = a + shift * maxent::Matrix::Identity(d, d);
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = maxent::Complex(1.0 + 0.01 * i, 0.02 * i);
    v.normalize();
    double estimate = 0.0;
    for (int t = 0; t < iters; ++t) {
        Eigen::VectorXcd w = b * v;
        const double next = w.norm();
        v = w / next;
        if (std::abs(next - estimate) < 1e-13 * next && t > 32) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    return estimate - shift;
}

// tr(rho X) by explicit entrywise summation.
inline double direct_moment(const maxent::Matrix& rho, const maxent::Matrix& x) {
    std::complex<double> acc = 0.0;
    for (int a = 0; a < rho.rows(); ++a) {
        for (int b = 0; b < rho.cols(); ++b) {
            acc += rho(a, b) * x(b, a);
        }
    }
    return acc.real();
}

// ln sum exp(-h_a) over an explicit eigenvalue list.
inline double direct_log_partition(const Eigen::VectorXd& eigenvalues) {
    double acc = 0.0;
    for (int i = 0; i < eigenvalues.size(); ++i) acc += std::exp(-eigenvalues(i));
    return std::log(acc);
}

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

// Central finite difference of the log-partition function.
inline Eigen::VectorXd fd_gradient(const maxent::ConstraintSet& cs, const Eigen::VectorXd& lambda,
                                   double h = 1e-5) {
    Eigen::VectorXd g(lambda.size());
    for (int i = 0; i < lambda.size(); ++i) {
        Eigen::VectorXd up = lambda, down = lambda;
        up(i) += h;
        down(i) -= h;
        g(i) = (maxent::log_partition(cs, up) - maxent::log_partition(cs, down)) / (2.0 * h);
    }
    return g;
}

// Central finite difference of the analytic dual gradient.
inline Eigen::MatrixXd fd_hessian(const maxent::ConstraintSet& cs, const Eigen::VectorXd& lambda,
                                  double h = 1e-4) {
    const int k = static_cast<int>(lambda.size());
    Eigen::MatrixXd hess(k, k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd up = lambda, down = lambda;
        up(j) += h;
        down(j) -= h;
        hess.col(j) = (maxent::dual_gradient(cs, up) - maxent::dual_gradient(cs, down)) / (2.0 * h);
    }
    return hess;
}

// Gibbs state of t sigma_z on the qubit: diag((1 - tanh t)/2, (1 + tanh t)/2).
inline Eigen::Vector2d qubit_gibbs_diag(double t) {
    const double m = -std::tanh(t);
    return {0.5 * (1.0 + m), 0.5 * (1.0 - m)};
}

}  // namespace oracle
