#include <catch2/catch.hpp>

#include <cmath>

#include "maxent/entropy.hpp"
#include "maxent/operators.hpp"
#include "maxent/rng.hpp"
#include "support/oracles.hpp"

using namespace maxent;

TEST_CASE("hermitian operator symmetrizes and validates") {
    Matrix a(2, 2);
    a << 1.0, Complex(0.5, 0.25), Complex(0.5, -0.25), -2.0;
    HermitianOperator h(a);
    CHECK((h.entries() - h.entries().adjoint()).cwiseAbs().maxCoeff() == 0.0);

    Matrix skewed = a;
    skewed(0, 1) += Complex(0.0, 5e-11);  // within tolerance
    CHECK_NOTHROW(HermitianOperator(skewed));

    skewed(0, 1) += Complex(1e-6, 0.0);
    CHECK_THROWS_AS(HermitianOperator(skewed), ValidationError);
    CHECK_THROWS_AS(HermitianOperator(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("density matrix clamps and renormalizes") {
    Matrix rho(2, 2);
    rho << 0.75, 0.0, 0.0, 0.25;
    DensityMatrix d(rho);
    CHECK(d.eigenvalues().minCoeff() >= 0.0);
    CHECK(d.eigenvalues().sum() == Approx(1.0).margin(1e-15));

    // A slightly negative eigenvalue inside the floor is clamped to zero.
    Matrix dirty(2, 2);
    dirty << 1.0 + 5e-11, 0.0, 0.0, -5e-11;
    DensityMatrix cleaned(dirty);
    CHECK(cleaned.eigenvalues().minCoeff() == 0.0);
    CHECK(cleaned.eigenvalues().sum() == Approx(1.0).margin(1e-15));

    Matrix negative(2, 2);
    negative << 1.1, 0.0, 0.0, -0.1;
    CHECK_THROWS_AS(DensityMatrix(negative), ValidationError);

    Matrix off_trace(2, 2);
    off_trace << 0.6, 0.0, 0.0, 0.6;
    CHECK_THROWS_AS(DensityMatrix(off_trace), ValidationError);
}

TEST_CASE("spectral decomposition reconstruction") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 7;
        HermitianOperator h = rng.gaussian_hermitian(d);
        auto spec = spectral_decomposition(h.entries());
        const Matrix rebuilt =
            spec.eigenvectors * spec.eigenvalues.asDiagonal() * spec.eigenvectors.adjoint();
        const double fro = h.entries().norm();
        CHECK((h.entries() - rebuilt).norm() <= 1e-9 * (1.0 + fro));
        CHECK((spec.eigenvectors.adjoint() * spec.eigenvectors - Matrix::Identity(d, d))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-9);
        for (int i = 1; i < d; ++i) CHECK(spec.eigenvalues(i - 1) <= spec.eigenvalues(i));
    }
}

TEST_CASE("matrix_exp_shifted identity and diagonal cases") {
    ShiftedExp zero = matrix_exp_shifted(HermitianOperator::zero(2));
    CHECK(zero.log_scale == 0.0);
    CHECK((zero.factor.entries() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

    Matrix big = Matrix::Zero(2, 2);
    big(1, 1) = 1000.0;
    ShiftedExp stiff = matrix_exp_shifted(HermitianOperator(big));
    CHECK(stiff.log_scale == 0.0);
    CHECK(stiff.factor.entries()(0, 0).real() == Approx(1.0).margin(1e-14));
    CHECK(stiff.factor.entries()(1, 1).real() == Approx(std::exp(-1000.0)).margin(1e-300));
    CHECK(std::isfinite(stiff.factor.entries().cwiseAbs().maxCoeff()));
}

TEST_CASE("matrix_exp_shifted matches scaling-and-squaring oracle") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        HermitianOperator h = rng.gaussian_hermitian(4);
        ShiftedExp se = matrix_exp_shifted(h);
        const Matrix via_library = std::exp(-se.log_scale) * se.factor.entries();
        const Matrix via_oracle = oracle::matrix_exp(-h.entries());
        CHECK((via_library - via_oracle).norm() <= 1e-9 * via_oracle.norm());
    }
}

TEST_CASE("matrix_exp_shifted round trip recovers -H + sI") {
    // Dense double-precision eigendecomposition resolves eigenvalues of the
    // exponential only down to ~eps relative to its top eigenvalue 1, so the
    // matrix log is recoverable when the spectral spread stays below
    // ln(1e-8/eps) ~ 17. Wider spreads are covered by the diagonal case,
    // where the tiny eigenvalues survive exactly.
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 4;
        HermitianOperator raw = rng.gaussian_hermitian(d);
        const double top = spectral_decomposition(raw.entries()).eigenvalues.cwiseAbs().maxCoeff();
        HermitianOperator h((8.0 / top) * raw.entries());  // spectrum inside [-8, 8]
        ShiftedExp se = matrix_exp_shifted(h);
        auto spec = spectral_decomposition(se.factor.entries());
        const Matrix log_factor = spec.eigenvectors *
                                  spec.eigenvalues.array().log().matrix().asDiagonal() *
                                  spec.eigenvectors.adjoint();
        const Matrix expected = -h.entries() + se.log_scale * Matrix::Identity(d, d);
        CHECK((log_factor - expected).cwiseAbs().maxCoeff() <= 1e-8);
    }

    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3 + trial % 3;
        Matrix h = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) h(i, i) = -50.0 + 100.0 * rng.uniform();
        ShiftedExp se = matrix_exp_shifted(HermitianOperator(h));
        for (int i = 0; i < d; ++i) {
            const double logged = std::log(se.factor.entries()(i, i).real());
            CHECK(logged == Approx(-h(i, i).real() + se.log_scale).margin(1e-8));
        }
    }
}

TEST_CASE("lambda_max closed cases and power-iteration oracle") {
    Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    CHECK(lambda_max(HermitianOperator(sz)) == Approx(1.0).margin(1e-14));
    CHECK(lambda_max(HermitianOperator::identity(3)) == Approx(1.0).margin(1e-14));

    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        HermitianOperator h = rng.gaussian_hermitian(2 + trial % 6);
        CHECK(lambda_max(h) ==
              Approx(oracle::power_iteration_lambda_max(h.entries())).margin(1e-9));
    }
}
