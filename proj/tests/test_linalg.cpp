#include <doctest.h>

#include "kmslab/linalg.hpp"

using namespace kmslab;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("jacobi on a known real symmetric 2x2") {
    Matrix a(2, 2);
    a << 2.0, 1.0, 1.0, 2.0;
    const HermEig e = hermitian_eig(a);
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi on a known complex Hermitian 2x2") {
    Matrix a(2, 2);
    a << cdouble(0, 0), cdouble(0, 1), cdouble(0, -1), cdouble(0, 0);
    const HermEig e = hermitian_eig(a);
    CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jacobi reconstructs random Hermitian matrices") {
    Rng rng(7);
    for (int n : {1, 3, 8, 17}) {
        const Matrix g = random_matrix(rng, n, n);
        const Matrix a = g + g.adjoint();
        const HermEig e = hermitian_eig(a);
        Matrix d = Matrix::Zero(n, n);
        for (int k = 0; k < n; ++k) d(k, k) = e.values[k];
        CHECK((e.vectors * d * e.vectors.adjoint() - a).norm() <= 1e-11 * a.norm());
        CHECK((e.vectors.adjoint() * e.vectors - Matrix::Identity(n, n)).norm() <= 1e-12);
        for (int k = 0; k + 1 < n; ++k) CHECK(e.values[k] <= e.values[k + 1]);
    }
}

TEST_CASE("hermitian_exp on diagonal input") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    const Matrix e = hermitian_exp(h, -1.0);
    CHECK(std::abs(e(0, 0) - std::exp(-1.0)) <= 1e-14);
    CHECK(std::abs(e(1, 1) - std::exp(-2.0)) <= 1e-14);
    CHECK(std::abs(e(0, 1)) <= 1e-14);
}

TEST_CASE("hermitian_exp group law and unitarity") {
    Rng rng(11);
    const Matrix h = random_hermitian(rng, 4, -1.0, 1.0);
    const cdouble z(0.3, -0.7);
    const Matrix fwd = hermitian_exp(h, z);
    const Matrix bwd = hermitian_exp(h, -z);
    CHECK((fwd * bwd - Matrix::Identity(4, 4)).norm() <= 1e-12);
    const Matrix u = hermitian_exp(h, cdouble(0.0, 0.9));
    CHECK((u * u.adjoint() - Matrix::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("operator norm of a known matrix") {
    Matrix a(2, 2);
    a << 3.0, 0.0, 0.0, -4.0;
    CHECK(operator_norm(a) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("random_hermitian respects the eigenvalue range") {
    Rng rng(3);
    const Matrix h = random_hermitian(rng, 6, 0.1, 2.0);
    const HermEig e = hermitian_eig(h);
    CHECK(e.values.minCoeff() >= 0.1 - 1e-10);
    CHECK(e.values.maxCoeff() <= 2.0 + 1e-10);
}

TEST_SUITE_END();
