#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <random>

namespace kmslab {

using cdouble = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kHermitianTol = 1e-10;

bool is_hermitian(const Matrix& a, double tol = kHermitianTol);

// Eigendecomposition of a Hermitian matrix: values ascending, columns of
// `vectors` are the corresponding orthonormal eigenvectors.
struct HermEig {
    RealVector values;
    Matrix vectors;
};

// Cyclic Jacobi iteration; sweeps until the off-diagonal Frobenius norm
// falls below 1e-13 relative to the input scale.
HermEig hermitian_eig(const Matrix& a);

// f(H) for Hermitian H through the eigendecomposition.
Matrix hermitian_function(const Matrix& h, const std::function<cdouble(double)>& f);

// e^{z h} for Hermitian h and complex z.
Matrix hermitian_exp(const Matrix& h, cdouble z);

Matrix hermitian_sqrt(const Matrix& h);

double min_eigenvalue(const Matrix& h);
double max_eigenvalue(const Matrix& h);

// Largest singular value.
double operator_norm(const Matrix& a);

// Deterministic RNG used by property tests and the random-instance factory.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen);
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        std::uniform_int_distribution<int> d(lo, hi);
        return d(gen);
    }
    double gauss() {
        std::normal_distribution<double> d(0.0, 1.0);
        return d(gen);
    }
    cdouble cgauss() { return cdouble(gauss(), gauss()); }
};

Matrix random_matrix(Rng& rng, int rows, int cols);
Matrix random_unitary(Rng& rng, int n);
// Hermitian matrix with eigenvalues drawn uniformly from [lo, hi].
Matrix random_hermitian(Rng& rng, int n, double lo, double hi);
Matrix random_psd(Rng& rng, int n);

}  // namespace kmslab
