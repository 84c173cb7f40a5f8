#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kmslab/linalg.hpp"

namespace kmslab {

// Finite direct sum of full matrix blocks M_{d_0} + ... + M_{d_{V-1}}.
struct BlockAlgebra {
    std::vector<int> block_dims;

    BlockAlgebra() = default;
    explicit BlockAlgebra(std::vector<int> dims);

    int num_blocks() const { return static_cast<int>(block_dims.size()); }
    int dim(int v) const { return block_dims[static_cast<size_t>(v)]; }
    int total_dim() const;

    bool operator==(const BlockAlgebra& other) const = default;
};

// Element of a BlockAlgebra: one complex d_v x d_v matrix per block.
struct AlgebraElement {
    std::vector<Matrix> blocks;

    static AlgebraElement zero(const BlockAlgebra& a);
    static AlgebraElement identity(const BlockAlgebra& a);

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    bool shape_matches(const BlockAlgebra& a) const;

    AlgebraElement adjoint() const;
    bool is_hermitian(double tol = kHermitianTol) const;
    // Positive semidefinite in every block.
    bool is_positive(double tol = kDefaultTol) const;
    // Max over blocks of the operator norm.
    double norm() const;

    AlgebraElement& operator+=(const AlgebraElement& rhs);
    AlgebraElement& operator-=(const AlgebraElement& rhs);
    AlgebraElement& operator*=(cdouble s);
    friend AlgebraElement operator+(AlgebraElement lhs, const AlgebraElement& rhs) {
        lhs += rhs;
        return lhs;
    }
    friend AlgebraElement operator-(AlgebraElement lhs, const AlgebraElement& rhs) {
        lhs -= rhs;
        return lhs;
    }
    friend AlgebraElement operator*(cdouble s, AlgebraElement rhs) {
        rhs *= s;
        return rhs;
    }
    friend AlgebraElement operator*(const AlgebraElement& lhs, const AlgebraElement& rhs);
};

// e_{ij} in block v, zero elsewhere.
AlgebraElement matrix_unit(const BlockAlgebra& a, int v, int i, int j);
AlgebraElement random_element(Rng& rng, const BlockAlgebra& a);
AlgebraElement random_hermitian_element(Rng& rng, const BlockAlgebra& a);
AlgebraElement random_positive_element(Rng& rng, const BlockAlgebra& a);

// Trace functional tau(a) = sum_v t_v tr(a_v), t_v >= 0, unnormalized
// matrix trace per block. State normalization is sum_v t_v d_v = 1.
struct TraceVector {
    RealVector t;

    TraceVector() = default;
    explicit TraceVector(RealVector coeffs) : t(std::move(coeffs)) {}

    int num_blocks() const { return static_cast<int>(t.size()); }
    double mass(const BlockAlgebra& a) const;  // tau(1)
    bool is_state(const BlockAlgebra& a, double tol = kDefaultTol) const;
    static TraceVector uniform_state(const BlockAlgebra& a);
};

cdouble evaluate_trace(const TraceVector& tau, const AlgebraElement& a);

// Block-preserving inner dynamics sigma_z(a)_v = e^{izH_v} a_v e^{-izH_v}.
struct CoeffDynamics {
    std::vector<Matrix> h;

    static CoeffDynamics trivial(const BlockAlgebra& a);
    bool is_trivial(double tol = kHermitianTol) const;
    void validate(const BlockAlgebra& a) const;
};

AlgebraElement sigma_apply(const CoeffDynamics& dyn, cdouble z, const AlgebraElement& a);

// Positive functional phi(a) = sum_v c_v tr(a_v e^{-beta H_v}); the
// finite-dimensional (sigma, beta)-KMS functionals with inner dynamics.
struct KmsFunctional {
    double beta = 0.0;
    CoeffDynamics dynamics;
    RealVector c;

    // phi(1) = sum_v c_v tr(e^{-beta H_v}).
    double total_mass() const;
    // tr(e^{-beta H_v}) per block; the state-normalization weights.
    RealVector block_weights() const;
};

cdouble kms_functional_eval(const KmsFunctional& phi, const AlgebraElement& a);

// (x, y)_Phi = Phi(x sigma^Phi_{-i/2}(y)) for Phi = tr(rho .), computed as
// sum_v tr(rho_v^{1/2} x_v rho_v^{1/2} y_v). rho must be strictly positive.
cdouble kms_pairing(const AlgebraElement& rho, const AlgebraElement& x,
                    const AlgebraElement& y);

// Max residual |phi(xy) - phi(y sigma_{i beta}(x))| over the given pairs.
double verify_kms_functional(
    const std::function<cdouble(const AlgebraElement&)>& phi,
    const CoeffDynamics& dyn, double beta,
    std::span<const std::pair<AlgebraElement, AlgebraElement>> pairs);

double verify_kms_functional(
    const KmsFunctional& phi,
    std::span<const std::pair<AlgebraElement, AlgebraElement>> pairs);

}  // namespace kmslab
