#pragma once

#include <optional>

#include "kmslab/correspondence.hpp"

namespace kmslab {

// Generator of the quasi-free dynamics: a Hermitian mult(w,v) x mult(w,v)
// matrix per nonempty slot, so that U_t = e^{itD} in B_A(X).
struct Generator {
    std::vector<std::vector<Matrix>> slots;  // [w][v]; 0x0 when mult(w,v)=0

    static Generator zero(const Correspondence& x);

    const Matrix& slot(int w, int v) const { return slots[w][v]; }
    Matrix& slot(int w, int v) { return slots[w][v]; }

    void validate(const Correspondence& x) const;
    // Every eigenvalue of every slot strictly positive.
    bool positive_energy(const Correspondence& x, double margin = 0.0) const;
    // Smallest eigenvalue across all slots (+infinity when there are none).
    double min_energy(const Correspondence& x) const;

    BimoduleOperator as_bimodule_operator(const Correspondence& x) const;
};

// e^{-beta D} slotwise. beta = +infinity requires positive energy and
// yields zero slots.
BimoduleOperator heat_kernel(const Correspondence& x, const Generator& d, double beta);

// U_z = e^{izD} slotwise (entire in z).
BimoduleOperator unitary_group(const Correspondence& x, const Generator& d, cdouble z);

// Z(beta)_{wv} = tr e^{-beta D^{(w,v)}}; represents the transfer operator F
// on trace coefficients: (F tau)_v = sum_w Z_{wv} t_w.
struct TransferMatrix {
    double beta = 0.0;
    RealMatrix z;
};

TransferMatrix transfer_matrix(const Correspondence& x, const Generator& d, double beta);

TraceVector apply_F(const TraceVector& tau, const TransferMatrix& zm);

struct SpectralResult {
    double radius = 0.0;
    double lower = 0.0, upper = 0.0;  // certified Collatz-Wielandt bounds
    // Nonnegative left eigenvector at the radius (l1-normalized) when one
    // exists; empty for nilpotent input.
    std::optional<RealVector> left_perron;
};

// Spectral radius of an entrywise-nonnegative matrix: strongly connected
// components, then certified power iteration on (block + I) per component.
SpectralResult spectral_radius(const RealMatrix& z);

// Smallest beta with r(Z(beta)) = 1, by bisection of the non-increasing
// radius map. Requires positive energy. Returns nullopt when r(Z(0)) < 1
// or the radius never reaches 1.
std::optional<double> critical_beta(const Correspondence& x, const Generator& d,
                                    double tol = 1e-8);

// State-normalized t >= 0 with Z^T t <= t + tol componentwise, via an LP
// minimizing max_v (Z^T t - t)_v over the simplex sum_v n_v t_v = 1.
// norm_weights defaults to the block dimensions.
std::optional<TraceVector> subinvariant_solver(const TransferMatrix& zm,
                                               const BlockAlgebra& a,
                                               double tol = kDefaultTol,
                                               const RealVector* norm_weights = nullptr);

// State-normalized t >= 0 with ||Z^T t - t||_inf <= tol, via the kernel of
// (Z^T - 1) intersected with the nonnegative cone.
std::optional<TraceVector> invariant_solver(const TransferMatrix& zm,
                                            const BlockAlgebra& a,
                                            double tol = kDefaultTol,
                                            const RealVector* norm_weights = nullptr);

double subinvariance_violation(const TransferMatrix& zm, const TraceVector& tau);
double invariance_violation(const TransferMatrix& zm, const TraceVector& tau);

}  // namespace kmslab
