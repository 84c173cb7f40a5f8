#pragma once

#include <optional>
#include <string>

#include "kmslab/weights.hpp"

namespace kmslab {

struct Instance {
    Correspondence x;
    Generator d;
    std::optional<CoeffDynamics> h;
};

// Hilbert space of dimension n over A = C with generator lambda * 1;
// critical inverse temperature (log n) / lambda.
Instance cuntz(int n, double lambda);

// Finite 0-1 matrix with weights N_j > 1; the Cuntz-Krieger data of
// Exel-Laca type. Columns must be pairwise distinct so that the rows
// generate all of C^{|I|}; otherwise the diagonal model would be a proper
// quotient and the instance is rejected.
struct ExelLacaInstance {
    Eigen::MatrixXi t;       // 0-1, no zero rows or columns
    RealVector n_weights;    // N_j > 1

    void validate() const;
    int size() const { return static_cast<int>(t.rows()); }
};

Instance cuntz_krieger(const ExelLacaInstance& el);

struct ElViolation {
    std::vector<int> y, z;
    double lhs = 0.0, rhs = 0.0;
};

struct ElReport {
    long pairs_checked = 0;
    bool sampled = false;
    bool all_hold = true;
    std::vector<ElViolation> violations;  // capped at 64 entries
};

// The family of subinvariance inequalities over pairs of disjoint finite
// Y, Z: sum_j N_j^{-beta} T(Y,Z,j) tau(q_j) <= tau(q(Y,Z)). Enumerated
// exhaustively up to |I| = 8, sampled (seed required) up to |I| = 12.
ElReport el_inequalities(const ExelLacaInstance& el, double beta,
                         const TraceVector& tau, double tol = kDefaultTol,
                         std::optional<uint64_t> sample_seed = std::nullopt);

// M = identity multiplicities, D = 0: F is the identity on traces.
Instance identity_bimodule(const BlockAlgebra& a);

// Deterministic random instance: no zero multiplicity rows, generator
// eigenvalues in [0.1, 2], optional coefficient dynamics.
Instance random_instance(uint64_t seed, int v_max, int d_max, int mult_max,
                         bool with_h = false);

Correspondence random_correspondence(Rng& rng, const BlockAlgebra& a, int mult_max);
Generator random_generator(Rng& rng, const Correspondence& x, double lo = 0.1,
                           double hi = 2.0);
CoeffDynamics random_dynamics(Rng& rng, const BlockAlgebra& a, double spread = 1.0);

}  // namespace kmslab
