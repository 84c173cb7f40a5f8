#pragma once

#include "kmslab/states.hpp"

namespace kmslab {

// Truncated Fock module (+)_{n<=N} X^{(x) n}, level 0 = A as a bimodule
// over itself, with path-indexed canonical bases. Creation out of level N
// is compressed to zero, so the Toeplitz relation holds exactly on levels
// 0..N-1 and all relation-sensitive checks stay below that horizon.
struct FockTruncation {
    Correspondence base;
    int levels = 0;                     // N
    std::vector<Correspondence> power;  // power[n] = X^{(x) n}, power[0] = identity

    int num_blocks() const { return base.num_blocks(); }
    int k(int n, int w) const { return power[n].k(w); }
    // Row dimension of the assembled truncation at coefficient block w.
    int total_k(int w) const;
    int total_dim() const;
};

// Levels 0..N; throws when the assembled dimension exceeds `cap`.
FockTruncation build_fock(const Correspondence& x, int n, int cap = 10000);

// Operator on the truncation in level-indexed block storage:
// blk[w](n_out, n_in) maps level n_in to level n_out within coefficient
// block w. Empty matrices denote zero blocks, keeping the gauge grading
// structural.
struct FockOp {
    std::vector<std::vector<std::vector<Matrix>>> blk;  // [w][n_out][n_in]

    static FockOp zero(const FockTruncation& f);
    static FockOp identity(const FockTruncation& f);

    FockOp adjoint() const;
    FockOp& operator+=(const FockOp& rhs);
    FockOp& operator*=(cdouble s);
    friend FockOp operator+(FockOp lhs, const FockOp& rhs) {
        lhs += rhs;
        return lhs;
    }
};

FockOp fock_multiply(const FockTruncation& f, const FockOp& a, const FockOp& b);
double fock_norm(const FockOp& a);  // Frobenius, for residual tests

// Creation operator T_xi as a matrix: level n -> n+1 for n < N, level N
// mapped to zero.
FockOp creation_matrix(const FockTruncation& f, const ModuleVector& xi);

// pi(a) on the truncation (level-diagonal).
FockOp left_action_fock(const FockTruncation& f, const AlgebraElement& a);

// Fock quantization of e^{-beta D}: level-n block is the n-fold tensor
// power in path coordinates, level 0 the identity.
FockOp gamma_density(const FockTruncation& f, const Generator& d, double beta);
// Level-wise inverse (e^{+beta D} tensor powers).
FockOp gamma_density_inverse(const FockTruncation& f, const Generator& d, double beta);

FockOp vacuum_projection(const FockTruncation& f);

// pi(a) P_0: the defect a - j_X(a) realized on the Fock module.
FockOp defect(const FockTruncation& f, const AlgebraElement& a);

// Matrix of a monomial word / normal-ordered element.
FockOp word_matrix(const FockTruncation& f, const MonomialWord& w);
FockOp toeplitz_matrix(const FockTruncation& f, const ToeplitzElement& e);

// Finite-type state Phi_N = Tr_{tau0}( . Gamma_N(e^{-beta D})); requires
// r(Z(beta)) < 1.
struct FockState {
    TraceVector tau0;
    double beta = 0.0;
    FockOp gamma;
};

FockState make_fock_state(const FockTruncation& f, const Generator& d, double beta,
                          const TraceVector& tau0);

cdouble fock_state_eval(const FockTruncation& f, const FockState& st, const FockOp& op);

struct TailBound {
    double bound = 0.0;    // certified upper bound on the tail mass
    double r_upper = 0.0;  // Collatz-Wielandt upper bound on r(Z)
};

// Upper bound on sum_{n>N} <(Z^T)^n t0, d> by the geometric envelope at a
// certified upper bound for the spectral radius.
TailBound tail_bound(const TransferMatrix& zm, const TraceVector& tau0,
                     const BlockAlgebra& a, int n);

// j_X(i_X(a)) = sum_p T_{a e_p} T*_{e_p} over the canonical frame.
ToeplitzElement jx_of(const Correspondence& x, const AlgebraElement& a);

}  // namespace kmslab
