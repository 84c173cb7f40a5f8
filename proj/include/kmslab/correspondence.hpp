#pragma once

#include <optional>
#include <vector>

#include "kmslab/algebra.hpp"

namespace kmslab {

// A C*-correspondence over a BlockAlgebra, given by nonnegative integer
// multiplicities. mult(w, v) counts the copies of left-action block v
// inside the right-block-w component of the module.
//
// Canonical index conventions (fixed; all other modules rely on them):
//   * The right-block-w component is C^{k_w} with
//         k_w = sum_v mult(w, v) * d_v,
//     rows ordered (v ascending, copy mu in [0, mult(w,v)), inner i in
//     [0, d_v)). A module vector stores one k_w x d_w matrix per block w
//     (columns = right coefficient index).
//   * In a tensor product X (x) Y the (u, v) slot is indexed by length-2
//     paths v -> w -> u, ordered lexicographically by
//     (w, X-copy into w from v, Y-copy into u from w) --- leftmost factor
//     outermost.
// Tensor powers are built by left iteration X^{(n+1)} = X (x) X^{(n)},
// matching the creation convention T_xi (xi_1 (x) ... ) = xi (x) xi_1 (x) ...
struct Correspondence {
    BlockAlgebra algebra;
    Eigen::MatrixXi mult;  // row = right block w, column = left block v

    Correspondence() = default;
    Correspondence(BlockAlgebra a, Eigen::MatrixXi m);

    static Correspondence identity(const BlockAlgebra& a);

    int num_blocks() const { return algebra.num_blocks(); }
    int dim(int v) const { return algebra.dim(v); }

    // Row dimension of the block-w component.
    int k(int w) const;
    // Offset of the (v, copy 0, inner 0) section inside block w.
    int row_offset(int w, int v) const;
    int row_index(int w, int v, int copy, int inner) const;

    struct RowId {
        int v, copy, inner;
    };
    RowId decode_row(int w, int row) const;

    // Right-fullness: span<X,X> = A, i.e. every right block is nonzero.
    // Needed by weight restriction; not required elsewhere.
    bool is_full() const;

    int total_dim() const;  // sum_w k_w * d_w

    bool operator==(const Correspondence& other) const;
};

// Multiplicities compose along length-2 paths.
Correspondence tensor(const Correspondence& x, const Correspondence& y);

// Element of the module: one k_w x d_w matrix per right block w.
struct ModuleVector {
    std::vector<Matrix> blocks;

    static ModuleVector zero(const Correspondence& x);
    // Canonical basis vector with a single 1 at (block w, row, column col).
    static ModuleVector basis(const Correspondence& x, int w, int row, int col);

    double norm() const;  // Frobenius over all blocks

    ModuleVector& operator+=(const ModuleVector& rhs);
    ModuleVector& operator-=(const ModuleVector& rhs);
    ModuleVector& operator*=(cdouble s);
    friend ModuleVector operator+(ModuleVector lhs, const ModuleVector& rhs) {
        lhs += rhs;
        return lhs;
    }
    friend ModuleVector operator-(ModuleVector lhs, const ModuleVector& rhs) {
        lhs -= rhs;
        return lhs;
    }
    friend ModuleVector operator*(cdouble s, ModuleVector rhs) {
        rhs *= s;
        return rhs;
    }
};

// <xi, eta> = (+)_w xi_w^* eta_w, conjugate-linear in xi.
AlgebraElement inner_product(const ModuleVector& xi, const ModuleVector& eta);

// Left action through the canonical index decomposition.
ModuleVector left_act(const Correspondence& x, const AlgebraElement& a,
                      const ModuleVector& xi);
// Right action xi * a (blockwise xi_w a_w).
ModuleVector right_act(const ModuleVector& xi, const AlgebraElement& a);

// Adjointable operator on the module: one k_w x k_w matrix per block.
struct ModuleOperator {
    std::vector<Matrix> blocks;

    static ModuleOperator zero(const Correspondence& x);
    static ModuleOperator identity(const Correspondence& x);

    ModuleOperator adjoint() const;
    double norm() const;  // max block operator norm
    bool is_positive(double tol = kDefaultTol) const;

    ModuleOperator& operator+=(const ModuleOperator& rhs);
    ModuleOperator& operator-=(const ModuleOperator& rhs);
    ModuleOperator& operator*=(cdouble s);
    friend ModuleOperator operator+(ModuleOperator lhs, const ModuleOperator& rhs) {
        lhs += rhs;
        return lhs;
    }
    friend ModuleOperator operator-(ModuleOperator lhs, const ModuleOperator& rhs) {
        lhs -= rhs;
        return lhs;
    }
    friend ModuleOperator operator*(cdouble s, ModuleOperator rhs) {
        rhs *= s;
        return rhs;
    }
    friend ModuleOperator operator*(const ModuleOperator& lhs, const ModuleOperator& rhs);
};

// theta_{xi,eta} zeta = xi <eta, zeta>; blockwise xi_w eta_w^*.
ModuleOperator theta(const ModuleVector& xi, const ModuleVector& eta);

ModuleVector apply(const ModuleOperator& op, const ModuleVector& xi);

// pi(a) as a ModuleOperator.
ModuleOperator left_action_operator(const Correspondence& x, const AlgebraElement& a);

// Tr_tau(T) = sum_w t_w tr(T_w); real for T >= 0, extended linearly.
cdouble induced_trace(const TraceVector& tau, const ModuleOperator& op);

// Operator commuting with the left action: one mult(w,v) x mult(w,v)
// matrix per nonempty slot (w, v).
struct BimoduleOperator {
    std::vector<std::vector<Matrix>> slots;  // [w][v]; 0x0 when mult(w,v)=0

    static BimoduleOperator zero(const Correspondence& x);
    static BimoduleOperator identity(const Correspondence& x);

    const Matrix& slot(int w, int v) const { return slots[w][v]; }
    Matrix& slot(int w, int v) { return slots[w][v]; }

    BimoduleOperator adjoint() const;
    bool is_positive(double tol = kDefaultTol) const;

    BimoduleOperator& operator+=(const BimoduleOperator& rhs);
    BimoduleOperator& operator-=(const BimoduleOperator& rhs);
    BimoduleOperator& operator*=(cdouble s);
    friend BimoduleOperator operator*(const BimoduleOperator& lhs,
                                      const BimoduleOperator& rhs);
    friend BimoduleOperator operator+(BimoduleOperator lhs, const BimoduleOperator& rhs) {
        lhs += rhs;
        return lhs;
    }
};

// Embed into B(X): block w = (+)_v (S^{(w,v)} (x) 1_{d_v}).
ModuleOperator embed(const Correspondence& x, const BimoduleOperator& s);

// Whether a module operator commutes with the left action; if so, returns
// its slot decomposition.
std::optional<BimoduleOperator> as_bimodule(const Correspondence& x,
                                            const ModuleOperator& op,
                                            double tol = 1e-10);

// tau_T(a) = Tr_tau(pi(a) T); coefficients (tau_T)_v = sum_w t_w tr(T^{(w,v)}).
TraceVector induced_trace_functional(const TraceVector& tau, const BimoduleOperator& t,
                                     const Correspondence& x);

// xi (x) eta in tensor(x, y), canonical path indexing.
ModuleVector elementary_tensor(const Correspondence& x, const Correspondence& y,
                               const ModuleVector& xi, const ModuleVector& eta);

// S (x) T for S in B(X) and T a bimodule map on Y.
ModuleOperator tensor_operator(const Correspondence& x, const Correspondence& y,
                               const ModuleOperator& s, const BimoduleOperator& t);

// S (x) T as a bimodule operator on tensor(x, y).
BimoduleOperator bimodule_tensor(const Correspondence& x, const Correspondence& y,
                                 const BimoduleOperator& s, const BimoduleOperator& t);

// S (x) 1 + 1 (x) T; the generator of a product of commuting one-parameter
// groups.
BimoduleOperator bimodule_tensor_sum(const Correspondence& x, const Correspondence& y,
                                     const BimoduleOperator& s, const BimoduleOperator& t);

// Canonical frame {e_(w,p,0)}: sum theta_{e,e} = 1.
std::vector<ModuleVector> canonical_frame(const Correspondence& x);
// Full canonical basis (w, row, col), spanning the module over C.
std::vector<ModuleVector> canonical_basis(const Correspondence& x);

ModuleVector random_module_vector(Rng& rng, const Correspondence& x);
ModuleOperator random_module_operator(Rng& rng, const Correspondence& x);
ModuleOperator random_positive_module_operator(Rng& rng, const Correspondence& x);
BimoduleOperator random_positive_bimodule_operator(Rng& rng, const Correspondence& x);

}  // namespace kmslab
