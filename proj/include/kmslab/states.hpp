#pragma once

#include <functional>
#include <optional>

#include "kmslab/transfer.hpp"

namespace kmslab {

// T_{xi_1} ... T_{xi_m} T*_{eta_n} ... T*_{eta_1}. `left` stores
// (xi_1..xi_m), `right` stores (eta_1..eta_n) with eta_1 the innermost
// (rightmost) annihilation factor. The empty word is the unit.
struct MonomialWord {
    std::vector<ModuleVector> left;
    std::vector<ModuleVector> right;

    int creation_count() const { return static_cast<int>(left.size()); }
    int annihilation_count() const { return static_cast<int>(right.size()); }
    int degree() const { return creation_count() - annihilation_count(); }
    bool balanced() const { return left.size() == right.size(); }
    bool is_unit() const { return left.empty() && right.empty(); }

    MonomialWord adjoint() const { return MonomialWord{right, left}; }
};

// Element of the Toeplitz algebra in normal-ordered form: an algebra
// summand pi(a) plus a combination of monomial words (all T* to the right).
// Products are reduced with T*_xi T_zeta = pi(<xi, zeta>) and the bimodule
// relations T_{a xi b} = pi(a) T_xi pi(b).
struct ToeplitzElement {
    AlgebraElement scalar;
    std::vector<std::pair<cdouble, MonomialWord>> words;

    static ToeplitzElement zero(const BlockAlgebra& a);
    static ToeplitzElement unit(const BlockAlgebra& a);
    static ToeplitzElement from_algebra(const AlgebraElement& a);
    static ToeplitzElement creation(const BlockAlgebra& a, const ModuleVector& xi);
    static ToeplitzElement annihilation(const BlockAlgebra& a, const ModuleVector& xi);
    static ToeplitzElement from_word(const BlockAlgebra& a, const MonomialWord& w,
                                     cdouble coeff = 1.0);

    ToeplitzElement adjoint() const;
    ToeplitzElement& operator+=(const ToeplitzElement& rhs);
    ToeplitzElement& operator*=(cdouble s);
    friend ToeplitzElement operator+(ToeplitzElement lhs, const ToeplitzElement& rhs) {
        lhs += rhs;
        return lhs;
    }
    friend ToeplitzElement operator*(cdouble s, ToeplitzElement rhs) {
        rhs *= s;
        return rhs;
    }
};

// Normal-ordered product in the universal algebra.
ToeplitzElement normal_product(const Correspondence& x, const ToeplitzElement& lhs,
                               const ToeplitzElement& rhs);

// Product of a sequence of Toeplitz letters, reduced left to right.
ToeplitzElement normal_order(const Correspondence& x,
                             const std::vector<ToeplitzElement>& letters);

// gamma_z: left factors -> U_z xi, right factors -> U_{conj(z)} eta; the
// algebra summand is fixed (trivial coefficient dynamics).
ToeplitzElement gamma_apply(const Correspondence& x, const Generator& d, cdouble z,
                            const ToeplitzElement& elem);

// Gauge-invariant KMS state of the Toeplitz algebra determined by a
// beta-subinvariant trace. beta may be +infinity (ground state of tau).
struct KmsState {
    double beta = 0.0;
    TraceVector tau;
    TransferMatrix zmat;     // Z(beta)
    BimoduleOperator heat;   // e^{-beta D}
};

// Checks subinvariance Z^T t <= t + tol unless `enforce` is false
// (negative controls build deliberately invalid states).
KmsState make_kms_state(const Correspondence& x, const Generator& d, double beta,
                        const TraceVector& tau, double tol = kDefaultTol,
                        bool enforce = true);

// The two-point formula: 0 unless m = n, otherwise
// tau(<eta_1 (x) ... (x) eta_n, e^{-beta D} xi_1 (x) ... (x) e^{-beta D} xi_n>).
cdouble evaluate_kms_state(const Correspondence& x, const KmsState& st,
                           const MonomialWord& w);
cdouble evaluate_kms_state(const Correspondence& x, const KmsState& st,
                           const ToeplitzElement& e);

// |phi(xy) - phi(y gamma_{i beta}(x))| in the normal-ordered calculus.
double verify_kms(const Correspondence& x, const Generator& d, const KmsState& st,
                  const ToeplitzElement& lhs, const ToeplitzElement& rhs);

struct WoldDecomposition {
    TraceVector tau_finite;
    TraceVector tau_infinite;
    TraceVector tau0;       // tau - F tau
    double lambda_finite;   // mass fraction of the finite part
};

// Splits a subinvariant trace into its finite part (the series sum F^n tau0)
// and its infinite part (the power limit of F^n tau).
WoldDecomposition wold_decompose(const TraceVector& tau, const TransferMatrix& zm,
                                 const BlockAlgebra& a, double tol = kDefaultTol);

enum class KmsType { finite, infinite, mixed };
const char* to_string(KmsType t);

KmsType classify_type(const KmsState& st, const BlockAlgebra& a,
                      double tol = kDefaultTol);

// At finite dimension K(X) = B(X), so the descent ideal is all of A.
struct IdealIx {
    bool all_of_a = true;
};
IdealIx ideal_ix(const Correspondence& x);

// Descends to the Cuntz-Pimsner quotient iff F tau = tau on the ideal;
// always false at beta = +infinity.
bool check_ox_descends(const KmsState& st, double tol = kDefaultTol);

// Ground state of an arbitrary (not necessarily tracial) state on A,
// evaluating to omega on the algebra summand and 0 on all words with a
// creation or annihilation factor.
struct GroundState {
    AlgebraElement density;  // omega(a) = sum_v tr(rho_v a_v)
};

GroundState make_ground_state(const AlgebraElement& density, double tol = kDefaultTol);
GroundState ground_state_from_trace(const BlockAlgebra& a, const TraceVector& tau);
cdouble ground_state_eval(const GroundState& g, const ToeplitzElement& e);

// Generalized quasi-free data: traces tau_0.. and positive bimodule
// operators S_1.., finitely many of each, extended by a tail rule.
struct QuasiFreeSpec {
    enum class Tail { constant, geometric };

    std::vector<TraceVector> taus;        // tau_0 .. tau_K, tau_0 a state
    std::vector<BimoduleOperator> ops;    // S_1 .. S_L
    Tail tail = Tail::constant;
    double tail_ratio = 1.0;              // geometric factor for tau_n, n > K

    TraceVector tau_at(int n) const;
    const BimoduleOperator& op_at(int n) const;  // n >= 1
};

struct QuasiFreeState {
    QuasiFreeSpec spec;
    bool descends_to_ox = false;
};

// Validates the compatibility inequalities Tr_{tau_n}(pi(a) S_n) <=
// tau_{n-1}(a) (componentwise on coefficients); throws when violated.
QuasiFreeState make_quasi_free_state(const Correspondence& x, QuasiFreeSpec spec,
                                     double tol = kDefaultTol);

cdouble quasi_free_eval(const Correspondence& x, const QuasiFreeState& st,
                        const MonomialWord& w);
cdouble quasi_free_eval(const Correspondence& x, const QuasiFreeState& st,
                        const ToeplitzElement& e);

using StateEvaluator = std::function<cdouble(const ToeplitzElement&)>;

StateEvaluator kms_evaluator(const Correspondence& x, const KmsState& st);

// Min eigenvalue of the Gram matrix G_ij = phi(w_i^* w_j).
double moment_matrix_min_eig(const Correspondence& x, const StateEvaluator& phi,
                             const std::vector<MonomialWord>& words);

// All monomial words with basis-vector factors and m + n <= max_total.
std::vector<MonomialWord> basis_words(const Correspondence& x, int max_total);

MonomialWord random_word(Rng& rng, const Correspondence& x, int max_creation,
                         int max_annihilation);

}  // namespace kmslab
