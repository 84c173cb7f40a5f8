#include "kmslab/states.hpp"

#include <cmath>
#include <stdexcept>

namespace kmslab {

ToeplitzElement ToeplitzElement::zero(const BlockAlgebra& a) {
    return ToeplitzElement{AlgebraElement::zero(a), {}};
}

ToeplitzElement ToeplitzElement::unit(const BlockAlgebra& a) {
    return ToeplitzElement{AlgebraElement::identity(a), {}};
}

ToeplitzElement ToeplitzElement::from_algebra(const AlgebraElement& a) {
    return ToeplitzElement{a, {}};
}

ToeplitzElement ToeplitzElement::creation(const BlockAlgebra& a, const ModuleVector& xi) {
    ToeplitzElement e = zero(a);
    e.words.push_back({cdouble(1.0), MonomialWord{{xi}, {}}});
    return e;
}

ToeplitzElement ToeplitzElement::annihilation(const BlockAlgebra& a,
                                              const ModuleVector& xi) {
    ToeplitzElement e = zero(a);
    e.words.push_back({cdouble(1.0), MonomialWord{{}, {xi}}});
    return e;
}

ToeplitzElement ToeplitzElement::from_word(const BlockAlgebra& a, const MonomialWord& w,
                                           cdouble coeff) {
    ToeplitzElement e = zero(a);
    if (w.is_unit()) {
        e.scalar = coeff * AlgebraElement::identity(a);
        return e;
    }
    e.words.push_back({coeff, w});
    return e;
}

ToeplitzElement ToeplitzElement::adjoint() const {
    ToeplitzElement e;
    e.scalar = scalar.adjoint();
    for (const auto& [c, w] : words) e.words.push_back({std::conj(c), w.adjoint()});
    return e;
}

ToeplitzElement& ToeplitzElement::operator+=(const ToeplitzElement& rhs) {
    scalar += rhs.scalar;
    words.insert(words.end(), rhs.words.begin(), rhs.words.end());
    return *this;
}

ToeplitzElement& ToeplitzElement::operator*=(cdouble s) {
    scalar *= s;
    for (auto& [c, w] : words) c *= s;
    return *this;
}

namespace {

// pi(a) . word: absorb into the outermost creation factor, else into the
// outermost annihilation factor via pi(a) T*_eta = T*_{eta a^*}.
// Returns false when the word is empty (caller handles the scalar case).
bool absorb_left(const Correspondence& x, const AlgebraElement& a, MonomialWord& w) {
    if (!w.left.empty()) {
        w.left.front() = left_act(x, a, w.left.front());
        return true;
    }
    if (!w.right.empty()) {
        w.right.back() = right_act(w.right.back(), a.adjoint());
        return true;
    }
    return false;
}

// word . pi(a): absorb into the innermost annihilation factor via
// T*_eta pi(a) = T*_{a^* eta}, else into the innermost creation factor.
bool absorb_right(const Correspondence& x, const AlgebraElement& a, MonomialWord& w) {
    if (!w.right.empty()) {
        w.right.front() = left_act(x, a.adjoint(), w.right.front());
        return true;
    }
    if (!w.left.empty()) {
        w.left.back() = right_act(w.left.back(), a);
        return true;
    }
    return false;
}

// Normal-ordered product of two monomial words. Appends the reduced terms
// to `out` (either a word term or an algebra summand).
void multiply_words(const Correspondence& x, cdouble coeff, const MonomialWord& lhs,
                    const MonomialWord& rhs, ToeplitzElement& out) {
    MonomialWord l = lhs, r = rhs;
    AlgebraElement carry;  // pending pi(a) between l's annihilators and r's creators
    bool have_carry = false;

    // Contract T*_{eta_1} T_{zeta_1} = pi(<eta_1, zeta_1>) innermost-first.
    while (!l.right.empty() && !r.left.empty()) {
        ModuleVector zeta = r.left.front();
        if (have_carry) zeta = left_act(x, carry, zeta);
        carry = inner_product(l.right.front(), zeta);
        have_carry = true;
        l.right.erase(l.right.begin());
        r.left.erase(r.left.begin());
    }

    MonomialWord merged;
    merged.left = l.left;
    merged.left.insert(merged.left.end(), r.left.begin(), r.left.end());
    merged.right = r.right;
    merged.right.insert(merged.right.end(), l.right.begin(), l.right.end());

    if (have_carry) {
        // Place the carried pi(a) at the junction: after l.left, before
        // what remains of l.right / r.left (one of the two is empty).
        if (!l.right.empty()) {
            // ... T*_{eta_2} pi(a) ... : eta_2 is merged.right's first
            // surviving factor from l (located after r.right).
            const size_t pos = r.right.size();
            merged.right[pos] = left_act(x, carry.adjoint(), merged.right[pos]);
        } else if (!r.left.empty()) {
            const size_t pos = l.left.size();
            merged.left[pos] = left_act(x, carry, merged.left[pos]);
        } else if (!merged.left.empty()) {
            merged.left.back() = right_act(merged.left.back(), carry);
        } else if (!merged.right.empty()) {
            // pi(a) T*_{omega_q}: omega_q is the outermost annihilator.
            merged.right.back() = right_act(merged.right.back(), carry.adjoint());
        } else {
            out.scalar += coeff * carry;
            return;
        }
    }
    if (merged.is_unit())
        throw std::logic_error("multiply_words: empty factors in word list");
    out.words.push_back({coeff, merged});
}

}  // namespace

namespace {
bool algebra_is_zero(const AlgebraElement& a) {
    for (const Matrix& b : a.blocks)
        if (b.squaredNorm() != 0.0) return false;
    return true;
}
}  // namespace

ToeplitzElement normal_product(const Correspondence& x, const ToeplitzElement& lhs,
                               const ToeplitzElement& rhs) {
    ToeplitzElement out = ToeplitzElement::zero(x.algebra);
    out.scalar = lhs.scalar * rhs.scalar;

    if (!algebra_is_zero(lhs.scalar))
        for (const auto& [c, w] : rhs.words) {
            MonomialWord t = w;
            if (absorb_left(x, lhs.scalar, t)) out.words.push_back({c, t});
        }
    if (!algebra_is_zero(rhs.scalar))
        for (const auto& [c, w] : lhs.words) {
            MonomialWord t = w;
            if (absorb_right(x, rhs.scalar, t)) out.words.push_back({c, t});
        }
    for (const auto& [cl, wl] : lhs.words)
        for (const auto& [cr, wr] : rhs.words) multiply_words(x, cl * cr, wl, wr, out);
    return out;
}

ToeplitzElement normal_order(const Correspondence& x,
                             const std::vector<ToeplitzElement>& letters) {
    ToeplitzElement acc = ToeplitzElement::unit(x.algebra);
    for (const ToeplitzElement& l : letters) acc = normal_product(x, acc, l);
    return acc;
}

ToeplitzElement gamma_apply(const Correspondence& x, const Generator& d, cdouble z,
                            const ToeplitzElement& elem) {
    const ModuleOperator fwd = embed(x, unitary_group(x, d, z));
    const ModuleOperator bwd = embed(x, unitary_group(x, d, std::conj(z)));
    ToeplitzElement out = elem;
    for (auto& [c, w] : out.words) {
        for (ModuleVector& xi : w.left) xi = apply(fwd, xi);
        for (ModuleVector& eta : w.right) eta = apply(bwd, eta);
    }
    return out;
}

KmsState make_kms_state(const Correspondence& x, const Generator& d, double beta,
                        const TraceVector& tau, double tol, bool enforce) {
    KmsState st;
    st.beta = beta;
    st.tau = tau;
    st.zmat = transfer_matrix(x, d, beta);
    st.heat = heat_kernel(x, d, beta);
    if (enforce) {
        const double viol = subinvariance_violation(st.zmat, tau);
        if (viol > tol)
            throw std::invalid_argument("make_kms_state: trace is not subinvariant");
    }
    return st;
}

namespace {

// eta_1 (x) ... (x) eta_n by left iteration, together with the
// correspondence it lives in.
std::pair<Correspondence, ModuleVector> iterated_tensor(
    const Correspondence& x, const std::vector<ModuleVector>& factors) {
    Correspondence acc_sp = x;
    ModuleVector acc = factors.back();
    for (int i = static_cast<int>(factors.size()) - 2; i >= 0; --i) {
        ModuleVector next = elementary_tensor(x, acc_sp, factors[i], acc);
        acc_sp = tensor(x, acc_sp);
        acc = std::move(next);
    }
    return {acc_sp, acc};
}

}  // namespace

cdouble evaluate_kms_state(const Correspondence& x, const KmsState& st,
                           const MonomialWord& w) {
    if (std::isinf(st.beta)) {
        if (w.is_unit()) return st.tau.mass(x.algebra);
        return 0.0;
    }
    if (!w.balanced()) return 0.0;
    if (w.is_unit()) return st.tau.mass(x.algebra);

    const ModuleOperator heat_op = embed(x, st.heat);
    std::vector<ModuleVector> cooled;
    cooled.reserve(w.left.size());
    for (const ModuleVector& xi : w.left) cooled.push_back(apply(heat_op, xi));

    const auto [sp_l, ten_l] = iterated_tensor(x, cooled);
    const auto [sp_r, ten_r] = iterated_tensor(x, w.right);
    (void)sp_l;
    (void)sp_r;
    return evaluate_trace(st.tau, inner_product(ten_r, ten_l));
}

cdouble evaluate_kms_state(const Correspondence& x, const KmsState& st,
                           const ToeplitzElement& e) {
    cdouble s = evaluate_trace(st.tau, e.scalar);
    for (const auto& [c, w] : e.words) s += c * evaluate_kms_state(x, st, w);
    return s;
}

double verify_kms(const Correspondence& x, const Generator& d, const KmsState& st,
                  const ToeplitzElement& lhs, const ToeplitzElement& rhs) {
    const ToeplitzElement prod = normal_product(x, lhs, rhs);
    const ToeplitzElement twisted =
        normal_product(x, rhs, gamma_apply(x, d, cdouble(0.0, st.beta), lhs));
    return std::abs(evaluate_kms_state(x, st, prod) -
                    evaluate_kms_state(x, st, twisted));
}

WoldDecomposition wold_decompose(const TraceVector& tau, const TransferMatrix& zm,
                                 const BlockAlgebra& a, double tol) {
    if (subinvariance_violation(zm, tau) > tol)
        throw std::invalid_argument("wold_decompose: trace is not subinvariant");
    const RealMatrix zt = zm.z.transpose();
    const int n = static_cast<int>(tau.t.size());

    WoldDecomposition out;
    RealVector tau0 = tau.t - zt * tau.t;
    for (int v = 0; v < n; ++v) tau0[v] = std::max(0.0, tau0[v]);
    out.tau0 = TraceVector(tau0);

    // F^n tau decreases componentwise under subinvariance, so the plain
    // limit exists; a tail average is kept as a numerical fallback.
    RealVector cur = tau.t;
    bool converged = false;
    for (int it = 0; it < 10000; ++it) {
        const RealVector nxt = zt * cur;
        const double diff = (nxt - cur).lpNorm<1>();
        cur = nxt;
        if (diff < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        RealVector acc = RealVector::Zero(n);
        const int window = 256;
        for (int it = 0; it < window; ++it) {
            acc += cur;
            cur = zt * cur;
        }
        cur = acc / window;
    }
    for (int v = 0; v < n; ++v) cur[v] = std::max(0.0, std::min(cur[v], tau.t[v]));
    out.tau_infinite = TraceVector(cur);
    out.tau_finite = TraceVector(tau.t - cur);
    out.lambda_finite =
        tau.mass(a) > 0.0 ? out.tau_finite.mass(a) / tau.mass(a) : 0.0;

    const double fixed_res = (zt * cur - cur).lpNorm<Eigen::Infinity>();
    if (fixed_res > 100 * std::max(tol, 1e-9))
        throw std::runtime_error("wold_decompose: power limit failed to stabilize");
    return out;
}

const char* to_string(KmsType t) {
    switch (t) {
        case KmsType::finite: return "finite";
        case KmsType::infinite: return "infinite";
        default: return "mixed";
    }
}

KmsType classify_type(const KmsState& st, const BlockAlgebra& a, double tol) {
    if (std::isinf(st.beta)) return KmsType::finite;
    const WoldDecomposition w = wold_decompose(st.tau, st.zmat, a, tol);
    const double total = std::max(st.tau.mass(a), 1e-300);
    const double inf_mass = w.tau_infinite.mass(a) / total;
    const double fin_mass = w.tau_finite.mass(a) / total;
    if (inf_mass <= tol) return KmsType::finite;
    if (fin_mass <= tol) return KmsType::infinite;
    return KmsType::mixed;
}

IdealIx ideal_ix(const Correspondence&) {
    // Finitely generated module: K(X) = B(X), so i_X(a) is compact for
    // every a and the ideal is all of A.
    return IdealIx{true};
}

bool check_ox_descends(const KmsState& st, double tol) {
    if (std::isinf(st.beta)) return false;
    return invariance_violation(st.zmat, st.tau) <= tol;
}

GroundState make_ground_state(const AlgebraElement& density, double tol) {
    if (!density.is_positive(tol))
        throw std::invalid_argument("make_ground_state: density not positive");
    double mass = 0.0;
    for (const Matrix& b : density.blocks) mass += b.trace().real();
    if (std::abs(mass - 1.0) > std::sqrt(tol))
        throw std::invalid_argument("make_ground_state: density not normalized");
    return GroundState{density};
}

GroundState ground_state_from_trace(const BlockAlgebra& a, const TraceVector& tau) {
    AlgebraElement rho = AlgebraElement::zero(a);
    for (int v = 0; v < a.num_blocks(); ++v)
        rho.blocks[v] = tau.t[v] * Matrix::Identity(a.dim(v), a.dim(v));
    return make_ground_state(rho);
}

cdouble ground_state_eval(const GroundState& g, const ToeplitzElement& e) {
    cdouble s = 0.0;
    for (size_t v = 0; v < g.density.blocks.size(); ++v)
        s += (g.density.blocks[v] * e.scalar.blocks[v]).trace();
    // Words with creation factors vanish; unbalanced adjoints likewise.
    return s;
}

TraceVector QuasiFreeSpec::tau_at(int n) const {
    const int last = static_cast<int>(taus.size()) - 1;
    if (n <= last) return taus[n];
    if (tail == Tail::constant) return taus[last];
    const double f = std::pow(tail_ratio, n - last);
    return TraceVector(f * taus[last].t);
}

const BimoduleOperator& QuasiFreeSpec::op_at(int n) const {
    const int last = static_cast<int>(ops.size());
    if (n <= last) return ops[n - 1];
    return ops.back();
}

QuasiFreeState make_quasi_free_state(const Correspondence& x, QuasiFreeSpec spec,
                                     double tol) {
    if (spec.taus.empty() || spec.ops.empty())
        throw std::invalid_argument("make_quasi_free_state: empty data");
    if (!spec.taus.front().is_state(x.algebra, std::sqrt(tol)))
        throw std::invalid_argument("make_quasi_free_state: tau_0 must be a state");
    if (spec.tail == QuasiFreeSpec::Tail::geometric &&
        (spec.tail_ratio < 0.0 || spec.tail_ratio > 1.0))
        throw std::invalid_argument("make_quasi_free_state: bad tail ratio");

    // Check the prefix plus one tail step; later steps scale both sides
    // of the inequality by the same factor.
    const int horizon =
        static_cast<int>(std::max(spec.taus.size(), spec.ops.size() + 1));
    bool equality = true;
    for (int n = 1; n <= horizon; ++n) {
        const TraceVector tn = spec.tau_at(n);
        const TraceVector prev = spec.tau_at(n - 1);
        const TraceVector induced = induced_trace_functional(tn, spec.op_at(n), x);
        for (int v = 0; v < x.num_blocks(); ++v) {
            const double gap = prev.t[v] - induced.t[v];
            if (gap < -tol)
                throw std::invalid_argument(
                    "make_quasi_free_state: compatibility inequality violated at level " +
                    std::to_string(n));
            if (std::abs(gap) > tol) equality = false;
        }
    }
    QuasiFreeState st;
    st.spec = std::move(spec);
    st.descends_to_ox = equality;
    return st;
}

cdouble quasi_free_eval(const Correspondence& x, const QuasiFreeState& st,
                        const MonomialWord& w) {
    if (!w.balanced()) return 0.0;
    if (w.is_unit()) return st.spec.tau_at(0).mass(x.algebra);
    const int n = w.creation_count();
    std::vector<ModuleVector> scaled;
    scaled.reserve(n);
    for (int i = 0; i < n; ++i)
        scaled.push_back(apply(embed(x, st.spec.op_at(i + 1)), w.left[i]));
    const auto [sp_l, ten_l] = iterated_tensor(x, scaled);
    const auto [sp_r, ten_r] = iterated_tensor(x, w.right);
    (void)sp_l;
    (void)sp_r;
    return evaluate_trace(st.spec.tau_at(n), inner_product(ten_r, ten_l));
}

cdouble quasi_free_eval(const Correspondence& x, const QuasiFreeState& st,
                        const ToeplitzElement& e) {
    cdouble s = evaluate_trace(st.spec.tau_at(0), e.scalar);
    for (const auto& [c, w] : e.words) s += c * quasi_free_eval(x, st, w);
    return s;
}

StateEvaluator kms_evaluator(const Correspondence& x, const KmsState& st) {
    return [&x, st](const ToeplitzElement& e) { return evaluate_kms_state(x, st, e); };
}

double moment_matrix_min_eig(const Correspondence& x, const StateEvaluator& phi,
                             const std::vector<MonomialWord>& words) {
    const int n = static_cast<int>(words.size());
    Matrix gram(n, n);
    for (int i = 0; i < n; ++i) {
        const ToeplitzElement wi =
            ToeplitzElement::from_word(x.algebra, words[i].adjoint());
        for (int j = 0; j < n; ++j) {
            const ToeplitzElement wj = ToeplitzElement::from_word(x.algebra, words[j]);
            gram(i, j) = phi(normal_product(x, wi, wj));
        }
    }
    return min_eigenvalue(0.5 * (gram + gram.adjoint()));
}

std::vector<MonomialWord> basis_words(const Correspondence& x, int max_total) {
    const std::vector<ModuleVector> basis = canonical_basis(x);
    std::vector<MonomialWord> out;
    out.push_back(MonomialWord{});

    // All factor sequences of total length m + n <= max_total.
    std::vector<std::vector<std::vector<ModuleVector>>> tuples(max_total + 1);
    tuples[0] = {{}};
    for (int len = 1; len <= max_total; ++len)
        for (const auto& prefix : tuples[len - 1])
            for (const ModuleVector& b : basis) {
                auto t = prefix;
                t.push_back(b);
                tuples[len].push_back(std::move(t));
            }
    for (int m = 0; m <= max_total; ++m)
        for (int n = 0; n + m <= max_total; ++n) {
            if (m == 0 && n == 0) continue;
            for (const auto& l : tuples[m])
                for (const auto& r : tuples[n]) out.push_back(MonomialWord{l, r});
        }
    return out;
}

MonomialWord random_word(Rng& rng, const Correspondence& x, int max_creation,
                         int max_annihilation) {
    MonomialWord w;
    const int m = rng.uniform_int(0, max_creation);
    const int n = rng.uniform_int(0, max_annihilation);
    for (int i = 0; i < m; ++i) w.left.push_back(random_module_vector(rng, x));
    for (int i = 0; i < n; ++i) w.right.push_back(random_module_vector(rng, x));
    return w;
}

}  // namespace kmslab
