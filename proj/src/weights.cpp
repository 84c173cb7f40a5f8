#include "kmslab/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace kmslab {

void TwistedIsometryGroup::validate(const Correspondence& x) const {
    d.validate(x);
    h.validate(x.algebra);
}

Matrix TwistedIsometryGroup::g_matrix(const Correspondence& x, int w) const {
    const int kw = x.k(w);
    Matrix g = Matrix::Zero(kw, kw);
    for (int v = 0; v < x.num_blocks(); ++v) {
        const int m = x.mult(w, v), dv = x.dim(v);
        if (m == 0) continue;
        const int off = x.row_offset(w, v);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int i = 0; i < dv; ++i)
                    for (int j = 0; j < dv; ++j) {
                        cdouble val = 0.0;
                        if (i == j) val += d.slot(w, v)(a, b);
                        if (a == b) val += h.h[v](i, j);
                        g(off + a * dv + i, off + b * dv + j) = val;
                    }
    }
    return g;
}

ModuleVector TwistedIsometryGroup::apply(const Correspondence& x, cdouble z,
                                         const ModuleVector& xi) const {
    const cdouble iz = cdouble(0.0, 1.0) * z;
    ModuleVector out = xi;
    for (int w = 0; w < x.num_blocks(); ++w) {
        if (x.k(w) == 0) continue;
        const Matrix fwd = hermitian_exp(g_matrix(x, w), iz);
        const Matrix bwd = hermitian_exp(h.h[w], -iz);
        out.blocks[w] = fwd * xi.blocks[w] * bwd;
    }
    return out;
}

cdouble induced_weight_eval(const InducedWeight& k, const ModuleOperator& t) {
    cdouble s = 0.0;
    for (size_t w = 0; w < k.density.size(); ++w) {
        if (t.blocks[w].rows() == 0) continue;
        s += k.c[static_cast<int>(w)] * (t.blocks[w] * k.density[w]).trace();
    }
    return s;
}

InducedWeight induce_weight(const Correspondence& x, const KmsFunctional& phi,
                            const TwistedIsometryGroup& u, double tol) {
    u.validate(x);
    if (phi.c.size() != x.num_blocks())
        throw std::invalid_argument("induce_weight: coefficient count mismatch");
    for (int v = 0; v < x.num_blocks(); ++v)
        if ((phi.dynamics.h[v] - u.h.h[v]).norm() > 1e-10)
            throw std::invalid_argument(
                "induce_weight: functional dynamics differ from the group's "
                "coefficient part");

    InducedWeight k;
    k.beta = phi.beta;
    k.c = phi.c;
    for (int w = 0; w < x.num_blocks(); ++w) {
        k.g.push_back(u.g_matrix(x, w));
        k.density.push_back(k.g.back().rows() > 0 ? hermitian_exp(k.g.back(), -phi.beta)
                                                  : Matrix::Zero(0, 0));
    }

    // Certify the closed form against the defining identity on the full
    // canonical basis.
    const cdouble half(0.0, phi.beta / 2.0);
    double scale = std::max(1.0, phi.c.lpNorm<Eigen::Infinity>());
    for (const ModuleVector& e : canonical_basis(x)) {
        const ModuleVector cooled = u.apply(x, half, e);
        const cdouble rhs = kms_functional_eval(phi, inner_product(cooled, cooled));
        const cdouble lhs = induced_weight_eval(k, theta(e, e));
        if (std::abs(lhs - rhs) > tol * scale)
            throw std::runtime_error("induce_weight: defining identity violated");
    }
    return k;
}

KmsFunctional restrict_weight(const Correspondence& x, const InducedWeight& k,
                              const TwistedIsometryGroup& u, double gate) {
    u.validate(x);
    if (!x.is_full())
        throw std::invalid_argument(
            "restrict_weight: module is not full; the restriction system is "
            "underdetermined");

    // phi(<xi,xi>) = kappa(theta_{U_{-i beta/2} xi, U_{-i beta/2} xi}) over
    // the canonical basis. Each equation touches a single block, so the
    // least-squares solve decouples blockwise.
    const cdouble mhalf(0.0, -k.beta / 2.0);
    std::vector<Matrix> densities;
    for (int w = 0; w < x.num_blocks(); ++w)
        densities.push_back(hermitian_exp(u.h.h[w], -k.beta));

    RealVector num = RealVector::Zero(x.num_blocks());
    RealVector den = RealVector::Zero(x.num_blocks());
    std::vector<std::vector<std::pair<double, double>>> eqs(x.num_blocks());
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int p = 0; p < x.k(w); ++p)
            for (int j = 0; j < x.dim(w); ++j) {
                const ModuleVector e = ModuleVector::basis(x, w, p, j);
                const ModuleVector heated = u.apply(x, mhalf, e);
                const double rhs =
                    induced_weight_eval(k, theta(heated, heated)).real();
                const double coef =
                    (inner_product(e, e).blocks[w] * densities[w]).trace().real();
                num[w] += rhs * coef;
                den[w] += coef * coef;
                eqs[w].push_back({coef, rhs});
            }

    KmsFunctional phi;
    phi.beta = k.beta;
    phi.dynamics = u.h;
    phi.c = RealVector::Zero(x.num_blocks());
    double scale = std::max(1.0, k.c.size() ? k.c.lpNorm<Eigen::Infinity>() : 0.0);
    for (int w = 0; w < x.num_blocks(); ++w) {
        if (den[w] <= 0.0)
            throw std::invalid_argument("restrict_weight: block not reached by <X,X>");
        phi.c[w] = num[w] / den[w];
        for (const auto& [coef, rhs] : eqs[w])
            if (std::abs(coef * phi.c[w] - rhs) > gate * scale)
                throw std::runtime_error("restrict_weight: residual gate exceeded");
    }
    return phi;
}

KmsFunctional apply_F_general(const Correspondence& x, const KmsFunctional& phi,
                              const TwistedIsometryGroup& u, double tol) {
    const InducedWeight k = induce_weight(x, phi, u);
    const TransferMatrix zm = transfer_matrix(x, u.d, phi.beta);

    KmsFunctional out;
    out.beta = phi.beta;
    out.dynamics = u.h;
    out.c = zm.z.transpose() * phi.c;

    // The coefficient action above must coincide with the definitional
    // (F phi)(a) = kappa_phi(pi(a)); verify on the spanning matrix units.
    double scale = std::max(1.0, phi.c.lpNorm<Eigen::Infinity>());
    for (int v = 0; v < x.num_blocks(); ++v)
        for (int i = 0; i < x.dim(v); ++i)
            for (int j = 0; j < x.dim(v); ++j) {
                const AlgebraElement a = matrix_unit(x.algebra, v, i, j);
                const cdouble direct =
                    induced_weight_eval(k, left_action_operator(x, a));
                const cdouble closed = kms_functional_eval(out, a);
                if (std::abs(direct - closed) > tol * scale)
                    throw std::runtime_error(
                        "apply_F_general: coefficient form disagrees with the "
                        "definitional composite");
            }
    return out;
}

TwistedIsometryGroup tensor_group(const Correspondence& x, const Correspondence& y,
                                  const TwistedIsometryGroup& u,
                                  const TwistedIsometryGroup& v) {
    for (size_t b = 0; b < u.h.h.size(); ++b)
        if ((u.h.h[b] - v.h.h[b]).norm() > 1e-10)
            throw std::invalid_argument("tensor_group: coefficient parts differ");
    TwistedIsometryGroup out;
    out.h = u.h;
    const BimoduleOperator sum = bimodule_tensor_sum(
        x, y, u.d.as_bimodule_operator(x), v.d.as_bimodule_operator(y));
    Generator g;
    g.slots = sum.slots;
    out.d = g;
    return out;
}

double weight_stages_check(const Correspondence& x, const Correspondence& y,
                           const TwistedIsometryGroup& u, const TwistedIsometryGroup& v,
                           const KmsFunctional& phi, Rng& rng, int samples) {
    const Correspondence xy = tensor(x, y);
    const TwistedIsometryGroup w = tensor_group(x, y, u, v);
    const InducedWeight k_total = induce_weight(xy, phi, w);

    // psi = kappa^V_phi restricted to A along the left action on Y, i.e.
    // the transfer image of phi through Y.
    const KmsFunctional psi = apply_F_general(y, phi, v);
    const InducedWeight k_stage = induce_weight(x, psi, u);

    double worst = 0.0;
    const BimoduleOperator id_y = BimoduleOperator::identity(y);
    for (int s = 0; s < samples; ++s) {
        const ModuleOperator op = random_positive_module_operator(rng, x);
        const cdouble lhs = induced_weight_eval(k_total, tensor_operator(x, y, op, id_y));
        const cdouble rhs = induced_weight_eval(k_stage, op);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

cdouble general_kms_eval(const Correspondence& x, const TwistedIsometryGroup& u,
                         const KmsFunctional& phi, const MonomialWord& w) {
    if (!w.balanced()) return 0.0;
    if (w.is_unit()) return phi.total_mass();
    const cdouble ibeta(0.0, phi.beta);
    std::vector<ModuleVector> heated;
    heated.reserve(w.left.size());
    for (const ModuleVector& xi : w.left) heated.push_back(u.apply(x, ibeta, xi));

    Correspondence sp = x;
    ModuleVector tl = heated.back();
    ModuleVector tr = w.right.back();
    for (int i = static_cast<int>(heated.size()) - 2; i >= 0; --i) {
        ModuleVector nl = elementary_tensor(x, sp, heated[i], tl);
        ModuleVector nr = elementary_tensor(x, sp, w.right[i], tr);
        sp = tensor(x, sp);
        tl = std::move(nl);
        tr = std::move(nr);
    }
    return kms_functional_eval(phi, inner_product(tr, tl));
}

cdouble general_kms_eval(const Correspondence& x, const TwistedIsometryGroup& u,
                         const KmsFunctional& phi, const ToeplitzElement& e) {
    cdouble s = kms_functional_eval(phi, e.scalar);
    for (const auto& [c, w] : e.words) s += c * general_kms_eval(x, u, phi, w);
    return s;
}

ToeplitzElement gamma_apply_general(const Correspondence& x,
                                    const TwistedIsometryGroup& u, cdouble z,
                                    const ToeplitzElement& e) {
    ToeplitzElement out = e;
    out.scalar = sigma_apply(u.h, z, e.scalar);
    for (auto& [c, w] : out.words) {
        for (ModuleVector& xi : w.left) xi = u.apply(x, z, xi);
        for (ModuleVector& eta : w.right) eta = u.apply(x, std::conj(z), eta);
    }
    return out;
}

double verify_kms_general(const Correspondence& x, const TwistedIsometryGroup& u,
                          const KmsFunctional& phi, const ToeplitzElement& lhs,
                          const ToeplitzElement& rhs) {
    const ToeplitzElement prod = normal_product(x, lhs, rhs);
    const ToeplitzElement twisted = normal_product(
        x, rhs, gamma_apply_general(x, u, cdouble(0.0, phi.beta), lhs));
    return std::abs(general_kms_eval(x, u, phi, prod) -
                    general_kms_eval(x, u, phi, twisted));
}

GeneralKmsSolution solve_kms_states_general(const Correspondence& x,
                                            const TwistedIsometryGroup& u, double beta,
                                            SolveTarget target, double tol) {
    u.validate(x);
    const TransferMatrix zm = transfer_matrix(x, u.d, beta);
    RealVector nw(x.num_blocks());
    for (int v = 0; v < x.num_blocks(); ++v)
        nw[v] = hermitian_exp(u.h.h[v], -beta).trace().real();

    GeneralKmsSolution out;
    const auto coeffs = target == SolveTarget::toeplitz
                            ? subinvariant_solver(zm, x.algebra, tol, &nw)
                            : invariant_solver(zm, x.algebra, tol, &nw);
    if (!coeffs) return out;
    KmsFunctional phi;
    phi.beta = beta;
    phi.dynamics = u.h;
    phi.c = coeffs->t;
    out.residual = target == SolveTarget::toeplitz
                       ? std::max(0.0, subinvariance_violation(zm, *coeffs))
                       : invariance_violation(zm, *coeffs);
    out.descends_to_ox = invariance_violation(zm, *coeffs) <= tol;
    out.phi = phi;
    return out;
}

}  // namespace kmslab
