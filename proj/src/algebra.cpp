#include "kmslab/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace kmslab {

BlockAlgebra::BlockAlgebra(std::vector<int> dims) : block_dims(std::move(dims)) {
    if (block_dims.empty())
        throw std::invalid_argument("BlockAlgebra: need at least one block");
    for (int d : block_dims)
        if (d < 1) throw std::invalid_argument("BlockAlgebra: block dims must be >= 1");
}

int BlockAlgebra::total_dim() const {
    int n = 0;
    for (int d : block_dims) n += d;
    return n;
}

AlgebraElement AlgebraElement::zero(const BlockAlgebra& a) {
    AlgebraElement e;
    for (int v = 0; v < a.num_blocks(); ++v)
        e.blocks.push_back(Matrix::Zero(a.dim(v), a.dim(v)));
    return e;
}

AlgebraElement AlgebraElement::identity(const BlockAlgebra& a) {
    AlgebraElement e;
    for (int v = 0; v < a.num_blocks(); ++v)
        e.blocks.push_back(Matrix::Identity(a.dim(v), a.dim(v)));
    return e;
}

bool AlgebraElement::shape_matches(const BlockAlgebra& a) const {
    if (num_blocks() != a.num_blocks()) return false;
    for (int v = 0; v < a.num_blocks(); ++v)
        if (blocks[v].rows() != a.dim(v) || blocks[v].cols() != a.dim(v)) return false;
    return true;
}

AlgebraElement AlgebraElement::adjoint() const {
    AlgebraElement e;
    for (const Matrix& b : blocks) e.blocks.push_back(b.adjoint());
    return e;
}

bool AlgebraElement::is_hermitian(double tol) const {
    for (const Matrix& b : blocks)
        if (!kmslab::is_hermitian(b, tol)) return false;
    return true;
}

bool AlgebraElement::is_positive(double tol) const {
    if (!is_hermitian(1e-8)) return false;
    for (const Matrix& b : blocks) {
        const double scale = std::max(1.0, b.norm());
        if (min_eigenvalue(0.5 * (b + b.adjoint())) < -tol * scale) return false;
    }
    return true;
}

double AlgebraElement::norm() const {
    double n = 0.0;
    for (const Matrix& b : blocks) n = std::max(n, operator_norm(b));
    return n;
}

namespace {
void check_same_shape(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.num_blocks() != b.num_blocks())
        throw std::invalid_argument("AlgebraElement: block count mismatch");
    for (int v = 0; v < a.num_blocks(); ++v)
        if (a.blocks[v].rows() != b.blocks[v].rows())
            throw std::invalid_argument("AlgebraElement: block shape mismatch");
}
}  // namespace

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& rhs) {
    check_same_shape(*this, rhs);
    for (int v = 0; v < num_blocks(); ++v) blocks[v] += rhs.blocks[v];
    return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& rhs) {
    check_same_shape(*this, rhs);
    for (int v = 0; v < num_blocks(); ++v) blocks[v] -= rhs.blocks[v];
    return *this;
}

AlgebraElement& AlgebraElement::operator*=(cdouble s) {
    for (Matrix& b : blocks) b *= s;
    return *this;
}

AlgebraElement operator*(const AlgebraElement& lhs, const AlgebraElement& rhs) {
    check_same_shape(lhs, rhs);
    AlgebraElement out;
    for (int v = 0; v < lhs.num_blocks(); ++v)
        out.blocks.push_back(lhs.blocks[v] * rhs.blocks[v]);
    return out;
}

AlgebraElement matrix_unit(const BlockAlgebra& a, int v, int i, int j) {
    if (v < 0 || v >= a.num_blocks() || i < 0 || i >= a.dim(v) || j < 0 || j >= a.dim(v))
        throw std::out_of_range("matrix_unit: index out of range");
    AlgebraElement e = AlgebraElement::zero(a);
    e.blocks[v](i, j) = 1.0;
    return e;
}

AlgebraElement random_element(Rng& rng, const BlockAlgebra& a) {
    AlgebraElement e;
    for (int v = 0; v < a.num_blocks(); ++v)
        e.blocks.push_back(random_matrix(rng, a.dim(v), a.dim(v)));
    return e;
}

AlgebraElement random_hermitian_element(Rng& rng, const BlockAlgebra& a) {
    AlgebraElement e;
    for (int v = 0; v < a.num_blocks(); ++v)
        e.blocks.push_back(random_hermitian(rng, a.dim(v), -1.0, 1.0));
    return e;
}

AlgebraElement random_positive_element(Rng& rng, const BlockAlgebra& a) {
    AlgebraElement e;
    for (int v = 0; v < a.num_blocks(); ++v) e.blocks.push_back(random_psd(rng, a.dim(v)));
    return e;
}

double TraceVector::mass(const BlockAlgebra& a) const {
    double m = 0.0;
    for (int v = 0; v < a.num_blocks(); ++v) m += t[v] * a.dim(v);
    return m;
}

bool TraceVector::is_state(const BlockAlgebra& a, double tol) const {
    if (num_blocks() != a.num_blocks()) return false;
    for (int v = 0; v < num_blocks(); ++v)
        if (t[v] < -tol) return false;
    return std::abs(mass(a) - 1.0) <= tol;
}

TraceVector TraceVector::uniform_state(const BlockAlgebra& a) {
    RealVector t = RealVector::Constant(a.num_blocks(), 1.0 / a.total_dim());
    return TraceVector(t);
}

cdouble evaluate_trace(const TraceVector& tau, const AlgebraElement& a) {
    if (tau.num_blocks() != a.num_blocks())
        throw std::invalid_argument("evaluate_trace: shape mismatch");
    cdouble s = 0.0;
    for (int v = 0; v < a.num_blocks(); ++v) s += tau.t[v] * a.blocks[v].trace();
    return s;
}

CoeffDynamics CoeffDynamics::trivial(const BlockAlgebra& a) {
    CoeffDynamics d;
    for (int v = 0; v < a.num_blocks(); ++v)
        d.h.push_back(Matrix::Zero(a.dim(v), a.dim(v)));
    return d;
}

bool CoeffDynamics::is_trivial(double tol) const {
    for (const Matrix& m : h)
        if (m.norm() > tol) return false;
    return true;
}

void CoeffDynamics::validate(const BlockAlgebra& a) const {
    if (static_cast<int>(h.size()) != a.num_blocks())
        throw std::invalid_argument("CoeffDynamics: block count mismatch");
    for (int v = 0; v < a.num_blocks(); ++v) {
        if (h[v].rows() != a.dim(v) || h[v].cols() != a.dim(v))
            throw std::invalid_argument("CoeffDynamics: block shape mismatch");
        if (!kmslab::is_hermitian(h[v]))
            throw std::invalid_argument("CoeffDynamics: generator block not Hermitian");
    }
}

AlgebraElement sigma_apply(const CoeffDynamics& dyn, cdouble z, const AlgebraElement& a) {
    if (static_cast<int>(dyn.h.size()) != a.num_blocks())
        throw std::invalid_argument("sigma_apply: shape mismatch");
    AlgebraElement out;
    const cdouble iz = cdouble(0.0, 1.0) * z;
    for (int v = 0; v < a.num_blocks(); ++v) {
        if (dyn.h[v].norm() == 0.0) {
            out.blocks.push_back(a.blocks[v]);
            continue;
        }
        const Matrix fwd = hermitian_exp(dyn.h[v], iz);
        const Matrix bwd = hermitian_exp(dyn.h[v], -iz);
        out.blocks.push_back(fwd * a.blocks[v] * bwd);
    }
    return out;
}

double KmsFunctional::total_mass() const {
    double m = 0.0;
    const RealVector w = block_weights();
    for (int v = 0; v < w.size(); ++v) m += c[v] * w[v];
    return m;
}

RealVector KmsFunctional::block_weights() const {
    RealVector w(static_cast<int>(dynamics.h.size()));
    for (size_t v = 0; v < dynamics.h.size(); ++v)
        w[static_cast<int>(v)] = hermitian_exp(dynamics.h[v], -beta).trace().real();
    return w;
}

cdouble kms_functional_eval(const KmsFunctional& phi, const AlgebraElement& a) {
    if (static_cast<int>(phi.dynamics.h.size()) != a.num_blocks() ||
        phi.c.size() != a.num_blocks())
        throw std::invalid_argument("kms_functional_eval: shape mismatch");
    cdouble s = 0.0;
    for (int v = 0; v < a.num_blocks(); ++v) {
        const Matrix density = hermitian_exp(phi.dynamics.h[v], -phi.beta);
        s += phi.c[v] * (a.blocks[v] * density).trace();
    }
    return s;
}

cdouble kms_pairing(const AlgebraElement& rho, const AlgebraElement& x,
                    const AlgebraElement& y) {
    if (rho.num_blocks() != x.num_blocks() || rho.num_blocks() != y.num_blocks())
        throw std::invalid_argument("kms_pairing: shape mismatch");
    cdouble s = 0.0;
    for (int v = 0; v < rho.num_blocks(); ++v) {
        const Matrix& r = rho.blocks[v];
        const double scale = std::max(1.0, r.norm());
        if (min_eigenvalue(r) <= 1e-12 * scale)
            throw std::invalid_argument("kms_pairing: density not strictly positive");
        const Matrix half = hermitian_sqrt(r);
        s += (half * x.blocks[v] * half * y.blocks[v]).trace();
    }
    return s;
}

double verify_kms_functional(
    const std::function<cdouble(const AlgebraElement&)>& phi,
    const CoeffDynamics& dyn, double beta,
    std::span<const std::pair<AlgebraElement, AlgebraElement>> pairs) {
    double worst = 0.0;
    const cdouble ibeta(0.0, beta);
    for (const auto& [x, y] : pairs) {
        const cdouble lhs = phi(x * y);
        const cdouble rhs = phi(y * sigma_apply(dyn, ibeta, x));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double verify_kms_functional(
    const KmsFunctional& phi,
    std::span<const std::pair<AlgebraElement, AlgebraElement>> pairs) {
    return verify_kms_functional(
        [&phi](const AlgebraElement& a) { return kms_functional_eval(phi, a); },
        phi.dynamics, phi.beta, pairs);
}

}  // namespace kmslab
