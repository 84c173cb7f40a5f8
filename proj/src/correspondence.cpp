#include "kmslab/correspondence.hpp"

#include <cmath>
#include <stdexcept>

namespace kmslab {

Correspondence::Correspondence(BlockAlgebra a, Eigen::MatrixXi m)
    : algebra(std::move(a)), mult(std::move(m)) {
    const int nv = algebra.num_blocks();
    if (mult.rows() != nv || mult.cols() != nv)
        throw std::invalid_argument("Correspondence: mult must be V x V");
    if (mult.minCoeff() < 0)
        throw std::invalid_argument("Correspondence: multiplicities must be >= 0");
}

Correspondence Correspondence::identity(const BlockAlgebra& a) {
    const int nv = a.num_blocks();
    Eigen::MatrixXi m = Eigen::MatrixXi::Identity(nv, nv);
    return Correspondence(a, m);
}

int Correspondence::k(int w) const {
    int s = 0;
    for (int v = 0; v < num_blocks(); ++v) s += mult(w, v) * dim(v);
    return s;
}

int Correspondence::row_offset(int w, int v) const {
    int s = 0;
    for (int u = 0; u < v; ++u) s += mult(w, u) * dim(u);
    return s;
}

int Correspondence::row_index(int w, int v, int copy, int inner) const {
    return row_offset(w, v) + copy * dim(v) + inner;
}

Correspondence::RowId Correspondence::decode_row(int w, int row) const {
    int rest = row;
    for (int v = 0; v < num_blocks(); ++v) {
        const int span = mult(w, v) * dim(v);
        if (rest < span) return RowId{v, rest / dim(v), rest % dim(v)};
        rest -= span;
    }
    throw std::out_of_range("Correspondence::decode_row: row out of range");
}

bool Correspondence::is_full() const {
    for (int w = 0; w < num_blocks(); ++w)
        if (k(w) == 0) return false;
    return true;
}

int Correspondence::total_dim() const {
    int s = 0;
    for (int w = 0; w < num_blocks(); ++w) s += k(w) * dim(w);
    return s;
}

bool Correspondence::operator==(const Correspondence& other) const {
    return algebra == other.algebra && mult == other.mult;
}

Correspondence tensor(const Correspondence& x, const Correspondence& y) {
    if (!(x.algebra == y.algebra))
        throw std::invalid_argument("tensor: coefficient algebras differ");
    const int nv = x.num_blocks();
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(nv, nv);
    for (int u = 0; u < nv; ++u)
        for (int v = 0; v < nv; ++v) {
            int s = 0;
            for (int w = 0; w < nv; ++w) s += y.mult(u, w) * x.mult(w, v);
            m(u, v) = s;
        }
    return Correspondence(x.algebra, m);
}

ModuleVector ModuleVector::zero(const Correspondence& x) {
    ModuleVector out;
    for (int w = 0; w < x.num_blocks(); ++w)
        out.blocks.push_back(Matrix::Zero(x.k(w), x.dim(w)));
    return out;
}

ModuleVector ModuleVector::basis(const Correspondence& x, int w, int row, int col) {
    ModuleVector out = zero(x);
    out.blocks[w](row, col) = 1.0;
    return out;
}

double ModuleVector::norm() const {
    double s = 0.0;
    for (const Matrix& b : blocks) s += b.squaredNorm();
    return std::sqrt(s);
}

namespace {
void check_same_blocks(const ModuleVector& a, const ModuleVector& b) {
    if (a.blocks.size() != b.blocks.size())
        throw std::invalid_argument("ModuleVector: block count mismatch");
    for (size_t w = 0; w < a.blocks.size(); ++w)
        if (a.blocks[w].rows() != b.blocks[w].rows() ||
            a.blocks[w].cols() != b.blocks[w].cols())
            throw std::invalid_argument("ModuleVector: block shape mismatch");
}
}  // namespace

ModuleVector& ModuleVector::operator+=(const ModuleVector& rhs) {
    check_same_blocks(*this, rhs);
    for (size_t w = 0; w < blocks.size(); ++w) blocks[w] += rhs.blocks[w];
    return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& rhs) {
    check_same_blocks(*this, rhs);
    for (size_t w = 0; w < blocks.size(); ++w) blocks[w] -= rhs.blocks[w];
    return *this;
}

ModuleVector& ModuleVector::operator*=(cdouble s) {
    for (Matrix& b : blocks) b *= s;
    return *this;
}

AlgebraElement inner_product(const ModuleVector& xi, const ModuleVector& eta) {
    check_same_blocks(xi, eta);
    AlgebraElement out;
    for (size_t w = 0; w < xi.blocks.size(); ++w)
        out.blocks.push_back(xi.blocks[w].adjoint() * eta.blocks[w]);
    return out;
}

ModuleVector left_act(const Correspondence& x, const AlgebraElement& a,
                      const ModuleVector& xi) {
    if (a.num_blocks() != x.num_blocks() ||
        static_cast<int>(xi.blocks.size()) != x.num_blocks())
        throw std::invalid_argument("left_act: shape mismatch");
    ModuleVector out = ModuleVector::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w) {
        for (int v = 0; v < x.num_blocks(); ++v) {
            const int dv = x.dim(v);
            for (int copy = 0; copy < x.mult(w, v); ++copy) {
                const int off = x.row_index(w, v, copy, 0);
                out.blocks[w].middleRows(off, dv) =
                    a.blocks[v] * xi.blocks[w].middleRows(off, dv);
            }
        }
    }
    return out;
}

ModuleVector right_act(const ModuleVector& xi, const AlgebraElement& a) {
    if (static_cast<int>(xi.blocks.size()) != a.num_blocks())
        throw std::invalid_argument("right_act: shape mismatch");
    ModuleVector out = xi;
    for (size_t w = 0; w < out.blocks.size(); ++w) out.blocks[w] *= a.blocks[w];
    return out;
}

ModuleOperator ModuleOperator::zero(const Correspondence& x) {
    ModuleOperator out;
    for (int w = 0; w < x.num_blocks(); ++w)
        out.blocks.push_back(Matrix::Zero(x.k(w), x.k(w)));
    return out;
}

ModuleOperator ModuleOperator::identity(const Correspondence& x) {
    ModuleOperator out;
    for (int w = 0; w < x.num_blocks(); ++w)
        out.blocks.push_back(Matrix::Identity(x.k(w), x.k(w)));
    return out;
}

ModuleOperator ModuleOperator::adjoint() const {
    ModuleOperator out;
    for (const Matrix& b : blocks) out.blocks.push_back(b.adjoint());
    return out;
}

double ModuleOperator::norm() const {
    double n = 0.0;
    for (const Matrix& b : blocks) n = std::max(n, operator_norm(b));
    return n;
}

bool ModuleOperator::is_positive(double tol) const {
    for (const Matrix& b : blocks) {
        if (b.rows() == 0) continue;
        const double scale = std::max(1.0, b.norm());
        if ((b - b.adjoint()).norm() > 1e-8 * scale) return false;
        if (min_eigenvalue(0.5 * (b + b.adjoint())) < -tol * scale) return false;
    }
    return true;
}

ModuleOperator& ModuleOperator::operator+=(const ModuleOperator& rhs) {
    for (size_t w = 0; w < blocks.size(); ++w) blocks[w] += rhs.blocks[w];
    return *this;
}

ModuleOperator& ModuleOperator::operator-=(const ModuleOperator& rhs) {
    for (size_t w = 0; w < blocks.size(); ++w) blocks[w] -= rhs.blocks[w];
    return *this;
}

ModuleOperator& ModuleOperator::operator*=(cdouble s) {
    for (Matrix& b : blocks) b *= s;
    return *this;
}

ModuleOperator operator*(const ModuleOperator& lhs, const ModuleOperator& rhs) {
    if (lhs.blocks.size() != rhs.blocks.size())
        throw std::invalid_argument("ModuleOperator: block count mismatch");
    ModuleOperator out;
    for (size_t w = 0; w < lhs.blocks.size(); ++w)
        out.blocks.push_back(lhs.blocks[w] * rhs.blocks[w]);
    return out;
}

ModuleOperator theta(const ModuleVector& xi, const ModuleVector& eta) {
    check_same_blocks(xi, eta);
    ModuleOperator out;
    for (size_t w = 0; w < xi.blocks.size(); ++w)
        out.blocks.push_back(xi.blocks[w] * eta.blocks[w].adjoint());
    return out;
}

ModuleVector apply(const ModuleOperator& op, const ModuleVector& xi) {
    if (op.blocks.size() != xi.blocks.size())
        throw std::invalid_argument("apply: block count mismatch");
    ModuleVector out = xi;
    for (size_t w = 0; w < xi.blocks.size(); ++w)
        out.blocks[w] = op.blocks[w] * xi.blocks[w];
    return out;
}

ModuleOperator left_action_operator(const Correspondence& x, const AlgebraElement& a) {
    ModuleOperator out = ModuleOperator::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v) {
            const int dv = x.dim(v);
            for (int copy = 0; copy < x.mult(w, v); ++copy) {
                const int off = x.row_index(w, v, copy, 0);
                out.blocks[w].block(off, off, dv, dv) = a.blocks[v];
            }
        }
    return out;
}

cdouble induced_trace(const TraceVector& tau, const ModuleOperator& op) {
    if (tau.num_blocks() != static_cast<int>(op.blocks.size()))
        throw std::invalid_argument("induced_trace: shape mismatch");
    cdouble s = 0.0;
    for (int w = 0; w < tau.num_blocks(); ++w) s += tau.t[w] * op.blocks[w].trace();
    return s;
}

BimoduleOperator BimoduleOperator::zero(const Correspondence& x) {
    BimoduleOperator out;
    out.slots.resize(x.num_blocks());
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            out.slots[w].push_back(Matrix::Zero(x.mult(w, v), x.mult(w, v)));
    return out;
}

BimoduleOperator BimoduleOperator::identity(const Correspondence& x) {
    BimoduleOperator out;
    out.slots.resize(x.num_blocks());
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            out.slots[w].push_back(Matrix::Identity(x.mult(w, v), x.mult(w, v)));
    return out;
}

BimoduleOperator BimoduleOperator::adjoint() const {
    BimoduleOperator out;
    out.slots.resize(slots.size());
    for (size_t w = 0; w < slots.size(); ++w)
        for (const Matrix& m : slots[w]) out.slots[w].push_back(m.adjoint());
    return out;
}

bool BimoduleOperator::is_positive(double tol) const {
    for (const auto& row : slots)
        for (const Matrix& m : row) {
            if (m.rows() == 0) continue;
            const double scale = std::max(1.0, m.norm());
            if ((m - m.adjoint()).norm() > 1e-8 * scale) return false;
            if (min_eigenvalue(0.5 * (m + m.adjoint())) < -tol * scale) return false;
        }
    return true;
}

BimoduleOperator& BimoduleOperator::operator+=(const BimoduleOperator& rhs) {
    for (size_t w = 0; w < slots.size(); ++w)
        for (size_t v = 0; v < slots[w].size(); ++v) slots[w][v] += rhs.slots[w][v];
    return *this;
}

BimoduleOperator& BimoduleOperator::operator-=(const BimoduleOperator& rhs) {
    for (size_t w = 0; w < slots.size(); ++w)
        for (size_t v = 0; v < slots[w].size(); ++v) slots[w][v] -= rhs.slots[w][v];
    return *this;
}

BimoduleOperator& BimoduleOperator::operator*=(cdouble s) {
    for (auto& row : slots)
        for (Matrix& m : row) m *= s;
    return *this;
}

BimoduleOperator operator*(const BimoduleOperator& lhs, const BimoduleOperator& rhs) {
    BimoduleOperator out = lhs;
    for (size_t w = 0; w < out.slots.size(); ++w)
        for (size_t v = 0; v < out.slots[w].size(); ++v)
            out.slots[w][v] = lhs.slots[w][v] * rhs.slots[w][v];
    return out;
}

ModuleOperator embed(const Correspondence& x, const BimoduleOperator& s) {
    ModuleOperator out = ModuleOperator::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v) {
            const int m = x.mult(w, v), dv = x.dim(v);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const cdouble val = s.slot(w, v)(a, b);
                    if (val == cdouble(0.0)) continue;
                    for (int i = 0; i < dv; ++i)
                        out.blocks[w](x.row_index(w, v, a, i), x.row_index(w, v, b, i)) +=
                            val;
                }
        }
    return out;
}

std::optional<BimoduleOperator> as_bimodule(const Correspondence& x,
                                            const ModuleOperator& op, double tol) {
    BimoduleOperator out = BimoduleOperator::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v) {
            const int m = x.mult(w, v), dv = x.dim(v);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    cdouble s = 0.0;
                    for (int i = 0; i < dv; ++i)
                        s += op.blocks[w](x.row_index(w, v, a, i), x.row_index(w, v, b, i));
                    out.slot(w, v)(a, b) = s / static_cast<double>(dv);
                }
        }
    const ModuleOperator back = embed(x, out);
    double err = 0.0, scale = 1.0;
    for (int w = 0; w < x.num_blocks(); ++w) {
        err = std::max(err, (back.blocks[w] - op.blocks[w]).norm());
        scale = std::max(scale, op.blocks[w].norm());
    }
    if (err > tol * scale) return std::nullopt;
    return out;
}

TraceVector induced_trace_functional(const TraceVector& tau, const BimoduleOperator& t,
                                     const Correspondence& x) {
    if (!t.is_positive())
        throw std::invalid_argument("induced_trace_functional: operator must be >= 0");
    RealVector out = RealVector::Zero(x.num_blocks());
    for (int v = 0; v < x.num_blocks(); ++v)
        for (int w = 0; w < x.num_blocks(); ++w)
            if (x.mult(w, v) > 0) out[v] += tau.t[w] * t.slot(w, v).trace().real();
    return TraceVector(out);
}

ModuleVector elementary_tensor(const Correspondence& x, const Correspondence& y,
                               const ModuleVector& xi, const ModuleVector& eta) {
    const Correspondence xy = tensor(x, y);
    const int nv = x.num_blocks();
    ModuleVector out = ModuleVector::zero(xy);
    for (int u = 0; u < nv; ++u) {
        const int du = x.dim(u);
        for (int v = 0; v < nv; ++v) {
            const int dv = x.dim(v);
            int copy_base = 0;
            for (int w = 0; w < nv; ++w) {
                const int mx = x.mult(w, v), my = y.mult(u, w), dw = x.dim(w);
                for (int a = 0; a < mx; ++a)
                    for (int b = 0; b < my; ++b) {
                        const int copy = copy_base + a * my + b;
                        for (int i = 0; i < dv; ++i) {
                            const int row_out = xy.row_index(u, v, copy, i);
                            const int row_x = x.row_index(w, v, a, i);
                            for (int j = 0; j < du; ++j) {
                                cdouble acc = 0.0;
                                for (int l = 0; l < dw; ++l)
                                    acc += xi.blocks[w](row_x, l) *
                                           eta.blocks[u](y.row_index(u, w, b, l), j);
                                out.blocks[u](row_out, j) += acc;
                            }
                        }
                    }
                copy_base += mx * my;
            }
        }
    }
    return out;
}

ModuleOperator tensor_operator(const Correspondence& x, const Correspondence& y,
                               const ModuleOperator& s, const BimoduleOperator& t) {
    const Correspondence xy = tensor(x, y);
    const int nv = x.num_blocks();
    ModuleOperator out = ModuleOperator::zero(xy);
    for (int u = 0; u < nv; ++u) {
        for (int v = 0; v < nv; ++v) {
            const int dv = x.dim(v);
            for (int v2 = 0; v2 < nv; ++v2) {
                const int dv2 = x.dim(v2);
                int base_l = 0;
                for (int w = 0; w < nv; ++w) {
                    const int mxl = x.mult(w, v), myl = y.mult(u, w);
                    // Column-side copy base for the same intermediate block w.
                    int base_r = 0;
                    for (int w2 = 0; w2 < w; ++w2)
                        base_r += x.mult(w2, v2) * y.mult(u, w2);
                    const int mxr = x.mult(w, v2), myr = y.mult(u, w);
                    for (int a = 0; a < mxl; ++a)
                        for (int b = 0; b < myl; ++b)
                            for (int a2 = 0; a2 < mxr; ++a2)
                                for (int b2 = 0; b2 < myr; ++b2) {
                                    const cdouble tv = t.slot(u, w)(b, b2);
                                    if (tv == cdouble(0.0)) continue;
                                    const int cl = base_l + a * myl + b;
                                    const int cr = base_r + a2 * myr + b2;
                                    for (int i = 0; i < dv; ++i)
                                        for (int i2 = 0; i2 < dv2; ++i2) {
                                            const cdouble sv = s.blocks[w](
                                                x.row_index(w, v, a, i),
                                                x.row_index(w, v2, a2, i2));
                                            if (sv == cdouble(0.0)) continue;
                                            out.blocks[u](xy.row_index(u, v, cl, i),
                                                          xy.row_index(u, v2, cr, i2)) +=
                                                sv * tv;
                                        }
                                }
                    base_l += mxl * myl;
                }
            }
        }
    }
    return out;
}

namespace {

// Shared loop for the two slotwise tensor combinations.
template <typename EntryFn>
BimoduleOperator bimodule_combine(const Correspondence& x, const Correspondence& y,
                                  EntryFn entry) {
    const Correspondence xy = tensor(x, y);
    const int nv = x.num_blocks();
    BimoduleOperator out = BimoduleOperator::zero(xy);
    for (int u = 0; u < nv; ++u)
        for (int v = 0; v < nv; ++v) {
            int base = 0;
            for (int w = 0; w < nv; ++w) {
                const int mx = x.mult(w, v), my = y.mult(u, w);
                for (int a = 0; a < mx; ++a)
                    for (int b = 0; b < my; ++b)
                        for (int a2 = 0; a2 < mx; ++a2)
                            for (int b2 = 0; b2 < my; ++b2)
                                out.slot(u, v)(base + a * my + b, base + a2 * my + b2) =
                                    entry(w, v, u, a, a2, b, b2);
                base += mx * my;
            }
        }
    return out;
}

}  // namespace

BimoduleOperator bimodule_tensor(const Correspondence& x, const Correspondence& y,
                                 const BimoduleOperator& s, const BimoduleOperator& t) {
    return bimodule_combine(x, y, [&](int w, int v, int u, int a, int a2, int b, int b2) {
        return s.slot(w, v)(a, a2) * t.slot(u, w)(b, b2);
    });
}

BimoduleOperator bimodule_tensor_sum(const Correspondence& x, const Correspondence& y,
                                     const BimoduleOperator& s, const BimoduleOperator& t) {
    return bimodule_combine(x, y, [&](int w, int v, int u, int a, int a2, int b, int b2) {
        cdouble val = 0.0;
        if (b == b2) val += s.slot(w, v)(a, a2);
        if (a == a2) val += t.slot(u, w)(b, b2);
        return val;
    });
}

std::vector<ModuleVector> canonical_frame(const Correspondence& x) {
    std::vector<ModuleVector> frame;
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int p = 0; p < x.k(w); ++p) frame.push_back(ModuleVector::basis(x, w, p, 0));
    return frame;
}

std::vector<ModuleVector> canonical_basis(const Correspondence& x) {
    std::vector<ModuleVector> basis;
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int p = 0; p < x.k(w); ++p)
            for (int j = 0; j < x.dim(w); ++j)
                basis.push_back(ModuleVector::basis(x, w, p, j));
    return basis;
}

ModuleVector random_module_vector(Rng& rng, const Correspondence& x) {
    ModuleVector out;
    for (int w = 0; w < x.num_blocks(); ++w)
        out.blocks.push_back(random_matrix(rng, x.k(w), x.dim(w)));
    return out;
}

ModuleOperator random_module_operator(Rng& rng, const Correspondence& x) {
    ModuleOperator out;
    for (int w = 0; w < x.num_blocks(); ++w)
        out.blocks.push_back(random_matrix(rng, x.k(w), x.k(w)));
    return out;
}

ModuleOperator random_positive_module_operator(Rng& rng, const Correspondence& x) {
    ModuleOperator out;
    for (int w = 0; w < x.num_blocks(); ++w) out.blocks.push_back(random_psd(rng, x.k(w)));
    return out;
}

BimoduleOperator random_positive_bimodule_operator(Rng& rng, const Correspondence& x) {
    BimoduleOperator out = BimoduleOperator::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0) out.slot(w, v) = random_psd(rng, x.mult(w, v));
    return out;
}

}  // namespace kmslab
