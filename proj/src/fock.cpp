#include "kmslab/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace kmslab {

int FockTruncation::total_k(int w) const {
    int s = 0;
    for (const Correspondence& p : power) s += p.k(w);
    return s;
}

int FockTruncation::total_dim() const {
    int s = 0;
    for (const Correspondence& p : power) s += p.total_dim();
    return s;
}

FockTruncation build_fock(const Correspondence& x, int n, int cap) {
    if (n < 0) throw std::invalid_argument("build_fock: negative level");
    FockTruncation f;
    f.base = x;
    f.levels = n;
    f.power.push_back(Correspondence::identity(x.algebra));
    for (int lvl = 1; lvl <= n; ++lvl) f.power.push_back(tensor(x, f.power.back()));
    f.levels = n;
    if (f.total_dim() > cap)
        throw std::invalid_argument("build_fock: truncation dimension " +
                                    std::to_string(f.total_dim()) + " exceeds cap " +
                                    std::to_string(cap));
    return f;
}

FockOp FockOp::zero(const FockTruncation& f) {
    FockOp op;
    op.blk.resize(f.num_blocks());
    for (int w = 0; w < f.num_blocks(); ++w) {
        op.blk[w].resize(f.levels + 1);
        for (int a = 0; a <= f.levels; ++a) op.blk[w][a].resize(f.levels + 1);
    }
    return op;
}

FockOp FockOp::identity(const FockTruncation& f) {
    FockOp op = zero(f);
    for (int w = 0; w < f.num_blocks(); ++w)
        for (int n = 0; n <= f.levels; ++n) {
            const int kn = f.k(n, w);
            if (kn > 0) op.blk[w][n][n] = Matrix::Identity(kn, kn);
        }
    return op;
}

FockOp FockOp::adjoint() const {
    FockOp out;
    out.blk.resize(blk.size());
    for (size_t w = 0; w < blk.size(); ++w) {
        const size_t levels = blk[w].size();
        out.blk[w].resize(levels);
        for (size_t a = 0; a < levels; ++a) out.blk[w][a].resize(levels);
        for (size_t a = 0; a < levels; ++a)
            for (size_t b = 0; b < levels; ++b)
                if (blk[w][b][a].size() > 0) out.blk[w][a][b] = blk[w][b][a].adjoint();
    }
    return out;
}

FockOp& FockOp::operator+=(const FockOp& rhs) {
    for (size_t w = 0; w < blk.size(); ++w)
        for (size_t a = 0; a < blk[w].size(); ++a)
            for (size_t b = 0; b < blk[w][a].size(); ++b) {
                const Matrix& m = rhs.blk[w][a][b];
                if (m.size() == 0) continue;
                if (blk[w][a][b].size() == 0)
                    blk[w][a][b] = m;
                else
                    blk[w][a][b] += m;
            }
    return *this;
}

FockOp& FockOp::operator*=(cdouble s) {
    for (auto& wb : blk)
        for (auto& row : wb)
            for (Matrix& m : row)
                if (m.size() > 0) m *= s;
    return *this;
}

FockOp fock_multiply(const FockTruncation& f, const FockOp& a, const FockOp& b) {
    FockOp out = FockOp::zero(f);
    for (int w = 0; w < f.num_blocks(); ++w)
        for (int i = 0; i <= f.levels; ++i)
            for (int m = 0; m <= f.levels; ++m) {
                const Matrix& am = a.blk[w][i][m];
                if (am.size() == 0) continue;
                for (int j = 0; j <= f.levels; ++j) {
                    const Matrix& bm = b.blk[w][m][j];
                    if (bm.size() == 0) continue;
                    if (out.blk[w][i][j].size() == 0)
                        out.blk[w][i][j] = am * bm;
                    else
                        out.blk[w][i][j] += am * bm;
                }
            }
    return out;
}

double fock_norm(const FockOp& a) {
    double s = 0.0;
    for (const auto& wb : a.blk)
        for (const auto& row : wb)
            for (const Matrix& m : row) s += m.squaredNorm();
    return std::sqrt(s);
}

FockOp creation_matrix(const FockTruncation& f, const ModuleVector& xi) {
    const Correspondence& x = f.base;
    const int nv = x.num_blocks();
    FockOp op = FockOp::zero(f);
    for (int lvl = 0; lvl < f.levels; ++lvl) {
        const Correspondence& y = f.power[lvl];
        const Correspondence& xy = f.power[lvl + 1];
        for (int u = 0; u < nv; ++u) {
            if (xy.k(u) == 0 || y.k(u) == 0) continue;
            Matrix m = Matrix::Zero(xy.k(u), y.k(u));
            for (int v = 0; v < nv; ++v) {
                const int dv = x.dim(v);
                int copy_base = 0;
                for (int w = 0; w < nv; ++w) {
                    const int mx = x.mult(w, v), my = y.mult(u, w), dw = x.dim(w);
                    for (int a = 0; a < mx; ++a)
                        for (int b = 0; b < my; ++b) {
                            const int copy = copy_base + a * my + b;
                            for (int i = 0; i < dv; ++i)
                                for (int l = 0; l < dw; ++l)
                                    m(xy.row_index(u, v, copy, i),
                                      y.row_index(u, w, b, l)) =
                                        xi.blocks[w](x.row_index(w, v, a, i), l);
                        }
                    copy_base += mx * my;
                }
            }
            op.blk[u][lvl + 1][lvl] = m;
        }
    }
    return op;
}

FockOp left_action_fock(const FockTruncation& f, const AlgebraElement& a) {
    FockOp op = FockOp::zero(f);
    for (int lvl = 0; lvl <= f.levels; ++lvl) {
        const ModuleOperator act = left_action_operator(f.power[lvl], a);
        for (int w = 0; w < f.num_blocks(); ++w)
            if (act.blocks[w].rows() > 0) op.blk[w][lvl][lvl] = act.blocks[w];
    }
    return op;
}

namespace {

FockOp gamma_from_slot(const FockTruncation& f, const BimoduleOperator& slot_op) {
    FockOp op = FockOp::zero(f);
    // Level 0: identity on A.
    for (int w = 0; w < f.num_blocks(); ++w)
        op.blk[w][0][0] = Matrix::Identity(f.base.dim(w), f.base.dim(w));
    BimoduleOperator acc = slot_op;  // tensor power on power[lvl]
    for (int lvl = 1; lvl <= f.levels; ++lvl) {
        const ModuleOperator emb = embed(f.power[lvl], acc);
        for (int w = 0; w < f.num_blocks(); ++w)
            if (emb.blocks[w].rows() > 0) op.blk[w][lvl][lvl] = emb.blocks[w];
        if (lvl < f.levels) acc = bimodule_tensor(f.base, f.power[lvl], slot_op, acc);
    }
    return op;
}

}  // namespace

FockOp gamma_density(const FockTruncation& f, const Generator& d, double beta) {
    return gamma_from_slot(f, heat_kernel(f.base, d, beta));
}

FockOp gamma_density_inverse(const FockTruncation& f, const Generator& d, double beta) {
    return gamma_from_slot(f, heat_kernel(f.base, d, -beta));
}

FockOp vacuum_projection(const FockTruncation& f) {
    FockOp op = FockOp::zero(f);
    for (int w = 0; w < f.num_blocks(); ++w)
        op.blk[w][0][0] = Matrix::Identity(f.base.dim(w), f.base.dim(w));
    return op;
}

FockOp defect(const FockTruncation& f, const AlgebraElement& a) {
    FockOp op = FockOp::zero(f);
    for (int w = 0; w < f.num_blocks(); ++w) op.blk[w][0][0] = a.blocks[w];
    return op;
}

FockOp word_matrix(const FockTruncation& f, const MonomialWord& w) {
    FockOp acc = FockOp::identity(f);
    for (const ModuleVector& xi : w.left)
        acc = fock_multiply(f, acc, creation_matrix(f, xi));
    if (!w.right.empty()) {
        FockOp ann = FockOp::identity(f);
        for (const ModuleVector& eta : w.right)
            ann = fock_multiply(f, ann, creation_matrix(f, eta));
        acc = fock_multiply(f, acc, ann.adjoint());
    }
    return acc;
}

FockOp toeplitz_matrix(const FockTruncation& f, const ToeplitzElement& e) {
    FockOp acc = left_action_fock(f, e.scalar);
    for (const auto& [c, w] : e.words) {
        FockOp wm = word_matrix(f, w);
        wm *= c;
        acc += wm;
    }
    return acc;
}

FockState make_fock_state(const FockTruncation& f, const Generator& d, double beta,
                          const TraceVector& tau0) {
    const TransferMatrix zm = transfer_matrix(f.base, d, beta);
    const SpectralResult sp = spectral_radius(zm.z);
    if (sp.radius >= 1.0 - 1e-12)
        throw std::invalid_argument(
            "make_fock_state: spectral radius must be < 1 (finite type)");
    FockState st;
    st.tau0 = tau0;
    st.beta = beta;
    st.gamma = gamma_density(f, d, beta);
    return st;
}

cdouble fock_state_eval(const FockTruncation& f, const FockState& st, const FockOp& op) {
    const FockOp prod = fock_multiply(f, op, st.gamma);
    cdouble s = 0.0;
    for (int w = 0; w < f.num_blocks(); ++w)
        for (int n = 0; n <= f.levels; ++n) {
            const Matrix& m = prod.blk[w][n][n];
            if (m.size() > 0) s += st.tau0.t[w] * m.trace();
        }
    return s;
}

TailBound tail_bound(const TransferMatrix& zm, const TraceVector& tau0,
                     const BlockAlgebra& a, int n) {
    const int nv = static_cast<int>(zm.z.rows());
    // Right Perron direction smoothed to a strictly positive certificate.
    const SpectralResult sp = spectral_radius(zm.z);
    RealVector x = RealVector::Constant(nv, 1.0);
    {
        RealVector y = RealVector::Constant(nv, 1.0 / nv);
        for (int it = 0; it < 2000; ++it) {
            RealVector z = zm.z * y + y;
            y = z / z.sum();
        }
        x = y + RealVector::Constant(nv, 1e-9);
    }
    double r_up = 0.0;
    const RealVector zx = zm.z * x;
    for (int i = 0; i < nv; ++i) r_up = std::max(r_up, zx[i] / x[i]);
    r_up = std::max(r_up, sp.upper);
    TailBound out;
    out.r_upper = r_up;
    if (r_up >= 1.0)
        throw std::invalid_argument("tail_bound: certified radius bound is >= 1");
    double c = 0.0;
    for (int v = 0; v < nv; ++v) c = std::max(c, a.dim(v) / x[v]);
    const double mass0 = tau0.t.dot(x);
    out.bound = c * mass0 * std::pow(r_up, n + 1) / (1.0 - r_up);
    return out;
}

ToeplitzElement jx_of(const Correspondence& x, const AlgebraElement& a) {
    ToeplitzElement e = ToeplitzElement::zero(x.algebra);
    for (const ModuleVector& frame_vec : canonical_frame(x)) {
        const ModuleVector lifted = left_act(x, a, frame_vec);
        e.words.push_back({cdouble(1.0), MonomialWord{{lifted}, {frame_vec}}});
    }
    return e;
}

}  // namespace kmslab
