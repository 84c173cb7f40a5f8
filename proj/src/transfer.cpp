#include "kmslab/transfer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kmslab/simplex.hpp"

namespace kmslab {

Generator Generator::zero(const Correspondence& x) {
    Generator g;
    g.slots.resize(x.num_blocks());
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            g.slots[w].push_back(Matrix::Zero(x.mult(w, v), x.mult(w, v)));
    return g;
}

void Generator::validate(const Correspondence& x) const {
    if (static_cast<int>(slots.size()) != x.num_blocks())
        throw std::invalid_argument("Generator: slot rows mismatch");
    for (int w = 0; w < x.num_blocks(); ++w) {
        if (static_cast<int>(slots[w].size()) != x.num_blocks())
            throw std::invalid_argument("Generator: slot columns mismatch");
        for (int v = 0; v < x.num_blocks(); ++v) {
            const Matrix& m = slots[w][v];
            if (m.rows() != x.mult(w, v) || m.cols() != x.mult(w, v))
                throw std::invalid_argument("Generator: slot size mismatch");
            if (m.rows() > 0 && !is_hermitian(m))
                throw std::invalid_argument("Generator: slot not Hermitian");
        }
    }
}

bool Generator::positive_energy(const Correspondence& x, double margin) const {
    return min_energy(x) > margin;
}

double Generator::min_energy(const Correspondence& x) const {
    double lo = std::numeric_limits<double>::infinity();
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0) lo = std::min(lo, min_eigenvalue(slots[w][v]));
    return lo;
}

BimoduleOperator Generator::as_bimodule_operator(const Correspondence& x) const {
    BimoduleOperator out = BimoduleOperator::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0) out.slot(w, v) = slots[w][v];
    return out;
}

BimoduleOperator heat_kernel(const Correspondence& x, const Generator& d, double beta) {
    BimoduleOperator out = BimoduleOperator::zero(x);
    const bool infinite = std::isinf(beta);
    if (infinite) {
        if (beta < 0.0)
            throw std::invalid_argument("heat_kernel: beta = -infinity not supported");
        if (!d.positive_energy(x))
            throw std::invalid_argument(
                "heat_kernel: beta = +infinity requires positive energy");
        return out;  // e^{-infinity D} = 0 by convention
    }
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0) out.slot(w, v) = hermitian_exp(d.slot(w, v), -beta);
    return out;
}

BimoduleOperator unitary_group(const Correspondence& x, const Generator& d, cdouble z) {
    BimoduleOperator out = BimoduleOperator::zero(x);
    const cdouble iz = cdouble(0.0, 1.0) * z;
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0) out.slot(w, v) = hermitian_exp(d.slot(w, v), iz);
    return out;
}

TransferMatrix transfer_matrix(const Correspondence& x, const Generator& d, double beta) {
    d.validate(x);
    TransferMatrix out;
    out.beta = beta;
    out.z = RealMatrix::Zero(x.num_blocks(), x.num_blocks());
    if (std::isinf(beta)) return out;
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0)
                out.z(w, v) = hermitian_exp(d.slot(w, v), -beta).trace().real();
    return out;
}

TraceVector apply_F(const TraceVector& tau, const TransferMatrix& zm) {
    if (tau.t.size() != zm.z.rows())
        throw std::invalid_argument("apply_F: shape mismatch");
    return TraceVector(zm.z.transpose() * tau.t);
}

namespace {

// Strongly connected components (Kosaraju) of the positivity pattern.
std::vector<std::vector<int>> scc_components(const RealMatrix& z) {
    const int n = static_cast<int>(z.rows());
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (z(i, j) > 0.0) {
                fwd[i].push_back(j);
                bwd[j].push_back(i);
            }
    std::vector<int> order;
    std::vector<bool> seen(n, false);
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        // Iterative post-order DFS.
        std::vector<std::pair<int, size_t>> stack{{s, 0}};
        seen[s] = true;
        while (!stack.empty()) {
            auto& [u, idx] = stack.back();
            if (idx < fwd[u].size()) {
                const int nxt = fwd[u][idx++];
                if (!seen[nxt]) {
                    seen[nxt] = true;
                    stack.push_back({nxt, 0});
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<std::vector<int>> comps;
    std::vector<bool> assigned(n, false);
    for (int idx = n - 1; idx >= 0; --idx) {
        const int s = order[idx];
        if (assigned[s]) continue;
        std::vector<int> comp, stack{s};
        assigned[s] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (int nxt : bwd[u])
                if (!assigned[nxt]) {
                    assigned[nxt] = true;
                    stack.push_back(nxt);
                }
        }
        comps.push_back(std::move(comp));
    }
    return comps;
}

struct PowerResult {
    double lower, upper;
    RealVector vec;
};

// Certified power iteration on (M + I) for irreducible nonnegative M;
// the shift makes the block primitive so the Collatz-Wielandt bounds close.
PowerResult power_radius(const RealMatrix& m, int max_iter = 100000,
                         double rel_gap = 1e-13) {
    const int n = static_cast<int>(m.rows());
    RealVector x = RealVector::Constant(n, 1.0 / n);
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        RealVector y = m * x + x;
        double lo_it = std::numeric_limits<double>::infinity(), hi_it = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ratio = y[i] / x[i];
            lo_it = std::min(lo_it, ratio);
            hi_it = std::max(hi_it, ratio);
        }
        lo = std::max(lo, lo_it - 1.0);
        hi = std::min(hi, hi_it - 1.0);
        x = y / y.sum();
        if (hi - lo <= rel_gap * std::max(1.0, std::abs(hi))) break;
    }
    return PowerResult{std::max(0.0, lo), std::max(0.0, hi), x};
}

// Nonnegative kernel direction of B = Z^T - r via the spectral
// decomposition of B^T B and a cone-feasibility LP over the null space.
std::optional<RealVector> nonneg_kernel_vector(const RealMatrix& zt, double r,
                                               const RealVector& norm_weights) {
    const int n = static_cast<int>(zt.rows());
    const RealMatrix b = zt - r * RealMatrix::Identity(n, n);
    const Matrix gram = (b.transpose() * b).cast<cdouble>();
    const HermEig eig = hermitian_eig(gram);
    const double scale = std::max(1.0, b.norm());
    const double eps = 1e-7 * scale;
    std::vector<int> null_cols;
    for (int kcol = 0; kcol < n; ++kcol)
        if (eig.values[kcol] <= eps * eps) null_cols.push_back(kcol);
    if (null_cols.empty()) return std::nullopt;
    const int kdim = static_cast<int>(null_cols.size());
    RealMatrix kernel(n, kdim);
    for (int j = 0; j < kdim; ++j) {
        // Columns of a real symmetric eigenproblem, up to a complex phase.
        const auto col = eig.vectors.col(null_cols[j]);
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(col[i]) > std::abs(col[imax])) imax = i;
        const cdouble ph =
            std::abs(col[imax]) > 0.0 ? col[imax] / std::abs(col[imax]) : cdouble(1.0);
        for (int i = 0; i < n; ++i) kernel(i, j) = (col[i] / ph).real();
    }

    // Feasibility: t = K(y+ - y-), t >= 0, <norm_weights, t> = 1.
    const int nvar = 2 * kdim + n;
    RealMatrix a = RealMatrix::Zero(n + 1, nvar);
    RealVector rhs = RealVector::Zero(n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < kdim; ++j) {
            a(i, j) = kernel(i, j);
            a(i, kdim + j) = -kernel(i, j);
        }
        a(i, 2 * kdim + i) = -1.0;
    }
    for (int i = 0; i < n; ++i) a(n, 2 * kdim + i) = norm_weights[i];
    rhs[n] = 1.0;
    const RealVector cost = RealVector::Zero(nvar);
    const LpSolution sol = simplex_solve(cost, a, rhs);
    if (!sol.feasible) return std::nullopt;
    RealVector t = sol.x.segment(2 * kdim, n);
    for (int i = 0; i < n; ++i) t[i] = std::max(0.0, t[i]);
    return t;
}

}  // namespace

SpectralResult spectral_radius(const RealMatrix& z) {
    if (z.rows() != z.cols())
        throw std::invalid_argument("spectral_radius: matrix must be square");
    const int n = static_cast<int>(z.rows());
    if (z.minCoeff() < 0.0)
        throw std::invalid_argument("spectral_radius: matrix must be entrywise >= 0");

    SpectralResult out;
    const auto comps = scc_components(z);
    for (const auto& comp : comps) {
        if (comp.size() == 1 && z(comp[0], comp[0]) == 0.0) continue;  // trivial class
        RealMatrix sub(comp.size(), comp.size());
        for (size_t i = 0; i < comp.size(); ++i)
            for (size_t j = 0; j < comp.size(); ++j) sub(i, j) = z(comp[i], comp[j]);
        const PowerResult pr = power_radius(sub);
        const double mid = 0.5 * (pr.lower + pr.upper);
        if (mid > out.radius) {
            out.radius = mid;
            out.lower = pr.lower;
            out.upper = pr.upper;
        }
    }

    if (out.radius <= 0.0) {
        out.radius = out.lower = out.upper = 0.0;
        return out;  // nilpotent: no eigenvector reported
    }

    if (comps.size() == 1 && static_cast<int>(comps[0].size()) == n) {
        const PowerResult pr = power_radius(z.transpose());
        RealVector v = pr.vec / pr.vec.lpNorm<1>();
        out.left_perron = v;
        return out;
    }
    const RealVector ones = RealVector::Ones(n);
    auto t = nonneg_kernel_vector(z.transpose(), out.radius, ones);
    if (t) {
        // Polish within the cone: components away from the radius decay
        // under (Z^T + I)/(r + 1).
        RealVector v = *t;
        const RealMatrix it = (z.transpose() + RealMatrix::Identity(n, n)) / (out.radius + 1.0);
        RealVector best = v;
        double best_res = (z.transpose() * v - out.radius * v).lpNorm<Eigen::Infinity>();
        for (int k = 0; k < 2000 && best_res > 1e-13; ++k) {
            v = it * v;
            const double s = v.lpNorm<1>();
            if (s <= 0.0) break;
            v /= s;
            const double res = (z.transpose() * v - out.radius * v).lpNorm<Eigen::Infinity>();
            if (res < best_res) {
                best_res = res;
                best = v;
            }
        }
        if (best_res <= 1e-7 * std::max(1.0, out.radius)) {
            best /= best.lpNorm<1>();
            out.left_perron = best;
        }
    }
    return out;
}

std::optional<double> critical_beta(const Correspondence& x, const Generator& d,
                                    double tol) {
    d.validate(x);
    if (!d.positive_energy(x))
        throw std::invalid_argument("critical_beta: positive energy condition violated");
    const auto radius_at = [&](double beta) {
        return spectral_radius(transfer_matrix(x, d, beta).z).radius;
    };
    const double r0 = radius_at(0.0);
    if (r0 < 1.0) return std::nullopt;

    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (radius_at(hi) >= 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) return std::nullopt;
    }
    // r is continuous and strictly decreasing while positive, so plain
    // bisection converges.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (radius_at(mid) >= 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
    }
    const double beta_c = 0.5 * (lo + hi);
    if (std::abs(radius_at(beta_c) - 1.0) > std::max(tol, 1e-7)) return std::nullopt;
    return beta_c;
}

namespace {
RealVector default_weights(const BlockAlgebra& a) {
    RealVector w(a.num_blocks());
    for (int v = 0; v < a.num_blocks(); ++v) w[v] = a.dim(v);
    return w;
}
}  // namespace

std::optional<TraceVector> subinvariant_solver(const TransferMatrix& zm,
                                               const BlockAlgebra& a, double tol,
                                               const RealVector* norm_weights) {
    const int n = static_cast<int>(zm.z.rows());
    const RealVector nw = norm_weights ? *norm_weights : default_weights(a);

    // Variables: t (n), s+, s-, slack u (n).
    const int nvar = 2 * n + 2;
    RealMatrix mat = RealMatrix::Zero(n + 1, nvar);
    RealVector rhs = RealVector::Zero(n + 1);
    for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) mat(v, w) += zm.z(w, v);
        mat(v, v) -= 1.0;
        mat(v, n) = -1.0;
        mat(v, n + 1) = 1.0;
        mat(v, n + 2 + v) = 1.0;
    }
    for (int v = 0; v < n; ++v) mat(n, v) = nw[v];
    rhs[n] = 1.0;
    RealVector cost = RealVector::Zero(nvar);
    cost[n] = 1.0;
    cost[n + 1] = -1.0;

    const LpSolution sol = simplex_solve(cost, mat, rhs);
    if (!sol.feasible || !sol.bounded) return std::nullopt;
    if (sol.value > tol) return std::nullopt;
    RealVector t = sol.x.segment(0, n);
    for (int v = 0; v < n; ++v) t[v] = std::max(0.0, t[v]);
    const double mass = nw.dot(t);
    if (mass <= 0.0) return std::nullopt;
    t /= mass;
    return TraceVector(t);
}

std::optional<TraceVector> invariant_solver(const TransferMatrix& zm,
                                            const BlockAlgebra& a, double tol,
                                            const RealVector* norm_weights) {
    const int n = static_cast<int>(zm.z.rows());
    const RealVector nw = norm_weights ? *norm_weights : default_weights(a);
    auto t = nonneg_kernel_vector(zm.z.transpose(), 1.0, nw);
    if (!t) return std::nullopt;
    RealVector v = *t;
    const double mass = nw.dot(v);
    if (mass <= 0.0) return std::nullopt;
    v /= mass;

    // Polish: (Z^T + I)/2 fixes the eigenvalue-1 component and keeps the
    // cone; track the best residual.
    const RealMatrix it = 0.5 * (zm.z.transpose() + RealMatrix::Identity(n, n));
    RealVector best = v;
    double best_res = (zm.z.transpose() * v - v).lpNorm<Eigen::Infinity>();
    for (int k = 0; k < 5000 && best_res > 1e-14; ++k) {
        v = it * v;
        const double m = nw.dot(v);
        if (m <= 0.0) break;
        v /= m;
        const double res = (zm.z.transpose() * v - v).lpNorm<Eigen::Infinity>();
        if (res < best_res) {
            best_res = res;
            best = v;
        }
    }
    if (best_res > tol) return std::nullopt;
    for (int i = 0; i < n; ++i) best[i] = std::max(0.0, best[i]);
    best /= nw.dot(best);
    return TraceVector(best);
}

double subinvariance_violation(const TransferMatrix& zm, const TraceVector& tau) {
    const RealVector diff = zm.z.transpose() * tau.t - tau.t;
    return diff.maxCoeff();
}

double invariance_violation(const TransferMatrix& zm, const TraceVector& tau) {
    const RealVector diff = zm.z.transpose() * tau.t - tau.t;
    return diff.lpNorm<Eigen::Infinity>();
}

}  // namespace kmslab
