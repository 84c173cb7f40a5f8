#include "kmslab/catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace kmslab {

Instance cuntz(int n, double lambda) {
    if (n < 1) throw std::invalid_argument("cuntz: n must be >= 1");
    if (lambda <= 0.0) throw std::invalid_argument("cuntz: lambda must be > 0");
    BlockAlgebra a({1});
    Eigen::MatrixXi m(1, 1);
    m(0, 0) = n;
    Correspondence x(a, m);
    Generator d = Generator::zero(x);
    d.slot(0, 0) = lambda * Matrix::Identity(n, n);
    return Instance{x, d, std::nullopt};
}

void ExelLacaInstance::validate() const {
    const int n = size();
    if (n < 1 || t.cols() != n)
        throw std::invalid_argument("ExelLacaInstance: matrix must be square");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (t(i, j) != 0 && t(i, j) != 1)
                throw std::invalid_argument("ExelLacaInstance: entries must be 0 or 1");
    for (int i = 0; i < n; ++i) {
        if (t.row(i).sum() == 0)
            throw std::invalid_argument("ExelLacaInstance: zero row " + std::to_string(i));
        if (t.col(i).sum() == 0)
            throw std::invalid_argument("ExelLacaInstance: zero column " +
                                        std::to_string(i));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (t.col(i) == t.col(j))
                throw std::invalid_argument(
                    "ExelLacaInstance: columns " + std::to_string(i) + " and " +
                    std::to_string(j) +
                    " coincide; the diagonal coefficient algebra would then be a "
                    "proper quotient of C^|I| and the instance is rejected");
    if (n_weights.size() != n)
        throw std::invalid_argument("ExelLacaInstance: weight count mismatch");
    for (int i = 0; i < n; ++i)
        if (n_weights[i] <= 1.0)
            throw std::invalid_argument("ExelLacaInstance: weights must be > 1");
}

Instance cuntz_krieger(const ExelLacaInstance& el) {
    el.validate();
    const int n = el.size();
    BlockAlgebra a(std::vector<int>(n, 1));
    Eigen::MatrixXi m(n, n);
    for (int w = 0; w < n; ++w)
        for (int v = 0; v < n; ++v) m(w, v) = el.t(v, w);
    Correspondence x(a, m);
    Generator d = Generator::zero(x);
    for (int w = 0; w < n; ++w)
        for (int v = 0; v < n; ++v)
            if (m(w, v) > 0) {
                d.slot(w, v) = Matrix::Zero(1, 1);
                d.slot(w, v)(0, 0) = std::log(el.n_weights[v]);
            }
    return Instance{x, d, std::nullopt};
}

namespace {

double el_indicator(const ExelLacaInstance& el, const std::vector<int>& assign, int j) {
    // assign[l]: 0 = free, 1 = in Y, 2 = in Z.
    double p = 1.0;
    for (int l = 0; l < el.size(); ++l) {
        if (assign[l] == 1) p *= el.t(l, j);
        if (assign[l] == 2) p *= 1.0 - el.t(l, j);
        if (p == 0.0) return 0.0;
    }
    return p;
}

void el_check_one(const ExelLacaInstance& el, double beta, const TraceVector& tau,
                  double tol, const std::vector<int>& assign, ElReport& report) {
    const int n = el.size();
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < n; ++j) {
        const double ind = el_indicator(el, assign, j);
        if (ind == 0.0) continue;
        double tau_qj = 0.0;
        for (int k = 0; k < n; ++k) tau_qj += el.t(j, k) * tau.t[k];
        lhs += std::pow(el.n_weights[j], -beta) * ind * tau_qj;
        // tau(q(Y,Z)) = sum_m T(Y,Z,m) t_m.
        rhs += ind * tau.t[j];
    }
    ++report.pairs_checked;
    if (lhs > rhs + tol) {
        report.all_hold = false;
        if (report.violations.size() < 64) {
            ElViolation v;
            for (int l = 0; l < n; ++l) {
                if (assign[l] == 1) v.y.push_back(l);
                if (assign[l] == 2) v.z.push_back(l);
            }
            v.lhs = lhs;
            v.rhs = rhs;
            report.violations.push_back(std::move(v));
        }
    }
}

}  // namespace

ElReport el_inequalities(const ExelLacaInstance& el, double beta, const TraceVector& tau,
                         double tol, std::optional<uint64_t> sample_seed) {
    el.validate();
    const int n = el.size();
    if (tau.num_blocks() != n)
        throw std::invalid_argument("el_inequalities: trace size mismatch");
    if (n > 12)
        throw std::invalid_argument("el_inequalities: index set larger than 12");

    ElReport report;
    if (n <= 8) {
        // All 3^n assignments of each index to Y, Z, or neither.
        std::vector<int> assign(n, 0);
        long total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        for (long code = 0; code < total; ++code) {
            long c = code;
            for (int i = 0; i < n; ++i) {
                assign[i] = static_cast<int>(c % 3);
                c /= 3;
            }
            el_check_one(el, beta, tau, tol, assign, report);
        }
        return report;
    }
    if (!sample_seed)
        throw std::invalid_argument(
            "el_inequalities: index sets above 8 require a sampling seed");
    report.sampled = true;
    Rng rng(*sample_seed);
    std::vector<int> assign(n, 0);
    for (int trial = 0; trial < 20000; ++trial) {
        for (int i = 0; i < n; ++i) assign[i] = rng.uniform_int(0, 2);
        el_check_one(el, beta, tau, tol, assign, report);
    }
    return report;
}

Instance identity_bimodule(const BlockAlgebra& a) {
    Correspondence x = Correspondence::identity(a);
    Generator d = Generator::zero(x);
    return Instance{x, d, std::nullopt};
}

Correspondence random_correspondence(Rng& rng, const BlockAlgebra& a, int mult_max) {
    const int nv = a.num_blocks();
    Eigen::MatrixXi m(nv, nv);
    for (int w = 0; w < nv; ++w) {
        for (int v = 0; v < nv; ++v) m(w, v) = rng.uniform_int(0, mult_max);
        if (m.row(w).sum() == 0) m(w, rng.uniform_int(0, nv - 1)) = 1;
    }
    return Correspondence(a, m);
}

Generator random_generator(Rng& rng, const Correspondence& x, double lo, double hi) {
    Generator d = Generator::zero(x);
    for (int w = 0; w < x.num_blocks(); ++w)
        for (int v = 0; v < x.num_blocks(); ++v)
            if (x.mult(w, v) > 0) d.slot(w, v) = random_hermitian(rng, x.mult(w, v), lo, hi);
    return d;
}

CoeffDynamics random_dynamics(Rng& rng, const BlockAlgebra& a, double spread) {
    CoeffDynamics h;
    for (int v = 0; v < a.num_blocks(); ++v)
        h.h.push_back(random_hermitian(rng, a.dim(v), -spread, spread));
    return h;
}

Instance random_instance(uint64_t seed, int v_max, int d_max, int mult_max, bool with_h) {
    if (v_max < 1 || d_max < 1 || mult_max < 1)
        throw std::invalid_argument("random_instance: bounds must be >= 1");
    Rng rng(seed);
    const int nv = rng.uniform_int(1, v_max);
    std::vector<int> dims;
    for (int v = 0; v < nv; ++v) dims.push_back(rng.uniform_int(1, d_max));
    BlockAlgebra a(dims);
    Correspondence x = random_correspondence(rng, a, mult_max);
    Generator d = random_generator(rng, x);
    Instance inst{x, d, std::nullopt};
    if (with_h) inst.h = random_dynamics(rng, a);
    return inst;
}

}  // namespace kmslab
