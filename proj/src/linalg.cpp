#include "kmslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kmslab {

bool is_hermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.norm());
    return (a - a.adjoint()).norm() <= tol * scale;
}

namespace {

// One complex Jacobi rotation zeroing a(p,q), applied in place to a and
// accumulated into v.
void jacobi_rotate(Matrix& a, Matrix& v, int p, int q) {
    const cdouble apq = a(p, q);
    const double absd = std::abs(apq);
    if (absd == 0.0) return;
    const cdouble phase = apq / absd;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    // Zeroing a(p,q) needs t^2 - 2 tau t - 1 = 0; take the smaller root.
    const double tau = (aqq - app) / (2.0 * absd);
    const double sgn = tau >= 0.0 ? 1.0 : -1.0;
    const double t = -sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const int n = static_cast<int>(a.rows());
    // Columns: A <- A U with U = [[c, -s*phase],[s*conj(phase), c]] on (p,q).
    for (int i = 0; i < n; ++i) {
        const cdouble aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip + s * std::conj(phase) * aiq;
        a(i, q) = -s * phase * aip + c * aiq;
    }
    // Rows: A <- U* A.
    for (int j = 0; j < n; ++j) {
        const cdouble apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj + s * phase * aqj;
        a(q, j) = -s * std::conj(phase) * apj + c * aqj;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = cdouble(a(p, p).real(), 0.0);
    a(q, q) = cdouble(a(q, q).real(), 0.0);
    for (int i = 0; i < n; ++i) {
        const cdouble vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip + s * std::conj(phase) * viq;
        v(i, q) = -s * phase * vip + c * viq;
    }
}

double offdiag_norm(const Matrix& a) {
    double s = 0.0;
    const int n = static_cast<int>(a.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

HermEig hermitian_eig(const Matrix& input) {
    if (input.rows() != input.cols())
        throw std::invalid_argument("hermitian_eig: matrix must be square");
    const int n = static_cast<int>(input.rows());
    Matrix a = 0.5 * (input + input.adjoint());
    Matrix v = Matrix::Identity(n, n);
    const double stop = 1e-13 * std::max(1.0, a.norm());

    for (int sweep = 0; sweep < 200; ++sweep) {
        if (offdiag_norm(a) <= stop) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q)
                if (std::abs(a(p, q)) > 0.0) jacobi_rotate(a, v, p, q);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    HermEig out;
    out.values = RealVector(n);
    out.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

Matrix hermitian_function(const Matrix& h, const std::function<cdouble(double)>& f) {
    const HermEig eig = hermitian_eig(h);
    const int n = static_cast<int>(h.rows());
    Matrix d = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = f(eig.values[k]);
    return eig.vectors * d * eig.vectors.adjoint();
}

Matrix hermitian_exp(const Matrix& h, cdouble z) {
    return hermitian_function(h, [z](double x) { return std::exp(z * x); });
}

Matrix hermitian_sqrt(const Matrix& h) {
    return hermitian_function(h, [](double x) {
        return cdouble(std::sqrt(std::max(0.0, x)), 0.0);
    });
}

double min_eigenvalue(const Matrix& h) {
    if (h.rows() == 0) return 0.0;
    return hermitian_eig(h).values.minCoeff();
}

double max_eigenvalue(const Matrix& h) {
    if (h.rows() == 0) return 0.0;
    return hermitian_eig(h).values.maxCoeff();
}

double operator_norm(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const Matrix gram = a.adjoint() * a;
    return std::sqrt(std::max(0.0, max_eigenvalue(gram)));
}

Matrix random_matrix(Rng& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.cgauss();
    return m;
}

Matrix random_unitary(Rng& rng, int n) {
    const Matrix g = random_matrix(rng, n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        const cdouble rkk = r(k, k);
        if (std::abs(rkk) > 0.0) q.col(k) *= rkk / std::abs(rkk);
    }
    return q;
}

Matrix random_hermitian(Rng& rng, int n, double lo, double hi) {
    const Matrix q = random_unitary(rng, n);
    Matrix d = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = rng.uniform(lo, hi);
    return q * d * q.adjoint();
}

Matrix random_psd(Rng& rng, int n) {
    const Matrix b = random_matrix(rng, n, n);
    return b.adjoint() * b;
}

}  // namespace kmslab
