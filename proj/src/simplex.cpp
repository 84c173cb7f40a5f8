#include "kmslab/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kmslab {

namespace {

struct Tableau {
    // rows 0..m-1: constraints; columns 0..n-1: variables, column n: rhs.
    RealMatrix t;
    std::vector<int> basis;
    RealVector cost;  // reduced-cost row, entry n = -objective value
    int m, n;

    // Bland: entering = lowest index with negative reduced cost,
    // leaving = lowest basis index among minimal ratios.
    // Returns 0 on optimal, 1 after a pivot, -1 when unbounded.
    int step(double tol, const std::vector<bool>& allowed) {
        int enter = -1;
        for (int j = 0; j < n; ++j)
            if (allowed[j] && cost[j] < -tol) {
                enter = j;
                break;
            }
        if (enter < 0) return 0;
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (t(i, enter) > tol) {
                const double ratio = t(i, n) / t(i, enter);
                if (ratio < best - 1e-12 ||
                    (std::abs(ratio - best) <= 1e-12 &&
                     (leave < 0 || basis[i] < basis[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return -1;
        pivot(leave, enter);
        return 1;
    }

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        const double cf = cost[col];
        if (cf != 0.0) cost -= cf * t.row(row).transpose();
        basis[row] = col;
    }
};

}  // namespace

LpSolution simplex_solve(const RealVector& c, const RealMatrix& a, const RealVector& b,
                         double tol) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (c.size() != n || b.size() != m)
        throw std::invalid_argument("simplex_solve: inconsistent shapes");

    Tableau tab;
    tab.m = m;
    tab.n = n + m;  // original variables + artificials
    tab.t = RealMatrix::Zero(m, tab.n + 1);
    tab.t.block(0, 0, m, n) = a;
    tab.t.col(tab.n) = b;
    for (int i = 0; i < m; ++i)
        if (tab.t(i, tab.n) < 0.0) tab.t.row(i) *= -1.0;
    for (int i = 0; i < m; ++i) {
        tab.t(i, n + i) = 1.0;
        tab.basis.push_back(n + i);
    }

    // Phase 1: minimize the sum of artificials (basic columns must end up
    // with zero reduced cost).
    tab.cost = RealVector::Zero(tab.n + 1);
    for (int j = n; j < tab.n; ++j) tab.cost[j] = 1.0;
    for (int i = 0; i < m; ++i) tab.cost -= tab.t.row(i).transpose();
    std::vector<bool> allowed(tab.n, true);
    for (int iter = 0; iter < 100000; ++iter) {
        const int s = tab.step(1e-11, allowed);
        if (s == 0) break;
        if (s == -1) throw std::runtime_error("simplex_solve: phase-1 unbounded");
    }
    const double phase1 = -tab.cost[tab.n];
    LpSolution out;
    if (phase1 > tol) {
        out.feasible = false;
        return out;
    }

    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.t(i, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col >= 0) tab.pivot(i, col);
        // Otherwise the row is redundant; the artificial stays basic at
        // level zero and never re-enters because its column is barred.
    }

    // Phase 2 over the original columns only.
    for (int j = n; j < tab.n; ++j) allowed[j] = false;
    tab.cost = RealVector::Zero(tab.n + 1);
    tab.cost.segment(0, n) = c;
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n) {
            const double cb = c[tab.basis[i]];
            if (cb != 0.0) tab.cost -= cb * tab.t.row(i).transpose();
        }
    }
    for (int iter = 0; iter < 100000; ++iter) {
        const int s = tab.step(1e-11, allowed);
        if (s == 0) break;
        if (s == -1) {
            out.feasible = true;
            out.bounded = false;
            return out;
        }
    }

    out.feasible = true;
    out.x = RealVector::Zero(n);
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n) out.x[tab.basis[i]] = tab.t(i, tab.n);
    out.value = c.dot(out.x);
    return out;
}

}  // namespace kmslab
