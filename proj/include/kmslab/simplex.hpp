#pragma once

#include "kmslab/linalg.hpp"

namespace kmslab {

struct LpSolution {
    bool feasible = false;
    bool bounded = true;
    RealVector x;
    double value = 0.0;
};

// Minimize c^T x subject to A x = b, x >= 0. Dense two-phase simplex with
// Bland's rule; intended for the <= ~200-variable problems that arise here.
LpSolution simplex_solve(const RealVector& c, const RealMatrix& a, const RealVector& b,
                         double tol = 1e-9);

}  // namespace kmslab
