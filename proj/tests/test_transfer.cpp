#include <doctest.h>

#include "kmslab/catalog.hpp"
#include "kmslab/simplex.hpp"
#include "kmslab/transfer.hpp"

using namespace kmslab;

TEST_SUITE_BEGIN("transfer");

namespace {

RealVector rv(std::initializer_list<double> xs) {
    RealVector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Instance fibonacci() {
    ExelLacaInstance el;
    el.t = Eigen::MatrixXi(2, 2);
    el.t << 1, 1, 1, 0;
    el.n_weights = rv({std::exp(1.0), std::exp(1.0)});
    return cuntz_krieger(el);
}

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));

}  // namespace

TEST_CASE("simplex on known problems") {
    // min -x1 - 2 x2 s.t. x1 + x2 + s = 4, x1 + 3 x2 + u = 6; optimum at (3,1).
    RealMatrix a(2, 4);
    a << 1, 1, 1, 0, 1, 3, 0, 1;
    const LpSolution sol = simplex_solve(rv({-1, -2, 0, 0}), a, rv({4, 6}));
    REQUIRE(sol.feasible);
    CHECK(sol.x[0] == doctest::Approx(3.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
    CHECK(sol.value == doctest::Approx(-5.0));

    // Infeasible: x1 = -1 with x1 >= 0.
    RealMatrix b(1, 1);
    b << 1;
    CHECK_FALSE(simplex_solve(rv({0}), b, rv({-1})).feasible);
}

TEST_CASE("heat kernel") {
    const Instance c2 = cuntz(2, 1.0);
    const BimoduleOperator id = heat_kernel(c2.x, c2.d, 0.0);
    CHECK((id.slot(0, 0) - Matrix::Identity(2, 2)).norm() <= 1e-14);

    const BimoduleOperator half = heat_kernel(c2.x, c2.d, std::log(2.0));
    CHECK((half.slot(0, 0) - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-13);

    // Diagonal slot.
    const Instance inst = random_instance(5, 1, 1, 2);
    Generator d = Generator::zero(inst.x);
    const int m = inst.x.mult(0, 0);
    Matrix diag = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) diag(i, i) = i + 1.0;
    d.slot(0, 0) = diag;
    const BimoduleOperator e = heat_kernel(inst.x, d, 1.0);
    for (int i = 0; i < m; ++i)
        CHECK(std::abs(e.slot(0, 0)(i, i) - std::exp(-(i + 1.0))) <= 1e-13);

    // Contraction property under positive energy.
    const Instance pe = random_instance(17, 3, 2, 2);
    const double beta = 0.7;
    const BimoduleOperator hk = heat_kernel(pe.x, pe.d, beta);
    const double bound = std::exp(-beta * pe.d.min_energy(pe.x));
    CHECK(bound < 1.0);
    for (int w = 0; w < pe.x.num_blocks(); ++w)
        for (int v = 0; v < pe.x.num_blocks(); ++v)
            if (pe.x.mult(w, v) > 0)
                CHECK(operator_norm(hk.slot(w, v)) <= bound + 1e-12);
}

TEST_CASE("transfer matrix entries") {
    const Instance c2 = cuntz(2, 1.0);
    const TransferMatrix z = transfer_matrix(c2.x, c2.d, std::log(2.0));
    CHECK(z.z(0, 0) == doctest::Approx(1.0).epsilon(1e-13));

    const Instance fib = fibonacci();
    const double beta = 0.37;
    const TransferMatrix zf = transfer_matrix(fib.x, fib.d, beta);
    const double e = std::exp(-beta);
    CHECK(zf.z(0, 0) == doctest::Approx(e));
    CHECK(zf.z(0, 1) == doctest::Approx(e));
    CHECK(zf.z(1, 0) == doctest::Approx(e));
    CHECK(zf.z(1, 1) == 0.0);

    // beta = 0 gives the multiplicity pattern.
    const Instance inst = random_instance(23, 3, 2, 3);
    const TransferMatrix z0 = transfer_matrix(inst.x, inst.d, 0.0);
    for (int w = 0; w < inst.x.num_blocks(); ++w)
        for (int v = 0; v < inst.x.num_blocks(); ++v)
            CHECK(z0.z(w, v) == doctest::Approx(inst.x.mult(w, v)));
}

TEST_CASE("apply_F") {
    const Instance c2 = cuntz(2, 1.0);
    const TraceVector one(rv({1.0}));
    CHECK(apply_F(one, transfer_matrix(c2.x, c2.d, std::log(2.0))).t[0] ==
          doctest::Approx(1.0));
    CHECK(apply_F(one, transfer_matrix(c2.x, c2.d, std::log(3.0))).t[0] ==
          doctest::Approx(2.0 / 3.0));

    TransferMatrix zero;
    zero.z = RealMatrix::Zero(1, 1);
    CHECK(apply_F(one, zero).t[0] == 0.0);
}

TEST_CASE("apply_F agrees with the definitional induced-trace form") {
    for (uint64_t seed : {2u, 3u, 4u}) {
        const Instance inst = random_instance(seed, 3, 2, 2);
        const double beta = 0.6;
        const TransferMatrix zm = transfer_matrix(inst.x, inst.d, beta);
        const TraceVector tau = TraceVector::uniform_state(inst.x.algebra);
        const TraceVector via_z = apply_F(tau, zm);
        const BimoduleOperator hk = heat_kernel(inst.x, inst.d, beta);
        const TraceVector via_functional = induced_trace_functional(tau, hk, inst.x);
        CHECK((via_z.t - via_functional.t).lpNorm<Eigen::Infinity>() <= 1e-11);

        // And as a functional on a spanning set, through explicit operators.
        const ModuleOperator heat_op = embed(inst.x, hk);
        for (int v = 0; v < inst.x.num_blocks(); ++v)
            for (int i = 0; i < inst.x.dim(v); ++i)
                for (int j = 0; j < inst.x.dim(v); ++j) {
                    const AlgebraElement a = matrix_unit(inst.x.algebra, v, i, j);
                    const cdouble lhs = induced_trace(
                        tau, left_action_operator(inst.x, a) * heat_op);
                    const cdouble rhs = evaluate_trace(via_z, a);
                    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(rhs)));
                }
    }
}

TEST_CASE("transfer of the squared module composes") {
    for (uint64_t seed : {6u, 7u}) {
        const Instance inst = random_instance(seed, 3, 2, 2);
        const double beta = 0.45;
        const TransferMatrix zm = transfer_matrix(inst.x, inst.d, beta);
        const Correspondence xx = tensor(inst.x, inst.x);
        Generator dd;
        dd.slots = bimodule_tensor_sum(inst.x, inst.x,
                                       inst.d.as_bimodule_operator(inst.x),
                                       inst.d.as_bimodule_operator(inst.x))
                       .slots;
        const TransferMatrix zm2 = transfer_matrix(xx, dd, beta);
        CHECK((zm2.z - zm.z * zm.z).norm() <= 1e-11 * std::max(1.0, (zm.z * zm.z).norm()));

        // Applying F twice equals one application of the squared transfer.
        const TraceVector tau = TraceVector::uniform_state(inst.x.algebra);
        const TraceVector twice = apply_F(apply_F(tau, zm), zm);
        const TraceVector once = apply_F(tau, zm2);
        CHECK((twice.t - once.t).lpNorm<Eigen::Infinity>() <= 1e-11);
    }
}

TEST_CASE("spectral radius") {
    RealMatrix one(1, 1);
    one << 1.0;
    const SpectralResult r1 = spectral_radius(one);
    CHECK(r1.radius == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(r1.left_perron.has_value());
    CHECK((*r1.left_perron)[0] == doctest::Approx(1.0));

    // Fibonacci pattern at beta = 0: the golden ratio, against the
    // characteristic-polynomial root.
    RealMatrix fib(2, 2);
    fib << 1, 1, 1, 0;
    const SpectralResult rf = spectral_radius(fib);
    CHECK(rf.radius == doctest::Approx(kGolden).epsilon(1e-10));
    CHECK(rf.lower <= kGolden + 1e-12);
    CHECK(rf.upper >= kGolden - 1e-12);
    REQUIRE(rf.left_perron.has_value());
    const RealVector& v = *rf.left_perron;
    CHECK((fib.transpose() * v - kGolden * v).lpNorm<Eigen::Infinity>() <= 1e-9);

    // Strictly upper triangular: nilpotent, no eigenvector reported.
    RealMatrix nil(3, 3);
    nil << 0, 2, 1, 0, 0, 3, 0, 0, 0;
    const SpectralResult rn = spectral_radius(nil);
    CHECK(rn.radius == 0.0);
    CHECK_FALSE(rn.left_perron.has_value());

    // Reducible with distinct class radii.
    RealMatrix red = RealMatrix::Zero(3, 3);
    red(0, 0) = 0.5;
    red(1, 1) = 2.0;
    red(2, 2) = 1.0;
    red(0, 1) = 1.0;
    const SpectralResult rr = spectral_radius(red);
    CHECK(rr.radius == doctest::Approx(2.0).epsilon(1e-10));
    REQUIRE(rr.left_perron.has_value());
    CHECK((red.transpose() * *rr.left_perron - 2.0 * *rr.left_perron)
              .lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("critical beta") {
    CHECK(*critical_beta(cuntz(2, 1.0).x, cuntz(2, 1.0).d) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(*critical_beta(cuntz(3, 1.0).x, cuntz(3, 1.0).d) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(*critical_beta(cuntz(3, 2.0).x, cuntz(3, 2.0).d) ==
          doctest::Approx(std::log(3.0) / 2.0).epsilon(1e-9));
    CHECK(std::abs(*critical_beta(cuntz(1, 1.0).x, cuntz(1, 1.0).d)) <= 1e-9);

    const Instance fib = fibonacci();
    CHECK(*critical_beta(fib.x, fib.d) ==
          doctest::Approx(std::log(kGolden)).epsilon(1e-9));

    // Acyclic pattern: the radius is identically zero.
    BlockAlgebra a({1, 1});
    Eigen::MatrixXi m(2, 2);
    m << 0, 1, 0, 0;
    Correspondence x(a, m);
    Generator d = Generator::zero(x);
    d.slot(0, 1) = Matrix::Identity(1, 1);
    CHECK_FALSE(critical_beta(x, d).has_value());

    // Positive energy is required.
    const Instance id = identity_bimodule(BlockAlgebra({1}));
    CHECK_THROWS_AS(critical_beta(id.x, id.d), std::invalid_argument);
}

TEST_CASE("subinvariant solver") {
    const Instance c2 = cuntz(2, 1.0);
    const auto feas = subinvariant_solver(transfer_matrix(c2.x, c2.d, std::log(3.0)),
                                          c2.x.algebra);
    REQUIRE(feas.has_value());
    CHECK(feas->t[0] == doctest::Approx(1.0));

    CHECK_FALSE(subinvariant_solver(transfer_matrix(c2.x, c2.d, 0.5), c2.x.algebra)
                    .has_value());

    // Z = identity: every state vector is feasible; one is returned.
    const Instance id2 = identity_bimodule(BlockAlgebra({1, 2}));
    const auto any = subinvariant_solver(transfer_matrix(id2.x, id2.d, 1.3),
                                         id2.x.algebra);
    REQUIRE(any.has_value());
    CHECK(any->is_state(id2.x.algebra, 1e-9));
}

TEST_CASE("invariant solver") {
    const Instance c2 = cuntz(2, 1.0);
    const auto at_crit =
        invariant_solver(transfer_matrix(c2.x, c2.d, std::log(2.0)), c2.x.algebra);
    REQUIRE(at_crit.has_value());
    CHECK(at_crit->t[0] == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_FALSE(invariant_solver(transfer_matrix(c2.x, c2.d, std::log(3.0)),
                                 c2.x.algebra)
                    .has_value());

    const Instance fib = fibonacci();
    const auto perron = invariant_solver(
        transfer_matrix(fib.x, fib.d, std::log(kGolden)), fib.x.algebra);
    REQUIRE(perron.has_value());
    // Normalized left Perron vector of the golden-ratio pattern.
    const double expected0 = kGolden / (kGolden + 1.0);
    CHECK(perron->t[0] == doctest::Approx(expected0).epsilon(1e-8));
    CHECK(perron->t[1] == doctest::Approx(1.0 - expected0).epsilon(1e-8));
}

TEST_CASE("monotonicity in beta under positive energy") {
    const Instance inst = random_instance(31, 3, 2, 2);
    REQUIRE(inst.d.positive_energy(inst.x));
    const TransferMatrix z1 = transfer_matrix(inst.x, inst.d, 0.5);
    const TransferMatrix z2 = transfer_matrix(inst.x, inst.d, 1.0);
    for (int w = 0; w < inst.x.num_blocks(); ++w)
        for (int v = 0; v < inst.x.num_blocks(); ++v)
            CHECK(z1.z(w, v) >= z2.z(w, v) - 1e-13);

    double prev = std::numeric_limits<double>::infinity();
    for (double beta = 0.0; beta <= 2.01; beta += 0.25) {
        const double r = spectral_radius(transfer_matrix(inst.x, inst.d, beta).z).radius;
        CHECK(r <= prev + 1e-12);
        prev = r;
    }
}

TEST_CASE("cooling bound") {
    // cuntz(2,1) with beta_0 = log 2 and beta = log 2 + 0.3.
    const Instance c2 = cuntz(2, 1.0);
    const double beta0 = std::log(2.0);
    const double beta = beta0 + 0.3;
    const double c = c2.d.min_energy(c2.x);
    const TransferMatrix zb = transfer_matrix(c2.x, c2.d, beta);
    RealVector t = rv({1.0});
    const RealVector d = rv({1.0});
    const double mass0 = t.dot(d);
    RealVector cur = t;
    for (int n = 1; n <= 20; ++n) {
        cur = zb.z.transpose() * cur;
        CHECK(cur.dot(d) <= std::exp(-n * (beta - beta0) * c) * mass0 * (1.0 + 1e-12));
    }

    // Random instance: any beta_0-subinvariant trace cools at rate
    // (beta - beta_0) * min energy.
    const Instance inst = random_instance(57, 3, 2, 2);
    const auto bc = critical_beta(inst.x, inst.d);
    const double b0 = bc ? *bc : 1.0;
    const auto tau = subinvariant_solver(transfer_matrix(inst.x, inst.d, b0),
                                         inst.x.algebra);
    REQUIRE(tau.has_value());
    const double cmin = inst.d.min_energy(inst.x);
    const double b1 = b0 + 0.4;
    const TransferMatrix z1 = transfer_matrix(inst.x, inst.d, b1);
    RealVector dims(inst.x.num_blocks());
    for (int v = 0; v < inst.x.num_blocks(); ++v) dims[v] = inst.x.dim(v);
    RealVector it = tau->t;
    const double m0 = it.dot(dims);
    for (int n = 1; n <= 20; ++n) {
        it = z1.z.transpose() * it;
        CHECK(it.dot(dims) <=
              std::exp(-n * (b1 - b0) * cmin) * m0 * (1.0 + 1e-10));
    }
}

TEST_SUITE_END();
