#include <doctest.h>

#include <cmath>

#include "fswc/asymptotics.hpp"
#include "fswc/parallel.hpp"

using namespace fswc;

namespace {
Potential near_constant(int d) { return Potential::gaussian(d, 1.0, 1e6); }

EigenCurve synthetic_curve(const std::vector<Real>& lambdas, Real a,
                           bool with_correction = false) {
    EigenCurve c;
    c.j = 1;
    for (Real lam : lambdas) {
        CurveSample s;
        s.lambda = lam;
        Real expo = with_correction ? (1.0 + lam) / (lam * a) : 1.0 / (lam * a);
        s.e = std::exp(-expo);
        c.samples.push_back(s);
        c.sample_errors.push_back("");
    }
    return c;
}
}  // namespace

TEST_CASE("multiplier case: e = lambda - min T") {
    BoxGrid grid = BoxGrid::make(2, 8.0, 16);
    KineticSymbol sym = KineticSymbol::bcs(2);
    Real tmin = 1e9;
    for (int a = 0; a < grid.N; ++a)
        for (int b = 0; b < grid.N; ++b)
            tmin = std::min(tmin, std::abs(sqr(grid.freq(a)) + sqr(grid.freq(b)) - 1.0));
    Real lambda = 0.09;  // e = lambda - tmin must fall inside the bracket
    SolveOptions opts;
    opts.e_start = 0.08;
    CurveSample s = solve_e_for_lambda(near_constant(2), sym, grid, lambda, 1, opts);
    CHECK(s.e == doctest::Approx(lambda - tmin).epsilon(1e-6));
    CHECK(s.residual <= 1e-8);
}

TEST_CASE("solve monotonicity in lambda and error contracts") {
    BoxGrid grid = BoxGrid::make(2, BoxGrid::side_avoiding_fermi_lattice(2, 13.0), 64);
    KineticSymbol sym = KineticSymbol::bcs(2);
    Potential V = Potential::gaussian(2);
    CurveSample s1 = solve_e_for_lambda(V, sym, grid, 0.30, 1);
    CurveSample s2 = solve_e_for_lambda(V, sym, grid, 0.25, 1);
    CHECK(s2.e < s1.e);
    CHECK(s1.residual <= 1e-8);
    CHECK(s2.residual <= 1e-8);
    // tiny lambda: the branch saturates on this grid -> ResolutionExceeded
    CHECK_THROWS_AS(solve_e_for_lambda(V, sym, grid, 0.02, 1), ResolutionExceeded);
}

TEST_CASE("sweep: singleton reduction and thread-count independence") {
    BoxGrid grid = BoxGrid::make(2, BoxGrid::side_avoiding_fermi_lattice(2, 11.0), 64);
    KineticSymbol sym = KineticSymbol::bcs(2);
    Potential V = Potential::gaussian(2);
    CurveSample single = solve_e_for_lambda(V, sym, grid, 0.28, 1);

    set_worker_count(1);
    EigenCurve c1 = sweep(V, sym, grid, {0.30, 0.28}, 1);
    set_worker_count(3);
    EigenCurve c3 = sweep(V, sym, grid, {0.30, 0.28}, 1);
    set_worker_count(1);
    CHECK(c1.samples[1].e == single.e);  // bitwise: same deterministic path
    CHECK(c1.samples[0].e == c3.samples[0].e);
    CHECK(c1.samples[1].e == c3.samples[1].e);

    CHECK_THROWS_AS(sweep(V, sym, grid, {0.2, 0.3}, 1), ConfigError);  // not decreasing
}

TEST_CASE("first order fit on synthetic curves") {
    Real a = 1.3;
    std::vector<Real> lambdas = {0.3, 0.25, 0.2, 0.15};
    // exact law: all residuals vanish, fitted slope recovers a
    AsymptoticsReport r = first_order_fit(synthetic_curve(lambdas, a), a);
    for (Real v : r.r1) CHECK(std::abs(v) < 1e-12);
    CHECK(r.fitted_a == doctest::Approx(a).epsilon(1e-10));
    // (1+lambda) correction: r1(lambda) = lambda exactly
    AsymptoticsReport rc = first_order_fit(synthetic_curve(lambdas, a, true), a);
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        CHECK(rc.r1[i] == doctest::Approx(lambdas[i]).epsilon(1e-10));
}

TEST_CASE("second order residual on synthetic data") {
    Real a = 1.1;
    std::vector<Real> lambdas = {0.25, 0.2, 0.16};
    EigenCurve c = synthetic_curve(lambdas, a);
    std::vector<Real> b(lambdas.size(), -a);
    AsymptoticsReport rep = second_order_residual(c, a, b);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        Real e = c.samples[i].e;
        CHECK(rep.s[i] == doctest::Approx(std::log1p(e)).epsilon(1e-10));
        CHECK(rep.r2[i] == doctest::Approx(std::abs(rep.s[i]) * lambdas[i]).epsilon(1e-12));
    }
    std::vector<Real> bad(lambdas.size(), +a);
    CHECK_THROWS_AS(second_order_residual(c, a, bad), BranchMismatch);
}

TEST_CASE("second-order b samples: branch values behave like -a + O(lambda)") {
    KineticSymbol sym = KineticSymbol::bcs(2);
    Potential V = Potential::gaussian(2);
    SphereQuadrature quad = build_sphere_quadrature(2, 24);
    ShellFamily shells = shell_grid(sym, 32, 0.0);
    BoxGrid grid = BoxGrid::make(2, 16.0, 128, &V);
    std::vector<Real> bs = second_order_b_samples(V, sym, quad, shells, grid, {1e-3, 1e-2, 0.2}, 1);
    Real a0 = 1.0220867283754902;
    CHECK(bs[0] == doctest::Approx(-a0).epsilon(1e-2));
    // consistency at first order: (|b(lambda)| - a)/lambda approaches the W expectation
    Real w1 = (std::abs(bs[0]) - a0) / 1e-3;
    Real w2 = (std::abs(bs[1]) - a0) / 1e-2;
    CHECK(w1 == doctest::Approx(w2).epsilon(0.05));
}

TEST_CASE("riesz counting: diagonal example and random matrices") {
    OperatorMatrix D;
    D.a = Eigen::MatrixXcd::Zero(3, 3);
    D.a(0, 0) = 0.3;
    D.a(1, 1) = 0.9;
    D.a(2, 2) = 2.0;
    D.symmetry = OperatorMatrix::Symmetry::hermitian;
    auto family = [&](Real) { return D; };
    std::vector<int> ranks = riesz_count(family, Complex(0.6, 0.0), 0.5, {0.0, 0.5, 1.0});
    for (int r : ranks) CHECK(r == 2);

    // random hermitian and general matrices, exact counts
    SplitMix64 rng(11);
    for (int t = 0; t < 30; ++t) {
        int n = 4 + static_cast<int>(rng.next() % 27);
        bool herm = t % 2 == 0;
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                A(i, j) = Complex(rng.symmetric(), herm ? 0.0 : rng.symmetric());
        if (herm) A = 0.5 * (A + A.adjoint());
        OperatorMatrix M;
        M.a = A;
        M.symmetry = herm ? OperatorMatrix::Symmetry::hermitian : OperatorMatrix::Symmetry::general;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
        Complex center(rng.symmetric(), rng.symmetric());
        Real radius = 0.5 + rng.uniform();
        int count = 0;
        Real min_dist = 1e9;
        for (int i = 0; i < n; ++i) {
            Real dd = std::abs(es.eigenvalues()(i) - center);
            min_dist = std::min(min_dist, std::abs(dd - radius));
            if (dd < radius) ++count;
        }
        if (min_dist < 0.02) continue;
        std::vector<int> rr = riesz_count([&](Real) { return M; }, center, radius, {0.0});
        CHECK(rr[0] == count);
    }

    // guard: an eigenvalue sitting on the contour trips ContourTooClose
    CHECK_THROWS_AS(riesz_count(family, Complex(0.9 + 0.5, 0.0), 0.5, {0.0}), ContourTooClose);
}
