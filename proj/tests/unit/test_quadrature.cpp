#include <doctest.h>

#include <cmath>

#include "fswc/quadrature.hpp"
#include "fswc/special.hpp"

using namespace fswc;

TEST_CASE("sphere quadrature invariants") {
    for (int d : {2, 3}) {
        SphereQuadrature q = build_sphere_quadrature(d, 16);
        Real sw = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            sw += q.weights[i];
            CHECK(q.weights[i] > 0);
            CHECK(std::abs(std::sqrt(norm2(q.nodes[i])) - 1.0) < 1e-14);
        }
        CHECK(sw == doctest::Approx(sphere_area(d)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_sphere_quadrature(4, 8), UnsupportedDimension);
    CHECK_THROWS_AS(build_sphere_quadrature(3, 2), ConfigError);
}

TEST_CASE("sphere rule integrates harmonics to zero (d=3)") {
    SphereQuadrature q = build_sphere_quadrature(3, 16);
    // int P_l(xi . u) dw = 0 for 1 <= l <= order (Funk-Hecke with Y = const)
    for (const Point& u : {Point{0, 0, 1}, Point{0.6, 0.0, 0.8}, Point{-0.36, 0.48, 0.8}}) {
        for (int l = 1; l <= 16; ++l) {
            Real acc = 0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                Real ct = 0;
                for (int k = 0; k < 3; ++k) ct += q.nodes[i][k] * u[k];
                acc += q.weights[i] * legendre_p(l, ct);
            }
            CHECK(std::abs(acc) < 1e-12);
        }
    }
    // symmetry value: int (xi . e1)^2 dw = 4 pi / 3 at order 8
    SphereQuadrature q8 = build_sphere_quadrature(3, 8);
    Real acc = 0;
    for (std::size_t i = 0; i < q8.size(); ++i) acc += q8.weights[i] * sqr(q8.nodes[i][0]);
    CHECK(acc == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
}

TEST_CASE("d=2 rule integrates trigonometric polynomials") {
    SphereQuadrature q = build_sphere_quadrature(2, 16);
    Real sw = 0, c4 = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        sw += q.weights[i];
        Real th = std::atan2(q.nodes[i][1], q.nodes[i][0]);
        c4 += q.weights[i] * std::cos(4 * th);
    }
    CHECK(sw == doctest::Approx(kTwoPi).epsilon(1e-13));
    CHECK(std::abs(c4) < 1e-13);
}

TEST_CASE("gegenbauer_rule classical examples") {
    // d=3: Gauss-Legendre, int t^2 dt = 2/3 exactly at n >= 2
    Rule1D r3 = gegenbauer_rule(3, 2);
    Real acc = 0;
    for (std::size_t i = 0; i < r3.size(); ++i) acc += r3.weights[i] * sqr(r3.nodes[i]);
    CHECK(acc == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    // d=2: Gauss-Chebyshev, int dt/sqrt(1-t^2) = pi
    Rule1D r2 = gegenbauer_rule(2, 6);
    Real sw = 0;
    for (Real w : r2.weights) sw += w;
    CHECK(sw == doctest::Approx(kPi).epsilon(1e-14));

    // d=4: int sqrt(1-t^2) dt = pi/2 at n >= 2
    Rule1D r4 = gegenbauer_rule(4, 2);
    sw = 0;
    for (Real w : r4.weights) sw += w;
    CHECK(sw == doctest::Approx(kPi / 2.0).epsilon(1e-13));
}

TEST_CASE("shell grid: radii, log integral, root accuracy") {
    KineticSymbol bcs = KineticSymbol::bcs(2, 0.5);

    // closed-form branch radii for the BCS profile at t = 0.25
    CHECK(solve_profile_radius(bcs, +0.25) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
    CHECK(solve_profile_radius(bcs, -0.25) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));

    // int_0^tau dt/(t+e) = ln(1+tau/e) to 1e-8 relative at (tau, e) = (0.5, 1e-6)
    Real e = 1e-6;
    ShellFamily fam = shell_grid(bcs, 64, e);
    Real acc = 0;
    for (std::size_t q = 0; q < fam.size(); ++q) acc += fam.t_weights[q] / (fam.t_nodes[q] + e);
    CHECK(acc == doctest::Approx(std::log1p(0.5 / e)).epsilon(1e-8));
    CHECK(fam.t_nodes.front() > 0);
    CHECK(fam.t_nodes.back() <= 0.5 + 1e-15);
    for (std::size_t q = 0; q + 1 < fam.size(); ++q) CHECK(fam.t_nodes[q] < fam.t_nodes[q + 1]);
    CHECK(fam.t_nodes.front() <= std::max(e, 1e-12) / 10.0 * 1.0001);

    // PowerShift root equation |p(r_pm)| = t to 1e-12 against a bisection oracle
    KineticSymbol ps = KineticSymbol::power_shift(2, 1.5);
    ShellFamily f2 = shell_grid(ps, 16, 1e-3);
    for (std::size_t q = 0; q < f2.size(); q += 37) {
        Real t = f2.t_nodes[q];
        CHECK(std::abs(ps.p(f2.r_plus[q]) - t) < 1e-12);
        CHECK(std::abs(ps.p(f2.r_minus[q]) + t) < 1e-12);
        // bisection oracle for the + branch
        Real lo = 1.0, hi = 2.0;
        for (int it = 0; it < 80; ++it) {
            Real mid = 0.5 * (lo + hi);
            (ps.p(mid) > t ? hi : lo) = mid;
        }
        CHECK(f2.r_plus[q] == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
    }

    // shell radii satisfy the closed form sqrt(1 pm t) for BCS
    for (std::size_t q = 0; q < fam.size(); q += 53) {
        CHECK(fam.r_plus[q] == doctest::Approx(std::sqrt(1 + fam.t_nodes[q])).epsilon(1e-13));
        CHECK(fam.r_minus[q] == doctest::Approx(std::sqrt(1 - fam.t_nodes[q])).epsilon(1e-13));
    }
}

TEST_CASE("shell grid self-convergence") {
    KineticSymbol bcs = KineticSymbol::bcs(2, 0.5);
    for (Real e : {1e-4, 1e-8}) {
        ShellFamily a = shell_grid(bcs, 32, e);
        ShellFamily b = shell_grid(bcs, 64, e);
        auto integral = [&](const ShellFamily& f) {
            Real acc = 0;
            for (std::size_t q = 0; q < f.size(); ++q)
                acc += f.t_weights[q] * std::sqrt(f.t_nodes[q]) / (f.t_nodes[q] + e);
            return acc;
        };
        CHECK(integral(a) == doctest::Approx(integral(b)).epsilon(1e-9));
    }
}
