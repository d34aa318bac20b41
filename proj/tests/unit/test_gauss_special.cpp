#include <doctest.h>

#include <cmath>

#include "fswc/gauss.hpp"
#include "fswc/special.hpp"

using namespace fswc;

TEST_CASE("gauss-legendre exactness and stability at large n") {
    for (int n : {4, 25, 64, 200, 400}) {
        Rule1D r = gauss_legendre(n);
        Real sw = 0, sx2 = 0, sx4 = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            sw += r.weights[i];
            sx2 += r.weights[i] * sqr(r.nodes[i]);
            sx4 += r.weights[i] * sqr(sqr(r.nodes[i]));
        }
        CHECK(std::abs(sw - 2.0) < 1e-14);
        CHECK(std::abs(sx2 - 2.0 / 3.0) < 1e-14);
        if (n >= 3) CHECK(std::abs(sx4 - 2.0 / 5.0) < 1e-14);
    }
}

TEST_CASE("gegenbauer weight rules reduce to the classical families") {
    // d=3: weight 1 (Legendre)
    Rule1D leg = gauss_gegenbauer_weight(6, 0.0);
    Real s = 0;
    for (std::size_t i = 0; i < leg.size(); ++i) s += leg.weights[i] * sqr(leg.nodes[i]);
    CHECK(std::abs(s - 2.0 / 3.0) < 1e-14);

    // d=2: weight (1-t^2)^{-1/2} (Chebyshev), total mass pi
    Rule1D ch = gauss_gegenbauer_weight(8, -0.5);
    Real sw = 0;
    for (Real w : ch.weights) sw += w;
    CHECK(std::abs(sw - kPi) < 1e-14);

    // d=4: weight (1-t^2)^{1/2}, total mass pi/2 (Beta(1/2, 3/2))
    Rule1D u = gauss_gegenbauer_weight(2, 0.5);
    Real swu = 0;
    for (Real w : u.weights) swu += w;
    CHECK(std::abs(swu - kPi / 2.0) < 1e-13);
}

TEST_CASE("bessel_j closed forms and frozen values") {
    CHECK(bessel_j(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // half-integer identity J_{1/2}(z) = sqrt(2/(pi z)) sin z
    for (Real z : {1.0, 10.0}) {
        Real expect = std::sqrt(2.0 / (kPi * z)) * std::sin(z);
        CHECK(bessel_j(0.5, z) == doctest::Approx(expect).epsilon(1e-12));
    }
    // J_{3/2}(z) = sqrt(2/(pi z)) (sin z / z - cos z)
    for (Real z : {2.5, 7.0}) {
        Real expect = std::sqrt(2.0 / (kPi * z)) * (std::sin(z) / z - std::cos(z));
        CHECK(bessel_j(1.5, z) == doctest::Approx(expect).epsilon(1e-12));
    }
    // frozen: high-order series oracle value of J_1(5)
    CHECK(bessel_j(1.0, 5.0) == doctest::Approx(-0.3275791375914652).epsilon(1e-12));

    // independent series oracle with alternating-tail bound:
    // J_1(5) = sum (-1)^m (5/2)^{2m+1} / (m! (m+1)!)
    Real acc = 0, term;
    Real z2 = 2.5;
    Real fact_m = 1, fact_m1 = 1;
    for (int m = 0; m < 40; ++m) {
        if (m > 0) {
            fact_m *= m;
            fact_m1 *= (m + 1);
        }
        term = (m % 2 == 0 ? 1.0 : -1.0) * std::pow(z2, 2 * m + 1) / (fact_m * fact_m1);
        acc += term;
    }
    CHECK(bessel_j(1.0, 5.0) == doctest::Approx(acc).epsilon(1e-13));
}

TEST_CASE("modified spherical bessel against the exponential-integral identity") {
    // i_0(z) = sinh(z)/z
    for (Real z : {0.5, 2.0, kTwoPi}) {
        CHECK(spherical_i(0, z) == doctest::Approx(std::sinh(z) / z).epsilon(1e-13));
    }
    // int_{-1}^{1} e^{z t} P_l(t) dt = 2 i_l(z), checked by quadrature for l=2
    Real z = kTwoPi;
    Rule1D g = gauss_legendre(60);
    Real acc = 0;
    for (std::size_t q = 0; q < g.size(); ++q)
        acc += g.weights[q] * std::exp(z * g.nodes[q]) * legendre_p(2, g.nodes[q]);
    CHECK(acc == doctest::Approx(2.0 * spherical_i(2, z)).epsilon(1e-12));
}

TEST_CASE("gegenbauer polynomial normalization at t=1") {
    for (Real alpha : {0.0, 0.5, 1.0, 1.5}) {
        for (int l : {0, 1, 3, 6}) {
            CHECK(gegenbauer_normalized(l, alpha, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // d=2 limit is Chebyshev: C_3(cos a) = cos(3a)
    Real a = 0.7;
    CHECK(gegenbauer_normalized(3, 0.0, std::cos(a)) ==
          doctest::Approx(std::cos(3 * a)).epsilon(1e-13));
}

TEST_CASE("adaptive integration smoke") {
    Real v = integrate_adaptive([](Real x) { return std::exp(-x * x); }, 0.0, 10.0, 1e-13);
    CHECK(v == doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-12));
}
