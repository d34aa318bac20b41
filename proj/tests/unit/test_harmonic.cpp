#include <doctest.h>

#include <cmath>

#include "fswc/gauss.hpp"
#include "fswc/harmonic.hpp"

using namespace fswc;

namespace {

// polar-quadrature oracle for (dw_{S^{d-1}})^vee(r)
Real polar_oracle(int d, Real r) {
    if (d == 3) {
        // 2 pi int_{-1}^{1} cos(2 pi r t) dt
        Rule1D g = gauss_legendre(200);
        Real acc = 0;
        for (std::size_t q = 0; q < g.size(); ++q)
            acc += g.weights[q] * std::cos(kTwoPi * r * g.nodes[q]);
        return kTwoPi * acc;
    }
    // d=2: trapezoid on the circle (spectrally accurate for periodic integrands)
    int n = 4096;
    Real acc = 0;
    for (int i = 0; i < n; ++i) acc += std::cos(kTwoPi * r * std::cos(kTwoPi * i / n));
    return kTwoPi * acc / n;
}

}  // namespace

TEST_CASE("surface measure transform: closed forms vs polar oracles") {
    KineticSymbol s3 = KineticSymbol::bcs(3);
    KineticSymbol s2 = KineticSymbol::bcs(2);
    for (Real r : {0.1, 0.7, 3.3, 17.0, 50.0}) {
        Real v3 = surface_measure_ft(s3, 1.0, r);
        CHECK(v3 == doctest::Approx(2.0 * std::sin(kTwoPi * r) / r).epsilon(1e-12));
        CHECK(v3 == doctest::Approx(polar_oracle(3, r)).epsilon(1e-8));
        Real v2 = surface_measure_ft(s2, 1.0, r);
        CHECK(v2 == doctest::Approx(kTwoPi * bessel_j(0, kTwoPi * r)).epsilon(1e-12));
        CHECK(v2 == doctest::Approx(polar_oracle(2, r)).epsilon(1e-8));
    }
    // total mass at r -> 0
    CHECK(surface_measure_ft(s2, 1.0, 0.0) == doctest::Approx(kTwoPi).epsilon(1e-13));
    CHECK(surface_measure_ft(s3, 1.0, 0.0) == doctest::Approx(4.0 * kPi).epsilon(1e-13));
}

TEST_CASE("scaling law and measure convention") {
    KineticSymbol s3 = KineticSymbol::bcs(3);
    for (Real rho : {0.8, 1.1, 1.25}) {
        for (Real r : {0.4, 2.0, 9.0}) {
            Real lhs = surface_measure_ft(s3, rho, r);
            Real rhs = std::pow(rho, 2) * surface_measure_ft(s3, 1.0, rho * r);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
    // weighted convention divides by |p'(rho)| = 2 rho
    KineticSymbol sw = KineticSymbol::bcs(3, 0.5, MeasureConvention::weighted_ds);
    Real a = surface_measure_ft(s3, 1.2, 0.7);
    Real b = surface_measure_ft(sw, 1.2, 0.7);
    CHECK(b == doctest::Approx(a / 2.4).epsilon(1e-14));
}

TEST_CASE("decay envelope bounded to r = 1e4") {
    for (int d : {2, 3}) {
        Real worst = 0;
        for (Real r = 0.0; r <= 1e4; r = r < 1 ? r + 0.05 : r * 1.07) {
            Real v = std::abs(unit_sphere_measure_ft(d, r)) * std::pow(1.0 + r, 0.5 * (d - 1));
            worst = std::max(worst, v);
        }
        CHECK(worst < 10.0);
    }
}

TEST_CASE("kernel difference bound report") {
    KineticSymbol s3 = KineticSymbol::bcs(3);
    // rho = 1 gives exact zero
    KernelBoundReport zero = kernel_difference_bound(s3, 0.5, {1.0}, {0.5, 2.0, 10.0});
    CHECK(zero.max_ratio == 0.0);

    std::vector<Real> rhos;
    for (int j = 3; j <= 10; ++j) {
        rhos.push_back(1.0 - std::pow(2.0, -j));
        rhos.push_back(1.0 + std::pow(2.0, -j));
    }
    std::vector<Real> rs;
    for (int i = 0; i < 40; ++i) rs.push_back(std::pow(10.0, 3.0 * i / 39.0));
    KernelBoundReport rep = kernel_difference_bound(s3, 0.5, rhos, rs);
    CHECK(rep.max_ratio > 0.0);
    CHECK(rep.max_ratio < 200.0);
    CHECK(std::isfinite(rep.max_ratio));
    CHECK(rep.table.size() == rhos.size() * rs.size());

    // refinement stability: twice as many r samples changes M by < 2x
    std::vector<Real> rs2;
    for (int i = 0; i < 80; ++i) rs2.push_back(std::pow(10.0, 3.0 * i / 79.0));
    KernelBoundReport rep2 = kernel_difference_bound(s3, 0.5, rhos, rs2);
    CHECK(rep2.max_ratio < 2.0 * rep.max_ratio);
    CHECK(rep.max_ratio < 2.0 * rep2.max_ratio);
}

TEST_CASE("uniform decay at the alpha -> 0 end") {
    // sup over shells of |(dsigma_{S_t})^vee(x)| (1+|x|)^{(d-1)/2} stays bounded
    KineticSymbol s3 = KineticSymbol::bcs(3);
    Real worst = 0;
    for (Real t : {0.0, 0.1, 0.3, 0.5}) {
        for (int pm : {-1, +1}) {
            Real rho = std::sqrt(1.0 + pm * t);
            for (Real r = 0.1; r < 1e3; r *= 1.6) {
                Real v = std::abs(surface_measure_ft(s3, rho, r)) * std::pow(1 + r, 1.0);
                worst = std::max(worst, v);
            }
        }
    }
    CHECK(worst < 20.0);
}

TEST_CASE("kinetic symbol validation") {
    CHECK_THROWS_AS(KineticSymbol::bcs(3, 1.5), ConfigError);
    CHECK_THROWS_AS(KineticSymbol::power_shift(3, 3.5), ConfigError);  // s < d required
    KineticSymbol ps = KineticSymbol::power_shift(3, 1.7);
    CHECK(ps.p(1.0) == doctest::Approx(0.0));
    CHECK(ps.kappa() == doctest::Approx(8.0 / 6.0));
}
