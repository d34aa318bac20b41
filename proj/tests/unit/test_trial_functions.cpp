#include <doctest.h>

#include <cmath>

#include "fswc/trial_functions.hpp"
#include "fswc/vs_operator.hpp"

using namespace fswc;

TEST_CASE("packet norms bounded across scales") {
    Point e1{1.0, 0.0, 0.0};
    Real lo = 1e9, hi = 0;
    for (Real R : {16.0, 64.0, 256.0}) {
        CapPacket p(3, R, e1, false);
        Real n2 = p.l2_norm_sq();
        CHECK(n2 > 0);
        lo = std::min(lo, n2);
        hi = std::max(hi, n2);
    }
    CHECK(hi / lo <= 3.0);
    CHECK_THROWS_AS(CapPacket(3, 2.0, e1, false), ConfigError);  // R >= 4
}

TEST_CASE("symmetrized packet extension is real") {
    CapPacket p(3, 64.0, {1.0, 0.0, 0.0}, true);
    SplitMix64 rng(5);
    for (int t = 0; t < 8; ++t) {
        Point x{40.0 * rng.symmetric(), 6.0 * rng.symmetric(), 6.0 * rng.symmetric()};
        Complex v = p.extension(x);
        CHECK(std::abs(v.imag()) < 1e-12 * std::max(1.0, std::abs(v.real())));
    }
}

TEST_CASE("tube concentration: transverse decay") {
    Real R = 64.0;
    CapPacket p(3, R, {1.0, 0.0, 0.0}, false);
    Real center = std::abs(p.extension({0.0, 0.0, 0.0}));
    Real off = std::abs(p.extension({0.0, 4.0 * std::sqrt(R), 0.0}));
    CHECK(off <= 0.1 * center);
}

TEST_CASE("radial trial value: positivity and the d=3 Gaussian oracle") {
    KineticSymbol sym3 = KineticSymbol::bcs(3);
    // frozen adaptive-quadrature oracle of int r^2 (2 sin(2pi r)/r)^2 4pi e^{-pi r^2} dr
    Real v = radial_trial_value(Potential::gaussian(3), sym3);
    CHECK(v == doctest::Approx(12.566326791122663).epsilon(1e-8));
    CHECK(v > 0);
    CHECK(radial_trial_value(Potential::gaussian(3, 0.0), sym3) == 0.0);
    CHECK(radial_trial_value(Potential::ball(3, 2.0, 0.7), sym3) > 0);
}

TEST_CASE("form consistency: radial trial state vs the assembled matrix") {
    // <1, V_S 1> two ways (eq-4.5 route vs sphere matrix with u_i = sqrt(w_i))
    KineticSymbol sym = KineticSymbol::bcs(3);
    Potential V = Potential::gaussian(3);
    Real phys = radial_trial_value(V, sym);
    SphereQuadrature quad = build_sphere_quadrature(3, 24);
    OperatorMatrix M = assemble_vs(V, quad, sym);
    Eigen::VectorXcd u(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) u(i) = std::sqrt(quad.weights[i]);
    Real mat = (u.adjoint() * M.a * u)(0, 0).real();
    CHECK(phys == doctest::Approx(mat).epsilon(1e-4));
}

TEST_CASE("packet form consistency vs the sphere matrix (d=2)") {
    KineticSymbol sym = KineticSymbol::bcs(2);
    Potential V = Potential::gaussian(2);
    Real R = 64.0;
    CapPacket packet(2, R, {1.0, 0.0}, false);

    // physical-space form: int V |ext|^2 over the effective support of V
    Real phys = 0;
    int nx = 160, ny = 160;
    Real X = 4.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            Real x = -X + 2 * X * (i + 0.5) / nx;
            Real y = -X + 2 * X * (j + 0.5) / ny;
            Real cell = (2 * X / nx) * (2 * X / ny);
            phys += V({x, y}).real() * std::norm(packet.extension({x, y})) * cell;
        }

    SphereQuadrature quad = build_sphere_quadrature(2, 256);
    OperatorMatrix M = assemble_vs(V, quad, sym);
    Eigen::VectorXcd u(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i)
        u(i) = std::sqrt(quad.weights[i]) * packet.phi(quad.nodes[i]);
    Real mat = (u.adjoint() * M.a * u)(0, 0).real();
    CHECK(phys == doctest::Approx(mat).epsilon(0.05));
}

TEST_CASE("knapp certificate: compactly supported positive V") {
    // V >= 0 supported inside the tube: positive main term, tiny tail
    Potential V = Potential::ball(3, 1.0, 2.0);
    CapPacket packet(3, 16.0, {1.0, 0.0, 0.0}, true);
    KnappOptions opt;
    opt.amalgam = 2.0;  // any finite bound; the window covers the support
    KnappCertificate cert = knapp_quadratic_form(V, packet, 8.0, opt);
    CHECK(cert.main_term > 0);
    CHECK(cert.certified);
}

TEST_CASE("multi-cap placement and overlaps") {
    Potential V = Potential::oscillating_slab(3, 0.5);
    KnappOptions opt;
    opt.amalgam = 1.5;
    MultiCapResult mc = multi_cap_certificate(V, 64.0, 3, opt);
    CHECK(mc.K_requested == 3);
    CHECK(static_cast<int>(mc.directions.size()) == 3);
    CHECK(mc.max_overlap == 0.0);
    CHECK(mc.K_achieved >= 0);
    CHECK(mc.K_achieved <= 3);
    // antipodal pair forms agree by the x1 symmetry of the slab
    CHECK(mc.per_cap[0].main_term ==
          doctest::Approx(mc.per_cap[1].main_term).epsilon(1e-6));
}
