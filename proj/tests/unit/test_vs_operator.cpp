#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fswc/vs_operator.hpp"

using namespace fswc;

TEST_CASE("assemble_vs basics") {
    KineticSymbol sym = KineticSymbol::bcs(3);
    SphereQuadrature quad = build_sphere_quadrature(3, 12);

    // V = 0 gives the zero matrix
    OperatorMatrix Z = assemble_vs(Potential::gaussian(3, 0.0), quad, sym);
    CHECK(Z.a.cwiseAbs().maxCoeff() == 0.0);

    // hermiticity for real V
    OperatorMatrix M = assemble_vs(Potential::gaussian(3), quad, sym);
    CHECK((M.a - M.a.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * M.a.cwiseAbs().maxCoeff());
    CHECK(M.symmetry == OperatorMatrix::Symmetry::hermitian);

    // positivity transfer: V >= 0 gives a PSD Gram-type matrix
    SpectralResult spec = vs_spectrum(M, 0);
    Real top = spec.eigenvalues.front().real();
    CHECK(spec.eigenvalues.back().real() > -1e-10 * top);
}

TEST_CASE("gaussian d=3 spectrum against the Funk-Hecke closed form") {
    KineticSymbol sym = KineticSymbol::bcs(3);
    SphereQuadrature quad = build_sphere_quadrature(3, 24);
    Potential V = Potential::gaussian(3);
    OperatorMatrix M = assemble_vs(V, quad, sym);
    SpectralResult spec = vs_spectrum(M, 0);

    CHECK(spec.eigenvalues.front().real() ==
          doctest::Approx(1.0 - std::exp(-4.0 * kPi)).epsilon(1e-8));

    // multiset agreement for l <= 6 with multiplicities 2l+1
    auto fh = funk_hecke_spectrum(V, sym, 6);
    std::vector<Real> expect;
    for (const auto& e : fh) {
        CHECK(e.multiplicity == 2 * e.l + 1);
        for (int m = 0; m < e.multiplicity; ++m) expect.push_back(e.a_l);
    }
    std::sort(expect.rbegin(), expect.rend());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(spec.eigenvalues[i].real() - expect[i]) < 1e-6);

    // frozen modified-Bessel values: a_l = 4 pi e^{-2 pi} i_l(2 pi)
    CHECK(fh[0].a_l == doctest::Approx(0.9999965126576437).epsilon(1e-10));
    CHECK(fh[1].a_l == doctest::Approx(0.840849099278235).epsilon(1e-10));
    CHECK(fh[4].a_l == doctest::Approx(0.19236828031335568).epsilon(1e-10));
    for (const auto& e : fh)
        CHECK(e.a_l ==
              doctest::Approx(4.0 * kPi * std::exp(-kTwoPi) * spherical_i(e.l, kTwoPi)).epsilon(1e-8));
    // decreasing in l
    for (std::size_t i = 0; i + 1 < fh.size(); ++i) CHECK(fh[i].a_l > fh[i + 1].a_l);
}

TEST_CASE("d=2 funk-hecke and multiplicities") {
    KineticSymbol sym = KineticSymbol::bcs(2);
    auto fh = funk_hecke_spectrum(Potential::gaussian(2), sym, 4);
    CHECK(fh[0].multiplicity == 1);
    CHECK(fh[1].multiplicity == 2);
    // frozen: a_l = 2 pi e^{-2 pi} I_l(2 pi)
    CHECK(fh[0].a_l == doctest::Approx(1.0220867283754902).epsilon(1e-12));
    CHECK(fh[1].a_l == doctest::Approx(0.9367901055458313).epsilon(1e-12));
    CHECK(fh[2].a_l == doctest::Approx(0.7238971765010956).epsilon(1e-12));
    CHECK_THROWS_AS(funk_hecke_spectrum(Potential::oscillating_slab(3, 0.5),
                                        KineticSymbol::bcs(3), 2),
                    NotRadial);
}

TEST_CASE("measure-convention covariance is an exact scalar") {
    SphereQuadrature quad = build_sphere_quadrature(2, 16);
    Potential V = Potential::gaussian(2);
    OperatorMatrix Mw = assemble_vs(V, quad, KineticSymbol::bcs(2));
    OperatorMatrix Ms =
        assemble_vs(V, quad, KineticSymbol::bcs(2, 0.5, MeasureConvention::weighted_ds));
    CHECK((Mw.a / 2.0 - Ms.a).cwiseAbs().maxCoeff() == 0.0);  // |p'(1)| = 2 exactly halves
    SpectralResult a = vs_spectrum(Mw, 0), b = vs_spectrum(Ms, 0);
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
        CHECK(b.eigenvalues[i].real() ==
              doctest::Approx(a.eigenvalues[i].real() / 2.0).epsilon(1e-13));
}

TEST_CASE("refinement stability of the top eigenvalues") {
    KineticSymbol sym = KineticSymbol::bcs(3);
    Potential V = Potential::gaussian(3);
    SpectralResult a = vs_spectrum(assemble_vs(V, build_sphere_quadrature(3, 24), sym), 0);
    SpectralResult b = vs_spectrum(assemble_vs(V, build_sphere_quadrature(3, 48), sym), 0);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(a.eigenvalues[i].real() - b.eigenvalues[i].real()) < 1e-6);
}

TEST_CASE("vs_spectrum on the identity and the flag contract") {
    OperatorMatrix I;
    I.a = Eigen::MatrixXcd::Identity(5, 5);
    I.symmetry = OperatorMatrix::Symmetry::hermitian;
    SpectralResult spec = vs_spectrum(I, 0, {1.0, 2.0, 4.0});
    for (const Complex& ev : spec.eigenvalues) {
        CHECK(ev.real() == doctest::Approx(1.0));
        CHECK(ev.imag() == 0.0);
    }
    CHECK(spec.schatten.at(1.0) == doctest::Approx(5.0));
    CHECK(spec.schatten.at(2.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(spec.schatten.at(4.0) == doctest::Approx(std::pow(5.0, 0.25)));

    // general path: complex amplitude makes the matrix non-hermitian but the
    // report still sorts by descending real part
    SphereQuadrature quad = build_sphere_quadrature(2, 8);
    OperatorMatrix Mc =
        assemble_vs(Potential::gaussian(2, Complex(1.0, 0.25)), quad, KineticSymbol::bcs(2));
    CHECK(Mc.symmetry == OperatorMatrix::Symmetry::general);
    SpectralResult cs = vs_spectrum(Mc, 2);
    for (std::size_t i = 0; i + 1 < cs.eigenvalues.size(); ++i)
        CHECK(cs.eigenvalues[i].real() >= cs.eigenvalues[i + 1].real() - 1e-14);
}

TEST_CASE("mollified limit check") {
    KineticSymbol sym = KineticSymbol::bcs(3);
    SphereQuadrature quad = build_sphere_quadrature(3, 12);
    // Schwartz input: distances eventually decrease monotonically
    std::vector<Real> d1 = mollified_limit_check(Potential::gaussian(3), quad, sym, 7);
    for (std::size_t i = 3; i + 1 < d1.size(); ++i) CHECK(d1[i + 1] < d1[i]);
    CHECK(d1.back() < d1.front());
    CHECK(d1.back() < 1e-2);
    // ball indicator: same contract
    std::vector<Real> d2 = mollified_limit_check(Potential::ball(3), quad, sym, 7);
    for (std::size_t i = 3; i + 1 < d2.size(); ++i) CHECK(d2[i + 1] < d2[i]);
    // V = 0: all zeros
    std::vector<Real> d0 = mollified_limit_check(Potential::gaussian(3, 0.0), quad, sym, 3);
    for (Real v : d0) CHECK(v == 0.0);
}
