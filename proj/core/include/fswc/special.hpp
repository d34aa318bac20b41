#pragma once

#include <vector>

#include "fswc/common.hpp"

namespace fswc {

/// Bessel function J_nu(z) for z >= 0 and nu an integer or half-integer >= 0,
/// to relative accuracy ~1e-12 or better away from zeros.
/// Integer orders go through the GSL minimax/asymptotic machinery; half-integer
/// orders through the closed spherical-Bessel forms.
Real bessel_j(Real nu, Real z);

/// Spherical Bessel j_l(z), l >= 0 integer.
Real spherical_j(int l, Real z);

/// Modified spherical Bessel i_l(z) = sqrt(pi/(2z)) I_{l+1/2}(z).
Real spherical_i(int l, Real z);

/// Modified Bessel I_n(z), integer n >= 0.
Real bessel_i(int n, Real z);

/// Modified Bessel K_nu(z), nu >= 0 real, z > 0.
Real bessel_k(Real nu, Real z);

/// Legendre polynomial P_l(t).
Real legendre_p(int l, Real t);

/// Gegenbauer polynomial C_l^{(alpha)}(t) normalized so the value at t=1 is 1
/// (d=2 limit alpha -> 0 is the Chebyshev polynomial T_l).
Real gegenbauer_normalized(int l, Real alpha, Real t);

}  // namespace fswc
