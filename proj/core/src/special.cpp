#include "fswc/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>

namespace fswc {

namespace {
struct GslQuiet {
    gsl_error_handler_t* old;
    GslQuiet() : old(gsl_set_error_handler_off()) {}
    ~GslQuiet() { gsl_set_error_handler(old); }
};

Real gsl_val(int status, const gsl_sf_result& r, const char* what) {
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EUNDRFLW)
        throw NoConvergence(std::string(what) + " failed: " + gsl_strerror(status));
    return r.val;
}
}  // namespace

Real spherical_j(int l, Real z) {
    GslQuiet q;
    gsl_sf_result r;
    int status = gsl_sf_bessel_jl_e(l, z, &r);
    return gsl_val(status, r, "bessel_jl");
}

Real spherical_i(int l, Real z) {
    GslQuiet q;
    gsl_sf_result r;
    int status = gsl_sf_bessel_il_scaled_e(l, z, &r);
    return std::exp(std::abs(z)) * gsl_val(status, r, "bessel_il_scaled");
}

Real bessel_i(int n, Real z) {
    GslQuiet q;
    gsl_sf_result r;
    int status = gsl_sf_bessel_In_scaled_e(n, z, &r);
    return std::exp(std::abs(z)) * gsl_val(status, r, "bessel_In_scaled");
}

Real bessel_k(Real nu, Real z) {
    GslQuiet q;
    gsl_sf_result r;
    int status = gsl_sf_bessel_Knu_e(nu, z, &r);
    return gsl_val(status, r, "bessel_Knu");
}

Real bessel_j(Real nu, Real z) {
    if (!(z >= 0) || !std::isfinite(z)) throw ConfigError("bessel_j: z >= 0 finite required");
    if (nu < 0) throw ConfigError("bessel_j: nu >= 0 required");
    GslQuiet q;
    gsl_sf_result r;
    Real ip;
    Real frac = std::modf(nu, &ip);
    int n = static_cast<int>(ip);
    if (frac == 0.0) {
        int status;
        if (n == 0)
            status = gsl_sf_bessel_J0_e(z, &r);
        else if (n == 1)
            status = gsl_sf_bessel_J1_e(z, &r);
        else
            status = gsl_sf_bessel_Jn_e(n, z, &r);
        return gsl_val(status, r, "bessel_Jn");
    }
    if (std::abs(frac - 0.5) < 1e-15) {
        // J_{l+1/2}(z) = sqrt(2z/pi) j_l(z)
        if (z == 0.0) return 0.0;
        return std::sqrt(2.0 * z / kPi) * spherical_j(n, z);
    }
    throw ConfigError("bessel_j: order must be integer or half-integer");
}

Real legendre_p(int l, Real t) {
    if (l == 0) return 1.0;
    if (l == 1) return t;
    Real pm1 = 1.0, p = t;
    for (int k = 1; k < l; ++k) {
        Real pn = ((2.0 * k + 1.0) * t * p - k * pm1) / (k + 1.0);
        pm1 = p;
        p = pn;
    }
    return p;
}

Real gegenbauer_normalized(int l, Real alpha, Real t) {
    if (l == 0) return 1.0;
    if (std::abs(alpha) < 1e-14) {
        // Chebyshev T_l via recurrence (stable on [-1,1])
        Real pm1 = 1.0, p = t;
        for (int k = 1; k < l; ++k) {
            Real pn = 2.0 * t * p - pm1;
            pm1 = p;
            p = pn;
        }
        return p;
    }
    if (std::abs(alpha - 0.5) < 1e-14) return legendre_p(l, t);
    // C_l^{(a)} recurrence, then divide by C_l^{(a)}(1) = binom(l+2a-1, l)
    Real cm1 = 1.0, c = 2.0 * alpha * t;
    for (int k = 1; k < l; ++k) {
        Real cn = (2.0 * (k + alpha) * t * c - (k + 2.0 * alpha - 1.0) * cm1) / (k + 1.0);
        cm1 = c;
        c = cn;
    }
    Real at1 = std::exp(std::lgamma(l + 2.0 * alpha) - std::lgamma(2.0 * alpha) - std::lgamma(l + 1.0));
    return c / at1;
}

}  // namespace fswc
