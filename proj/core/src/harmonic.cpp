#include "fswc/harmonic.hpp"

#include <cmath>

namespace fswc {

KineticSymbol KineticSymbol::bcs(int d, Real tau, MeasureConvention conv) {
    if (d < 2) throw UnsupportedDimension("KineticSymbol: d >= 2 required");
    if (!(tau > 0 && tau < 1)) throw ConfigError("KineticSymbol: tau in (0,1) required");
    KineticSymbol s;
    s.d_ = d;
    s.profile_ = RadialProfile::BcsDefault;
    s.tau_ = tau;
    s.s_ = 2.0;
    s.conv_ = conv;
    return s;
}

KineticSymbol KineticSymbol::power_shift(int d, Real sexp, Real tau, MeasureConvention conv) {
    if (d < 2) throw UnsupportedDimension("KineticSymbol: d >= 2 required");
    if (!(tau > 0 && tau < 1)) throw ConfigError("KineticSymbol: tau in (0,1) required");
    if (!(sexp >= 2.0 * d / (d + 1) && sexp < d))
        throw ConfigError("KineticSymbol: s in [2d/(d+1), d) required");
    KineticSymbol s;
    s.d_ = d;
    s.profile_ = RadialProfile::PowerShift;
    s.tau_ = tau;
    s.s_ = sexp;
    s.conv_ = conv;
    return s;
}

Real KineticSymbol::p(Real k) const {
    switch (profile_) {
        case RadialProfile::BcsDefault: return k * k - 1.0;
        case RadialProfile::PowerShift: return std::pow(k, s_) - 1.0;
    }
    return 0;
}

Real KineticSymbol::p_prime(Real k) const {
    switch (profile_) {
        case RadialProfile::BcsDefault: return 2.0 * k;
        case RadialProfile::PowerShift: return s_ * std::pow(k, s_ - 1.0);
    }
    return 0;
}

Real KineticSymbol::T(const Point& xi) const {
    if (static_cast<int>(xi.size()) != d_) throw DimensionMismatch("KineticSymbol::T");
    return T_radial(std::sqrt(norm2(xi)));
}

Real unit_sphere_measure_ft(int d, Real r) {
    if (r < 0) throw ConfigError("unit_sphere_measure_ft: r >= 0 required");
    if (r < 1e-8) {
        // series of 2 pi r^{-nu} J_nu(2 pi r), nu = (d-2)/2: -> |S^{d-1}| (1 - (pi r)^2/ (nu+1) + ...)
        Real nu = 0.5 * (d - 2);
        Real z = kPi * r;
        return sphere_area(d) * (1.0 - z * z / (nu + 1.0));
    }
    Real nu = 0.5 * (d - 2);
    return kTwoPi * std::pow(r, -nu) * bessel_j(nu, kTwoPi * r);
}

Real surface_measure_ft(const KineticSymbol& symbol, Real rho, Real r) {
    if (!(rho > 0)) throw ConfigError("surface_measure_ft: rho > 0 required");
    Real v = std::pow(rho, symbol.dim() - 1) * unit_sphere_measure_ft(symbol.dim(), rho * r);
    if (symbol.convention() == MeasureConvention::weighted_ds)
        v /= std::abs(symbol.p_prime(rho));
    return v;
}

KernelBoundReport kernel_difference_bound(const KineticSymbol& symbol, Real alpha,
                                          const std::vector<Real>& rho_samples,
                                          const std::vector<Real>& r_samples) {
    if (!(alpha > 0 && alpha <= 1))
        throw ConfigError("kernel_difference_bound: alpha in (0,1] required");
    const int d = symbol.dim();
    KernelBoundReport rep;
    rep.alpha = alpha;
    rep.max_ratio = 0;
    // the bound concerns the Lebesgue surface measures; evaluate under dw
    for (Real rho : rho_samples) {
        for (Real r : r_samples) {
            Real base = std::pow(rho, d - 1) * unit_sphere_measure_ft(d, rho * r);
            Real ref = unit_sphere_measure_ft(d, r);
            Real diff = std::abs(base - ref);
            Real env = std::pow(std::abs(rho - 1.0), alpha) *
                       std::pow(1.0 + r, alpha - 0.5 * (d - 1));
            Real ratio = rho == 1.0 ? 0.0 : diff / env;
            KernelBoundSample s{rho, r, diff, env, ratio};
            rep.table.push_back(s);
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.witness = s;
            }
        }
    }
    return rep;
}

}  // namespace fswc
