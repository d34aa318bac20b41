#pragma once

#include <vector>

#include "fswc/common.hpp"
#include "fswc/special.hpp"

namespace fswc {

enum class RadialProfile {
    BcsDefault,  ///< p(k) = k^2 - 1
    PowerShift,  ///< p(k) = k^s - 1,  s in [2d/(d+1), d)
};

enum class MeasureConvention {
    lebesgue_dw,  ///< surface Lebesgue measure dw on S
    weighted_ds,  ///< dsigma = |grad P|^{-1} dw (general-symbol convention)
};

/// Radial kinetic symbol T(xi) = |p(|xi|)| with Fermi radius k0 (= 1 for both
/// profiles), low-energy window tau in (0,1), ellipticity exponent s.
class KineticSymbol {
  public:
    static KineticSymbol bcs(int d, Real tau = 0.5,
                             MeasureConvention conv = MeasureConvention::lebesgue_dw);
    static KineticSymbol power_shift(int d, Real s, Real tau = 0.5,
                                     MeasureConvention conv = MeasureConvention::lebesgue_dw);

    int dim() const { return d_; }
    RadialProfile profile() const { return profile_; }
    Real tau() const { return tau_; }
    Real s() const { return s_; }
    MeasureConvention convention() const { return conv_; }
    Real fermi_radius() const { return 1.0; }

    Real p(Real k) const;        ///< signed profile p(k)
    Real p_prime(Real k) const;  ///< dp/dk
    Real T_radial(Real k) const { return std::abs(p(k)); }
    Real T(const Point& xi) const;

    /// Tomas-Stein exponent kappa = 2(d+1)/(d+3) and its dual.
    Real kappa() const { return 2.0 * (d_ + 1) / (d_ + 3); }
    Real kappa_prime() const { return 2.0 * (d_ + 1) / (d_ - 1); }

  private:
    int d_ = 0;
    RadialProfile profile_ = RadialProfile::BcsDefault;
    Real tau_ = 0.5;
    Real s_ = 2.0;
    MeasureConvention conv_ = MeasureConvention::lebesgue_dw;
};

/// (dw_{rho S})^\vee(|x| = r): inverse transform of the surface measure of the
/// sphere of radius rho, via the closed Bessel form for the unit sphere and
/// the scaling law value(rho, r) = rho^{d-1} value(1, rho r). Under
/// weighted_ds the value is divided by |p'(rho)|.
Real surface_measure_ft(const KineticSymbol& symbol, Real rho, Real r);

/// Unit-sphere case: 2 pi r^{-(d-2)/2} J_{(d-2)/2}(2 pi r), value |S^{d-1}| at 0.
Real unit_sphere_measure_ft(int d, Real r);

struct KernelBoundSample {
    Real rho, r, difference, envelope, ratio;
};

struct KernelBoundReport {
    Real alpha;
    Real max_ratio;
    KernelBoundSample witness;
    std::vector<KernelBoundSample> table;
};

/// Sampled Holder bound max |(dw_{rho S})^v(r) - (dw_S)^v(r)| / (|rho-1|^a (1+r)^{a-(d-1)/2}).
KernelBoundReport kernel_difference_bound(const KineticSymbol& symbol, Real alpha,
                                          const std::vector<Real>& rho_samples,
                                          const std::vector<Real>& r_samples);

}  // namespace fswc
