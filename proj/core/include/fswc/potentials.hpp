#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fswc/common.hpp"

namespace fswc {

enum class PotentialModel {
    GaussianRadial,   ///< A exp(-pi |x/w|^2); default w=1 is the self-dual profile
    BallIndicator,    ///< A 1_{|x| <= rho0}
    RadialPowerLaw,   ///< A [ r^{-a} 1_{(0,1)} + r^{-b} 1_{[1,inf)} ]
    LogDecay,         ///< A r^{-1} (1+|log r|)^{-b}
    OscillatingSlab,  ///< A cos(4 pi x1) / (1+|x1|+|x'|^2)^{1+eps}
    GridSampled,      ///< samples on [-L/2, L/2)^d, multilinear inside, 0 outside
};

/// Potential descriptor. Amplitude may be complex; all norms use |V|.
class Potential {
  public:
    static Potential gaussian(int d, Complex amplitude = 1.0, Real width = 1.0);
    static Potential ball(int d, Complex amplitude = 1.0, Real radius = 1.0);
    static Potential power_law(int d, Real a, Real b, Complex amplitude = 1.0);
    static Potential log_decay(int d, Real b, Complex amplitude = 1.0);
    static Potential oscillating_slab(int d, Real eps, Complex amplitude = 1.0);
    static Potential grid_sampled(int d, Real box_side, int n_side, std::vector<Complex> samples);

    int dim() const { return d_; }
    PotentialModel model() const { return model_; }
    Complex amplitude() const { return amplitude_; }
    Real width() const { return width_; }
    Real radius() const { return radius_; }
    Real exponent_a() const { return a_; }
    Real exponent_b() const { return b_; }
    Real eps() const { return eps_; }
    Real box_side() const { return box_L_; }
    int n_side() const { return n_side_; }

    /// Pointwise value V(x).
    Complex operator()(const Point& x) const;

    bool is_radial() const;
    bool is_real() const;

    /// |V|(r) for radial models.
    Real radial_abs(Real r) const;

    /// Angular supremum H(r) = sup_w |V(r w)|. Radial models: |V|(r).
    /// OscillatingSlab: the closed-form envelope sup (cos factor bounded by 1).
    Real angular_sup(Real r) const;

    bool has_analytic_fourier() const;

    /// Continuum Fourier transform, convention hat V(xi) = int e^{-2pi i x.xi} V dx.
    /// GridSampled uses the discrete transform on its box. Throws
    /// UnsupportedModel where neither is available.
    Complex fourier(const Point& xi) const;

    /// Radial models: hat V at |xi| = k.
    Complex fourier_radial(Real k) const;

    /// hat of |V|^{1/2} at radius k (analytic models only: Gaussian, Ball).
    Real fourier_sqrt_abs(Real k) const;
    /// hat of V^{1/2} = sgn(V) |V|^{1/2} at radius k.
    Complex fourier_sqrt_signed(Real k) const;
    bool has_sqrt_fourier() const;

    /// Radius beyond which |V| < 1e-8 |amplitude| (finite for Gaussian/Ball/
    /// GridSampled); nullopt for slow-decay models.
    std::optional<Real> support_radius() const;

    /// V(./s): argument-scaled potential (used by the MT scaling identity).
    Potential with_argument_scale(Real s) const;

    /// Multiply the amplitude by c.
    Potential scaled(Complex c) const;

    std::string describe() const;

  private:
    Potential() = default;
    int d_ = 0;
    PotentialModel model_ = PotentialModel::GaussianRadial;
    Complex amplitude_ = 1.0;
    Real width_ = 1.0;
    Real radius_ = 1.0;
    Real a_ = 0.0, b_ = 0.0;
    Real eps_ = 0.5;
    Real arg_scale_ = 1.0;
    Real box_L_ = 0.0;
    int n_side_ = 0;
    std::vector<Complex> samples_;
};

/// eval_potential / fourier_transform spec entry points.
Complex eval_potential(const Potential& V, const Point& x);
Complex fourier_transform(const Potential& V, const Point& xi);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

struct AmalgamOptions {
    Real relative_floor = 1e-12;  ///< stop when shell contribution < floor * total
    int max_radius = 64;          ///< hard cap on the Chebyshev shell radius
    int quad_order = 12;          ///< per-axis Gauss order on each cube
};

struct AmalgamResult {
    Real value = 0;
    int truncation_radius = 0;
    Real tail_estimate = 0;  ///< power-law extrapolation of the truncated shells
};

/// Amalgam norm [ sum_s ||V||_{L^q(Q_s)}^p ]^{1/p} over unit cubes centered at
/// the integer lattice. Defaults p=(d+1)/2, q=d/2. Throws Divergent when the
/// shell sums stop decreasing.
AmalgamResult amalgam_norm(const Potential& V, Real outer_p, Real inner_q,
                           const AmalgamOptions& opts = {});
AmalgamResult amalgam_norm(const Potential& V, const AmalgamOptions& opts = {});

/// Global L^p norm of |V|.
Real lp_norm(const Potential& V, Real p);

/// Radial Mizohata-Takeuchi norm sup_mu int_mu^inf H(r) r (r^2-mu^2)^{-1/2} dr.
/// Returns +inf when the tail diverges.
Real mt_norm(const Potential& V);

/// Barcelo-Ruiz-Vega dyadic norm sum_j ( int_{2^j}^{2^{j+1}} |V|^p r^{p-1} dr )^{1/p},
/// radial V, p > 2. Returns +inf on a non-summable tail.
Real dp_norm(const Potential& V, Real p);

/// Iterated norm [ int_0^inf ||V(r.)||_{L^{s/(2-s)}(S^{d-1})}^{p/(2-p)} r^{d-1} dr ]^{(2-p)/p}.
/// Throws InvalidExponents outside the admissible (p, sigma) window.
Real mixed_norm(const Potential& V, Real p, Real sigma);

struct NormReport {
    Real amalgam_norm = 0;
    int amalgam_truncation_radius = 0;
    Real amalgam_tail_estimate = 0;
    std::map<Real, Real> lp_norms;
    Real mt_norm = 0;
    Real dp_norm = 0;
    Real dp_exponent = 0;
    Real mixed_norm = 0;
    Real mixed_p = 0, mixed_sigma = 0;
};

/// All potential norms used by the hypotheses, with +inf explicit.
NormReport norm_report(const Potential& V);

}  // namespace fswc
