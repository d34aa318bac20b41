#pragma once

#include <memory>
#include <vector>

#include "fswc/common.hpp"
#include "fswc/harmonic.hpp"
#include "fswc/potentials.hpp"

namespace fswc {

/// Wave packet on a spherical cap of diameter ~ R^{-1/2}: on the sphere
///   phi(xi) = R^{(d-1)/4} chihat(R(xi.n - 1), R^{1/2} xi_perp),
/// chihat the radial profile B (g*g)(A .) built from a fixed even bump g
/// (A=2, B normalized so chi = B [g_vee(./A)]^2 >= 1 on the unit ball).
/// The extension (phi dw)^vee concentrates on the dual tube of length R and
/// radius R^{1/2} along n.
class CapPacket {
  public:
    CapPacket(int d, Real R, Point direction, bool symmetrized);

    int dim() const { return d_; }
    Real scale() const { return R_; }
    const Point& direction() const { return dir_; }
    bool symmetrized() const { return symm_; }

    /// phi at a point of S^{d-1} (the symmetrized packet evaluates psi).
    Complex phi(const Point& xi) const;

    /// (phi dw)^vee(x); the symmetrized packet returns the real (psi dw)^vee.
    Complex extension(const Point& x) const;

    /// Tube-frame extension at x = s n + rho m (m any unit vector normal to n;
    /// the packet is axisymmetric around its axis).
    Complex extension_tube(Real s, Real rho) const;

    /// ||phi||^2_{L^2(S)} by cap quadrature.
    Real l2_norm_sq() const;

    /// Angular radius of the chihat support (cap fits within this angle).
    Real cap_angular_radius() const;

  private:
    int d_;
    Real R_;
    Point dir_;
    bool symm_;
    std::vector<Point> frame_;  // orthonormal: frame_[0] = dir
    Real vmax_ = 0;             // cap graph-coordinate radius
    Complex cap_integral(const Point& x, bool single_cap_positive) const;
};

CapPacket knapp_packet(int d, Real R, const Point& direction, bool symmetrized);

struct KnappOptions {
    Real kappa = 4.0;        ///< integration window = min(M, kappa) T
    int tail_exponent = 8;   ///< N in the C_N M^{-N} tail bound
    Real amalgam = -1.0;     ///< pass a precomputed ||V|| amalgam (else computed)
    int x_par_per_unit = 32; ///< longitudinal quadrature density
};

struct KnappCertificate {
    Real R = 0, M = 0;
    Real main_term = 0;      ///< R^{-(d-1)/2}-scaled window integral of V |ext|^2
    Real tail_bound = 0;     ///< C_N M^{-N} ||V||_amalgam + window-boundary estimate
    Real total = 0;          ///< main_term - tail_bound (certified lower bound if > 0)
    bool certified = false;  ///< total > 0
    Real c_n = 0;            ///< fitted tail constant (labelled, not proven)
    Real packet_l2 = 0;
};

/// <psi, V_S psi> lower bound via the physical-space form (the certificate is
/// "modulo fitted tail constant"; c_n is reported).
KnappCertificate knapp_quadratic_form(const Potential& V, const CapPacket& packet, Real M,
                                      const KnappOptions& opts = {});

struct MultiCapResult {
    int K_requested = 0;
    int K_achieved = 0;
    std::vector<KnappCertificate> per_cap;
    std::vector<Point> directions;
    Real max_overlap = 0;  ///< max pairwise |<phi_i, phi_j>| (0 for disjoint caps)
};

/// Disjoint-cap eigenvalue-count certificate: antipodal caps first (the
/// oscillation-resonant pair), then greedy spiral placement with angular
/// separation >= 3 R^{-1/2}.
MultiCapResult multi_cap_certificate(const Potential& V, Real R, int K_requested,
                                     const KnappOptions& opts = {});

/// <1, V_S 1> = int_0^inf r^{d-1} |(dw)^vee(r)|^2 (int_S V(r w) dw) dr with
/// oscillation-resolving panels; r_max = 0 selects the tail-test cutoff.
Real radial_trial_value(const Potential& V, const KineticSymbol& symbol, Real r_max = 0);

}  // namespace fswc
