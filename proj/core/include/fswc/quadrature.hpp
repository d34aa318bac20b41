#pragma once

#include <array>
#include <vector>

#include "fswc/common.hpp"
#include "fswc/gauss.hpp"
#include "fswc/harmonic.hpp"

namespace fswc {

/// Quadrature rule on S^{d-1} for the Lebesgue surface measure dw.
struct SphereQuadrature {
    int d = 0;
    int order = 0;
    std::vector<Point> nodes;    ///< unit vectors
    std::vector<Real> weights;   ///< positive, sum = |S^{d-1}|
    std::size_t size() const { return nodes.size(); }
};

/// d=2: uniform trapezoid with 2*order nodes (exact for trigonometric degree
/// < 2*order). d=3: Gauss-Legendre in the polar cosine x trapezoid in azimuth,
/// exact for spherical-harmonic degree <= order. `pole_axis` rotates the
/// polar axis (default e_d); radial potentials in other dimensions go through
/// gegenbauer_rule instead.
SphereQuadrature build_sphere_quadrature(int d, int order);
SphereQuadrature build_sphere_quadrature(int d, int order, const Point& pole_axis);

/// Gauss rule on [-1,1] for the Funk-Hecke weight (1-t^2)^{(d-3)/2}.
Rule1D gegenbauer_rule(int d, int n);

/// Energy-shell family: t-nodes in (0, tau] graded toward 0 with quadrature
/// weights for int_0^tau f(t) dt, plus the branch radii r_pm(t) solving
/// |p(r)| = t near the Fermi radius.
struct ShellFamily {
    KineticSymbol symbol;
    std::vector<Real> t_nodes;    ///< increasing, in (0, tau]
    std::vector<Real> t_weights;  ///< plain dt-quadrature weights
    std::vector<Real> r_plus;     ///< p(r) = +t branch
    std::vector<Real> r_minus;    ///< p(r) = -t branch
    Real grading_ratio = 0;
    Real t_min = 0;
    int n_t = 0;
    std::size_t size() const { return t_nodes.size(); }
};

/// Builds the graded shell grid for the 1/(t+e)-weighted integrals; the
/// smallest node is <= max(e, 1e-12)/10. n_t controls the per-panel order
/// (total nodes grow logarithmically in 1/e on top of it).
ShellFamily shell_grid(const KineticSymbol& symbol, int n_t, Real e);

/// Root of p(r) = y near the Fermi radius (safeguarded Newton on [k0/2, 2k0]).
Real solve_profile_radius(const KineticSymbol& symbol, Real y);

}  // namespace fswc
