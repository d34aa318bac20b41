#pragma once

#include <functional>
#include <vector>

#include "fswc/common.hpp"

namespace fswc {

struct Rule1D {
    std::vector<Real> nodes;
    std::vector<Real> weights;
    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [a, b], exact for polynomials of degree <= 2n-1.
Rule1D gauss_legendre(int n, Real a = -1.0, Real b = 1.0);

/// Gauss rule on [-1,1] for the weight (1-t^2)^gamma, gamma > -1
/// (Golub-Welsch on the Jacobi recurrence; gamma = -1/2 uses the closed
/// Chebyshev nodes).
Rule1D gauss_gegenbauer_weight(int n, Real gamma);

/// Composite rule: per-panel Gauss-Legendre of order `order` on consecutive
/// [edges[i], edges[i+1]].
Rule1D paneled_rule(const std::vector<Real>& edges, int order);

/// Geometric panel edges from `lo` to `hi` with the given ratio, prepended
/// with the [0, lo] stub when include_zero_stub.
std::vector<Real> geometric_edges(Real lo, Real hi, Real ratio, bool include_zero_stub);

/// Adaptive 1D quadrature of f on [a,b] (GSL QAG, 61-point Gauss-Kronrod).
/// Throws Divergent on failure to converge.
Real integrate_adaptive(const std::function<Real(Real)>& f, Real a, Real b,
                        Real rel_tol = 1e-12, Real abs_tol = 0.0);

}  // namespace fswc
