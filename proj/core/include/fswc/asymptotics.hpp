#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fswc/birman_schwinger.hpp"
#include "fswc/common.hpp"

namespace fswc {

struct SolveOptions {
    Real tol = 1e-8;          ///< |lambda mu_j(e) - 1| target
    Real e_floor = 1e-10;     ///< grid resolution floor
    Real e_max = 0.9;         ///< largest admissible shift
    Real e_start = 0.0;       ///< initial bracket top (default 0.1 tau)
    int max_bisections = 90;
    Real lanczos_tol = 1e-9;
    int extra_eigs = 0;       ///< eigenpairs beyond j to track (diagnostics)
};

struct CurveSample {
    Real lambda = 0;
    Real e = 0;
    Real residual = 0;       ///< certified |lambda mu_j(e) - 1|
    Real overlap = 1;        ///< eigenvector continuity across the bisection
    std::vector<Real> bs_top;  ///< BS(e) top spectrum snapshot
    int bisections = 0;
    int applies = 0;
};

struct EigenCurve {
    int j = 1;
    MeasureConvention convention = MeasureConvention::lebesgue_dw;
    std::vector<CurveSample> samples;        ///< lambda strictly decreasing
    std::vector<std::string> sample_errors;  ///< per-lambda failures, sweep continues
};

/// Finds e with mu_j(e) = 1/lambda (mu_j the j-th eigenvalue of BS(e) by
/// descending value, j 1-based) by bisection in ln e; mu_j is strictly
/// decreasing in e. Throws ResolutionExceeded / NoBoundState per contract.
CurveSample solve_e_for_lambda(const Potential& V, const KineticSymbol& symbol,
                               const BoxGrid& grid, Real lambda, int j,
                               const SolveOptions& opts = {});

/// Independent solves over a decreasing lambda grid; per-sample errors are
/// recorded and the sweep continues.
EigenCurve sweep(const Potential& V, const KineticSymbol& symbol, const BoxGrid& grid,
                 const std::vector<Real>& lambda_grid, int j, const SolveOptions& opts = {});

struct AsymptoticsReport {
    int j = 1;
    Real a = 0;         ///< eigenvalue of V_S used for the first-order law
    Real fitted_a = 0;  ///< 1 / least-squares slope of ln(1/e) vs 1/lambda
    std::vector<Real> lambda;
    std::vector<Real> r1;        ///< |lambda a ln(1/e) - 1|
    std::vector<Real> defect1;   ///< ln(1/e) - 1/(lambda a), signed
    std::vector<Real> b;         ///< b_S^j(lambda) < 0 samples (when provided)
    std::vector<Real> s;         ///< ln(1+1/e) + 1/(lambda b)
    std::vector<Real> r2;        ///< |s| * lambda
};

/// First-order law residuals and the fitted slope.
AsymptoticsReport first_order_fit(const EigenCurve& curve, Real a);

/// Adds the second-order residuals; b_samples[i] matches curve.samples[i].
AsymptoticsReport second_order_residual(const EigenCurve& curve, Real a,
                                        const std::vector<Real>& b_samples);

/// b_S^j(lambda) for the second-order law: the negated j-branch eigenvalue of
/// V_S + lambda W_S(0) (the sign alignment fixed by -1/(lambda b) -> +1/(lambda a)
/// as lambda -> 0); branches matched by eigenvector overlap against V_S.
std::vector<Real> second_order_b_samples(const Potential& V, const KineticSymbol& symbol,
                                         const SphereQuadrature& quad, const ShellFamily& shells,
                                         const BoxGrid& ws_grid, const std::vector<Real>& lambdas,
                                         int j);

/// Eigenvalue counts inside the circle (center, radius) for each member of the
/// operator family, by the trapezoid resolvent-trace contour integral.
std::vector<int> riesz_count(const std::function<OperatorMatrix(Real)>& family, Complex center,
                             Real radius, const std::vector<Real>& kappa_samples,
                             int contour_nodes = 64);

}  // namespace fswc
