#pragma once

#include <functional>
#include <vector>

#include "fswc/common.hpp"

namespace fswc {

using RealApply = std::function<void(const Real*, Real*)>;
using ComplexApply = std::function<void(const Complex*, Complex*)>;

struct KrylovOptions {
    int nev = 1;              ///< eigenpairs wanted (largest)
    int max_basis = 32;       ///< Krylov basis size between restarts
    int max_restarts = 120;
    Real tol = 1e-10;         ///< relative residual target
    std::uint64_t seed = 0x9e3779b9ULL;
};

struct KrylovResult {
    std::vector<Real> eigenvalues;                ///< descending
    std::vector<std::vector<Real>> eigenvectors;  ///< unit vectors
    std::vector<Real> residuals;                  ///< certified ||Av - t v|| / |t|
    int applies = 0;
};

/// Thick-restart Lanczos for the largest eigenvalues of a symmetric operator.
/// Fully deterministic: fixed start vector (or warm start), fixed restart
/// policy, no randomness beyond the seeded start. Residuals are certified by
/// explicit ||Av - theta v|| evaluations at the end.
KrylovResult lanczos_largest(const RealApply& apply, std::size_t n, const KrylovOptions& opts,
                             const std::vector<Real>* warm_start = nullptr);

struct ComplexKrylovResult {
    std::vector<Complex> eigenvalues;  ///< by descending real part
    std::vector<std::vector<Complex>> eigenvectors;
    std::vector<Real> residuals;
    int applies = 0;
};

/// Plain Arnoldi (no restart, basis up to max_basis) for the eigenvalues of
/// largest real part of a general operator; certified residuals.
ComplexKrylovResult arnoldi_largest(const ComplexApply& apply, std::size_t n,
                                    const KrylovOptions& opts,
                                    const std::vector<Complex>* warm_start = nullptr);

/// Operator-norm estimate of a symmetric operator by Lanczos on the largest
/// |eigenvalue|.
Real symmetric_operator_norm(const RealApply& apply, std::size_t n, Real tol = 1e-8,
                             std::uint64_t seed = 0x51ab5ULL);

}  // namespace fswc
