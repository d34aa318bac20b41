#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fswc/common.hpp"
#include "fswc/potentials.hpp"
#include "fswc/quadrature.hpp"

namespace fswc {

struct OperatorMatrix {
    enum class Symmetry { hermitian, general };

    Eigen::MatrixXcd a;
    Symmetry symmetry = Symmetry::general;
    std::string provenance;

    int n() const { return static_cast<int>(a.rows()); }

    /// Validates the hermitian invariant max|A - A^*| <= tol * ||A||.
    void check_hermitian(Real tol = 1e-10) const;
};

struct SpectralResult {
    std::vector<Complex> eigenvalues;  ///< sorted by descending real part
    std::optional<Eigen::MatrixXcd> eigenvectors;  ///< columns, top-k
    std::vector<Real> singular_values;             ///< descending
    std::map<Real, Real> schatten;                 ///< p -> (sum sigma^p)^{1/p}

    Real schatten_norm(Real p) const;
};

/// Fermi-surface operator V_S = F_S V F_S^* discretized on the sphere rule:
/// M[i,j] = sqrt(w_i) hat V(xi_i - xi_j) sqrt(w_j); under weighted_ds the whole
/// matrix carries the scalar 1/|p'(k0)|.
OperatorMatrix assemble_vs(const Potential& V, const SphereQuadrature& quad,
                           const KineticSymbol& symbol);

struct FunkHeckeEntry {
    int l;
    Real a_l;
    int multiplicity;
};

/// Funk-Hecke diagonalization for radial V:
/// a_l = |S^{d-2}| int hat V(k0 sqrt(2-2t)) C_l(t) (1-t^2)^{(d-3)/2} dt,
/// C_l the Gegenbauer polynomial normalized at t=1 (d=2: Chebyshev).
std::vector<FunkHeckeEntry> funk_hecke_spectrum(const Potential& V, const KineticSymbol& symbol,
                                                int l_max, int quad_points = 200);

/// Dense spectrum of an assembled operator; k = number of eigenvectors kept.
/// Singular values (hence Schatten norms) are always computed.
SpectralResult vs_spectrum(const OperatorMatrix& M, int k,
                           const std::vector<Real>& schatten_ps = {1.0, 2.0, 4.0});

/// Distances ||V_S^{(n)} - V_S|| for Gaussian-mollified V at widths 2^{-n},
/// n = 1..n_steps; the sequence is eventually decreasing.
std::vector<Real> mollified_limit_check(const Potential& V, const SphereQuadrature& quad,
                                        const KineticSymbol& symbol, int n_steps);

}  // namespace fswc
