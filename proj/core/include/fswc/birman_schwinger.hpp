#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fswc/common.hpp"
#include "fswc/fft.hpp"
#include "fswc/lanczos.hpp"
#include "fswc/potentials.hpp"
#include "fswc/quadrature.hpp"
#include "fswc/vs_operator.hpp"

namespace fswc {

/// Periodic box [0,L)^d with N grid points per side (power of two); dual
/// lattice spacing 1/L. Physical samples sit at x_i = (i - N/2) L/N.
struct BoxGrid {
    int d = 2;
    Real L = 16.0;
    int N = 256;

    Real h() const { return L / N; }
    std::size_t total() const {
        std::size_t t = 1;
        for (int i = 0; i < d; ++i) t *= static_cast<std::size_t>(N);
        return t;
    }
    std::vector<int> dims() const { return std::vector<int>(d, N); }
    Real x_coord(int i) const { return (i - N / 2) * h(); }
    Real freq(int k) const { return (k < N / 2 ? k : k - N) / L; }

    /// Validates N a power of two, N pi/L > 3 and, for models with a finite
    /// effective support radius, L >= 4x that radius.
    static BoxGrid make(int d, Real L, int N, const Potential* V = nullptr);

    /// Box side near target_L whose dual lattice stays as far as possible from
    /// the unit Fermi sphere (maximizes min |{sum of d squares} - L^2|).
    static Real side_avoiding_fermi_lattice(int d, Real target_L);
};

/// FFT application of BS(e) and its multiplier pieces on a box grid.
/// Not thread-safe: one instance per worker.
class BsBox {
  public:
    BsBox(const Potential& V, const KineticSymbol& symbol, const BoxGrid& grid, Real e);

    void set_shift(Real e);
    Real shift() const { return e_; }
    const BoxGrid& box() const { return grid_; }
    const KineticSymbol& symbol() const { return symbol_; }
    bool real_potential() const { return real_; }
    std::size_t size() const { return n_; }

    /// Symmetrized isospectral form (T+e)^{-1/2} V (T+e)^{-1/2} on real fields
    /// (real V only).
    void apply_symmetrized(const Real* in, Real* out);

    enum class Part { full, low, high };

    /// Literal form sqrt|V| chi_part(T/tau) (T+e)^{-1} sqrt V.
    void apply_literal(const Complex* in, Complex* out, Part part = Part::full);

    const std::vector<Real>& kinetic_values_half() const { return T_half_; }
    const std::vector<Real>& potential_samples_real() const { return v_real_; }
    const std::vector<Real>& sqrt_abs() { ensure_literal_arrays(); return sqrt_abs_; }
    const std::vector<Complex>& sqrt_signed() { ensure_literal_arrays(); return sqrt_sg_; }

  private:
    void ensure_literal_arrays();
    Potential V_;
    KineticSymbol symbol_;
    BoxGrid grid_;
    Real e_ = 0;
    bool real_ = true;
    std::size_t n_ = 0;
    std::vector<Real> T_;         ///< kinetic symbol on the dual lattice (full layout)
    std::vector<Real> chi_;       ///< chi(T/tau) on the dual lattice
    std::vector<Real> T_half_;    ///< kinetic symbol on the r2c half layout
    std::vector<Complex> v_;      ///< V samples
    std::vector<Real> v_real_;    ///< V samples (real path)
    std::vector<Real> sqrt_abs_;  ///< sqrt|V|
    std::vector<Complex> sqrt_sg_;///< sgn(V) sqrt|V|
    std::unique_ptr<RealFft> rf_;
    std::unique_ptr<ComplexFft> cf_;
};

/// Smooth radial cutoff: 1 on [0,1], 0 on [2,inf), C^inf in between.
Real smooth_cutoff(Real u);

/// bs_apply entry point per the operation contract.
std::vector<Complex> bs_apply(const Potential& V, const KineticSymbol& symbol, Real e,
                              const BoxGrid& grid, const std::vector<Complex>& psi);

struct BsEigs {
    std::vector<Complex> eigenvalues;  ///< descending real part
    std::vector<Real> residuals;       ///< certified relative residuals
    std::vector<std::vector<Real>> vectors_real;  ///< real path only
    int applies = 0;
};

/// Top-k eigenvalues of BS(e) by Krylov iteration (symmetric Lanczos for real
/// V, Arnoldi for complex V); relative residual <= tol certified per pair.
BsEigs bs_eigs_iterative(const Potential& V, const KineticSymbol& symbol, Real e,
                         const BoxGrid& grid, int k, Real tol = 1e-8,
                         const std::vector<Real>* warm_start = nullptr);

/// Dense materialization of the (symmetrized for real V, literal for complex
/// V) operator; total grid points <= 4096.
OperatorMatrix bs_dense_oracle(const Potential& V, const KineticSymbol& symbol, Real e,
                               const BoxGrid& grid);

/// High/low/singular/regular splitting of BS(e); appliers act on complex grid
/// functions of length grid.total().
struct BsComponents {
    std::size_t n = 0;
    Real e = 0, tau = 0;
    ComplexApply bs, high, low, low_sing, low_reg;

    /// max relative deviation of (high + low - bs) psi and
    /// (low_sing + low_reg - low) psi over seeded random inputs.
    Real splitting_identity_error(int n_vectors = 20, std::uint64_t seed = 0xb5ULL) const;
};

BsComponents bs_split(const Potential& V, const KineticSymbol& symbol, Real e,
                      const BoxGrid& grid, const SphereQuadrature& quad);

/// Operator norm of a component applier (self-adjoint case; real V).
Real component_norm(const BsComponents& comps, const ComplexApply& op, Real tol = 1e-6);

struct WsOptions {
    bool validate_grading = false;  ///< rerun with a refined t-grid and compare
    Real grading_tol = 1e-6;
};

/// Second-order sphere matrix W_S(e) = F_S V^{1/2} BS_reg(e) |V|^{1/2} F_S^*
/// in the sqrt(w)-symmetrized node basis: graded shell quadrature for the low
/// part, box columns for the high part.
OperatorMatrix ws_matrix(const Potential& V, const KineticSymbol& symbol, Real e,
                         const SphereQuadrature& quad, const ShellFamily& shells,
                         const BoxGrid& grid, const WsOptions& opts = {});

/// B_S(lambda) = V_S - lambda W_S(0).
OperatorMatrix bs_lambda_operator(const Potential& V, const KineticSymbol& symbol, Real lambda,
                                  const SphereQuadrature& quad, const ShellFamily& shells,
                                  const BoxGrid& grid);

struct SpectralMeasureCheck {
    Complex lhs, rhs;
    Real gap;  ///< |lhs-rhs| / max(|lhs|, |rhs|)
};

/// <f, h(T) g> two ways: Fourier multiplier on the box vs the shell
/// representation of the spectral measure. h must be supported in [0, tau].
SpectralMeasureCheck spectral_measure_check(const std::vector<Real>& f, const std::vector<Real>& g,
                                            const std::function<Real(Real)>& h,
                                            const KineticSymbol& symbol, const BoxGrid& grid,
                                            const SphereQuadrature& quad, const ShellFamily& shells,
                                            Real support_radius = 0);

struct LogWeightIntegrals {
    Real g;     ///< int_{1/2}^{3/2} k^{d(1/p-1/p')-1} / (T(k)+e) dk
    Real g_mt;  ///< same with exponent 0
};

LogWeightIntegrals log_weight_integrals(const KineticSymbol& symbol, Real e, Real p);

}  // namespace fswc
