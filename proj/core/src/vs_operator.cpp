#include "fswc/vs_operator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "fswc/special.hpp"

namespace fswc {

void OperatorMatrix::check_hermitian(Real tol) const {
    if (symmetry != Symmetry::hermitian) return;
    Real dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
    Real scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    if (dev > tol * scale)
        throw Error("OperatorMatrix: hermitian flag violated (dev " + std::to_string(dev) + ")");
}

Real SpectralResult::schatten_norm(Real p) const {
    if (std::isinf(p)) return singular_values.empty() ? 0.0 : singular_values.front();
    Real acc = 0;
    for (Real s : singular_values) acc += std::pow(s, p);
    return std::pow(acc, 1.0 / p);
}

OperatorMatrix assemble_vs(const Potential& V, const SphereQuadrature& quad,
                           const KineticSymbol& symbol) {
    if (V.dim() != quad.d || quad.d != symbol.dim())
        throw DimensionMismatch("assemble_vs: dimension mismatch");
    const std::size_t n = quad.size();
    const Real k0 = symbol.fermi_radius();
    OperatorMatrix M;
    M.a.resize(n, n);
    M.symmetry = V.is_real() ? OperatorMatrix::Symmetry::hermitian
                             : OperatorMatrix::Symmetry::general;
    M.provenance = "V_S[" + V.describe() + "]";

    std::vector<Real> sw(n);
    for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(quad.weights[i]);

    Point diff(quad.d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (int k = 0; k < quad.d; ++k)
                diff[k] = k0 * (quad.nodes[i][k] - quad.nodes[j][k]);
            M.a(i, j) = sw[i] * V.fourier(diff) * sw[j];
        }
    }
    if (symbol.convention() == MeasureConvention::weighted_ds)
        M.a /= std::abs(symbol.p_prime(k0));
    M.check_hermitian(1e-8);
    return M;
}

std::vector<FunkHeckeEntry> funk_hecke_spectrum(const Potential& V, const KineticSymbol& symbol,
                                                int l_max, int quad_points) {
    if (!V.is_radial()) throw NotRadial("funk_hecke_spectrum: radial potentials only");
    if (l_max < 0) throw ConfigError("funk_hecke_spectrum: l_max >= 0 required");
    const int d = symbol.dim();
    const Real k0 = symbol.fermi_radius();
    Rule1D rule = gegenbauer_rule(d, quad_points);
    const Real area = d == 2 ? 2.0 : sphere_area(d - 1);  // |S^{d-2}|, two points for d=2
    const Real alpha = 0.5 * (d - 2);

    // kernel values at the quadrature nodes
    std::vector<Complex> kv(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        Real dist = k0 * std::sqrt(std::max(0.0, 2.0 - 2.0 * rule.nodes[q]));
        kv[q] = V.fourier_radial(dist);
    }

    std::vector<FunkHeckeEntry> out;
    out.reserve(l_max + 1);
    for (int l = 0; l <= l_max; ++l) {
        Complex acc = 0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            acc += rule.weights[q] * kv[q] * gegenbauer_normalized(l, alpha, rule.nodes[q]);
        Real a_l = area * acc.real();
        if (symbol.convention() == MeasureConvention::weighted_ds)
            a_l /= std::abs(symbol.p_prime(k0));
        // dim of degree-l spherical harmonics: (2l+d-2)/(l+d-2) binom(l+d-2, l)
        int mult = 1;
        if (l > 0) {
            Real b = 1;
            for (int i = 1; i <= l; ++i) b *= static_cast<Real>(d - 2 + i) / i;
            mult = static_cast<int>(std::lround((2.0 * l + d - 2.0) / (l + d - 2.0) * b));
        }
        out.push_back({l, a_l, mult});
    }
    return out;
}

SpectralResult vs_spectrum(const OperatorMatrix& M, int k, const std::vector<Real>& schatten_ps) {
    const int n = M.n();
    if (k > n) throw ConfigError("vs_spectrum: k <= n required");
    SpectralResult res;

    if (M.symmetry == OperatorMatrix::Symmetry::hermitian) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.a);
        if (es.info() != Eigen::Success)
            throw NoConvergence("vs_spectrum: hermitian eigensolver failed");
        // ascending -> descending
        const auto& ev = es.eigenvalues();
        res.eigenvalues.resize(n);
        for (int i = 0; i < n; ++i) res.eigenvalues[i] = ev(n - 1 - i);
        if (k > 0) {
            Eigen::MatrixXcd vecs(n, k);
            for (int i = 0; i < k; ++i) vecs.col(i) = es.eigenvectors().col(n - 1 - i);
            res.eigenvectors = std::move(vecs);
        }
        res.singular_values.resize(n);
        for (int i = 0; i < n; ++i) res.singular_values[i] = std::abs(ev(i));
        std::sort(res.singular_values.rbegin(), res.singular_values.rend());
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.a, /*computeEigenvectors=*/k > 0);
        if (es.info() != Eigen::Success)
            throw NoConvergence("vs_spectrum: general eigensolver failed");
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        const auto& ev = es.eigenvalues();
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return ev(a).real() > ev(b).real(); });
        res.eigenvalues.resize(n);
        for (int i = 0; i < n; ++i) res.eigenvalues[i] = ev(idx[i]);
        if (k > 0) {
            Eigen::MatrixXcd vecs(n, k);
            for (int i = 0; i < k; ++i) vecs.col(i) = es.eigenvectors().col(idx[i]);
            res.eigenvectors = std::move(vecs);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M.a);
        res.singular_values.assign(svd.singularValues().data(),
                                   svd.singularValues().data() + n);
    }
    for (Real p : schatten_ps) res.schatten[p] = res.schatten_norm(p);
    return res;
}

std::vector<Real> mollified_limit_check(const Potential& V, const SphereQuadrature& quad,
                                        const KineticSymbol& symbol, int n_steps) {
    OperatorMatrix M = assemble_vs(V, quad, symbol);
    const std::size_t n = quad.size();
    const Real k0 = symbol.fermi_radius();
    std::vector<Real> out;
    out.reserve(n_steps);
    Point diff(quad.d);
    for (int step = 1; step <= n_steps; ++step) {
        Real delta = std::pow(2.0, -step);
        Eigen::MatrixXcd Mn(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                Real dd = 0;
                for (int k = 0; k < quad.d; ++k) {
                    diff[k] = k0 * (quad.nodes[i][k] - quad.nodes[j][k]);
                    dd += diff[k] * diff[k];
                }
                // Gaussian mollifier: hat V_n = hat V * exp(-pi delta^2 |zeta|^2)
                Mn(i, j) = M.a(i, j) * std::exp(-kPi * delta * delta * dd);
            }
        }
        Eigen::MatrixXcd D = Mn - M.a;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
        out.push_back(svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
    }
    return out;
}

}  // namespace fswc
