#include "fswc/gauss.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

namespace fswc {

Rule1D gauss_legendre(int n, Real a, Real b) {
    if (n < 1) throw ConfigError("gauss_legendre: n >= 1 required");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess; the
    // on-demand GSL tables lose ~1e-10 beyond their precomputed range.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Real x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        Real dp = 0;
        for (int it = 0; it < 100; ++it) {
            Real p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                Real p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            Real dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one polishing step at the converged point
                p0 = 1.0;
                p1 = x;
                for (int k = 1; k < n; ++k) {
                    Real p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
                break;
            }
        }
        Real w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        // symmetric rule: the middle node is exactly 0
        Real p0 = 1.0, p1 = 0.0, x = 0.0;
        for (int k = 1; k < n; ++k) {
            Real p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        Real dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[n / 2] = 0.0;
        r.weights[n / 2] = 2.0 / (dp * dp);
    }
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (b - a) * r.nodes[i] + 0.5 * (a + b);
        r.weights[i] *= 0.5 * (b - a);
    }
    return r;
}

Rule1D gauss_gegenbauer_weight(int n, Real gamma) {
    if (n < 1) throw ConfigError("gauss_gegenbauer_weight: n >= 1 required");
    if (gamma <= -1.0) throw ConfigError("gauss_gegenbauer_weight: gamma > -1 required");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    if (std::abs(gamma + 0.5) < 1e-14) {
        // Chebyshev (first kind): nodes cos((2i-1)pi/2n), weights pi/n
        for (int i = 0; i < n; ++i) {
            r.nodes[i] = std::cos(kPi * (2.0 * i + 1.0) / (2.0 * n));
            r.weights[i] = kPi / n;
        }
        return r;
    }
    if (std::abs(gamma) < 1e-14) return gauss_legendre(n);
    // Golub-Welsch on the symmetric Jacobi(gamma, gamma) recurrence:
    //   b_k^2 = k (k + 2 gamma) / ((2k + 2 gamma + 1)(2k + 2 gamma - 1))
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        Real bk2 = k * (k + 2.0 * gamma) /
                   ((2.0 * k + 2.0 * gamma + 1.0) * (2.0 * k + 2.0 * gamma - 1.0));
        J(k, k - 1) = J(k - 1, k) = std::sqrt(bk2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // zeroth moment: int_{-1}^{1} (1-t^2)^gamma dt = B(1/2, gamma+1)
    Real mu0 = std::exp(std::lgamma(0.5) + std::lgamma(gamma + 1.0) - std::lgamma(gamma + 1.5));
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        Real v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

Rule1D paneled_rule(const std::vector<Real>& edges, int order) {
    Rule1D out;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        Rule1D g = gauss_legendre(order, edges[p], edges[p + 1]);
        out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
        out.weights.insert(out.weights.end(), g.weights.begin(), g.weights.end());
    }
    return out;
}

std::vector<Real> geometric_edges(Real lo, Real hi, Real ratio, bool include_zero_stub) {
    std::vector<Real> e;
    if (include_zero_stub) e.push_back(0.0);
    Real x = lo;
    e.push_back(x);
    while (x < hi) {
        x = std::min(x * ratio, hi);
        e.push_back(x);
    }
    return e;
}

Real integrate_adaptive(const std::function<Real(Real)>& f, Real a, Real b,
                        Real rel_tol, Real abs_tol) {
    struct Ws {
        gsl_integration_workspace* w;
        Ws() : w(gsl_integration_workspace_alloc(4096)) {}
        ~Ws() { gsl_integration_workspace_free(w); }
    };
    thread_local Ws ws;
    gsl_function F;
    F.function = [](double x, void* p) -> double {
        return (*static_cast<const std::function<Real(Real)>*>(p))(x);
    };
    F.params = const_cast<void*>(static_cast<const void*>(&f));
    double result = 0, abserr = 0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    int status = gsl_integration_qag(&F, a, b, abs_tol, rel_tol, 4096,
                                     GSL_INTEG_GAUSS61, ws.w, &result, &abserr);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw Divergent("integrate_adaptive: QAG failed with status " + std::to_string(status));
    return result;
}

Real sphere_area(int d) {
    if (d < 1) throw UnsupportedDimension("sphere_area: d >= 1 required");
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace fswc
