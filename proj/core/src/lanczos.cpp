#include "fswc/lanczos.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace fswc {

namespace {

void fill_start(std::vector<Real>& v, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (Real& x : v) x = rng.symmetric();
}

Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
    Real s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(Real c, const std::vector<Real>& x, std::vector<Real>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

Real nrm2(const std::vector<Real>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

KrylovResult lanczos_largest(const RealApply& apply, std::size_t n, const KrylovOptions& opts,
                             const std::vector<Real>* warm_start) {
    const int m = std::min<std::size_t>(opts.max_basis, n);
    const int nev = std::min(opts.nev, m - 1);
    if (nev < 1) throw ConfigError("lanczos_largest: nev >= 1 and max_basis > nev required");

    std::vector<std::vector<Real>> Q;  // orthonormal basis
    Q.reserve(m + 1);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);  // projected operator
    KrylovResult res;

    std::vector<Real> v(n), w(n);
    if (warm_start && warm_start->size() == n) {
        v = *warm_start;
    } else {
        fill_start(v, opts.seed);
    }
    Real nv = nrm2(v);
    if (!(nv > 0)) fill_start(v, opts.seed ^ 0x1234567ULL), nv = nrm2(v);
    for (Real& x : v) x /= nv;
    Q.push_back(v);

    int k_locked = 0;  // retained Ritz vectors at the head of the basis
    Real last_beta = 0;

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        // extend the basis to m vectors
        for (int j = static_cast<int>(Q.size()) - 1; j < m - 1; ++j) {
            apply(Q[j].data(), w.data());
            ++res.applies;
            // projected column (full reorthogonalization, two passes)
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    Real c = dot(Q[i], w);
                    if (pass == 0)
                        P(i, j) = c;
                    else
                        P(i, j) += c;
                    axpy(-c, Q[i], w);
                }
            }
            for (int i = 0; i <= j; ++i) P(j, i) = P(i, j);
            Real beta = nrm2(w);
            bool fresh = false;
            if (beta < 1e-14) {
                // invariant subspace: continue with a fresh orthogonal direction
                fill_start(w, opts.seed + 17 * (restart + 1) + j);
                for (int pass = 0; pass < 2; ++pass)
                    for (int i = 0; i <= j; ++i) axpy(-dot(Q[i], w), Q[i], w);
                beta = nrm2(w);
                if (beta < 1e-14) break;
                fresh = true;
            }
            for (Real& x : w) x /= beta;
            P(j + 1, j) = P(j, j + 1) = fresh ? 0.0 : beta;
            Q.push_back(w);
        }
        // last diagonal entry
        {
            int j = static_cast<int>(Q.size()) - 1;
            apply(Q[j].data(), w.data());
            ++res.applies;
            for (int i = 0; i <= j; ++i) P(i, j) = dot(Q[i], w);
            for (int i = 0; i <= j; ++i) P(j, i) = P(i, j);
            // remainder after full projection = next beta (for residual bounds)
            for (int i = 0; i <= j; ++i) axpy(-P(i, j), Q[i], w);
            last_beta = nrm2(w);
        }

        const int mm = static_cast<int>(Q.size());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.topLeftCorner(mm, mm));
        if (es.info() != Eigen::Success) throw NoConvergence("lanczos: projected eigensolve failed");

        // Ritz values descending
        std::vector<int> order(mm);
        for (int i = 0; i < mm; ++i) order[i] = mm - 1 - i;

        // residual bounds |beta * s_last|
        bool converged = true;
        for (int i = 0; i < nev; ++i) {
            Real theta = es.eigenvalues()(order[i]);
            Real bound = std::abs(last_beta * es.eigenvectors()(mm - 1, order[i]));
            if (bound > opts.tol * std::max(std::abs(theta), 1e-300)) converged = false;
        }

        int keep = std::min(nev + 4, mm - 1);
        if (converged || restart == opts.max_restarts) {
            // assemble Ritz vectors, certify residuals explicitly
            res.eigenvalues.clear();
            res.eigenvectors.clear();
            res.residuals.clear();
            for (int i = 0; i < nev; ++i) {
                Real theta = es.eigenvalues()(order[i]);
                std::vector<Real> y(n, 0.0);
                for (int q = 0; q < mm; ++q) axpy(es.eigenvectors()(q, order[i]), Q[q], y);
                Real ny = nrm2(y);
                for (Real& x : y) x /= ny;
                apply(y.data(), w.data());
                ++res.applies;
                Real rte = 0;
                for (std::size_t t = 0; t < n; ++t) rte += sqr(w[t] - theta * y[t]);
                res.eigenvalues.push_back(theta);
                res.residuals.push_back(std::sqrt(rte) / std::max(std::abs(theta), 1e-300));
                res.eigenvectors.push_back(std::move(y));
            }
            if (converged) return res;
            throw NoConvergence("lanczos_largest: residual target not reached after " +
                                std::to_string(res.applies) + " applies; best bound above tol");
        }

        // thick restart: keep top Ritz vectors plus the residual direction
        std::vector<std::vector<Real>> newQ;
        newQ.reserve(keep + 1);
        for (int i = 0; i < keep; ++i) {
            std::vector<Real> y(n, 0.0);
            for (int q = 0; q < mm; ++q) axpy(es.eigenvectors()(q, order[i]), Q[q], y);
            Real ny = nrm2(y);
            for (Real& x : y) x /= ny;
            newQ.push_back(std::move(y));
        }
        if (last_beta > 1e-14) {
            for (Real& x : w) x /= last_beta;
            newQ.push_back(w);
        }
        // projected matrix on the new basis: diag(theta) with border last_beta*s
        Eigen::MatrixXd Pn = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < keep; ++i) Pn(i, i) = es.eigenvalues()(order[i]);
        if (static_cast<int>(newQ.size()) == keep + 1) {
            for (int i = 0; i < keep; ++i) {
                Real b = last_beta * es.eigenvectors()(mm - 1, order[i]);
                Pn(i, keep) = Pn(keep, i) = b;
            }
        }
        Q = std::move(newQ);
        P = Pn;
        k_locked = keep;
        (void)k_locked;
    }
    throw NoConvergence("lanczos_largest: restart loop exit");
}

ComplexKrylovResult arnoldi_largest(const ComplexApply& apply, std::size_t n,
                                    const KrylovOptions& opts,
                                    const std::vector<Complex>* warm_start) {
    const int m = std::min<std::size_t>(opts.max_basis, n);
    const int nev = std::min(opts.nev, m - 1);
    ComplexKrylovResult res;

    auto cdot = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
        Complex s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
        return s;
    };
    auto cnrm = [&](const std::vector<Complex>& a) { return std::sqrt(std::abs(cdot(a, a))); };

    std::vector<std::vector<Complex>> Q;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m, m);
    std::vector<Complex> v(n), w(n);
    if (warm_start && warm_start->size() == n) {
        v = *warm_start;
    } else {
        SplitMix64 rng(opts.seed);
        for (Complex& x : v) x = Complex(rng.symmetric(), rng.symmetric());
    }
    Real nv = cnrm(v);
    for (Complex& x : v) x /= nv;
    Q.push_back(v);

    Real last_beta = 0;
    int mm = 0;
    for (int j = 0; j < m; ++j) {
        apply(Q[j].data(), w.data());
        ++res.applies;
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                Complex c = cdot(Q[i], w);
                if (pass == 0)
                    H(i, j) = c;
                else
                    H(i, j) += c;
                for (std::size_t t = 0; t < n; ++t) w[t] -= c * Q[i][t];
            }
        }
        Real beta = cnrm(w);
        mm = j + 1;
        last_beta = beta;
        if (j + 1 < m) {
            if (beta < 1e-14) break;
            H(j + 1, j) = beta;
            for (Complex& x : w) x /= beta;
            Q.push_back(w);
        }
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(mm, mm));
    if (es.info() != Eigen::Success) throw NoConvergence("arnoldi: projected eigensolve failed");
    std::vector<int> idx(mm);
    for (int i = 0; i < mm; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return es.eigenvalues()(a).real() > es.eigenvalues()(b).real();
    });

    for (int i = 0; i < nev && i < mm; ++i) {
        Complex theta = es.eigenvalues()(idx[i]);
        std::vector<Complex> y(n, Complex(0));
        for (int q = 0; q < mm; ++q) {
            Complex c = es.eigenvectors()(q, idx[i]);
            for (std::size_t t = 0; t < n; ++t) y[t] += c * Q[q][t];
        }
        Real ny = cnrm(y);
        for (Complex& x : y) x /= ny;
        apply(y.data(), w.data());
        ++res.applies;
        Real rte = 0;
        for (std::size_t t = 0; t < n; ++t) rte += std::norm(w[t] - theta * y[t]);
        Real rel = std::sqrt(rte) / std::max(std::abs(theta), 1e-300);
        res.eigenvalues.push_back(theta);
        res.residuals.push_back(rel);
        res.eigenvectors.push_back(std::move(y));
    }
    for (int i = 0; i < nev && i < static_cast<int>(res.residuals.size()); ++i) {
        if (res.residuals[i] > std::max(opts.tol, 1e-8))
            throw NoConvergence("arnoldi_largest: residual " + std::to_string(res.residuals[i]) +
                                " above target for eigenpair " + std::to_string(i) +
                                " (basis " + std::to_string(mm) + ")");
    }
    (void)last_beta;
    return res;
}

Real symmetric_operator_norm(const RealApply& apply, std::size_t n, Real tol, std::uint64_t seed) {
    // largest |eigenvalue| of a symmetric operator: run Lanczos on A and take
    // the extreme Ritz values at both ends
    KrylovOptions o;
    o.nev = 1;
    o.max_basis = static_cast<int>(std::min<std::size_t>(48, n));
    o.tol = tol;
    o.seed = seed;
    KrylovResult top = lanczos_largest(apply, n, o);
    // bottom end: apply -A
    RealApply neg = [&apply, n](const Real* in, Real* out) {
        apply(in, out);
        for (std::size_t i = 0; i < n; ++i) out[i] = -out[i];
    };
    KrylovResult bot = lanczos_largest(neg, n, o);
    Real hi = top.eigenvalues.empty() ? 0 : std::abs(top.eigenvalues[0]);
    Real lo = bot.eigenvalues.empty() ? 0 : std::abs(bot.eigenvalues[0]);
    return std::max(hi, lo);
}

}  // namespace fswc
