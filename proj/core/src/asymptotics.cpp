#include "fswc/asymptotics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fswc/parallel.hpp"

namespace fswc {

namespace {

struct MuEval {
    Real mu = 0;
    std::vector<Real> top;
    std::vector<Real> vec;
    Real lanczos_residual = 0;
    int applies = 0;
};

MuEval eval_mu_j(BsBox& box, Real e, int j, int extra, Real tol,
                 const std::vector<Real>* warm) {
    box.set_shift(e);
    const std::size_t n = box.size();
    KrylovOptions o;
    o.nev = j + extra;
    o.max_basis = static_cast<int>(std::min<std::size_t>(n, std::max(2 * o.nev + 18, 24)));
    o.tol = tol;
    KrylovResult r = lanczos_largest(
        [&box](const Real* in, Real* out) { box.apply_symmetrized(in, out); }, n, o, warm);
    MuEval ev;
    ev.mu = r.eigenvalues.at(j - 1);
    ev.top = r.eigenvalues;
    ev.vec = std::move(r.eigenvectors.at(j - 1));
    ev.lanczos_residual = r.residuals.at(j - 1);
    ev.applies = r.applies;
    return ev;
}

}  // namespace

CurveSample solve_e_for_lambda(const Potential& V, const KineticSymbol& symbol,
                               const BoxGrid& grid, Real lambda, int j,
                               const SolveOptions& opts) {
    if (!(lambda > 0)) throw ConfigError("solve_e_for_lambda: lambda > 0 required");
    if (j < 1) throw ConfigError("solve_e_for_lambda: j >= 1 required");
    if (!V.is_real())
        throw UnsupportedModel("solve_e_for_lambda: real potentials (symmetric path) only");
    const Real target = 1.0 / lambda;
    BsBox box(V, symbol, grid, std::max(opts.e_floor, 1e-6));

    CurveSample out;
    out.lambda = lambda;

    // bracket top: expand until mu_j(hi) < target
    Real hi = opts.e_start > 0 ? opts.e_start : 0.1 * symbol.tau();
    std::vector<Real> warm;
    MuEval ev;
    for (;;) {
        ev = eval_mu_j(box, hi, j, opts.extra_eigs, 1e-6, warm.empty() ? nullptr : &warm);
        warm = ev.vec;
        out.applies += ev.applies;
        if (ev.mu < target) break;
        hi *= 4.0;
        if (hi > opts.e_max)
            throw NoBoundState("solve_e_for_lambda: mu_j(" + std::to_string(opts.e_max) +
                               ") still above 1/lambda");
    }
    Real lo = opts.e_floor;

    // bisection in ln e; mu_j decreasing in e
    Real lln = std::log(lo), lhn = std::log(hi);
    Real mid = 0.5 * (lln + lhn);
    for (int it = 0; it < opts.max_bisections; ++it) {
        mid = 0.5 * (lln + lhn);
        Real width = lhn - lln;
        Real ltol = width > 0.5 ? 1e-6 : opts.lanczos_tol;
        ev = eval_mu_j(box, std::exp(mid), j, opts.extra_eigs, ltol, &warm);
        Real ov = 0;
        if (!warm.empty()) {
            for (std::size_t t = 0; t < warm.size(); ++t) ov += warm[t] * ev.vec[t];
            out.overlap = std::min(out.overlap, std::abs(ov));
        }
        warm = ev.vec;
        out.applies += ev.applies;
        ++out.bisections;
        Real resid = std::abs(lambda * ev.mu - 1.0);
        if (resid <= opts.tol && width < 0.5) {
            out.e = std::exp(mid);
            out.residual = resid;
            out.bs_top = ev.top;
            return out;
        }
        if (ev.mu > target)
            lln = mid;
        else
            lhn = mid;
        if (std::exp(lln) <= opts.e_floor * 2.0 && ev.mu < target) {
            // approaching the floor from above without reaching the target
            MuEval fl = eval_mu_j(box, opts.e_floor, j, opts.extra_eigs, 1e-6, &warm);
            out.applies += fl.applies;
            if (fl.mu < target)
                throw ResolutionExceeded("solve_e_for_lambda: mu_j at the e-floor " +
                                         std::to_string(fl.mu) + " is below 1/lambda = " +
                                         std::to_string(target));
        }
    }
    throw NoConvergence("solve_e_for_lambda: bisection did not certify |lambda mu - 1| <= tol");
}

EigenCurve sweep(const Potential& V, const KineticSymbol& symbol, const BoxGrid& grid,
                 const std::vector<Real>& lambda_grid, int j, const SolveOptions& opts) {
    for (std::size_t i = 0; i + 1 < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i + 1]))
            throw ConfigError("sweep: lambda grid must be strictly decreasing");
    EigenCurve curve;
    curve.j = j;
    curve.convention = symbol.convention();
    curve.samples.resize(lambda_grid.size());
    curve.sample_errors.assign(lambda_grid.size(), "");
    parallel_for(lambda_grid.size(), [&](std::size_t i) {
        try {
            curve.samples[i] = solve_e_for_lambda(V, symbol, grid, lambda_grid[i], j, opts);
        } catch (const Error& err) {
            curve.samples[i].lambda = lambda_grid[i];
            curve.samples[i].e = std::numeric_limits<Real>::quiet_NaN();
            curve.sample_errors[i] = err.what();
        }
    });
    return curve;
}

AsymptoticsReport first_order_fit(const EigenCurve& curve, Real a) {
    if (!(a > 0)) throw ConfigError("first_order_fit: a > 0 required");
    AsymptoticsReport rep;
    rep.j = curve.j;
    rep.a = a;
    Real sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const CurveSample& s : curve.samples) {
        if (!std::isfinite(s.e) || s.e <= 0) continue;
        Real x = 1.0 / s.lambda, y = std::log(1.0 / s.e);
        rep.lambda.push_back(s.lambda);
        rep.r1.push_back(std::abs(s.lambda * a * y - 1.0));
        rep.defect1.push_back(y - x / a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        Real slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        rep.fitted_a = slope != 0 ? 1.0 / slope : 0.0;
    }
    return rep;
}

AsymptoticsReport second_order_residual(const EigenCurve& curve, Real a,
                                        const std::vector<Real>& b_samples) {
    if (b_samples.size() != curve.samples.size())
        throw ConfigError("second_order_residual: b sample count mismatch");
    AsymptoticsReport rep = first_order_fit(curve, a);
    std::size_t k = 0;
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        const CurveSample& smp = curve.samples[i];
        if (!std::isfinite(smp.e) || smp.e <= 0) continue;
        Real b = b_samples[i];
        if (!(b < 0))
            throw BranchMismatch("second_order_residual: b_S^j(lambda) must be negative");
        Real s = std::log1p(1.0 / smp.e) + 1.0 / (smp.lambda * b);
        rep.b.push_back(b);
        rep.s.push_back(s);
        rep.r2.push_back(std::abs(s) * smp.lambda);
        ++k;
    }
    return rep;
}

std::vector<Real> second_order_b_samples(const Potential& V, const KineticSymbol& symbol,
                                         const SphereQuadrature& quad, const ShellFamily& shells,
                                         const BoxGrid& ws_grid, const std::vector<Real>& lambdas,
                                         int j) {
    OperatorMatrix vs = assemble_vs(V, quad, symbol);
    OperatorMatrix ws = ws_matrix(V, symbol, 0.0, quad, shells, ws_grid);
    SpectralResult vs_spec = vs_spectrum(vs, j);
    if (static_cast<int>(vs_spec.eigenvalues.size()) < j)
        throw ConfigError("second_order_b_samples: j exceeds the V_S spectrum");
    Eigen::VectorXcd uj = vs_spec.eigenvectors->col(j - 1);

    std::vector<Real> out;
    out.reserve(lambdas.size());
    for (Real lam : lambdas) {
        // paper-oriented branch eigenvalue: V_S + lambda W_S(0) (= B_S(-lambda))
        Eigen::MatrixXcd M = vs.a + lam * ws.a;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
        if (es.info() != Eigen::Success)
            throw NoConvergence("second_order_b_samples: eigensolver failed");
        int best = -1;
        Real best_ov = -1;
        for (int c = 0; c < es.eigenvectors().cols(); ++c) {
            Real ov = std::abs((uj.adjoint() * es.eigenvectors().col(c))(0, 0));
            if (ov > best_ov) {
                best_ov = ov;
                best = c;
            }
        }
        if (best_ov < 0.5)
            throw BranchMismatch("second_order_b_samples: eigenvector overlap " +
                                 std::to_string(best_ov) + " below 0.5");
        out.push_back(-es.eigenvalues()(best));
    }
    return out;
}

std::vector<int> riesz_count(const std::function<OperatorMatrix(Real)>& family, Complex center,
                             Real radius, const std::vector<Real>& kappa_samples,
                             int contour_nodes) {
    if (contour_nodes < 64) contour_nodes = 64;
    std::vector<int> ranks;
    ranks.reserve(kappa_samples.size());
    for (Real kappa : kappa_samples) {
        OperatorMatrix M = family(kappa);
        const int n = M.n();
        // contour guard: distance of every eigenvalue to the circle
        {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.a, false);
            if (es.info() != Eigen::Success)
                throw NoConvergence("riesz_count: eigensolver failed in the contour guard");
            for (int i = 0; i < n; ++i) {
                Real dist = std::abs(std::abs(es.eigenvalues()(i) - center) - radius);
                if (dist <= radius * 1e-3)
                    throw ContourTooClose("riesz_count: eigenvalue within radius*1e-3 of the "
                                          "contour at kappa=" + std::to_string(kappa));
            }
        }
        Complex acc = 0;
        for (int m = 0; m < contour_nodes; ++m) {
            Real th = kTwoPi * m / contour_nodes;
            Complex z = center + radius * std::polar(1.0, th);
            Eigen::MatrixXcd A = M.a - z * Eigen::MatrixXcd::Identity(n, n);
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
            Complex tr = lu.inverse().trace();
            acc += tr * (z - center);
        }
        // rank P = -(1/2 pi i) contour integral of tr (A - z)^{-1};
        // trapezoid on the circle: dz = i (z - c) dtheta
        Complex rank_c = -acc / static_cast<Real>(contour_nodes);
        Real rank = rank_c.real();
        Real nearest = std::lround(rank);
        if (std::abs(rank - nearest) > 1e-6 || std::abs(rank_c.imag()) > 1e-6)
            throw NonIntegerRank("riesz_count: non-integer rank " + std::to_string(rank) +
                                 " (imag " + std::to_string(rank_c.imag()) + ")");
        ranks.push_back(static_cast<int>(nearest));
    }
    return ranks;
}

}  // namespace fswc
