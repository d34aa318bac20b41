#include "fswc/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fswc {

SphereQuadrature build_sphere_quadrature(int d, int order) {
    Point axis(d, 0.0);
    axis[d - 1] = 1.0;
    return build_sphere_quadrature(d, order, axis);
}

SphereQuadrature build_sphere_quadrature(int d, int order, const Point& pole_axis) {
    if (d != 2 && d != 3)
        throw UnsupportedDimension(
            "build_sphere_quadrature: d in {2,3} (radial potentials in general d go "
            "through gegenbauer_rule)");
    if (order < 4) throw ConfigError("build_sphere_quadrature: order >= 4 required");
    if (static_cast<int>(pole_axis.size()) != d)
        throw DimensionMismatch("build_sphere_quadrature: pole axis dimension");

    SphereQuadrature q;
    q.d = d;
    q.order = order;

    if (d == 2) {
        int n = 2 * order;
        q.nodes.reserve(n);
        q.weights.assign(n, kTwoPi / n);
        for (int i = 0; i < n; ++i) {
            Real th = kTwoPi * i / n;
            q.nodes.push_back({std::cos(th), std::sin(th)});
        }
        return q;
    }

    // d=3: polar Gauss-Legendre (order+1 nodes in cos theta) x azimuthal trapezoid
    int np = order + 1;
    int na = 2 * (order + 1);
    Rule1D gl = gauss_legendre(np);

    // rotation taking e3 to pole_axis
    std::array<Real, 3> a{pole_axis[0], pole_axis[1], pole_axis[2]};
    Real an = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    if (!(an > 0)) throw ConfigError("build_sphere_quadrature: zero pole axis");
    for (Real& v : a) v /= an;
    // orthonormal frame (u, v, a)
    std::array<Real, 3> u{}, v{};
    if (std::abs(a[2]) < 0.9) {
        u = {-a[1], a[0], 0.0};
    } else {
        u = {0.0, -a[2], a[1]};
    }
    Real un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (Real& w : u) w /= un;
    v = {a[1] * u[2] - a[2] * u[1], a[2] * u[0] - a[0] * u[2], a[0] * u[1] - a[1] * u[0]};

    q.nodes.reserve(static_cast<std::size_t>(np) * na);
    q.weights.reserve(static_cast<std::size_t>(np) * na);
    for (int i = 0; i < np; ++i) {
        Real ct = gl.nodes[i];
        Real st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        Real wp = gl.weights[i] * (kTwoPi / na);
        for (int j = 0; j < na; ++j) {
            Real ph = kTwoPi * j / na;
            Real c1 = st * std::cos(ph), c2 = st * std::sin(ph);
            Point x(3);
            for (int k = 0; k < 3; ++k) x[k] = c1 * u[k] + c2 * v[k] + ct * a[k];
            // renormalize against rounding
            Real nn = std::sqrt(norm2(x));
            for (Real& w : x) w /= nn;
            q.nodes.push_back(std::move(x));
            q.weights.push_back(wp);
        }
    }
    return q;
}

Rule1D gegenbauer_rule(int d, int n) {
    if (d < 2) throw UnsupportedDimension("gegenbauer_rule: d >= 2 required");
    if (n < 2) throw ConfigError("gegenbauer_rule: n >= 2 required");
    return gauss_gegenbauer_weight(n, 0.5 * (d - 3));
}

Real solve_profile_radius(const KineticSymbol& symbol, Real y) {
    const Real k0 = symbol.fermi_radius();
    Real lo = 0.5 * k0, hi = 2.0 * k0;
    Real flo = symbol.p(lo) - y, fhi = symbol.p(hi) - y;
    if (flo * fhi > 0)
        throw RootNotFound("solve_profile_radius: no root in [k0/2, 2k0] at level " +
                           std::to_string(y));
    Real x = k0;
    for (int it = 0; it < 200; ++it) {
        Real f = symbol.p(x) - y;
        if (f == 0) return x;
        if (f * flo < 0)
            hi = x;
        else {
            lo = x;
            flo = f;
        }
        Real dp = symbol.p_prime(x);
        Real xn = dp != 0 ? x - f / dp : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < 1e-16 * std::max(1.0, std::abs(x))) return xn;
        x = xn;
    }
    return x;
}

ShellFamily shell_grid(const KineticSymbol& symbol, int n_t, Real e) {
    if (n_t < 8) throw ConfigError("shell_grid: n_t >= 8 required");
    if (e < 0) throw NonPositiveShift("shell_grid: e >= 0 required");
    const Real tau = symbol.tau();
    const Real ratio = 1.35;
    Real t_min = std::max(e, 1e-12) / 10.0;
    t_min = std::min(t_min, tau / 4.0);

    ShellFamily fam{symbol, {}, {}, {}, {}, ratio, t_min, n_t};
    auto edges = geometric_edges(t_min, tau, ratio, /*include_zero_stub=*/true);
    int per_panel = std::max(4, n_t / 8);
    Rule1D rule = paneled_rule(edges, per_panel);

    fam.t_nodes = rule.nodes;
    fam.t_weights = rule.weights;
    fam.r_plus.reserve(rule.size());
    fam.r_minus.reserve(rule.size());
    for (Real t : fam.t_nodes) {
        fam.r_plus.push_back(solve_profile_radius(symbol, +t));
        fam.r_minus.push_back(solve_profile_radius(symbol, -t));
    }
    return fam;
}

}  // namespace fswc
