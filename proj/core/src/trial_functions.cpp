#include "fswc/trial_functions.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fswc/gauss.hpp"
#include "fswc/quadrature.hpp"

#include <functional>
#include <limits>

namespace fswc {

// ---------------------------------------------------------------------------
// fixed bump profile: g(u) = eta(|u|), eta(t) = exp(-1/(1-t^2)) on (-1,1);
// G_d = g * g (d-dimensional radial autocorrelation), chihat = B (A^d) G_d(A r)
// ---------------------------------------------------------------------------

namespace {

Real eta(Real t) {
    Real t2 = t * t;
    return t2 < 1.0 ? std::exp(-1.0 / (1.0 - t2)) : 0.0;
}

struct BumpProfile {
    int d;
    Real A = 2.0;
    Real B = 0.0;
    std::vector<Real> G;   // G_d(r) on r in [0,2], uniform grid
    std::vector<Real> gv;  // radial g^vee(rho) on [0, 3], uniform grid
    Real G_step = 0, gv_step = 0;

    Real G_at(Real r) const {
        if (r >= 2.0 || r < 0) return 0.0;
        Real u = r / G_step;
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), G.size() - 2);
        Real f = u - i;
        return (1 - f) * G[i] + f * G[i + 1];
    }
};

BumpProfile build_profile(int d) {
    BumpProfile P;
    P.d = d;
    const int ng = 2001;
    P.G.assign(ng, 0.0);
    P.G_step = 2.0 / (ng - 1);
    Rule1D g32 = gauss_legendre(32, 0.0, 1.0);

    if (d == 3) {
        // radial 3D autocorrelation: G(r) = (2 pi / r) int s g(s) [Q(min(r+s,1)) - Q(|r-s|)] ds,
        // Q(t) = int_0^t s g(s) ds
        auto Q = [&](Real t) {
            t = std::clamp(t, 0.0, 1.0);
            Real acc = 0;
            for (std::size_t q = 0; q < g32.size(); ++q) {
                Real s = g32.nodes[q] * t;
                acc += g32.weights[q] * t * s * eta(s);
            }
            return acc;
        };
        for (int i = 0; i < ng; ++i) {
            Real r = i * P.G_step;
            if (r < 1e-9) {
                Real acc = 0;  // G(0) = |S^{d-1}| int s^2 g^2
                for (std::size_t q = 0; q < g32.size(); ++q) {
                    Real s = g32.nodes[q];
                    acc += g32.weights[q] * s * s * sqr(eta(s));
                }
                P.G[i] = 4.0 * kPi * acc;
                continue;
            }
            Real acc = 0;
            for (std::size_t q = 0; q < g32.size(); ++q) {
                Real s = g32.nodes[q];
                acc += g32.weights[q] * s * eta(s) *
                       (Q(std::min(r + s, 1.0)) - Q(std::abs(r - s)));
            }
            P.G[i] = kTwoPi / r * acc;
        }
    } else if (d == 2) {
        // G(r) = int_0^1 s g(s) int_0^{2pi} g(sqrt(r^2+s^2-2 r s cos a)) da ds
        Rule1D ga = gauss_legendre(48, 0.0, kTwoPi);
        for (int i = 0; i < ng; ++i) {
            Real r = i * P.G_step;
            Real acc = 0;
            for (std::size_t q = 0; q < g32.size(); ++q) {
                Real s = g32.nodes[q];
                Real inner = 0;
                for (std::size_t a = 0; a < ga.size(); ++a) {
                    Real dist2 = r * r + s * s - 2 * r * s * std::cos(ga.nodes[a]);
                    inner += ga.weights[a] * eta(std::sqrt(std::max(0.0, dist2)));
                }
                acc += g32.weights[q] * s * eta(s) * inner;
            }
            P.G[i] = acc;
        }
    } else {
        throw UnsupportedDimension("CapPacket: d in {2,3}");
    }

    // radial g^vee and the chi >= 1_{B(0,1)} normalization
    const int nv = 601;
    P.gv.assign(nv, 0.0);
    P.gv_step = 3.0 / (nv - 1);
    for (int i = 0; i < nv; ++i) {
        Real rho = i * P.gv_step;
        Real acc = 0;
        if (d == 3) {
            for (std::size_t q = 0; q < g32.size(); ++q) {
                Real s = g32.nodes[q];
                Real z = kTwoPi * rho * s;
                Real sinc = z < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
                acc += g32.weights[q] * 4.0 * kPi * s * s * eta(s) * sinc;
            }
        } else {
            for (std::size_t q = 0; q < g32.size(); ++q) {
                Real s = g32.nodes[q];
                acc += g32.weights[q] * kTwoPi * s * eta(s) * bessel_j(0.0, kTwoPi * rho * s);
            }
        }
        P.gv[i] = acc;
    }
    Real min_gv2 = std::numeric_limits<Real>::max();
    for (Real r = 0; r <= 1.0 + 1e-12; r += 0.01) {
        Real u = r / P.A / P.gv_step;
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), P.gv.size() - 2);
        Real f = u - i;
        Real v = (1 - f) * P.gv[i] + f * P.gv[i + 1];
        min_gv2 = std::min(min_gv2, v * v);
    }
    if (!(min_gv2 > 0)) throw Error("CapPacket profile: g^vee vanishes inside the unit ball");
    P.B = 1.0 / min_gv2;
    return P;
}

const BumpProfile& profile(int d) {
    static std::mutex mtx;
    static std::vector<std::unique_ptr<BumpProfile>> cache;
    std::lock_guard<std::mutex> lk(mtx);
    for (auto& p : cache)
        if (p->d == d) return *p;
    cache.push_back(std::make_unique<BumpProfile>(build_profile(d)));
    return *cache.back();
}

}  // namespace

// ---------------------------------------------------------------------------
// CapPacket
// ---------------------------------------------------------------------------

CapPacket::CapPacket(int d, Real R, Point direction, bool symmetrized)
    : d_(d), R_(R), dir_(std::move(direction)), symm_(symmetrized) {
    if (d != 2 && d != 3) throw UnsupportedDimension("CapPacket: d in {2,3}");
    if (!(R >= 4)) throw ConfigError("CapPacket: R >= 4 required");
    if (static_cast<int>(dir_.size()) != d) throw DimensionMismatch("CapPacket: direction");
    Real nn = std::sqrt(norm2(dir_));
    if (!(nn > 0)) throw ConfigError("CapPacket: zero direction");
    for (Real& v : dir_) v /= nn;
    (void)profile(d);  // build tables eagerly

    // orthonormal frame with frame_[0] = dir
    frame_.push_back(dir_);
    if (d == 2) {
        frame_.push_back({-dir_[1], dir_[0]});
    } else {
        Point u = std::abs(dir_[2]) < 0.9 ? Point{-dir_[1], dir_[0], 0.0}
                                          : Point{0.0, -dir_[2], dir_[1]};
        Real un = std::sqrt(norm2(u));
        for (Real& v : u) v /= un;
        Point w = {dir_[1] * u[2] - dir_[2] * u[1], dir_[2] * u[0] - dir_[0] * u[2],
                   dir_[0] * u[1] - dir_[1] * u[0]};
        frame_.push_back(u);
        frame_.push_back(w);
    }
    // chihat support: |(R(xi1-1), sqrt(R) v)| <= 2/A = 1
    // |v| <= vmax with vmax^2 + R^2 (vmax^2/2)^2 <= 1 (margin included below)
    Real c = 1.0;
    for (int it = 0; it < 40; ++it) c = std::sqrt(1.0 / (1.0 + c * c / 4.0 * (1.0 + c * c / R_)));
    vmax_ = c / std::sqrt(R_);
}

Real CapPacket::cap_angular_radius() const { return std::asin(std::min(1.0, vmax_)) * 1.05; }

Complex CapPacket::phi(const Point& xi) const {
    if (static_cast<int>(xi.size()) != d_) throw DimensionMismatch("CapPacket::phi");
    const BumpProfile& P = profile(d_);
    auto eval_one = [&](int sign) {
        Real x1 = 0;
        for (int k = 0; k < d_; ++k) x1 += xi[k] * frame_[0][k] * sign;
        Real v2 = std::max(0.0, 1.0 - x1 * x1);
        Real u2 = sqr(R_ * (x1 - 1.0)) + R_ * v2;
        Real r = std::sqrt(u2);
        return std::pow(R_, 0.25 * (d_ - 1)) * std::pow(P.A, d_) * P.B * P.G_at(P.A * r);
    };
    if (!symm_) return eval_one(+1);
    return 0.5 * (eval_one(+1) + eval_one(-1));
}

Complex CapPacket::cap_integral(const Point& x, bool positive_cap) const {
    // (phi dw)^vee(x) over the single cap at +-dir in graph coordinates
    const BumpProfile& P = profile(d_);
    const int sign = positive_cap ? +1 : -1;
    // phase scale across the cap decides the quadrature order
    Real x_par = 0, x_perp2 = 0;
    for (int k = 0; k < d_; ++k) x_par += x[k] * frame_[0][k];
    x_perp2 = std::max(0.0, norm2(x) - x_par * x_par);
    Real phase_range = std::abs(x_par) * (vmax_ * vmax_) + std::sqrt(x_perp2) * vmax_ + 2.0;
    int n_rad = std::min(160, std::max(14, static_cast<int>(2.2 * phase_range)));

    const Real amp = std::pow(R_, 0.25 * (d_ - 1)) * std::pow(P.A, d_) * P.B;
    Complex acc = 0;
    if (d_ == 2) {
        Rule1D gr = gauss_legendre(2 * n_rad, -vmax_, vmax_);
        for (std::size_t q = 0; q < gr.size(); ++q) {
            Real v = gr.nodes[q];
            Real x1 = std::sqrt(1.0 - v * v);
            Real u = std::sqrt(sqr(R_ * (x1 - 1.0)) + R_ * v * v);
            Real prof = P.G_at(P.A * u);
            if (prof == 0) continue;
            Point xi(2);
            for (int k = 0; k < 2; ++k) xi[k] = sign * (x1 * frame_[0][k] + v * frame_[1][k]);
            Real ph = 0;
            for (int k = 0; k < 2; ++k) ph += x[k] * xi[k];
            acc += gr.weights[q] / x1 * prof * std::polar(1.0, kTwoPi * ph);
        }
    } else {
        Rule1D gr = gauss_legendre(n_rad, 0.0, vmax_);
        int n_ang = std::max(20, 2 * n_rad);
        for (std::size_t q = 0; q < gr.size(); ++q) {
            Real rv = gr.nodes[q];
            Real x1 = std::sqrt(1.0 - rv * rv);
            Real u = std::sqrt(sqr(R_ * (x1 - 1.0)) + R_ * rv * rv);
            Real prof = P.G_at(P.A * u);
            if (prof == 0) continue;
            for (int aq = 0; aq < n_ang; ++aq) {
                Real a = kTwoPi * aq / n_ang;
                Real v1 = rv * std::cos(a), v2 = rv * std::sin(a);
                Point xi(3);
                for (int k = 0; k < 3; ++k)
                    xi[k] = sign * (x1 * frame_[0][k] + v1 * frame_[1][k] + v2 * frame_[2][k]);
                Real ph = 0;
                for (int k = 0; k < 3; ++k) ph += x[k] * xi[k];
                acc += gr.weights[q] * rv * (kTwoPi / n_ang) / x1 * prof *
                       std::polar(1.0, kTwoPi * ph);
            }
        }
    }
    return amp * acc;
}

Complex CapPacket::extension(const Point& x) const {
    if (static_cast<int>(x.size()) != d_) throw DimensionMismatch("CapPacket::extension");
    if (!symm_) return cap_integral(x, true);
    Complex a = cap_integral(x, true);
    Complex b = cap_integral(x, false);
    return 0.5 * (a + b);
}

Complex CapPacket::extension_tube(Real s, Real rho) const {
    Point x(d_, 0.0);
    for (int k = 0; k < d_; ++k) x[k] = s * frame_[0][k] + rho * frame_[1][k];
    return extension(x);
}

Real CapPacket::l2_norm_sq() const {
    const BumpProfile& P = profile(d_);
    const Real amp = std::pow(R_, 0.25 * (d_ - 1)) * std::pow(P.A, d_) * P.B;
    Real acc = 0;
    if (d_ == 2) {
        Rule1D gr = gauss_legendre(64, -vmax_, vmax_);
        for (std::size_t q = 0; q < gr.size(); ++q) {
            Real v = gr.nodes[q];
            Real x1 = std::sqrt(1.0 - v * v);
            Real u = std::sqrt(sqr(R_ * (x1 - 1.0)) + R_ * v * v);
            acc += gr.weights[q] / x1 * sqr(amp * P.G_at(P.A * u));
        }
    } else {
        Rule1D gr = gauss_legendre(64, 0.0, vmax_);
        for (std::size_t q = 0; q < gr.size(); ++q) {
            Real rv = gr.nodes[q];
            Real x1 = std::sqrt(1.0 - rv * rv);
            Real u = std::sqrt(sqr(R_ * (x1 - 1.0)) + R_ * rv * rv);
            acc += gr.weights[q] * kTwoPi * rv / x1 * sqr(amp * P.G_at(P.A * u));
        }
    }
    // the symmetrized packet psi = (phi_+ + phi_-)/2 has disjoint cap supports
    return symm_ ? 0.5 * acc : acc;
}

CapPacket knapp_packet(int d, Real R, const Point& direction, bool symmetrized) {
    return CapPacket(d, R, direction, symmetrized);
}

// ---------------------------------------------------------------------------
// quadratic-form certificate
// ---------------------------------------------------------------------------

namespace {

struct EnvelopeTable {
    // chi-tilde(s, rho) = e^{-2 pi i s} (phi_+ dw)^vee(s n + rho m) on a tensor grid
    std::vector<Complex> val;
    int ns = 0, nr = 0;
    Real s_max = 0, r_max = 0;

    Complex at(Real s, Real rho) const {
        Real as = std::abs(s);  // chi-tilde(-s, rho) = conj(chi-tilde(s, rho))
        bool conj = s < 0;
        Real u = std::min(as / s_max, 1.0) * (ns - 1);
        Real v = std::min(rho / r_max, 1.0) * (nr - 1);
        int i = std::min(static_cast<int>(u), ns - 2);
        int j = std::min(static_cast<int>(v), nr - 2);
        Real fu = u - i, fv = v - j;
        auto g = [&](int a, int b) { return val[static_cast<std::size_t>(a) * nr + b]; };
        Complex out = (1 - fu) * ((1 - fv) * g(i, j) + fv * g(i, j + 1)) +
                      fu * ((1 - fv) * g(i + 1, j) + fv * g(i + 1, j + 1));
        return conj ? std::conj(out) : out;
    }
};

EnvelopeTable build_envelope(const CapPacket& packet, Real s_max, Real r_max) {
    EnvelopeTable T;
    T.ns = 257;
    T.nr = 65;
    T.s_max = s_max;
    T.r_max = r_max;
    T.val.resize(static_cast<std::size_t>(T.ns) * T.nr);
    CapPacket single(packet.dim(), packet.scale(), packet.direction(), false);
    for (int i = 0; i < T.ns; ++i) {
        Real s = s_max * i / (T.ns - 1);
        for (int j = 0; j < T.nr; ++j) {
            Real rho = r_max * j / (T.nr - 1);
            Complex e = single.extension_tube(s, rho);
            T.val[static_cast<std::size_t>(i) * T.nr + j] = std::polar(1.0, -kTwoPi * s) * e;
        }
    }
    return T;
}

}  // namespace

KnappCertificate knapp_quadratic_form(const Potential& V, const CapPacket& packet, Real M,
                                      const KnappOptions& opts) {
    if (!(M >= 2)) throw ConfigError("knapp_quadratic_form: M >= 2 required");
    const int d = packet.dim();
    const Real R = packet.scale();

    // integration window: min(M, kappa) T (the packet mass lives in ~T)
    const Real kap = std::min(M, opts.kappa);
    const Real s_max = kap * R;
    const Real r_max = kap * std::sqrt(R);
    EnvelopeTable env = build_envelope(packet, s_max * 1.001, r_max * 1.001);

    // axisymmetric reduction: x = s n + rho m; V evaluated in lab coordinates
    const Point& n = packet.direction();
    Point m(d, 0.0);
    {
        // any unit normal to n
        if (d == 2) {
            m = {-n[1], n[0]};
        } else {
            m = std::abs(n[2]) < 0.9 ? Point{-n[1], n[0], 0.0} : Point{0.0, -n[2], n[1]};
            Real mn = std::sqrt(norm2(m));
            for (Real& v : m) v /= mn;
        }
    }
    const bool axisym_ok =
        V.is_radial() || (V.model() == PotentialModel::OscillatingSlab &&
                          std::abs(std::abs(n[0]) - 1.0) < 1e-12);

    Rule1D gs = gauss_legendre(8);
    Rule1D gr = gauss_legendre(6);
    const Real panel_s = 0.25;
    const Real panel_r = 0.5;
    const bool symm = packet.symmetrized();

    auto ext_sq = [&](Real s, Real rho) {
        Complex ct = env.at(s, rho);
        if (symm) {
            Real re = std::cos(kTwoPi * s) * ct.real() - std::sin(kTwoPi * s) * ct.imag();
            return re * re;
        }
        return std::norm(ct);
    };

    int n_az = axisym_ok ? 1 : 12;
    Real main = 0;
    Point x(d, 0.0);
    Point e2(d, 0.0);
    if (d == 3) {
        // third frame vector for azimuthal sampling around the tube
        e2 = {n[1] * m[2] - n[2] * m[1], n[2] * m[0] - n[0] * m[2], n[0] * m[1] - n[1] * m[0]};
    }
    for (Real s0 = -s_max; s0 < s_max - 1e-12; s0 += panel_s) {
        Real s1 = std::min(s0 + panel_s, s_max);
        for (std::size_t qs = 0; qs < gs.size(); ++qs) {
            Real s = 0.5 * (s1 - s0) * gs.nodes[qs] + 0.5 * (s0 + s1);
            Real ws = 0.5 * (s1 - s0) * gs.weights[qs];
            for (Real r0 = 0; r0 < r_max - 1e-12; r0 += panel_r) {
                Real r1 = std::min(r0 + panel_r, r_max);
                for (std::size_t qr = 0; qr < gr.size(); ++qr) {
                    Real rho = 0.5 * (r1 - r0) * gr.nodes[qr] + 0.5 * (r0 + r1);
                    Real wr = 0.5 * (r1 - r0) * gr.weights[qr];
                    Real jac = d == 3 ? kTwoPi * rho : 2.0;  // rho and -rho for d=2
                    Real E2 = ext_sq(s, rho);
                    if (E2 == 0) continue;
                    Real vsum = 0;
                    for (int az = 0; az < n_az; ++az) {
                        Real ca = 1.0, sa = 0.0;
                        if (n_az > 1) {
                            Real a = kTwoPi * az / n_az;
                            ca = std::cos(a);
                            sa = std::sin(a);
                        }
                        for (int k = 0; k < d; ++k)
                            x[k] = s * n[k] + rho * (ca * m[k] + (d == 3 ? sa * e2[k] : 0.0));
                        vsum += ((V))(x).real();
                    }
                    main += ws * wr * jac * (vsum / n_az) * E2;
                }
            }
        }
    }

    KnappCertificate cert;
    cert.R = R;
    cert.M = M;
    cert.packet_l2 = packet.l2_norm_sq();
    cert.main_term = main;

    // tail constant calibration on window-doubling probes: the measured mass of
    // V |ext|^2 between m T and 2m T, scaled by m^N
    Real amalgam = opts.amalgam;
    if (amalgam < 0) {
        AmalgamOptions ao;
        ao.relative_floor = 1e-6;
        ao.max_radius = d >= 3 ? 24 : 40;
        ao.quad_order = 6;
        AmalgamResult ar = amalgam_norm(V, ao);
        amalgam = ar.value + (std::isfinite(ar.tail_estimate) ? ar.tail_estimate : 0.0);
    }
    Real c_n = 0;
    for (Real mprobe : {1.0, 2.0}) {
        if (mprobe * 2 > kap) break;
        Real acc = 0;
        // shell between mprobe T and 2 mprobe T, coarse sampling
        int ns = 48, nr2 = 16;
        for (int i = 0; i < ns; ++i) {
            Real s = -2 * mprobe * R + 4.0 * mprobe * R * (i + 0.5) / ns;
            for (int j = 0; j < nr2; ++j) {
                Real rho = 2 * mprobe * std::sqrt(R) * (j + 0.5) / nr2;
                bool inner = std::abs(s) <= mprobe * R && rho <= mprobe * std::sqrt(R);
                if (inner) continue;
                Real jac = d == 3 ? kTwoPi * rho : 2.0;
                Real cell = (4.0 * mprobe * R / ns) * (2 * mprobe * std::sqrt(R) / nr2);
                acc += std::abs(((V))(Point(d == 3 ? Point{s, rho, 0.0} : Point{s, rho})).real()) *
                       ext_sq(std::min(std::abs(s), env.s_max * 0.999) * (s < 0 ? -1.0 : 1.0),
                              std::min(rho, env.r_max * 0.999)) *
                       jac * cell;
            }
        }
        c_n = std::max(c_n, acc * std::pow(mprobe, opts.tail_exponent) / std::max(amalgam, 1e-300));
    }
    cert.c_n = std::max(c_n, 1e-6);
    cert.tail_bound = cert.c_n * std::pow(M, -static_cast<Real>(opts.tail_exponent)) * amalgam;
    cert.total = cert.main_term - cert.tail_bound;
    cert.certified = cert.total > 0;
    return cert;
}

MultiCapResult multi_cap_certificate(const Potential& V, Real R, int K_requested,
                                     const KnappOptions& opts) {
    if (K_requested < 1) throw ConfigError("multi_cap_certificate: K >= 1 required");
    const int d = V.dim();
    const Real sep = 3.0 / std::sqrt(R);

    MultiCapResult res;
    res.K_requested = K_requested;

    // antipodal resonant pair first, then a spiral at fixed polar angle steps
    std::vector<Point> dirs;
    if (d == 2) {
        dirs.push_back({1.0, 0.0});
        if (K_requested > 1) dirs.push_back({-1.0, 0.0});
        int extra = K_requested - static_cast<int>(dirs.size());
        for (int i = 0; i < extra; ++i) {
            Real th = sep * 1.2 * (i + 1);
            if (th > kPi - sep) throw PlacementFailed("multi_cap: caps do not fit");
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        dirs.push_back({1.0, 0.0, 0.0});
        if (K_requested > 1) dirs.push_back({-1.0, 0.0, 0.0});
        // greedy spiral placement away from the poles
        Real golden = kPi * (3.0 - std::sqrt(5.0));
        int cand = 0;
        while (static_cast<int>(dirs.size()) < K_requested) {
            Real cth = 1.0 - 2.0 * (cand + 0.5) / std::max(64, 8 * K_requested);
            Real phi = golden * cand;
            ++cand;
            if (cand > 100000) throw PlacementFailed("multi_cap: caps do not fit");
            Point p{std::sqrt(1 - cth * cth) * std::cos(phi),
                    std::sqrt(1 - cth * cth) * std::sin(phi), cth};
            bool ok = true;
            for (const Point& q : dirs) {
                Real dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
                if (std::acos(std::clamp(dot, -1.0, 1.0)) < sep) ok = false;
            }
            if (ok) dirs.push_back(p);
        }
    }

    res.directions = dirs;
    Real M = std::pow(R, V.model() == PotentialModel::OscillatingSlab ? V.eps() : 0.5);
    M = std::max(2.0, M);
    for (const Point& dir : dirs) {
        CapPacket packet(d, R, dir, /*symmetrized=*/false);
        KnappCertificate cert = knapp_quadratic_form(V, packet, M, opts);
        if (cert.certified) ++res.K_achieved;
        res.per_cap.push_back(cert);
    }

    // pairwise overlaps: caps with disjoint chihat supports are exactly
    // orthogonal; verify the angular separations
    Real min_sep = kPi;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            Real dot = 0;
            for (int k = 0; k < d; ++k) dot += dirs[i][k] * dirs[j][k];
            min_sep = std::min(min_sep, std::acos(std::clamp(dot, -1.0, 1.0)));
        }
    CapPacket probe(d, R, dirs[0], false);
    res.max_overlap = min_sep > 2.0 * probe.cap_angular_radius() ? 0.0 : 1.0;
    return res;
}

// ---------------------------------------------------------------------------
// radial trial state
// ---------------------------------------------------------------------------

Real radial_trial_value(const Potential& V, const KineticSymbol& symbol, Real r_max) {
    const int d = symbol.dim();
    if (V.dim() != d) throw DimensionMismatch("radial_trial_value: dimensions");

    // spherical average of V at radius r
    std::function<Real(Real)> avg;
    if (V.is_radial()) {
        Real area = sphere_area(d);
        // radial models carry their sign in the amplitude
        avg = [&V, area](Real r) {
            Point x(V.dim(), 0.0);
            x[0] = r;
            return area * V(x).real();
        };
    } else {
        SphereQuadrature sq = build_sphere_quadrature(d, 16);
        avg = [&V, sq](Real r) {
            Real acc = 0;
            Point x(V.dim());
            for (std::size_t i = 0; i < sq.size(); ++i) {
                for (int k = 0; k < V.dim(); ++k) x[k] = r * sq.nodes[i][k];
                acc += sq.weights[i] * V(x).real();
            }
            return acc;
        };
    }

    Rule1D g8 = gauss_legendre(8);
    auto block = [&](Real a, Real b) {
        Real acc = 0;
        for (Real p0 = a; p0 < b - 1e-14;) {
            Real p1 = std::min(p0 + 1.0 / 16.0, b);  // <= 1/8 of the oscillation period
            for (std::size_t q = 0; q < g8.size(); ++q) {
                Real r = 0.5 * (p1 - p0) * g8.nodes[q] + 0.5 * (p0 + p1);
                Real w = 0.5 * (p1 - p0) * g8.weights[q];
                Real ft = unit_sphere_measure_ft(d, r);
                acc += w * std::pow(r, d - 1) * ft * ft * avg(r);
            }
            p0 = p1;
        }
        return acc;
    };

    if (r_max > 0) return block(0.0, r_max);
    Real acc = block(0.0, 2.0);
    Real prev = std::numeric_limits<Real>::infinity();
    int flat = 0;
    for (int j = 1; j < 60; ++j) {
        Real t = block(2.0 * j, 2.0 * (j + 1));
        acc += t;
        Real at = std::abs(t);
        if (at < 1e-12 * std::max(std::abs(acc), 1e-300) && j > 3) break;
        if (at > 0.9 * prev) {
            if (++flat >= 10) throw Divergent("radial_trial_value: tail does not decay");
        } else {
            flat = 0;
        }
        prev = at;
    }
    return acc;
}

}  // namespace fswc
