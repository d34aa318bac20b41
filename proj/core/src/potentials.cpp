#include "fswc/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "fswc/gauss.hpp"
#include "fswc/special.hpp"

namespace fswc {

namespace {
constexpr Real kInf = std::numeric_limits<Real>::infinity();
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

static void check_dim(int d) {
    if (d < 2) throw UnsupportedDimension("Potential: d >= 2 required");
}

Potential Potential::gaussian(int d, Complex A, Real width) {
    check_dim(d);
    if (!(width > 0)) throw ConfigError("gaussian: width > 0 required");
    Potential V;
    V.d_ = d;
    V.model_ = PotentialModel::GaussianRadial;
    V.amplitude_ = A;
    V.width_ = width;
    return V;
}

Potential Potential::ball(int d, Complex A, Real radius) {
    check_dim(d);
    if (!(radius > 0)) throw ConfigError("ball: radius > 0 required");
    Potential V;
    V.d_ = d;
    V.model_ = PotentialModel::BallIndicator;
    V.amplitude_ = A;
    V.radius_ = radius;
    return V;
}

Potential Potential::power_law(int d, Real a, Real b, Complex A) {
    check_dim(d);
    if (!(a > 0) || !(b > 0)) throw ConfigError("power_law: positive exponents required");
    if (a >= 2) throw ConfigError("power_law: a < 2 required for local L^{d/2} integrability");
    Potential V;
    V.d_ = d;
    V.model_ = PotentialModel::RadialPowerLaw;
    V.amplitude_ = A;
    V.a_ = a;
    V.b_ = b;
    return V;
}

Potential Potential::log_decay(int d, Real b, Complex A) {
    check_dim(d);
    if (!(b > 0)) throw ConfigError("log_decay: b > 0 required");
    Potential V;
    V.d_ = d;
    V.model_ = PotentialModel::LogDecay;
    V.amplitude_ = A;
    V.b_ = b;
    return V;
}

Potential Potential::oscillating_slab(int d, Real eps, Complex A) {
    check_dim(d);
    if (!(eps > 0)) throw ConfigError("oscillating_slab: eps > 0 required");
    Potential V;
    V.d_ = d;
    V.model_ = PotentialModel::OscillatingSlab;
    V.amplitude_ = A;
    V.eps_ = eps;
    return V;
}

Potential Potential::grid_sampled(int d, Real box_side, int n_side, std::vector<Complex> samples) {
    check_dim(d);
    if (!(box_side > 0)) throw ConfigError("grid_sampled: box side > 0 required");
    std::size_t expect = 1;
    for (int i = 0; i < d; ++i) expect *= static_cast<std::size_t>(n_side);
    if (samples.size() != expect) throw ConfigError("grid_sampled: sample count != n_side^d");
    for (const Complex& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ConfigError("grid_sampled: samples must be finite");
    Potential V;
    V.d_ = d;
    V.model_ = PotentialModel::GridSampled;
    V.box_L_ = box_side;
    V.n_side_ = n_side;
    V.samples_ = std::move(samples);
    return V;
}

Potential Potential::with_argument_scale(Real s) const {
    if (!(s > 0)) throw ConfigError("with_argument_scale: s > 0 required");
    Potential V = *this;
    V.arg_scale_ *= s;
    return V;
}

Potential Potential::scaled(Complex c) const {
    Potential V = *this;
    V.amplitude_ *= c;
    if (model_ == PotentialModel::GridSampled)
        for (Complex& v : V.samples_) v *= c;
    return V;
}

std::string Potential::describe() const {
    std::ostringstream os;
    switch (model_) {
        case PotentialModel::GaussianRadial: os << "gaussian(w=" << width_ << ")"; break;
        case PotentialModel::BallIndicator: os << "ball(rho=" << radius_ << ")"; break;
        case PotentialModel::RadialPowerLaw: os << "power(a=" << a_ << ",b=" << b_ << ")"; break;
        case PotentialModel::LogDecay: os << "logdecay(b=" << b_ << ")"; break;
        case PotentialModel::OscillatingSlab: os << "slab(eps=" << eps_ << ")"; break;
        case PotentialModel::GridSampled: os << "grid(L=" << box_L_ << ",n=" << n_side_ << ")"; break;
    }
    os << " d=" << d_ << " A=" << amplitude_.real();
    if (amplitude_.imag() != 0) os << "+" << amplitude_.imag() << "i";
    return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

bool Potential::is_radial() const {
    switch (model_) {
        case PotentialModel::GaussianRadial:
        case PotentialModel::BallIndicator:
        case PotentialModel::RadialPowerLaw:
        case PotentialModel::LogDecay:
            return true;
        default:
            return false;
    }
}

bool Potential::is_real() const {
    if (amplitude_.imag() != 0) return false;
    if (model_ == PotentialModel::GridSampled)
        for (const Complex& v : samples_)
            if (v.imag() != 0) return false;
    return true;
}

Real Potential::radial_abs(Real r) const {
    r /= arg_scale_;
    const Real A = std::abs(amplitude_);
    switch (model_) {
        case PotentialModel::GaussianRadial:
            return A * std::exp(-kPi * sqr(r / width_));
        case PotentialModel::BallIndicator:
            return r <= radius_ ? A : 0.0;
        case PotentialModel::RadialPowerLaw:
            if (r == 0) return kInf;
            return A * (r < 1 ? std::pow(r, -a_) : std::pow(r, -b_));
        case PotentialModel::LogDecay:
            if (r == 0) return kInf;
            return A / r * std::pow(1.0 + std::abs(std::log(r)), -b_);
        default:
            throw UnsupportedModel("radial_abs: model is not radial");
    }
}

Real Potential::angular_sup(Real r) const {
    if (is_radial()) return radial_abs(r);
    if (model_ == PotentialModel::OscillatingSlab) {
        // envelope: minimize |x1| + |x'|^2 on the sphere of radius r; the
        // minimum of u + (r^2 - u^2) over u in [0, r] sits at an endpoint.
        Real rr = r / arg_scale_;
        Real m = std::min(rr, rr * rr);
        return std::abs(amplitude_) * std::pow(1.0 + m, -(1.0 + eps_));
    }
    // sampled supremum over directions (grid models)
    Real best = 0;
    const int n_dir = 64;
    SplitMix64 rng(0x5ab5u);
    for (int i = 0; i < n_dir; ++i) {
        Point w(d_);
        Real n2 = 0;
        for (int k = 0; k < d_; ++k) {
            // Box-Muller-ish direction from two uniforms
            Real u = std::max(rng.uniform(), 1e-12), v = rng.uniform();
            w[k] = std::sqrt(-2 * std::log(u)) * std::cos(kTwoPi * v);
            n2 += w[k] * w[k];
        }
        for (int k = 0; k < d_; ++k) w[k] *= r / std::sqrt(n2);
        best = std::max(best, std::abs((*this)(w)));
    }
    return best;
}

Complex Potential::operator()(const Point& x) const {
    if (static_cast<int>(x.size()) != d_)
        throw DimensionMismatch("eval_potential: point has wrong dimension");
    for (Real v : x)
        if (!std::isfinite(v)) throw ConfigError("eval_potential: x must be finite");
    Point xs(x);
    for (Real& v : xs) v /= arg_scale_;
    switch (model_) {
        case PotentialModel::GaussianRadial:
            return amplitude_ * std::exp(-kPi * norm2(xs) / sqr(width_));
        case PotentialModel::BallIndicator:
            return norm2(xs) <= sqr(radius_) ? amplitude_ : Complex(0.0);
        case PotentialModel::RadialPowerLaw: {
            Real r = std::sqrt(norm2(xs));
            if (r == 0) return Complex(kInf);
            return amplitude_ * (r < 1 ? std::pow(r, -a_) : std::pow(r, -b_));
        }
        case PotentialModel::LogDecay: {
            Real r = std::sqrt(norm2(xs));
            if (r == 0) return Complex(kInf);
            return amplitude_ / r * std::pow(1.0 + std::abs(std::log(r)), -b_);
        }
        case PotentialModel::OscillatingSlab: {
            Real x1 = xs[0], t2 = 0;
            for (int k = 1; k < d_; ++k) t2 += xs[k] * xs[k];
            return amplitude_ * std::cos(4 * kPi * x1) *
                   std::pow(1.0 + std::abs(x1) + t2, -(1.0 + eps_));
        }
        case PotentialModel::GridSampled: {
            // multilinear interpolation inside the box, zero outside
            const Real h = box_L_ / n_side_;
            std::vector<Real> f(d_);
            std::vector<int> i0(d_);
            for (int k = 0; k < d_; ++k) {
                Real u = (xs[k] + 0.5 * box_L_) / h - 0.5;  // samples at cell centers
                if (u < -0.5 || u > n_side_ - 0.5) return 0.0;
                Real fl = std::floor(u);
                i0[k] = static_cast<int>(fl);
                f[k] = u - fl;
            }
            Complex acc = 0;
            for (int corner = 0; corner < (1 << d_); ++corner) {
                Real wgt = 1;
                std::size_t idx = 0;
                bool ok = true;
                for (int k = 0; k < d_; ++k) {
                    int bit = (corner >> k) & 1;
                    int ik = i0[k] + bit;
                    wgt *= bit ? f[k] : 1 - f[k];
                    if (ik < 0 || ik >= n_side_) {
                        ok = false;
                        break;
                    }
                    idx = idx * n_side_ + ik;
                }
                if (ok && wgt != 0) acc += wgt * samples_[idx];
            }
            return acc;
        }
    }
    throw UnsupportedModel("eval_potential: unknown model");
}

std::optional<Real> Potential::support_radius() const {
    switch (model_) {
        case PotentialModel::GaussianRadial:
            // |V| < 1e-8 |A| beyond w sqrt(ln(1e8)/pi)
            return arg_scale_ * width_ * std::sqrt(std::log(1e8) / kPi);
        case PotentialModel::BallIndicator:
            return arg_scale_ * radius_;
        case PotentialModel::GridSampled:
            return 0.5 * box_L_ * std::sqrt(static_cast<Real>(d_)) * arg_scale_;
        default:
            return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Fourier transforms
// ---------------------------------------------------------------------------

bool Potential::has_analytic_fourier() const {
    return model_ == PotentialModel::GaussianRadial || model_ == PotentialModel::BallIndicator;
}

bool Potential::has_sqrt_fourier() const { return has_analytic_fourier(); }

static Real ball_hat(int d, Real rho, Real k) {
    // hat(1_{B_rho})(k) = (rho/k)^{d/2} J_{d/2}(2 pi rho k), value at 0 = vol(B_rho)
    if (k < 1e-9) {
        Real vol = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(rho, d);
        if (k == 0) return vol;
    }
    if (2 * kPi * rho * k < 1e-4) {
        // small-argument series of (rho/k)^{d/2} J_{d/2}(2 pi rho k)
        Real z = kPi * rho * k;
        Real vol = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(rho, d);
        return vol * (1.0 - z * z / (0.5 * d + 1.0) + 0.5 * z * z * z * z / ((0.5 * d + 1.0) * (0.5 * d + 2.0)));
    }
    return std::pow(rho / k, 0.5 * d) * bessel_j(0.5 * d, 2 * kPi * rho * k);
}

// --- OscillatingSlab transform, d=3 ------------------------------------------
//
// hat V(z) = A * int dx1 cos(4 pi x1) e^{-2 pi i x1 z1} W(x1, |z'|),
// W(x1,k) = int_{R^2} (c+|x'|^2)^{-(1+eps)} e^{-2 pi i x'.z'} dx'
//         = 2 pi (pi k)^eps c^{-eps/2} K_eps(2 pi k sqrt(c)) / Gamma(1+eps),
// with c = 1+|x1| (Hankel pair; k=0 limit (pi/eps) c^{-eps}).
// Cached on a (z1, k) table; queries restricted to |z| <~ 2, which is all the
// sphere-kernel assembly needs.

namespace {

// int_0^inf cos(w x) (1+x)^{-eps} dx: direct panels to X0 ~ 6/w, then two-term
// integration-by-parts tail.
Real cosine_decay_integral(Real w, Real eps) {
    if (w <= 0) return kInf;
    Real X0 = std::max(6.0 / w, 8.0);
    Real panel = std::min(0.25, kPi / (8.0 * w));
    Real acc = 0;
    Rule1D g = gauss_legendre(8);
    Real x = 0;
    while (x < X0) {
        Real b = std::min(x + panel, X0);
        for (std::size_t q = 0; q < g.size(); ++q) {
            Real t = 0.5 * (b - x) * g.nodes[q] + 0.5 * (x + b);
            acc += 0.5 * (b - x) * g.weights[q] * std::cos(w * t) * std::pow(1.0 + t, -eps);
        }
        x = b;
    }
    // tail: -sin(wX)/(w) (1+X)^{-eps} ... IBP twice
    Real c = 1.0 + X0;
    acc += -std::sin(w * X0) / w * std::pow(c, -eps) * -1.0;  // [sin(wx)/w (1+x)^-eps]_{X0}^inf
    acc += eps / (w * w) * std::cos(w * X0) * std::pow(c, -(eps + 1.0));
    return acc;
}

struct SlabTable {
    Real eps;
    std::vector<Real> z1s, ks;
    std::vector<Real> F;  // row-major [ik][iz]
    Real at(Real z1, Real k) const;
};

Real SlabTable::at(Real z1, Real k) const {
    z1 = std::abs(z1);
    if (z1 > z1s.back() || k > ks.back())
        throw UnsupportedModel("oscillating_slab fourier: argument outside the tabulated |zeta|<=2 range");
    auto bracket = [](const std::vector<Real>& xs, Real x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        return std::min<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin() - 1, 0), xs.size() - 2);
    };
    std::size_t iz = bracket(z1s, z1), ik = bracket(ks, k);
    Real tz = (z1 - z1s[iz]) / (z1s[iz + 1] - z1s[iz]);
    Real tk = (k - ks[ik]) / (ks[ik + 1] - ks[ik]);
    auto v = [&](std::size_t a, std::size_t b) { return F[a * z1s.size() + b]; };
    return (1 - tk) * ((1 - tz) * v(ik, iz) + tz * v(ik, iz + 1)) +
           tk * ((1 - tz) * v(ik + 1, iz) + tz * v(ik + 1, iz + 1));
}

const SlabTable& slab_table(Real eps) {
    static std::mutex mtx;
    static std::vector<SlabTable> cache;
    std::lock_guard<std::mutex> lk(mtx);
    for (const auto& t : cache)
        if (t.eps == eps) return t;

    SlabTable T;
    T.eps = eps;
    // z1 grid: uniform to 1.8 then graded toward the 2.0 resonance, up to 1.9995
    for (Real z = 0; z <= 1.8 + 1e-12; z += 0.02) T.z1s.push_back(z);
    for (Real dlt = 0.2; dlt > 5.5e-4; dlt *= 0.82) T.z1s.push_back(2.0 - dlt);
    T.z1s.push_back(2.0 - 4.5e-4);
    std::sort(T.z1s.begin(), T.z1s.end());
    // k grid: 0 plus geometric
    T.ks.push_back(0.0);
    for (Real k = 0.015; k < 2.2; k *= 1.18) T.ks.push_back(k);
    T.ks.push_back(2.2);

    const std::size_t nz = T.z1s.size(), nk = T.ks.size();
    T.F.assign(nz * nk, 0.0);

    Rule1D g8 = gauss_legendre(8);
    for (std::size_t ik = 0; ik < nk; ++ik) {
        Real k = T.ks[ik];
        if (k == 0.0) {
            for (std::size_t iz = 0; iz < nz; ++iz) {
                Real z1 = T.z1s[iz];
                Real s = 0;
                for (int sgn : {-1, +1}) {
                    Real w = kTwoPi * std::abs(2.0 + sgn * z1);
                    s += cosine_decay_integral(w, eps);
                }
                T.F[ik * nz + iz] = (kPi / eps) * s;
            }
            continue;
        }
        // x1 panels shared across the row; W decays like exp(-2 pi k sqrt(1+x1))
        Real Xmax = std::min(sqr(std::log(1e7) / (kTwoPi * k)), 3000.0);
        Real panel = 0.125;
        std::vector<Real> xs, ws, Wv;
        Real x = 0;
        while (x < Xmax) {
            Real b = std::min(x + panel, Xmax);
            for (std::size_t q = 0; q < g8.size(); ++q) {
                Real t = 0.5 * (b - x) * g8.nodes[q] + 0.5 * (x + b);
                xs.push_back(t);
                ws.push_back(0.5 * (b - x) * g8.weights[q]);
            }
            x = b;
            if (x > 16) panel = std::min(0.25, panel);  // cos frequencies <= 2pi*4 resolved
        }
        Wv.resize(xs.size());
        const Real pref = kTwoPi * std::pow(kPi * k, eps) / std::tgamma(1.0 + eps);
        for (std::size_t q = 0; q < xs.size(); ++q) {
            Real c = 1.0 + xs[q];
            Real zarg = kTwoPi * k * std::sqrt(c);
            Real kv = (zarg < 650.0) ? bessel_k(eps, zarg) : 0.0;
            Wv[q] = pref * std::pow(c, -0.5 * eps) * kv;
        }
        for (std::size_t iz = 0; iz < nz; ++iz) {
            Real z1 = T.z1s[iz];
            Real wm = kTwoPi * std::abs(2.0 - z1), wp = kTwoPi * (2.0 + z1);
            Real s = 0;
            for (std::size_t q = 0; q < xs.size(); ++q)
                s += ws[q] * (std::cos(wm * xs[q]) + std::cos(wp * xs[q])) * Wv[q];
            T.F[ik * nz + iz] = s;
        }
    }
    cache.push_back(std::move(T));
    return cache.back();
}

}  // namespace

Complex Potential::fourier_radial(Real k) const {
    k *= arg_scale_;
    Real jac = std::pow(arg_scale_, d_);
    switch (model_) {
        case PotentialModel::GaussianRadial:
            return jac * amplitude_ * std::pow(width_, d_) * std::exp(-kPi * sqr(width_ * k));
        case PotentialModel::BallIndicator:
            return jac * amplitude_ * ball_hat(d_, radius_, k);
        default:
            throw UnsupportedModel("fourier_radial: no analytic transform for " + describe() +
                                   " (use a GridSampled truncation)");
    }
}

Complex Potential::fourier(const Point& xi) const {
    if (static_cast<int>(xi.size()) != d_)
        throw DimensionMismatch("fourier_transform: point has wrong dimension");
    if (has_analytic_fourier()) return fourier_radial(std::sqrt(norm2(xi)));
    if (model_ == PotentialModel::OscillatingSlab) {
        if (d_ != 3)
            throw UnsupportedModel("oscillating_slab fourier: implemented for d=3 only");
        Point s(xi);
        for (Real& v : s) v *= arg_scale_;
        Real k = std::sqrt(s[1] * s[1] + s[2] * s[2]);
        Real val = slab_table(eps_).at(s[0], k);
        return std::pow(arg_scale_, d_) * amplitude_ * val;
    }
    if (model_ == PotentialModel::GridSampled) {
        // discrete transform on the box: h^d sum V(x) e^{-2 pi i x.xi}
        const Real h = box_L_ / n_side_;
        Complex acc = 0;
        std::vector<int> idx(d_, 0);
        std::size_t total = samples_.size();
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            Real phase = 0;
            for (int k = d_ - 1; k >= 0; --k) {
                int ik = static_cast<int>(rem % n_side_);
                rem /= n_side_;
                Real xk = (ik + 0.5) * h - 0.5 * box_L_;
                phase += xk * xi[k] * arg_scale_;
            }
            acc += samples_[flat] * std::polar(1.0, -kTwoPi * phase);
        }
        return acc * std::pow(h * arg_scale_, d_);
    }
    throw UnsupportedModel("fourier_transform: no analytic or grid transform for " + describe());
}

Real Potential::fourier_sqrt_abs(Real k) const {
    const Real A = std::sqrt(std::abs(amplitude_));
    k *= arg_scale_;
    Real jac = std::pow(arg_scale_, d_);
    switch (model_) {
        case PotentialModel::GaussianRadial: {
            // |V|^{1/2} = sqrt|A| e^{-pi r^2/(2w^2)}: hat = sqrt|A| (sqrt2 w)^d e^{-2 pi w^2 k^2}
            Real w2 = width_ * std::sqrt(2.0);
            return jac * A * std::pow(w2, d_) * std::exp(-kPi * sqr(w2 * k) / 2.0);
        }
        case PotentialModel::BallIndicator:
            return jac * A * ball_hat(d_, radius_, k);
        default:
            throw UnsupportedModel("fourier_sqrt_abs: analytic models only");
    }
}

Complex Potential::fourier_sqrt_signed(Real k) const {
    // For the analytic models V has constant phase: sgn(V) = A/|A|.
    Complex phase = amplitude_ == Complex(0.0) ? Complex(1.0) : amplitude_ / std::abs(amplitude_);
    return phase * fourier_sqrt_abs(k);
}

Complex eval_potential(const Potential& V, const Point& x) { return V(x); }
Complex fourier_transform(const Potential& V, const Point& xi) { return V.fourier(xi); }

// ---------------------------------------------------------------------------
// Cube-local L^q integrals (amalgam building block)
// ---------------------------------------------------------------------------

namespace {

struct CubeIntegrator {
    const Potential& V;
    Real q;
    int d;
    Rule1D g;

    Real plain(const Point& lo, Real side) const {
        // product Gauss rule of |V|^q over [lo, lo+side]^d
        std::vector<std::size_t> idx(d, 0);
        const std::size_t n = g.size();
        Real acc = 0;
        Point x(d);
        std::size_t total = 1;
        for (int k = 0; k < d; ++k) total *= n;
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            Real wgt = 1;
            for (int k = 0; k < d; ++k) {
                std::size_t ik = rem % n;
                rem /= n;
                x[k] = lo[k] + 0.5 * side * (g.nodes[ik] + 1.0);
                wgt *= 0.5 * side * g.weights[ik];
            }
            Real v = std::abs(V(x));
            if (std::isinf(v)) continue;  // measure-zero singular point
            acc += wgt * std::pow(v, q);
        }
        return acc;
    }

    // cube classification against the ball |x| <= rho (for indicator shortcuts)
    static void minmax_dist2(const Point& lo, Real side, Real& mn, Real& mx) {
        mn = 0;
        mx = 0;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            Real a = lo[k], b = lo[k] + side;
            Real lo2 = (a > 0) ? a * a : (b < 0 ? b * b : 0.0);
            Real hi2 = std::max(a * a, b * b);
            mn += lo2;
            mx += hi2;
        }
    }

    Real integrate(const Point& lo, Real side, int depth) const {
        if (V.model() == PotentialModel::BallIndicator) {
            Real mn, mx;
            minmax_dist2(lo, side, mn, mx);
            Real rho = V.radius();
            Real Aq = std::pow(std::abs(V.amplitude()), q);
            if (mn >= rho * rho) return 0.0;
            if (mx <= rho * rho) return Aq * std::pow(side, d);
            if (depth >= 11) return plain(lo, side);
            return subdivide(lo, side, depth);
        }
        bool singular = false;
        if (V.model() == PotentialModel::RadialPowerLaw || V.model() == PotentialModel::LogDecay) {
            Real mn, mx;
            minmax_dist2(lo, side, mn, mx);
            singular = (mn == 0.0);
        }
        if (singular && depth < 14 && side > 1e-4) return subdivide(lo, side, depth);
        return plain(lo, side);
    }

    Real subdivide(const Point& lo, Real side, int depth) const {
        Real acc = 0;
        Point sub(lo);
        for (int corner = 0; corner < (1 << d); ++corner) {
            for (int k = 0; k < d; ++k)
                sub[k] = lo[k] + ((corner >> k) & 1 ? 0.5 * side : 0.0);
            acc += integrate(sub, 0.5 * side, depth + 1);
        }
        return acc;
    }
};

}  // namespace

AmalgamResult amalgam_norm(const Potential& V, Real outer_p, Real inner_q,
                           const AmalgamOptions& opts) {
    if (!(outer_p >= 1) || !(inner_q >= 1))
        throw ConfigError("amalgam_norm: exponents >= 1 required");
    const int d = V.dim();
    CubeIntegrator ci{V, inner_q, d, gauss_legendre(opts.quad_order)};

    Real total_p = 0;  // sum of cube_norm^p
    std::vector<Real> shell_sums;
    int radius = 0;
    Real warm_radius = 2.0;
    if (auto sr = V.support_radius()) warm_radius = std::max(warm_radius, *sr);

    for (int m = 0; m <= opts.max_radius; ++m) {
        // cubes with Chebyshev norm exactly m
        Real shell = 0;
        std::vector<int> s(d, -m);
        auto visit = [&](const std::vector<int>& sv) {
            int cheb = 0;
            for (int k : sv) cheb = std::max(cheb, std::abs(k));
            if (cheb != m) return;
            Point lo(d);
            for (int k = 0; k < d; ++k) lo[k] = sv[k] - 0.5;
            Real integral = ci.integrate(lo, 1.0, 0);
            if (integral > 0) shell += std::pow(std::pow(integral, 1.0 / inner_q), outer_p);
        };
        // enumerate the full box [-m, m]^d and filter on the shell
        std::vector<int> sv(d, -m);
        for (;;) {
            visit(sv);
            int k = 0;
            while (k < d && ++sv[k] > m) sv[k++] = -m;
            if (k == d) break;
        }
        shell_sums.push_back(shell);
        total_p += shell;
        radius = m;

        if (m > warm_radius && shell_sums.size() >= 4) {
            std::size_t n = shell_sums.size();
            // divergence check: shell sums must keep decreasing
            bool non_decreasing = true;
            for (std::size_t i = n - 5 < 0u ? 0u : n - 5; i + 1 < n; ++i)
                if (shell_sums[i + 1] < 0.999 * shell_sums[i]) non_decreasing = false;
            if (n >= 6 && non_decreasing && shell_sums[n - 1] > 1e-300 &&
                shell_sums[n - 1] > 1e-6 * total_p)
                throw Divergent("amalgam_norm: lattice shell sums are not decreasing");
            bool small = shell < opts.relative_floor * total_p;
            bool decreasing = n >= 3 && shell_sums[n - 1] < shell_sums[n - 2] &&
                              shell_sums[n - 2] < shell_sums[n - 3];
            if (small && decreasing) break;
        }
    }

    AmalgamResult res;
    res.truncation_radius = radius;
    // power-law extrapolation of the truncated shells
    std::size_t n = shell_sums.size();
    if (n >= 3 && shell_sums[n - 1] > 0 && shell_sums[n - 2] > shell_sums[n - 1] && radius > 1) {
        Real ratio = shell_sums[n - 1] / shell_sums[n - 2];
        Real p_est = -std::log(ratio) / std::log(static_cast<Real>(radius) / (radius - 1));
        res.tail_estimate = p_est > 1.05 ? shell_sums[n - 1] * radius / (p_est - 1.0)
                                         : std::numeric_limits<Real>::quiet_NaN();
    }
    res.value = std::pow(total_p, 1.0 / outer_p);
    // tail estimate in norm units
    if (std::isfinite(res.tail_estimate) && res.tail_estimate > 0)
        res.tail_estimate =
            std::pow(total_p + res.tail_estimate, 1.0 / outer_p) - res.value;
    return res;
}

AmalgamResult amalgam_norm(const Potential& V, const AmalgamOptions& opts) {
    return amalgam_norm(V, 0.5 * (V.dim() + 1), 0.5 * V.dim(), opts);
}

// ---------------------------------------------------------------------------
// Radial 1D norms
// ---------------------------------------------------------------------------

namespace {

/// int_0^inf f(r) dr with graded panels near 0 and dyadic tail with a
/// convergence test; returns +inf when the dyadic tail does not decay.
Real radial_integral_with_tail(const std::function<Real(Real)>& f) {
    Rule1D g = gauss_legendre(16);
    auto panel = [&](Real a, Real b) {
        Real acc = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            acc += 0.5 * (b - a) * g.weights[i] * f(0.5 * (b - a) * g.nodes[i] + 0.5 * (a + b));
        return acc;
    };
    Real acc = 0;
    // inner graded panels toward 0
    for (auto e = geometric_edges(1e-12, 1.0, 2.0, true); ;) {
        for (std::size_t i = 0; i + 1 < e.size(); ++i) acc += panel(e[i], e[i + 1]);
        break;
    }
    // dyadic tail
    Real prev = kInf;
    int flat = 0;
    for (int j = 0; j < 80; ++j) {
        Real a = std::pow(2.0, j), b = std::pow(2.0, j + 1);
        Real t = panel(a, b);
        acc += t;
        if (t > 1e-14 * std::max(acc, 1e-300)) {
            if (t > 0.62 * prev) {  // slower than r^{-eps} decay in dyadic blocks
                if (++flat >= 8) return kInf;
            } else {
                flat = 0;
            }
        } else if (j > 4) {
            break;
        }
        prev = t;
    }
    return acc;
}

}  // namespace

Real lp_norm(const Potential& V, Real p) {
    if (!(p >= 1)) throw ConfigError("lp_norm: p >= 1 required");
    if (V.is_radial()) {
        const int d = V.dim();
        Real val = radial_integral_with_tail(
            [&](Real r) { return std::pow(V.radial_abs(r), p) * std::pow(r, d - 1); });
        if (std::isinf(val)) return kInf;
        return std::pow(sphere_area(d) * val, 1.0 / p);
    }
    // l^p L^p = L^p
    AmalgamOptions o;
    o.relative_floor = 1e-10;
    o.max_radius = 40;
    o.quad_order = 8;
    return amalgam_norm(V, p, p, o).value;
}

Real mt_norm(const Potential& V) {
    // I(mu) = int_mu^inf H(r) r (r^2-mu^2)^{-1/2} dr = int_0^inf H(sqrt(mu^2+u^2)) du
    auto H = [&](Real r) { return V.angular_sup(r); };
    std::optional<Real> sup = V.support_radius();
    Rule1D g = gauss_legendre(16);
    auto inner = [&](Real mu) -> Real {
        auto f = [&](Real u) { return H(std::sqrt(mu * mu + u * u)); };
        Real acc = 0;
        auto panel = [&](Real a, Real b) {
            Real s = 0;
            for (std::size_t i = 0; i < g.size(); ++i)
                s += 0.5 * (b - a) * g.weights[i] * f(0.5 * (b - a) * g.nodes[i] + 0.5 * (a + b));
            return s;
        };
        if (sup) {
            // compactly supported H: integrate exactly to the support edge
            if (mu >= *sup) return 0.0;
            Real umax = std::sqrt(sqr(*sup) - mu * mu);
            auto edges = geometric_edges(1e-10 * std::max(umax, 1.0), umax, 1.7, true);
            for (std::size_t i = 0; i + 1 < edges.size(); ++i) acc += panel(edges[i], edges[i + 1]);
            return acc;
        }
        // graded + dyadic with divergence detection
        auto edges = geometric_edges(1e-9, 1.0, 2.0, true);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) acc += panel(edges[i], edges[i + 1]);
        Real prev = kInf;
        int flat = 0;
        for (int j = 0; j < 64; ++j) {
            Real t = panel(std::pow(2.0, j), std::pow(2.0, j + 1));
            acc += t;
            if (t > 1e-13 * std::max(acc, 1e-300)) {
                if (t > 0.75 * prev) {
                    if (++flat >= 6) return kInf;
                } else {
                    flat = 0;
                }
            } else if (j > 4) {
                break;
            }
            prev = t;
        }
        return acc;
    };

    // mu grid: 0 plus geometric 1e-4..1e4, then golden-section refinement
    std::vector<Real> mus{0.0};
    for (int i = 0; i < 200; ++i) mus.push_back(1e-4 * std::pow(1e8, i / 199.0));
    Real best = -1, best_mu = 0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        Real v = inner(mus[i]);
        if (std::isinf(v)) return kInf;
        if (v > best) {
            best = v;
            best_mu = mus[i];
            best_i = i;
        }
    }
    (void)best_mu;
    Real lo = mus[best_i == 0 ? 0 : best_i - 1];
    Real hi = mus[std::min(best_i + 1, mus.size() - 1)];
    const Real phi = 0.5 * (std::sqrt(5.0) - 1.0);
    Real x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    Real f1 = inner(x1), f2 = inner(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = inner(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = inner(x1);
        }
    }
    return std::max({best, f1, f2});
}

Real dp_norm(const Potential& V, Real p) {
    if (!V.is_radial()) throw UnsupportedModel("dp_norm: radial potentials only");
    if (!(p > 2)) throw InvalidExponents("dp_norm: p > 2 required");
    Rule1D g = gauss_legendre(16);
    auto block = [&](int j) {
        Real a = std::pow(2.0, j), b = std::pow(2.0, j + 1);
        Real acc = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            Real r = 0.5 * (b - a) * g.nodes[i] + 0.5 * (a + b);
            acc += 0.5 * (b - a) * g.weights[i] * std::pow(V.radial_abs(r), p) * std::pow(r, p - 1);
        }
        return std::pow(acc, 1.0 / p);
    };
    Real total = 0;
    // inner blocks j<0 and outer blocks j>=0, each with the tail test
    for (int dir : {-1, +1}) {
        Real prev = kInf;
        int flat = 0;
        for (int m = 0; m < 200; ++m) {
            int j = dir < 0 ? -1 - m : m;
            Real t = block(j);
            total += t;
            if (t < 1e-13 * std::max(total, 1e-300) && m > 4) break;
            // non-summable tail: terms decaying slower than m^{-1.05}
            if (m > 24) {
                if (t > prev * std::pow(static_cast<Real>(m) / (m + 1.0), 1.05)) {
                    if (++flat >= 12) return kInf;
                } else {
                    flat = 0;
                }
            }
            prev = t;
        }
    }
    return total;
}

Real mixed_norm(const Potential& V, Real p, Real sigma) {
    const int d = V.dim();
    if (!(p >= 1) || !(p < 2.0 * d / (d + 1.0)))
        throw InvalidExponents("mixed_norm: 1 <= p < 2d/(d+1) required");
    if (!(sigma > 0) || sigma > 2.0)
        throw InvalidExponents("mixed_norm: sigma in (0, 2] required");
    Real pprime = p / (p - 1.0);
    if (p == 1.0) pprime = kInf;
    Real inv_sp = 1.0 - 1.0 / sigma;  // 1/sigma'
    if (std::isfinite(pprime) && inv_sp + 1e-14 < 1.0 / pprime)
        throw InvalidExponents("mixed_norm: sigma' <= p' required");
    if (d >= 3 && std::isfinite(pprime)) {
        Real lower = (2.0 * d / (d - 2.0)) * (1.0 / pprime - 0.5) + 0.5;
        if (inv_sp + 1e-14 < lower)
            throw InvalidExponents("mixed_norm: (p, sigma) outside the admissible window");
    }

    const Real outer_e = p / (2.0 - p);
    const Real inner_e = sigma >= 2.0 ? kInf : sigma / (2.0 - sigma);

    std::function<Real(Real)> inner_norm;
    if (V.is_radial()) {
        Real area = sphere_area(d);
        Real fac = std::isinf(inner_e) ? 1.0 : std::pow(area, 1.0 / inner_e);
        inner_norm = [&V, fac](Real r) { return fac * V.radial_abs(r); };
    } else if (std::isinf(inner_e)) {
        inner_norm = [&V](Real r) { return V.angular_sup(r); };
    } else {
        throw UnsupportedModel("mixed_norm: non-radial V with sigma < 2 not supported");
    }

    Real val = radial_integral_with_tail([&](Real r) {
        return std::pow(inner_norm(r), outer_e) * std::pow(r, d - 1);
    });
    if (std::isinf(val)) throw Divergent("mixed_norm: radial integral diverges");
    return std::pow(val, 1.0 / outer_e);
}

NormReport norm_report(const Potential& V) {
    NormReport rep;
    const int d = V.dim();
    try {
        AmalgamOptions o;
        if (V.model() == PotentialModel::OscillatingSlab) {
            o.relative_floor = 1e-7;
            o.max_radius = d >= 3 ? 28 : 48;
            o.quad_order = 6;
        }
        AmalgamResult ar = amalgam_norm(V, o);
        rep.amalgam_norm = ar.value;
        rep.amalgam_truncation_radius = ar.truncation_radius;
        rep.amalgam_tail_estimate = ar.tail_estimate;
    } catch (const Divergent&) {
        rep.amalgam_norm = kInf;
    }
    for (Real p : {0.5 * (d + 1), 0.5 * d, 2.0}) {
        if (p < 1) continue;
        rep.lp_norms[p] = lp_norm(V, p);
    }
    rep.mt_norm = mt_norm(V);
    rep.dp_exponent = 3.0;
    rep.dp_norm = V.is_radial() ? dp_norm(V, rep.dp_exponent) : kInf;
    rep.mixed_p = d >= 3 ? 1.4 : 1.2;
    rep.mixed_sigma = 2.0;
    try {
        rep.mixed_norm = mixed_norm(V, rep.mixed_p, rep.mixed_sigma);
    } catch (const Divergent&) {
        rep.mixed_norm = kInf;
    } catch (const UnsupportedModel&) {
        rep.mixed_norm = kInf;
    }
    return rep;
}

}  // namespace fswc
