#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fswc/asymptotics.hpp"
#include "fswc/io.hpp"
#include "fswc/parallel.hpp"
#include "fswc/trial_functions.hpp"
#include "fswc/vs_operator.hpp"

namespace fswc::cli {

namespace {

using Json = nlohmann::ordered_json;

Json num(Real x) {
    if (std::isfinite(x)) return x;
    return format_double(x);  // "inf"/"nan" as strings
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << j.dump(2) << "\n";
}

struct Ctx {
    ConfigMap cfg;
    std::string out;
    std::string hash;

    std::string path(const std::string& name) const { return out + "/" + name; }
};

// ---------------------------------------------------------------------------

void cmd_norms(const Ctx& c) {
    Potential V = potential_from_config(c.cfg);
    NormReport rep = norm_report(V);
    Json j;
    j["config_hash"] = c.hash;
    j["potential"] = V.describe();
    j["amalgam_norm"] = num(rep.amalgam_norm);
    j["amalgam_truncation_radius"] = rep.amalgam_truncation_radius;
    j["amalgam_tail_estimate"] = num(rep.amalgam_tail_estimate);
    Json lp = Json::object();
    for (const auto& [p, v] : rep.lp_norms) lp[format_double(p)] = num(v);
    j["lp_norms"] = lp;
    j["mt_norm"] = num(rep.mt_norm);
    j["dp_norm"] = num(rep.dp_norm);
    j["dp_exponent"] = rep.dp_exponent;
    j["mixed_norm"] = num(rep.mixed_norm);
    j["mixed_p"] = rep.mixed_p;
    j["mixed_sigma"] = rep.mixed_sigma;
    write_json(c.path("norms.json"), j);
}

void cmd_vs_spectrum(const Ctx& c) {
    Potential V = potential_from_config(c.cfg);
    KineticSymbol sym = symbol_from_config(c.cfg);
    int order = c.cfg.get_int("sphere.order", 24);
    int k = c.cfg.get_int("vs.eigenvectors", 8);
    SphereQuadrature quad = build_sphere_quadrature(sym.dim(), order);
    OperatorMatrix M = assemble_vs(V, quad, sym);
    SpectralResult spec =
        vs_spectrum(M, std::min<int>(k, M.n()), {1.0, 2.0, 4.0, static_cast<Real>(sym.dim() + 1)});

    CsvWriter csv(c.path("vs_eigenvalues.csv"), {"index", "real", "imag"},
                  "config_hash " + c.hash);
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
        csv.row({static_cast<Real>(i), spec.eigenvalues[i].real(), spec.eigenvalues[i].imag()});

    Json j;
    j["config_hash"] = c.hash;
    j["n_nodes"] = static_cast<int>(quad.size());
    j["order"] = order;
    j["top_eigenvalue"] = num(spec.eigenvalues.front().real());
    Json sch = Json::object();
    for (const auto& [p, v] : spec.schatten) sch[format_double(p)] = num(v);
    j["schatten"] = sch;
    if (V.is_radial()) {
        int lmax = c.cfg.get_int("vs.l_max", 8);
        Json fh = Json::array();
        for (const auto& e : funk_hecke_spectrum(V, sym, lmax))
            fh.push_back(Json{{"l", e.l}, {"a_l", num(e.a_l)}, {"multiplicity", e.multiplicity}});
        j["funk_hecke"] = fh;
        Real l2 = lp_norm(V, 2.0);
        if (std::isfinite(l2) && l2 > 0)
            j["schatten_d1_over_l2"] = num(spec.schatten_norm(sym.dim() + 1) / l2);
    }
    write_json(c.path("vs_summary.json"), j);
}

SolveOptions solve_options_from(const ConfigMap& cfg) {
    SolveOptions o;
    o.tol = cfg.get_real("solve.tol", 1e-8);
    o.e_floor = cfg.get_real("solve.e_floor", 1e-10);
    o.e_max = cfg.get_real("solve.e_max", 0.9);
    o.e_start = cfg.get_real("solve.e_start", 0.0);
    return o;
}

std::vector<Real> lambda_grid_from(const ConfigMap& cfg) {
    std::vector<Real> grid = cfg.get_real_list("lambda.grid");
    if (grid.empty()) throw ConfigError("lambda.grid must list at least one coupling");
    return grid;
}

Real branch_eigenvalue_a(const Potential& V, const KineticSymbol& sym, int order, int j) {
    // j-th element of the Funk-Hecke multiset (descending with multiplicity)
    if (!V.is_radial()) {
        SphereQuadrature quad = build_sphere_quadrature(sym.dim(), order);
        SpectralResult spec = vs_spectrum(assemble_vs(V, quad, sym), 0);
        return spec.eigenvalues.at(j - 1).real();
    }
    std::vector<Real> pool;
    for (const auto& e : funk_hecke_spectrum(V, sym, 24))
        for (int m = 0; m < e.multiplicity; ++m) pool.push_back(e.a_l);
    std::sort(pool.rbegin(), pool.rend());
    return pool.at(j - 1);
}

void cmd_fit(const Ctx& c, bool with_second_order) {
    Potential V = potential_from_config(c.cfg);
    KineticSymbol sym = symbol_from_config(c.cfg);
    BoxGrid grid = grid_from_config(c.cfg, &V);
    int j = c.cfg.get_int("lambda.j", 1);
    std::vector<Real> lambdas = lambda_grid_from(c.cfg);
    SolveOptions opts = solve_options_from(c.cfg);

    EigenCurve curve = sweep(V, sym, grid, lambdas, j, opts);
    Real a = branch_eigenvalue_a(V, sym, c.cfg.get_int("sphere.order", 64), j);

    std::vector<Real> b_samples;
    AsymptoticsReport rep;
    if (with_second_order) {
        if (sym.convention() != MeasureConvention::lebesgue_dw)
            throw ConfigError("second-order: lebesgue convention required");
        SphereQuadrature quad = build_sphere_quadrature(sym.dim(), c.cfg.get_int("sphere.order", 64));
        ShellFamily shells = shell_grid(sym, c.cfg.get_int("shells.n_t", 64), 0.0);
        BoxGrid wsg = BoxGrid::make(sym.dim(), c.cfg.get_real("ws_grid.L", 16.0),
                                    c.cfg.get_int("ws_grid.N", 256), &V);
        std::vector<Real> ls;
        for (const CurveSample& s : curve.samples) ls.push_back(s.lambda);
        b_samples = second_order_b_samples(V, sym, quad, shells, wsg, ls, j);
        rep = second_order_residual(curve, a, b_samples);
    } else {
        rep = first_order_fit(curve, a);
    }

    CsvWriter csv(c.path("curve.csv"),
                  {"lambda", "e", "r1", "r2", "b", "s", "defect1", "residual", "overlap",
                   "bisections"},
                  "config_hash " + c.hash);
    std::size_t fi = 0;
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        const CurveSample& s = curve.samples[i];
        if (!std::isfinite(s.e)) continue;
        Real r2 = with_second_order ? rep.r2.at(fi) : std::nan("");
        Real bb = with_second_order ? rep.b.at(fi) : std::nan("");
        Real ss = with_second_order ? rep.s.at(fi) : std::nan("");
        csv.row({s.lambda, s.e, rep.r1.at(fi), r2, bb, ss, rep.defect1.at(fi), s.residual,
                 s.overlap, static_cast<Real>(s.bisections)});
        ++fi;
    }

    Json jj;
    jj["config_hash"] = c.hash;
    jj["j"] = j;
    jj["a"] = num(a);
    jj["fitted_a"] = num(rep.fitted_a);
    jj["convention"] =
        sym.convention() == MeasureConvention::lebesgue_dw ? "lebesgue_dw" : "weighted_ds";
    Json errs = Json::array();
    for (std::size_t i = 0; i < curve.sample_errors.size(); ++i)
        if (!curve.sample_errors[i].empty())
            errs.push_back(Json{{"lambda", curve.samples[i].lambda},
                                {"error", curve.sample_errors[i]}});
    jj["sample_errors"] = errs;
    auto arr = [](const std::vector<Real>& v) {
        Json a = Json::array();
        for (Real x : v) a.push_back(num(x));
        return a;
    };
    jj["lambda"] = arr(rep.lambda);
    jj["r1"] = arr(rep.r1);
    jj["defect1"] = arr(rep.defect1);
    if (with_second_order) {
        jj["b"] = arr(rep.b);
        jj["s"] = arr(rep.s);
        jj["r2"] = arr(rep.r2);
    }
    write_json(c.path("fit.json"), jj);
}

void cmd_bs_curve(const Ctx& c) {
    Potential V = potential_from_config(c.cfg);
    KineticSymbol sym = symbol_from_config(c.cfg);
    BoxGrid grid = grid_from_config(c.cfg, &V);
    int j = c.cfg.get_int("lambda.j", 1);
    EigenCurve curve = sweep(V, sym, grid, lambda_grid_from(c.cfg), j, solve_options_from(c.cfg));
    CsvWriter csv(c.path("curve.csv"),
                  {"lambda", "e", "residual", "overlap", "bisections", "applies"},
                  "config_hash " + c.hash);
    for (const CurveSample& s : curve.samples)
        csv.row({s.lambda, s.e, s.residual, s.overlap, static_cast<Real>(s.bisections),
                 static_cast<Real>(s.applies)});
    Json j2;
    j2["config_hash"] = c.hash;
    Json errs = Json::array();
    for (std::size_t i = 0; i < curve.sample_errors.size(); ++i)
        if (!curve.sample_errors[i].empty())
            errs.push_back(Json{{"lambda", curve.samples[i].lambda},
                                {"error", curve.sample_errors[i]}});
    j2["sample_errors"] = errs;
    write_json(c.path("curve_summary.json"), j2);
}

void cmd_knapp(const Ctx& c) {
    Potential V = potential_from_config(c.cfg);
    if (V.dim() != 3 && V.dim() != 2) throw ConfigError("knapp: d in {2,3}");
    Real eps = V.model() == PotentialModel::OscillatingSlab ? V.eps() : 0.5;
    std::vector<Real> Rs = c.cfg.get_real_list("knapp.R_grid");
    if (Rs.empty())
        for (int k = 3; k <= c.cfg.get_int("knapp.log2_R_max", 9); ++k)
            Rs.push_back(std::pow(2.0, k));

    KnappOptions ko;
    ko.tail_exponent = c.cfg.get_int("knapp.tail_exponent", 8);
    AmalgamOptions ao;
    ao.relative_floor = 1e-6;
    ao.max_radius = V.dim() >= 3 ? 24 : 40;
    ao.quad_order = 6;
    AmalgamResult am = amalgam_norm(V, ao);
    ko.amalgam = am.value + (std::isfinite(am.tail_estimate) ? am.tail_estimate : 0.0);

    Json sweep_j = Json::array();
    Real R0 = -1;
    Point dir(V.dim(), 0.0);
    dir[0] = 1.0;
    for (Real R : Rs) {
        Real M = std::max(2.0, std::pow(R, eps));
        CapPacket packet(V.dim(), R, dir, /*symmetrized=*/true);
        KnappCertificate cert = knapp_quadratic_form(V, packet, M, ko);
        if (cert.certified && R0 < 0) R0 = R;
        sweep_j.push_back(Json{{"R", cert.R},
                               {"M", cert.M},
                               {"main_term", num(cert.main_term)},
                               {"tail_bound", num(cert.tail_bound)},
                               {"total", num(cert.total)},
                               {"certified", cert.certified},
                               {"c_n", num(cert.c_n)},
                               {"packet_l2", num(cert.packet_l2)},
                               {"band_ratio", num(cert.main_term / (M * std::pow(R, -eps)))}});
    }
    Json j;
    j["config_hash"] = c.hash;
    j["eps"] = eps;
    j["amalgam_norm"] = num(ko.amalgam);
    j["R0"] = R0;
    j["sweep"] = sweep_j;
    int K = c.cfg.get_int("knapp.multi_cap_K", 0);
    if (K > 0) {
        Real R = Rs.back();
        MultiCapResult mc = multi_cap_certificate(V, R, K, ko);
        Json caps = Json::array();
        for (const auto& cert : mc.per_cap)
            caps.push_back(Json{{"total", num(cert.total)}, {"certified", cert.certified}});
        j["multi_cap"] = Json{{"R", R},
                              {"K_requested", mc.K_requested},
                              {"K_achieved", mc.K_achieved},
                              {"max_overlap", num(mc.max_overlap)},
                              {"per_cap", caps}};
    }
    write_json(c.path("knapp.json"), j);
}

void cmd_kernel_bounds(const Ctx& c) {
    KineticSymbol sym = symbol_from_config(c.cfg);
    Real alpha = c.cfg.get_real("kernel.alpha", 0.5);
    std::vector<Real> rhos = c.cfg.get_real_list("kernel.rho_grid");
    if (rhos.empty())
        for (int jj = 3; jj <= 10; ++jj) {
            rhos.push_back(1.0 - std::pow(2.0, -jj));
            rhos.push_back(1.0 + std::pow(2.0, -jj));
        }
    std::vector<Real> rs = c.cfg.get_real_list("kernel.r_grid");
    if (rs.empty()) {
        int n = c.cfg.get_int("kernel.r_points", 60);
        for (int i = 0; i < n; ++i) rs.push_back(std::pow(10.0, 3.0 * i / (n - 1.0)));
    }
    KernelBoundReport rep = kernel_difference_bound(sym, alpha, rhos, rs);
    CsvWriter csv(c.path("kernel_bounds.csv"), {"rho", "r", "difference", "envelope", "ratio"},
                  "config_hash " + c.hash);
    for (const auto& s : rep.table) csv.row({s.rho, s.r, s.difference, s.envelope, s.ratio});
    Json j;
    j["config_hash"] = c.hash;
    j["alpha"] = alpha;
    j["max_ratio"] = num(rep.max_ratio);
    j["witness"] = Json{{"rho", rep.witness.rho}, {"r", rep.witness.r}};
    write_json(c.path("kernel_bounds.json"), j);
}

void cmd_spectral_measure(const Ctx& c) {
    Potential V = potential_from_config(c.cfg);  // used only for its dimension default
    (void)V;
    KineticSymbol sym = symbol_from_config(c.cfg);
    if (sym.dim() != 2) throw ConfigError("spectral-measure-check: d=2");
    BoxGrid grid = grid_from_config(c.cfg, nullptr);
    Real width = c.cfg.get_real("smc.width", 2.0);
    SphereQuadrature quad = build_sphere_quadrature(2, c.cfg.get_int("sphere.order", 64));
    ShellFamily shells = shell_grid(sym, c.cfg.get_int("shells.n_t", 64), sym.tau() / 8);

    std::vector<Real> f(grid.total());
    for (int a = 0; a < grid.N; ++a)
        for (int b = 0; b < grid.N; ++b) {
            Real x = grid.x_coord(a), y = grid.x_coord(b);
            f[static_cast<std::size_t>(a) * grid.N + b] =
                std::exp(-kPi * (x * x + y * y) / (width * width));
        }
    Real t_lo = sym.tau() / 4, t_hi = sym.tau() / 2;
    auto bump = [t_lo, t_hi](Real t) {
        if (t <= t_lo || t >= t_hi) return 0.0;
        Real u = (t - t_lo) / (t_hi - t_lo);
        return std::exp(-1.0 / (u * (1.0 - u)) * 0.25);
    };
    Real support = width * std::sqrt(std::log(1e14) / kPi);
    SpectralMeasureCheck res =
        spectral_measure_check(f, f, bump, sym, grid, quad, shells, support);
    Json j;
    j["config_hash"] = c.hash;
    j["lhs_re"] = num(res.lhs.real());
    j["lhs_im"] = num(res.lhs.imag());
    j["rhs_re"] = num(res.rhs.real());
    j["rhs_im"] = num(res.rhs.imag());
    j["gap"] = num(res.gap);
    write_json(c.path("spectral_measure.json"), j);
}

void cmd_oracle_compare(const Ctx& c) {
    Potential V = potential_from_config(c.cfg);
    KineticSymbol sym = symbol_from_config(c.cfg);
    BoxGrid grid = grid_from_config(c.cfg, &V);
    Real e = c.cfg.get_real("oracle.e", 1e-2);
    int k = c.cfg.get_int("oracle.top_k", 3);

    OperatorMatrix dense = bs_dense_oracle(V, sym, e, grid);
    Real herm_dev = (dense.a - dense.a.adjoint()).cwiseAbs().maxCoeff();
    SpectralResult spec = vs_spectrum(dense, 0, {});
    BsEigs it = bs_eigs_iterative(V, sym, e, grid, k);

    CsvWriter csv(c.path("oracle_compare.csv"),
                  {"index", "dense", "iterative", "abs_diff", "residual"},
                  "config_hash " + c.hash);
    Real max_diff = 0;
    for (int i = 0; i < k; ++i) {
        Real dv = spec.eigenvalues[i].real();
        Real iv = it.eigenvalues[i].real();
        max_diff = std::max(max_diff, std::abs(dv - iv));
        csv.row({static_cast<Real>(i), dv, iv, std::abs(dv - iv), it.residuals[i]});
    }
    Json j;
    j["config_hash"] = c.hash;
    j["e"] = e;
    j["hermiticity_deviation"] = num(herm_dev);
    j["max_abs_diff"] = num(max_diff);
    write_json(c.path("oracle_compare.json"), j);
}

void cmd_riesz(const Ctx& c) {
    int n_mat = c.cfg.get_int("riesz.matrices", 100);
    int exact = 0;
    SplitMix64 rng(c.cfg.get_int("run.seed", 1));
    for (int t = 0; t < n_mat; ++t) {
        int n = 4 + static_cast<int>(rng.next() % 27);
        bool herm = (t % 2) == 0;
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj)
                A(i, jj) = Complex(rng.symmetric(), herm ? 0.0 : rng.symmetric());
        if (herm) A = 0.5 * (A + A.adjoint());
        OperatorMatrix M;
        M.a = A;
        M.symmetry = herm ? OperatorMatrix::Symmetry::hermitian : OperatorMatrix::Symmetry::general;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
        Complex center(rng.symmetric(), rng.symmetric());
        Real radius = 0.5 + rng.uniform();
        // count + guard separation
        int count = 0;
        Real min_dist = 1e9;
        for (int i = 0; i < n; ++i) {
            Real dd = std::abs(es.eigenvalues()(i) - center);
            min_dist = std::min(min_dist, std::abs(dd - radius));
            if (dd < radius) ++count;
        }
        if (min_dist < 0.02) continue;  // reroll ill-separated contours
        auto family = [&M](Real) { return M; };
        std::vector<int> ranks = riesz_count(family, center, radius, {0.0});
        if (ranks.at(0) == count) ++exact;
        else
            throw Error("riesz-count self-test mismatch");
    }
    Json j;
    j["config_hash"] = c.hash;
    j["matrices"] = n_mat;
    j["exact_matches"] = exact;
    write_json(c.path("riesz.json"), j);
}

}  // namespace

void run_command(const std::string& command, ConfigMap cfg, const std::string& out_dir,
                 int threads) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    set_worker_count(threads);

    Ctx c{std::move(cfg), out_dir, ""};
    c.cfg.set("run.command", command);
    c.cfg.set("run.threads_requested", std::to_string(threads));
    std::string canon = c.cfg.canonical();
    // thread count must not influence numeric artifacts; hash the config
    // without it so reruns at different thread counts share the hash
    ConfigMap hash_cfg = c.cfg;
    hash_cfg.set("run.threads_requested", "");
    c.hash = fnv1a_hex(hash_cfg.canonical());

    auto t0 = std::chrono::steady_clock::now();
    if (command == "norms")
        cmd_norms(c);
    else if (command == "vs-spectrum")
        cmd_vs_spectrum(c);
    else if (command == "bs-curve")
        cmd_bs_curve(c);
    else if (command == "fit")
        cmd_fit(c, c.cfg.get_bool("second_order.enabled", false));
    else if (command == "second-order")
        cmd_fit(c, true);
    else if (command == "knapp")
        cmd_knapp(c);
    else if (command == "kernel-bounds")
        cmd_kernel_bounds(c);
    else if (command == "spectral-measure-check")
        cmd_spectral_measure(c);
    else if (command == "oracle-compare")
        cmd_oracle_compare(c);
    else if (command == "riesz-count")
        cmd_riesz(c);
    else
        throw ConfigError("unknown command: " + command);
    auto t1 = std::chrono::steady_clock::now();

    Json manifest;
    manifest["command"] = command;
    manifest["version"] = "0.1.0";
    manifest["config_hash"] = c.hash;
    manifest["threads"] = threads;
    manifest["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
    Json cfg_j = Json::object();
    for (const auto& [k, v] : c.cfg.entries()) cfg_j[k] = v;
    manifest["config"] = cfg_j;
    write_json(c.path("manifest.json"), manifest);
}

}  // namespace fswc::cli
