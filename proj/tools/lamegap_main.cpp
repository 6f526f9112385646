// lamegap: blow-up rates, gap quadrature, factor matrices and the pointwise
// gradient expansion for a stiff inclusion nearly touching the matrix
// boundary, plus the finite-element verification suite.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "lamegap/config.hpp"
#include "lamegap/expansion.hpp"
#include "lamegap/fem.hpp"
#include "lamegap/quadrature.hpp"
#include "lamegap/verification.hpp"
#include "lamegap/version.hpp"

namespace lg = lamegap;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    double eps = 0;
    std::string eps_list;
    double tol = 0;
    int threads = 0;
};

void add_common(CLI::App* app, CommonArgs& args) {
    app->add_option("--config", args.config_path, "configuration file");
    app->add_option("--set", args.overrides, "override a config key (key=value), repeatable");
    app->add_option("--out", args.out_path, "output CSV path");
    app->add_option("--eps", args.eps, "single gap width (overrides the config)");
    app->add_option("--eps-list", args.eps_list, "comma separated gap widths");
    app->add_option("--tol", args.tol, "absolute quadrature tolerance");
    app->add_option("--threads", args.threads, "parallel sweep solves");
}

lg::RunConfig load_config(const CommonArgs& args) {
    lg::Config cfg = args.config_path.empty() ? lg::Config::from_string("")
                                              : lg::Config::from_file(args.config_path);
    for (const auto& ov : args.overrides) cfg.apply_override(ov);
    if (!cfg.has("geometry.dimension")) cfg.set("geometry.dimension", "2");
    if (!cfg.has("geometry.m")) cfg.set("geometry.m", "2");
    if (!cfg.has("geometry.R")) cfg.set("geometry.R", "1.0");
    if (args.eps != 0 && !(args.eps > 0))
        throw lg::ConfigError("--eps must be positive");
    if (!cfg.has("geometry.epsilon"))
        cfg.set("geometry.epsilon", args.eps > 0 ? std::to_string(args.eps) : "1e-4");
    if (args.eps > 0) cfg.set("geometry.epsilon", std::to_string(args.eps));
    if (!args.eps_list.empty()) cfg.set("execution.eps_list", "[" + args.eps_list + "]");
    if (args.tol > 0) cfg.set("execution.tol_abs", std::to_string(args.tol));
    if (args.threads > 0) cfg.set("execution.threads", std::to_string(args.threads));
    return lg::RunConfig::from_config(cfg);
}

std::ofstream open_csv(const CommonArgs& args, const lg::RunConfig& cfg,
                       const std::string& subcommand, std::string& path_out) {
    std::string path = args.out_path;
    if (path.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        path = (std::filesystem::path(cfg.out_dir) / (subcommand + ".csv")).string();
    }
    std::ofstream os(path);
    if (!os) throw lg::ConfigError("cannot open output file: " + path);
    os.precision(17);
    os << "# " << lg::kCsvSchema << " " << subcommand << "\n";
    path_out = path;
    return os;
}

void emit_certificates(std::ostream& os, const std::vector<lg::RateCertificate>& certs,
                       const std::vector<double>& eps_list) {
    for (const auto& c : certs)
        for (double eps : eps_list) {
            os << '"' << c.case_label << "\"," << c.side << "," << c.rate.exponent.str() << ","
               << c.rate.log_power << ",\"" << c.prefactor_expr << "\"," << eps << ","
               << c.evaluate(eps);
            if (!c.note.empty()) os << ",\"" << c.note << "\"";
            os << "\n";
        }
}

std::vector<lg::OracleRun> oracle_sweep_parallel(const lg::RunConfig& cfg) {
    std::vector<lg::OracleRun> runs(cfg.eps_list.size());
    if (cfg.threads <= 1) {
        for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
            runs[i] = lg::solve_full(cfg.phi, cfg.eps_list[i], cfg.lame, cfg.mesh);
        return runs;
    }
    std::vector<std::future<lg::OracleRun>> futs;
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
        futs.push_back(std::async(std::launch::async, [&cfg, i] {
            return lg::solve_full(cfg.phi, cfg.eps_list[i], cfg.lame, cfg.mesh);
        }));
    for (std::size_t i = 0; i < futs.size(); ++i) runs[i] = futs[i].get();
    return runs;
}

lg::RateTableInputs table_inputs(const lg::RunConfig& cfg, const lg::StarredSummary* st) {
    lg::RateTableInputs in;
    in.family = cfg.phi.family;
    in.d = cfg.profile.d;
    in.m = cfg.profile.m;
    in.k = cfg.phi.k;
    in.kappa1 = cfg.profile.kappa1;
    in.kappa2 = cfg.profile.kappa2;
    in.eta = cfg.phi.eta;
    in.lame = cfg.lame;
    in.starred = st;
    return in;
}

int cmd_rates(const CommonArgs& args) {
    lg::RunConfig cfg = load_config(args);
    std::string path;
    auto os = open_csv(args, cfg, "rates", path);
    os << "case,side,exponent,log_power,prefactor_expr,eps,value\n";
    const auto in = table_inputs(cfg, nullptr);
    std::vector<lg::RateCertificate> certs;
    int covered = 0;
    for (auto* fn : {&lg::rate_table_segment, &lg::rate_table_cylinder}) {
        try {
            auto c = (*fn)(in);
            certs.insert(certs.end(), c.begin(), c.end());
            ++covered;
        } catch (const lg::CaseNotCovered&) {
        }
    }
    try {
        auto c = lg::rate_table_corollary(in);
        certs.insert(certs.end(), c.begin(), c.end());
        ++covered;
    } catch (const lg::CaseNotCovered&) {
    }
    if (covered == 0)
        throw lg::CaseNotCovered("no stated rate case covers this parameter tuple");
    emit_certificates(os, certs, cfg.eps_list);
    lg::write_manifest(path, "rates", cfg);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_quad(const CommonArgs& args, const std::string& kind, int k, int alpha) {
    lg::RunConfig cfg = load_config(args);
    std::string path;
    auto os = open_csv(args, cfg, "quad", path);
    os << "eps,value,error_estimate,n_evals\n";
    lg::QuadOptions opt;
    opt.tol_abs = cfg.tol_abs;
    opt.tol_rel = cfg.tol_rel;
    for (double eps : cfg.eps_list) {
        lg::GapProfile p = cfg.profile;
        p.eps = eps;
        lg::QuadResult r;
        if (kind == "moment") {
            r = lg::moment_integral(p, k, p.R, opt);
        } else if (kind == "energy") {
            r = lg::energy_leading(alpha, p, cfg.lame, p.R, opt);
        } else if (kind == "q") {
            r = lg::q_leading(alpha, cfg.phi, p, cfg.lame, p.R, opt);
        } else if (kind == "closed2d") {
            const auto tau = lg::principal_relative_curvatures(p);
            r.value = lg::closed_form_convex_2d(tau.at(0), p.R, eps);
        } else if (kind == "closed3d") {
            const auto tau = lg::principal_relative_curvatures(p);
            r.value = lg::closed_form_convex_3d(tau.at(0), tau.at(1), p.R, eps);
        } else {
            throw lg::ConfigError("unknown quad kind: " + kind);
        }
        os << eps << "," << r.value << "," << r.abs_error_estimate << "," << r.n_evals << "\n";
    }
    lg::write_manifest(path, "quad", cfg);
    std::cout << "wrote " << path << "\n";
    return 0;
}

void emit_factors(std::ostream& os, const lg::FactorData& f,
                  const Eigen::VectorXd* X) {
    const int N = f.N();
    os << "eps,";
    if (f.eps) os << *f.eps;
    else os << "limit";
    os << "\n";
    for (int r = 0; r < N; ++r) {
        os << "a," << (r + 1);
        for (int c = 0; c < N; ++c) os << "," << f.a(r, c);
        os << "\n";
    }
    os << "Q,";
    for (int r = 0; r < N; ++r) os << (r ? "," : "") << f.Q[r];
    os << "\n";
    if (X) {
        os << "X,";
        for (int r = 0; r < N; ++r) os << (r ? "," : "") << (*X)[r];
        os << "\n";
    }
    if (f.finite()) {
        const auto def = lg::definiteness_check(f);
        os << "lambda_min," << def.lambda_min << "\n";
        const auto s = lg::starred_summary(f);
        os << "detD," << s.detD << "\n";
        os << "detF," << s.detF << "\n";
    }
}

int cmd_factors(const CommonArgs& args, const std::string& provider,
                const std::string& factor_file) {
    lg::RunConfig cfg = load_config(args);
    std::string path;
    auto os = open_csv(args, cfg, "factors", path);
    if (provider == "oracle") {
        auto runs = oracle_sweep_parallel(cfg);
        std::vector<lg::FactorData> fds;
        for (const auto& run : runs) {
            emit_factors(os, run.factors, &run.X);
            fds.push_back(run.factors);
        }
        if (fds.size() >= 3) {
            os << "# extrapolated limit\n";
            emit_factors(os, lg::extrapolate_starred(fds), nullptr);
        }
    } else if (provider == "leading") {
        // placeholder built from the leading gap functionals; determinant
        // prefactors stay unresolved
        lg::FactorData f;
        f.d = cfg.profile.d;
        f.provenance = lg::Provenance::Leading;
        f.eps = cfg.profile.eps;
        const int N = f.N();
        f.a = Eigen::MatrixXd::Constant(N, N, std::numeric_limits<double>::quiet_NaN());
        f.Q = Eigen::VectorXd::Constant(N, std::numeric_limits<double>::quiet_NaN());
        for (int a = 1; a <= N; ++a)
            f.a(a - 1, a - 1) =
                lg::energy_leading(a, cfg.profile, cfg.lame, cfg.profile.R).value;
        for (int a = 1; a <= std::min(N, cfg.profile.d + 1); ++a)
            f.Q[a - 1] = lg::q_leading(a, cfg.phi, cfg.profile, cfg.lame, cfg.profile.R).value;
        emit_factors(os, f, nullptr);
    } else if (provider == "file") {
        lg::Config fc = lg::Config::from_file(factor_file);
        lg::FactorData f;
        f.d = fc.get_int("d");
        const int N = f.N();
        f.a = Eigen::MatrixXd(N, N);
        for (int r = 0; r < N; ++r) {
            const auto row = fc.get_list("a.row" + std::to_string(r + 1));
            for (int c = 0; c < N; ++c) f.a(r, c) = row.at(c);
        }
        const auto q = fc.get_list("Q");
        f.Q = Eigen::VectorXd(N);
        for (int r = 0; r < N; ++r) f.Q[r] = q.at(r);
        auto [X, diag] = lg::free_constants(f);
        emit_factors(os, f, &X);
        os << "cond_estimate," << diag.cond_estimate << "\n";
    } else {
        throw lg::ConfigError("factors provider must be oracle, leading or file");
    }
    lg::write_manifest(path, "factors", cfg);
    std::cout << "wrote " << path << "\n";
    return 0;
}

lg::ExpansionConfig expansion_config(const lg::RunConfig& cfg) {
    if (cfg.profile.d != 2)
        throw lg::ConfigError("the expansion pipeline with oracle data is two-dimensional");
    auto runs = oracle_sweep_parallel(cfg);
    if (runs.size() < 3)
        throw lg::ConfigError("expansion needs an eps sweep (>= 3 points) for limit data");
    std::vector<lg::FactorData> fds;
    std::vector<std::pair<double, double>> s11, s22;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        fds.push_back(runs[i].factors);
        s11.emplace_back(cfg.eps_list[i], runs[i].factors.a(0, 0));
        s22.emplace_back(cfg.eps_list[i], runs[i].factors.a(1, 1));
    }
    lg::ExpansionConfig ec{cfg.profile, cfg.lame, cfg.phi, lg::extrapolate_starred(fds),
                           {lg::fit_geometry_constants(s11, 2).kstar,
                            lg::fit_geometry_constants(s22, 2).kstar},
                           {}};
    return ec;
}

int cmd_expand(const CommonArgs& args, const std::string& points_arg) {
    lg::RunConfig cfg = load_config(args);
    std::string path;
    auto os = open_csv(args, cfg, "expand", path);
    lg::ExpansionConfig ec = expansion_config(cfg);
    lg::GradExpansion expansion(ec);
    os << "x1,xd,g11,g12,g21,g22,uncertainty\n";
    std::vector<Eigen::Vector2d> pts;
    if (!points_arg.empty()) {
        std::istringstream is(points_arg);
        std::string tok;
        while (std::getline(is, tok, ';')) {
            const auto comma = tok.find(',');
            pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
        }
    } else {
        // default grid: the gap midline
        for (int i = 0; i <= 20; ++i) {
            const double x1 = -cfg.profile.R / 2 + cfg.profile.R * i / 20.0;
            Eigen::VectorXd xp(1);
            xp[0] = x1;
            const double xd =
                cfg.profile.h->value(xp) + 0.5 * cfg.profile.delta(xp);
            pts.emplace_back(x1, xd);
        }
    }
    for (const auto& p : pts) {
        Eigen::VectorXd x(2);
        x << p.x(), p.y();
        const lg::GradResult g = expansion.eval(x);
        os << p.x() << "," << p.y() << "," << g.gradient(0, 0) << "," << g.gradient(0, 1) << ","
           << g.gradient(1, 0) << "," << g.gradient(1, 1) << "," << g.uncertainty << "\n";
    }
    lg::write_manifest(path, "expand", cfg);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_bounds(const CommonArgs& args, const std::string& location, double flat_r) {
    lg::RunConfig cfg = load_config(args);
    std::string path;
    auto os = open_csv(args, cfg, "bounds", path);
    os << "case,side,exponent,log_power,prefactor_expr,eps,value\n";
    std::optional<lg::StarredSummary> st;
    std::optional<lg::FactorData> starred;
    if (cfg.profile.d == 2 && cfg.eps_list.size() >= 3) {
        auto runs = oracle_sweep_parallel(cfg);
        std::vector<lg::FactorData> fds;
        for (const auto& r : runs) fds.push_back(r.factors);
        starred = lg::extrapolate_starred(fds);
        st = lg::starred_summary(*starred);
    }
    const auto in = table_inputs(cfg, st ? &*st : nullptr);
    std::vector<lg::RateCertificate> certs;
    int covered = 0;
    if (location == "segment" || location == "all") {
        try {
            auto c = lg::rate_table_segment(in);
            certs.insert(certs.end(), c.begin(), c.end());
            ++covered;
        } catch (const lg::CaseNotCovered&) {
            if (location == "segment") throw;
        }
    }
    if (location == "cylinder" || location == "all") {
        try {
            auto c = lg::rate_table_cylinder(in);
            certs.insert(certs.end(), c.begin(), c.end());
            ++covered;
        } catch (const lg::CaseNotCovered&) {
            if (location == "cylinder") throw;
        }
    }
    if (location == "flat") {
        certs = lg::rate_table_flat(in, flat_r, cfg.profile.eps);
        ++covered;
    }
    if (covered == 0)
        throw lg::CaseNotCovered("no stated rate case covers this parameter tuple");
    emit_certificates(os, certs, cfg.eps_list);
    lg::write_manifest(path, "bounds", cfg);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, bool dump) {
    lg::RunConfig cfg = load_config(args);
    std::string path;
    auto os = open_csv(args, cfg, "sweep", path);
    os << "eps,a11,a12,a13,a22,a23,a33,Q1,Q2,Q3,X1,X2,X3,lambda_min,grad_mid_norm,"
          "flux_residual,n_nodes\n";
    auto runs = oracle_sweep_parallel(cfg);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& run = runs[i];
        const auto& f = run.factors;
        const double eps = cfg.eps_list[i];
        const Eigen::Matrix2d G =
            lg::sample_gradient(run.mesh, run.combined.u, {0.0, eps / 2.0});
        os << eps << "," << f.a(0, 0) << "," << f.a(0, 1) << "," << f.a(0, 2) << ","
           << f.a(1, 1) << "," << f.a(1, 2) << "," << f.a(2, 2) << "," << f.Q[0] << ","
           << f.Q[1] << "," << f.Q[2] << "," << run.X[0] << "," << run.X[1] << "," << run.X[2]
           << "," << lg::definiteness_check(f).lambda_min << "," << G.norm() << ","
           << run.flux_residual << "," << run.mesh.n_nodes() << "\n";
        if (dump) {
            const std::string dpath =
                path + ".solution-eps" + std::to_string(i) + ".txt";
            lg::dump_solution(run.mesh, run.combined.u, dpath);
        }
    }
    lg::write_manifest(path, "sweep", cfg);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_verify(const std::string& suite) {
    const bool quick = suite == "quick";
    const auto results = lg::run_acceptance(quick, &std::cout);
    return lg::all_pass(results) ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lamegap: gradient blow-up toolkit for a nearly touching inclusion"};
    app.set_version_flag("--version", lg::kVersion);
    app.require_subcommand(1);

    CommonArgs rates_args, quad_args, factors_args, expand_args, bounds_args, sweep_args;
    std::string quad_kind = "moment";
    int quad_k = 0, quad_alpha = 1;
    std::string factors_provider = "oracle", factor_file;
    std::string expand_points;
    std::string bounds_location = "all";
    double flat_r = 0.1;
    std::string verify_suite = "full";

    auto* c_rates = app.add_subcommand("rates", "rate certificates as CSV");
    add_common(c_rates, rates_args);
    auto* c_quad = app.add_subcommand("quad", "near-singular gap integrals");
    add_common(c_quad, quad_args);
    c_quad->add_option("--kind", quad_kind, "moment|energy|q|closed2d|closed3d");
    c_quad->add_option("--k", quad_k, "moment order");
    c_quad->add_option("--alpha", quad_alpha, "mode index for energy/q kinds");
    auto* c_factors = app.add_subcommand("factors", "factor matrices and free constants");
    add_common(c_factors, factors_args);
    c_factors->add_option("--provider", factors_provider, "oracle|leading|file");
    c_factors->add_option("--factor-file", factor_file, "input for --provider file");
    auto* c_expand = app.add_subcommand("expand", "pointwise gradient expansion");
    add_common(c_expand, expand_args);
    c_expand->add_option("--points", expand_points, "semicolon list of x1,xd pairs");
    auto* c_bounds = app.add_subcommand("bounds", "bound certificates");
    add_common(c_bounds, bounds_args);
    c_bounds->add_option("--location", bounds_location, "segment|cylinder|flat|all");
    c_bounds->add_option("--flat-r", flat_r, "flat zone radius for --location flat");
    auto* c_verify = app.add_subcommand("verify", "run the verification suites");
    c_verify->add_option("--suite", verify_suite, "quick|full");
    auto* c_sweep = app.add_subcommand("sweep", "oracle sweep over the gap widths");
    add_common(c_sweep, sweep_args);
    bool sweep_dump = false;
    c_sweep->add_flag("--dump", sweep_dump, "write mesh/solution dumps next to the CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_rates->parsed()) return cmd_rates(rates_args);
        if (c_quad->parsed()) return cmd_quad(quad_args, quad_kind, quad_k, quad_alpha);
        if (c_factors->parsed()) return cmd_factors(factors_args, factors_provider, factor_file);
        if (c_expand->parsed()) return cmd_expand(expand_args, expand_points);
        if (c_bounds->parsed()) return cmd_bounds(bounds_args, bounds_location, flat_r);
        if (c_verify->parsed()) return cmd_verify(verify_suite);
        if (c_sweep->parsed()) return cmd_sweep(sweep_args, sweep_dump);
    } catch (const lg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const lg::CaseNotCovered& e) {
        std::cerr << "case not covered: " << e.what() << "\n";
        return 2;
    } catch (const lg::GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 3;
    } catch (const lg::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
