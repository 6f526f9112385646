// Python bindings for the main operations: rate indices and certificates,
// gap quadrature, auxiliary fields, factor systems and the verification
// solver on the tangent-disk geometry.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lamegap/expansion.hpp"
#include "lamegap/fem.hpp"
#include "lamegap/quadrature.hpp"
#include "lamegap/version.hpp"

namespace py = pybind11;
using namespace lamegap;

namespace {

Family family_from_string(const std::string& s) {
    if (s == "E1") return Family::E1;
    if (s == "E2") return Family::E2;
    if (s == "E3") return Family::E3;
    throw ConfigError("unknown family tag: " + s);
}

GapProfile power_profile(int d, int m, double c, double R, double eps) {
    return make_power_profile(d, m, c, R, eps, c, c);
}

py::dict certificate_to_dict(const RateCertificate& c) {
    py::dict out;
    out["case"] = c.case_label;
    out["side"] = c.side;
    out["location"] = c.location;
    out["exponent"] = c.rate.exponent.value();
    out["exponent_str"] = c.rate.exponent.str();
    out["log_power"] = c.rate.log_power;
    out["prefactor"] = c.prefactor;
    out["prefactor_expr"] = c.prefactor_expr;
    out["note"] = c.note;
    return out;
}

RateTableInputs make_inputs(const std::string& family, int d, int m, int k, double kappa1,
                            double kappa2, double eta, double lam, double mu) {
    RateTableInputs in;
    in.family = family_from_string(family);
    in.d = d;
    in.m = m;
    in.k = k;
    in.kappa1 = kappa1;
    in.kappa2 = kappa2;
    in.eta = eta;
    in.lame = LameConstants{lam, mu, 0.0};
    return in;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gradient blow-up toolkit for an inclusion nearly touching the matrix boundary";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<GeometryError>(m, "GeometryError");
    py::register_exception<CaseNotCovered>(m, "CaseNotCovered");
    py::register_exception<NumericalError>(m, "NumericalError");

    m.def("rho", &rho, py::arg("i"), py::arg("d"), py::arg("m"), py::arg("eps"),
          "Gap rate index eps^{(d+i-1)/m - 1} with its log and constant branches");
    m.def(
        "rho_selectors",
        [](const std::string& cls, int d, int m, int k, double eps) {
            ParityClass c = cls == "A1"   ? ParityClass::A1
                            : cls == "A2" ? ParityClass::A2
                            : cls == "A3" ? ParityClass::A3
                                          : ParityClass::None;
            const RhoSelectors s = rho_selectors(c, d, m, k);
            return std::make_pair(s.rho_A.evaluate(eps), s.rho_B.evaluate(eps));
        },
        py::arg("parity"), py::arg("d"), py::arg("m"), py::arg("k"), py::arg("eps"));
    m.def("flat_gap_factor", &flat_gap_factor, py::arg("i"), py::arg("j"), py::arg("d"),
          py::arg("m"), py::arg("eps"), py::arg("sigma"), py::arg("kappa1"), py::arg("kappa2"));
    m.def("closed_form_convex_2d", &closed_form_convex_2d, py::arg("tau1"), py::arg("R"),
          py::arg("eps"));
    m.def("closed_form_convex_3d", &closed_form_convex_3d, py::arg("tau1"), py::arg("tau2"),
          py::arg("R"), py::arg("eps"));
    m.def("bridge", &bridge, py::arg("v"));
    m.def(
        "lame_rate_constant",
        [](int d, int alpha, double lam, double mu) {
            return lame_rate_constant(d, alpha, LameConstants{lam, mu, 0.0});
        },
        py::arg("d"), py::arg("alpha"), py::arg("lam"), py::arg("mu"));

    m.def(
        "rigid_basis",
        [](int d, int alpha, const VectorXd& x) { return RigidBasis(d, alpha).value(x); },
        py::arg("d"), py::arg("alpha"), py::arg("x"));
    m.def(
        "family_trace",
        [](const std::string& tag, double eta, int k, int d, const VectorXd& xp) {
            return make_family(family_from_string(tag), eta, k, d).trace(xp);
        },
        py::arg("family"), py::arg("eta"), py::arg("k"), py::arg("d"), py::arg("xp"));
    m.def(
        "classify_family",
        [](const std::string& tag, double eta, int k, int d) {
            return to_string(classify_parity(make_family(family_from_string(tag), eta, k, d), 0.5));
        },
        py::arg("family"), py::arg("eta"), py::arg("k"), py::arg("d"));

    m.def(
        "moment_integral",
        [](int d, int m, double c, double R, double eps, int k, double tol_rel) {
            QuadOptions opt;
            opt.tol_rel = tol_rel;
            const QuadResult r = moment_integral(power_profile(d, m, c, R, eps), k, R, opt);
            return py::make_tuple(r.value, r.abs_error_estimate, r.n_evals);
        },
        py::arg("d"), py::arg("m"), py::arg("c"), py::arg("R"), py::arg("eps"), py::arg("k"),
        py::arg("tol_rel") = 1e-10,
        "Integral of |x'|^k over the gap width for the profile c |x'|^m");
    m.def(
        "vbar",
        [](int d, int m, double c, double R, double eps, const VectorXd& x) {
            const VBarEval v = vbar(power_profile(d, m, c, R, eps), x);
            return py::make_tuple(v.value, VectorXd(v.grad));
        },
        py::arg("d"), py::arg("m"), py::arg("c"), py::arg("R"), py::arg("eps"), py::arg("x"));

    m.def(
        "free_constants",
        [](const MatrixXd& a, const VectorXd& Q) {
            FactorData f;
            f.d = 2;
            f.a = a;
            f.Q = Q;
            auto [X, diag] = free_constants(f);
            py::dict out;
            out["X"] = X;
            out["det"] = diag.det;
            out["cond_estimate"] = diag.cond_estimate;
            out["cramer_vs_direct"] = diag.cramer_vs_direct;
            out["lambda_min"] = definiteness_check(f).lambda_min;
            return out;
        },
        py::arg("a"), py::arg("Q"));
    m.def(
        "c_alpha_asymptotic",
        [](int d, const MatrixXd& a, const VectorXd& Q, std::vector<double> tau, double lam,
           double mu, double eps, std::vector<double> kstar) {
            FactorData f;
            f.d = d;
            f.a = a;
            f.Q = Q;
            return c_alpha_asymptotic(d, f, tau, LameConstants{lam, mu, 0.0}, eps, kstar);
        },
        py::arg("d"), py::arg("a"), py::arg("Q"), py::arg("tau"), py::arg("lam"), py::arg("mu"),
        py::arg("eps"), py::arg("kstar"));
    m.def(
        "fit_geometry_constants",
        [](std::vector<double> eps, std::vector<double> a, int d) {
            if (eps.size() != a.size()) throw ConfigError("eps and a must have equal length");
            std::vector<std::pair<double, double>> samples;
            for (std::size_t i = 0; i < eps.size(); ++i) samples.emplace_back(eps[i], a[i]);
            const GeometryFit f = fit_geometry_constants(samples, d);
            return py::make_tuple(f.leading_coef, f.kstar, f.rms_residual);
        },
        py::arg("eps"), py::arg("a"), py::arg("d"));
    m.def(
        "diag_expansion",
        [](int alpha, int d, double lam, double mu, std::vector<double> tau, double eps,
           double kstar) {
            return diag_expansion(alpha, d, LameConstants{lam, mu, 0.0}, tau, eps, kstar);
        },
        py::arg("alpha"), py::arg("d"), py::arg("lam"), py::arg("mu"), py::arg("tau"),
        py::arg("eps"), py::arg("kstar"));

    m.def(
        "rate_table",
        [](const std::string& location, const std::string& family, int d, int m, int k,
           double kappa1, double kappa2, double eta, double lam, double mu) {
            const RateTableInputs in =
                make_inputs(family, d, m, k, kappa1, kappa2, eta, lam, mu);
            std::vector<RateCertificate> certs;
            if (location == "segment") certs = rate_table_segment(in);
            else if (location == "cylinder") certs = rate_table_cylinder(in);
            else if (location == "corollary") certs = rate_table_corollary(in);
            else throw ConfigError("location must be segment, cylinder or corollary");
            py::list out;
            for (const auto& c : certs) out.append(certificate_to_dict(c));
            return out;
        },
        py::arg("location"), py::arg("family"), py::arg("d"), py::arg("m"), py::arg("k"),
        py::arg("kappa1") = 1.0, py::arg("kappa2") = 1.0, py::arg("eta") = 1.0,
        py::arg("lam") = 1.0, py::arg("mu") = 1.0);

    m.def(
        "solve_reference",
        [](double eps, const std::string& family, double eta, int k, double lam, double mu,
           double r1, double r0, int n_layers, double angular_res, double r_gap) {
            MeshParams mp;
            mp.n_layers = n_layers;
            mp.angular_res = angular_res;
            mp.r_gap = r_gap;
            const OracleRun run = solve_full(make_family(family_from_string(family), eta, k, 2),
                                             eps, LameConstants{lam, mu, 0.0}, mp, r1, r0);
            const Eigen::Matrix2d G =
                sample_gradient(run.mesh, run.combined.u, {0.0, eps / 2.0});
            py::dict out;
            out["a"] = MatrixXd(run.factors.a);
            out["Q"] = VectorXd(run.factors.Q);
            out["X"] = VectorXd(run.X);
            out["grad_mid"] = MatrixXd(G);
            out["flux_residual"] = run.flux_residual;
            out["n_nodes"] = run.mesh.n_nodes();
            out["min_angle_deg"] = run.mesh.min_angle_deg();
            return out;
        },
        py::arg("eps"), py::arg("family") = "E1", py::arg("eta") = 1.0, py::arg("k") = 2,
        py::arg("lam") = 1.0, py::arg("mu") = 1.0, py::arg("r1") = 0.5, py::arg("r0") = 1.0,
        py::arg("n_layers") = 8, py::arg("angular_res") = 16.0, py::arg("r_gap") = 0.2,
        "Finite-element verification solve on the tangent disks");
}
