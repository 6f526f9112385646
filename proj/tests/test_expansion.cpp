#include <doctest.h>

#include <cmath>

#include "lamegap/expansion.hpp"

using namespace lamegap;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

VectorXd pt(double x, double y) {
    VectorXd v(2);
    v << x, y;
    return v;
}

// limit data with decoupled modes and prescribed functionals
FactorData mock_starred(double a33, const Eigen::Vector3d& Q) {
    FactorData st;
    st.d = 2;
    st.a = MatrixXd::Identity(3, 3);
    st.a(2, 2) = a33;
    st.Q = Q;
    return st;
}

ExpansionConfig disk_config(double eps, const BoundaryData& phi, const FactorData& st,
                            std::vector<double> kstar = {0.0, 0.0}) {
    ExpansionConfig cfg{make_disk_profile(0.5, 1.0, 0.2, eps), LameConstants{}, phi, st,
                       std::move(kstar), {1.0}};
    return cfg;
}

}  // namespace

TEST_CASE("gradient expansion basics") {
    const double eps = 1e-3;
    SUBCASE("zero datum gives the zero field") {
        BoundaryData phi = make_family(Family::E1, 0.0, 2, 2);
        auto cfg = disk_config(eps, phi, mock_starred(1.0, Eigen::Vector3d::Zero()));
        const GradResult g = grad_u_asymptotic(cfg, pt(0.0, eps / 2));
        CHECK(g.gradient.norm() == 0.0);
    }
    SUBCASE("linearity through the datum and its functionals") {
        BoundaryData phi1 = make_family(Family::E1, 1.0, 2, 2);
        BoundaryData phi2 = make_family(Family::E1, 2.0, 2, 2);
        const Eigen::Vector3d Q(0.5, -1.0, 0.1);
        auto g1 = grad_u_asymptotic(disk_config(eps, phi1, mock_starred(2.0, Q)),
                                    pt(0.05, 2e-3));
        auto g2 = grad_u_asymptotic(disk_config(eps, phi2, mock_starred(2.0, 2 * Q)),
                                    pt(0.05, 2e-3));
        CHECK((g2.gradient - 2.0 * g1.gradient).norm() < 1e-12 * g1.gradient.norm());
    }
    SUBCASE("uncertainty carries the datum scale") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        auto cfg = disk_config(eps, phi, mock_starred(1.0, Eigen::Vector3d::Zero()));
        const GradResult g = grad_u_asymptotic(cfg, pt(0.0, eps / 2));
        CHECK(g.uncertainty == doctest::Approx(phi.c2_norm(0.2)));
    }
    SUBCASE("planar path requires a flat datum at the touching point") {
        BoundaryData phi = make_family(Family::E3, 1.0, 1, 2);  // gradient 1 at 0
        auto cfg = disk_config(eps, phi, mock_starred(1.0, Eigen::Vector3d::Zero()));
        CHECK_THROWS_AS(grad_u_asymptotic(cfg, pt(0.0, eps / 2)), ConfigError);
    }
    SUBCASE("missing limit data") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        ExpansionConfig cfg{make_disk_profile(0.5, 1.0, 0.2, eps), LameConstants{}, phi,
                            std::nullopt, {0.0, 0.0}, {1.0}};
        CHECK_THROWS_AS(grad_u_asymptotic(cfg, pt(0.0, eps / 2)), ConfigError);
    }
}

TEST_CASE("expansion matches the decoupled determinant arithmetic") {
    // with diagonal limit data the mode constants reduce to the diagonal
    // two-term-energy division, which ties the modules together exactly
    const double eps = 1e-3;
    LameConstants lame;
    BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
    const Eigen::Vector3d Q(0.4, -0.8, 0.2);
    const double a33 = 5.0;
    auto cfg = disk_config(eps, phi, mock_starred(a33, Q));
    GradExpansion exp(cfg);
    const GradResult g = exp.eval(pt(0.0, eps / 2));
    for (int alpha = 1; alpha <= 2; ++alpha) {
        const double cramer = Q[alpha - 1] / diag_expansion(alpha, 2, lame, {1.0}, eps, 0.0);
        CHECK(g.c_alpha[alpha - 1] == doctest::Approx(cramer).epsilon(1e-12));
    }
    CHECK(g.c_alpha[2] == doctest::Approx(Q[2] / a33).epsilon(1e-12));
}

TEST_CASE("segment and cylinder bound certificates from a config") {
    const double eps = 1e-3;
    SUBCASE("covered planar segment case") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        auto cfg = disk_config(eps, phi, mock_starred(2.0, {1.0, 0.5, 0.0}));
        auto certs = bounds_segment(cfg);
        REQUIRE(certs.size() == 2);
        CHECK(certs[0].rate.exponent == Fraction(-1, 2));
        CHECK(certs[0].resolved());
    }
    SUBCASE("uncovered cylinder case propagates") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        auto cfg = disk_config(eps, phi, mock_starred(2.0, {1.0, 0.5, 0.0}));
        CHECK_THROWS_AS(bounds_cylinder(cfg), CaseNotCovered);
    }
}

TEST_CASE("field envelope") {
    const double eps = 1e-6;
    BoundaryData phi = make_family(Family::E2, 1.0, 1, 2);
    GapProfile prof = make_power_profile(2, 4, 1.0, 0.5, eps, 1.0, 1.0);
    ExpansionConfig cfg{prof, LameConstants{}, phi, mock_starred(3.0, {0.2, 0.3, 0.4}), {},
                        {}};
    const FieldEnvelope env = bounds_field(cfg);
    CHECK(env.cls == ParityClass::A2);

    SUBCASE("reduces to the touching-segment term at the origin") {
        const double v0 = env.evaluate(0.0, eps);
        CHECK(v0 == doctest::Approx(env.H.HA.value * env.rho_A.evaluate(eps) / eps));
    }
    SUBCASE("comparable to the cylinder certificate at the crossover") {
        RateTableInputs in;
        in.family = Family::E2;
        in.d = 2;
        in.m = 4;
        in.k = 1;
        auto certs = rate_table_cylinder(in);
        const double crossover = std::pow(eps, 0.25);
        const double ratio = env.evaluate(crossover, eps) / certs[0].evaluate(eps);
        CHECK(ratio > 1.0 / 3.0);
        CHECK(ratio < 3.0);
    }
    SUBCASE("fixed cross-section value stabilizes as the gap closes") {
        // rho_A vanishes and rho_B is constant for this case, so the value
        // at fixed |x'| converges
        const double v1 = env.evaluate(0.4, 1e-10);
        const double v2 = env.evaluate(0.4, 1e-12);
        CHECK(std::isfinite(v2));
        CHECK(std::abs(v1 - v2) / std::abs(v2) < 1e-4);
    }
    SUBCASE("unclassifiable data is rejected") {
        auto odd = make_custom_boundary(
            2, {make_monomial_surface(1, {1.0}, {{2}}), make_monomial_surface(1, {1.0}, {{1}})});
        ExpansionConfig bad{prof, LameConstants{}, odd, std::nullopt, {}, {}};
        CHECK_THROWS_AS(bounds_field(bad), ConfigError);
    }
}

TEST_CASE("flat-boundary bounds") {
    const double eps = 1e-6;
    GapProfile prof = make_power_profile(2, 2, 1.0, 0.5, eps, 1.0, 1.0);
    SUBCASE("tangential family pins both sides") {
        BoundaryData phi = make_family(Family::E3, 1.0, 1, 2);
        ExpansionConfig cfg{prof, LameConstants{}, phi, std::nullopt, {}, {}};
        const FlatBounds fb = bounds_flat(cfg, 0.1, eps);
        CHECK(fb.sigma == doctest::Approx(0.2));  // planar ball measure 2r
        CHECK(fb.upper(eps) == doctest::Approx(0.2 / eps));
        CHECK(fb.lower(eps) == doctest::Approx(fb.upper(eps)));
        CHECK(fb.unified(eps) == doctest::Approx(0.2 / eps));
    }
    SUBCASE("radial family brackets the unified form") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        ExpansionConfig cfg{prof, LameConstants{}, phi, std::nullopt, {}, {}};
        const FlatBounds fb = bounds_flat(cfg, 0.1, eps);
        CHECK(fb.lower(eps) <= fb.upper(eps));
        CHECK(fb.upper(eps) >= fb.unified(eps));
        // hand-evaluated certificate value
        const double sig = 0.2;
        const double expect =
            (flat_gap_factor(2, 1, 2, 2, eps, sig, 1, 1) /
                 flat_gap_factor(0, 2, 2, 2, eps, sig, 1, 1) +
             std::pow(sig, 2.0)) /
            eps;
        CHECK(fb.upper(eps) == doctest::Approx(expect));
    }
    SUBCASE("vanishing flat zone recovers the curved-case rate") {
        // with sigma -> 0 the G ratio reduces to a pure ratio of rate
        // indices; compare its eps-scaling with the curved segment bound
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        GapProfile p6 = make_power_profile(2, 6, 1.0, 0.5, eps, 1.0, 1.0);
        ExpansionConfig cfg{p6, LameConstants{}, phi, std::nullopt, {}, {}};
        const FlatBounds fb = bounds_flat(cfg, 1e-9, eps);
        RateTableInputs in;
        in.family = Family::E1;
        in.d = 2;
        in.m = 6;
        in.k = 2;
        auto seg = rate_table_segment(in);
        const double s_flat =
            std::log(fb.upper(1e-7) / fb.upper(1e-9)) / std::log(1e-7 / 1e-9);
        const double s_seg =
            std::log(seg[0].evaluate(1e-7) / seg[0].evaluate(1e-9)) / std::log(1e-7 / 1e-9);
        CHECK(s_flat == doctest::Approx(s_seg).epsilon(1e-6));
    }
    SUBCASE("flat zone must fit in the neighborhood") {
        BoundaryData phi = make_family(Family::E3, 1.0, 1, 2);
        ExpansionConfig cfg{prof, LameConstants{}, phi, std::nullopt, {}, {}};
        CHECK_THROWS_AS(bounds_flat(cfg, 0.9, eps), ConfigError);
    }
}

TEST_CASE("translation modes dominate the touching segment for radial data") {
    // with limit data built from the leading energies, the rotation-mode
    // share of the segment gradient decays as the gap closes
    LameConstants lame;
    BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
    double prev_ratio = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        auto cfg = disk_config(eps, phi, mock_starred(4.0, {0.5, -1.0, 0.3}));
        GradExpansion exp(cfg);
        const VectorXd x = pt(0.0, eps / 2);
        GapProfile prof = cfg.profile;
        MatrixXd trans = exp.eval(x).c_alpha[0] * u_bar(1, prof, lame, nullptr).gradient(x) +
                         exp.eval(x).c_alpha[1] * u_bar(2, prof, lame, nullptr).gradient(x);
        MatrixXd rot = exp.eval(x).c_alpha[2] * u_bar(3, prof, lame, nullptr).gradient(x);
        const double ratio = rot.norm() / trans.norm();
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 0.05);
}

TEST_CASE("certificate consistency for resolved cases") {
    for (double eps : {1e-3, 1e-4, 1e-6}) {
        RateTableInputs in;
        in.family = Family::E1;
        in.d = 2;
        in.m = 6;
        in.k = 2;
        in.kappa1 = 0.8;
        in.kappa2 = 1.3;
        auto segs = rate_table_segment(in);
        CHECK(segs[1].evaluate(eps) <= segs[0].evaluate(eps));
        RateTableInputs ic = in;
        ic.family = Family::E2;
        ic.m = 4;
        ic.k = 1;
        auto cyls = rate_table_cylinder(ic);
        CHECK(cyls[1].evaluate(eps) <= cyls[0].evaluate(eps));
    }
}
