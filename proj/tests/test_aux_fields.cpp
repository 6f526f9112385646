#include <doctest.h>

#include <cmath>
#include <random>

#include "lamegap/aux_fields.hpp"
#include "lamegap/fitting.hpp"

using namespace lamegap;

namespace {

VectorXd pt(double x, double y) {
    VectorXd v(2);
    v << x, y;
    return v;
}

GapProfile half_quadratic(double eps) {
    return make_power_profile(2, 2, 0.5, 1.0, eps, 0.5, 0.5);
}

}  // namespace

TEST_CASE("crossing profile values and derivatives") {
    GapProfile p = half_quadratic(1e-2);
    SUBCASE("boundary values") {
        CHECK(vbar(p, pt(0.3, 0.0)).value == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(vbar(p, pt(0.3, 1e-2 + 0.045)).value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("midpoint of the touching segment") {
        const VBarEval v = vbar(p, pt(0.0, 5e-3));
        CHECK(v.value == doctest::Approx(0.5));
        CHECK(v.grad[1] == doctest::Approx(100.0));
        CHECK(v.grad[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("gradient matches central differences") {
        GapProfile disks = make_disk_profile(0.5, 1.0, 0.2, 1e-2);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(-0.35, 0.35), uv(0.1, 0.9);
        for (int i = 0; i < 25; ++i) {
            VectorXd xp(1);
            xp[0] = ux(rng);
            const double del = disks.delta(xp);
            const VectorXd x = pt(xp[0], disks.h->value(xp) + uv(rng) * del);
            const VBarEval v = vbar(disks, x);
            const double h = 1e-7;
            for (int q = 0; q < 2; ++q) {
                VectorXd e = VectorXd::Zero(2);
                e[q] = h;
                const double fd = (vbar(disks, x + e).value - vbar(disks, x - e).value) / (2 * h);
                CHECK(std::abs(fd - v.grad[q]) / std::max(1.0, std::abs(v.grad[q])) < 1e-8);
            }
            // Hessian against differences of the analytic gradient
            for (int q = 0; q < 2; ++q) {
                VectorXd e = VectorXd::Zero(2);
                e[q] = h;
                const VectorXd fd =
                    (vbar(disks, x + e).grad - vbar(disks, x - e).grad) / (2 * h);
                CHECK((fd - v.hess.col(q)).norm() / std::max(1.0, v.hess.norm()) < 1e-6);
            }
        }
    }
    CHECK_THROWS_AS(vbar(p, pt(0.0, 1.0)), GeometryError);
}

TEST_CASE("bridge polynomial") {
    CHECK(bridge(0.0) == doctest::Approx(0.0));
    CHECK(bridge(1.0) == doctest::Approx(0.0));
    CHECK(bridge(0.5) == doctest::Approx(-0.125));
    CHECK(bridge_deriv(0.5) == 0.0);
}

TEST_CASE("mode fields interpolate their boundary data") {
    GapProfile p = half_quadratic(1e-2);
    LameConstants lame;
    SUBCASE("first translation equals its datum on the inclusion graph") {
        LeadingTerm f = u_bar(1, p, lame, nullptr);
        const VectorXd top = pt(0.2, 1e-2 + 0.02);
        const VectorXd v = f.value(top);
        CHECK(std::abs(v[0] - 1.0) < 1e-12);
        CHECK(std::abs(v[1]) < 1e-12);
    }
    SUBCASE("datum field vanishes on the inclusion graph") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        LeadingTerm f = u_bar(0, p, lame, &phi);
        CHECK(f.value(pt(0.2, 1e-2 + 0.02)).norm() < 1e-12);
    }
    SUBCASE("vertical translation has the reciprocal-gap slope") {
        LeadingTerm f = u_bar(2, p, lame, nullptr);
        const MatrixXd g = f.gradient(pt(0.0, 5e-3));
        CHECK(g(1, 1) == doctest::Approx(100.0));
    }
    CHECK_THROWS_AS(u_bar(0, p, lame, nullptr), ConfigError);
    CHECK_THROWS_AS(u_bar(7, p, lame, nullptr), std::invalid_argument);
}

TEST_CASE("general blend specializes to the mode fields") {
    GapProfile p = make_disk_profile(0.5, 1.0, 0.2, 1e-2);
    LameConstants lame;
    BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);

    SUBCASE("zero data gives the zero field") {
        LeadingTerm f(p, lame, SurfaceField::zero(2), SurfaceField::zero(2));
        CHECK(f.value(pt(0.1, 8e-3)).norm() == 0.0);
        CHECK(f.gradient(pt(0.1, 8e-3)).norm() == 0.0);
    }
    for (int alpha : {1, 2, 3}) {
        CAPTURE(alpha);
        LeadingTerm general(p, lame, SurfaceField::rigid_on_top(RigidBasis(2, alpha), p),
                            SurfaceField::zero(2));
        LeadingTerm mode = u_bar(alpha, p, lame, nullptr);
        for (double x1 : {-0.15, 0.0, 0.08}) {
            VectorXd xp(1);
            xp[0] = x1;
            const VectorXd x = pt(x1, p.h->value(xp) + 0.37 * p.delta(xp));
            CHECK((general.value(x) - mode.value(x)).norm() < 1e-12);
            CHECK((general.gradient(x) - mode.gradient(x)).norm() < 1e-12);
        }
    }
    SUBCASE("datum-only blend") {
        LeadingTerm general(p, lame, SurfaceField::zero(2), SurfaceField::from_boundary(phi));
        LeadingTerm mode = u_bar(0, p, lame, &phi);
        for (double x1 : {-0.1, 0.05, 0.18}) {
            VectorXd xp(1);
            xp[0] = x1;
            const VectorXd x = pt(x1, p.h->value(xp) + 0.6 * p.delta(xp));
            CHECK((general.value(x) - mode.value(x)).norm() < 1e-12);
            CHECK((general.gradient(x) - mode.gradient(x)).norm() < 1e-12);
        }
    }
}

TEST_CASE("remainder envelope") {
    GapProfile p = half_quadratic(1e-3);
    LameConstants lame;
    SUBCASE("zero data") {
        LeadingTerm f(p, lame, SurfaceField::zero(2), SurfaceField::zero(2));
        VectorXd xp(1);
        xp[0] = 0.1;
        CHECK(f.remainder_envelope(xp) == 0.0);
    }
    SUBCASE("constant translation datum") {
        LeadingTerm f = u_bar(1, p, lame, nullptr);
        VectorXd xp(1);
        xp[0] = 0.0;
        const double del = p.delta(xp);
        CHECK(f.remainder_envelope(xp) == doctest::Approx(1.0 + del).epsilon(1e-9));
    }
    SUBCASE("quadratic matrix-side datum at the touching point") {
        auto phi = make_custom_boundary(
            2, {make_monomial_surface(1, {1.0}, {{2}}), make_zero_surface()});
        LeadingTerm f = u_bar(0, p, lame, &phi);
        VectorXd xp(1);
        xp[0] = 0.0;
        const double del = p.delta(xp);
        CHECK(f.remainder_envelope(xp) == doctest::Approx(del * f.phi_c2()).epsilon(1e-9));
    }
}

TEST_CASE("per-mode energy constants") {
    LameConstants lame;
    lame.lambda = 1.0;
    lame.mu = 1.0;
    CHECK(lame_rate_constant(2, 1, lame) == 1.0);
    CHECK(lame_rate_constant(2, 2, lame) == 3.0);
    CHECK(lame_rate_constant(2, 3, lame) == 3.0);
    LameConstants lm2{1.0, 2.0, 0.0};
    CHECK(lame_rate_constant(3, 3, lm2) == doctest::Approx(5.0));
    CHECK(lame_rate_constant(3, 6, lm2) == doctest::Approx(4.0));
    CHECK(lame_rate_constant(3, 1, lm2) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lame_rate_constant(2, 4, lame), std::invalid_argument);
}

TEST_CASE("elasticity-operator residual probes") {
    GapProfile p = make_disk_profile(0.5, 1.0, 0.2, 1e-2);
    LameConstants lame;
    const VectorXd x = pt(0.05, 6e-3);

    SUBCASE("rigid motions are exact solutions") {
        const VectorXd r = lame_residual(p, AuxFieldFn::rigid(RigidBasis(2, 3)), lame, x);
        CHECK(r.norm() < 1e-8);
    }
    SUBCASE("linear maps are exact solutions") {
        MatrixXd A(2, 2);
        A << 0.4, -0.3, 0.2, 0.9;
        const VectorXd r = lame_residual(p, AuxFieldFn::linear(A), lame, x);
        CHECK(r.norm() < 1e-8);
    }
    SUBCASE("step guard") {
        CHECK_THROWS_AS(
            lame_residual(p, AuxFieldFn::rigid(RigidBasis(2, 1)), lame, x, 1.0),
            NumericalError);
    }
    SUBCASE("mode-field residual is bounded by the datum envelope") {
        LeadingTerm f = u_bar(1, p, lame, nullptr);
        const AuxFieldFn fn = AuxFieldFn::from_leading(f);
        double worst = 0;
        for (double x1 : {0.02, 0.05, 0.1, 0.15}) {
            VectorXd xp(1);
            xp[0] = x1;
            const double del = p.delta(xp);
            const VectorXd xm = pt(x1, p.h->value(xp) + del / 2);
            const double res = lame_residual(p, fn, lame, xm).norm();
            const double envelope = 1.0 / std::pow(del, 2.0 / p.m) + 1.0;
            worst = std::max(worst, res / envelope);
        }
        CHECK(worst < 50.0);
    }
}

TEST_CASE("residual stays inside its envelope across gap widths") {
    // ratio |L v| / (|phi| delta^{-2/m} + |grad phi| delta^{-1} + |phi|_C2)
    // must show no trend as the gap closes
    LameConstants lame;
    BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
    std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
    std::vector<double> ratios;
    for (double eps : eps_list) {
        GapProfile p = make_disk_profile(0.5, 1.0, 0.2, eps);
        LeadingTerm f = u_bar(0, p, lame, &phi);
        const AuxFieldFn fn = AuxFieldFn::from_leading(f);
        double worst = 0;
        std::vector<double> grid;
        for (int i = 1; i <= 16; ++i) grid.push_back(0.005 * std::pow(36.0, (i - 1) / 15.0));
        for (double c : {0.5, 1.0, 2.0}) grid.push_back(c * std::sqrt(2.0 * eps));
        for (double x1 : grid) {
            if (x1 > 0.19) continue;
            VectorXd xp(1);
            xp[0] = x1;
            const double del = p.delta(xp);
            const double env = phi.trace(xp).norm() / std::pow(del, 2.0 / p.m) +
                               phi.trace_jac(xp).norm() / del + f.phi_c2();
            for (double frac : {0.25, 0.5, 0.75}) {
                const VectorXd x = pt(x1, p.h->value(xp) + frac * del);
                const double res = lame_residual(p, fn, lame, x).norm();
                worst = std::max(worst, res / env);
            }
        }
        ratios.push_back(worst);
    }
    const double slope = loglog_fit(eps_list, ratios).slope;
    CHECK(std::abs(slope) < 0.1);
}
