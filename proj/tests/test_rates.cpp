#include <doctest.h>

#include <cmath>

#include "lamegap/rates.hpp"

using namespace lamegap;

TEST_CASE("rate index branches") {
    CHECK(rho(0, 2, 2, 1e-4) == doctest::Approx(100.0));
    CHECK(rho(0, 3, 2, std::exp(-10.0)) == doctest::Approx(10.0));
    CHECK(rho(2, 3, 2, 0.5) == 1.0);
    CHECK(rho_monomial(0, 2, 2).exponent == Fraction(-1, 2));
    CHECK(rho_monomial(0, 3, 2).log_power == 1);
    CHECK(rho_monomial(2, 3, 2).exponent == Fraction(0));
    CHECK_THROWS_AS(rho(0, 2, 2, 1.5), ConfigError);
}

TEST_CASE("case selectors") {
    SUBCASE("even class promotes the datum order") {
        const RhoSelectors s = rho_selectors(ParityClass::A1, 2, 6, 2);
        CHECK(s.rho_A.exponent == Fraction(1, 3));
        CHECK(s.rho_A.log_power == 0);
    }
    SUBCASE("odd class keeps the base index") {
        const RhoSelectors s = rho_selectors(ParityClass::A2, 2, 2, 1);
        CHECK(s.rho_A.exponent == Fraction(1, 2));
    }
    SUBCASE("log threshold inverts into a negative log power") {
        const RhoSelectors s = rho_selectors(ParityClass::A3, 3, 4, 1);
        CHECK(s.rho_B.exponent == Fraction(0));
        CHECK(s.rho_B.log_power == -1);
        CHECK(s.rho_B.evaluate(1e-4) == doctest::Approx(1.0 / std::abs(std::log(1e-4))));
    }
    CHECK_THROWS_AS(rho_selectors(ParityClass::None, 2, 2, 1), ConfigError);
}

TEST_CASE("envelope constants") {
    LameConstants lame;
    SUBCASE("even class with unit constants") {
        const auto env = envelope_constants(ParityClass::A1, 2, 4, 2, 1.0, 1.0, 1.0, lame,
                                            nullptr);
        CHECK(env.HA.resolved);
        CHECK(env.HA.value == doctest::Approx(1.0));
    }
    SUBCASE("vertical class ratio of envelope constants") {
        const auto env = envelope_constants(ParityClass::A2, 2, 6, 1, 1.0, 2.0, 1.0, lame,
                                            nullptr);
        CHECK(env.HB.resolved);
        CHECK(env.HB.value == doctest::Approx(std::sqrt(2.0)));
    }
    SUBCASE("low-order branch passes determinant ratios through") {
        FactorData f;
        f.d = 4;
        const int N = f.N();
        f.a = MatrixXd::Identity(N, N);
        f.Q = VectorXd::Zero(N);
        f.Q[0] = 1.0;
        const StarredSummary st = starred_summary(f);
        const auto env =
            envelope_constants(ParityClass::A1, 4, 2, 1, 1.0, 1.0, 1.0, lame, &st);
        CHECK(env.HA.value == doctest::Approx(1.0));
    }
    SUBCASE("determinant branch without data stays unresolved") {
        const auto env =
            envelope_constants(ParityClass::A1, 4, 2, 1, 1.0, 1.0, 1.0, lame, nullptr);
        CHECK_FALSE(env.HA.resolved);
        CHECK(env.HA.expr.find("det F3") != std::string::npos);
    }
}

TEST_CASE("flat gap factors") {
    SUBCASE("vanishing flat zone leaves the curved tail") {
        CHECK(flat_gap_factor(0, 1, 2, 2, 1e-4, 0.0, 1.0, 1.0) == doctest::Approx(1e-2));
    }
    SUBCASE("wide flat zone saturates at its leading power") {
        CHECK(flat_gap_factor(0, 1, 2, 2, 1e-12, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("term by term") {
        const double v = flat_gap_factor(2, 2, 3, 2, 1e-6, 0.25, 1.0, 1.0);
        CHECK(v == doctest::Approx(0.0625 + std::pow(0.25, 1.5) * 1e-3 + 1e-6).epsilon(1e-9));
        CHECK(v == doctest::Approx(0.0626).epsilon(2e-3));
    }
    CHECK_THROWS_AS(flat_gap_factor(0, 3, 2, 2, 1e-4, 0.0, 1.0, 1.0), ConfigError);
}

namespace {
RateTableInputs base_inputs(Family fam, int d, int m, int k) {
    RateTableInputs in;
    in.family = fam;
    in.d = d;
    in.m = m;
    in.k = k;
    return in;
}
}  // namespace

TEST_CASE("segment certificates") {
    SUBCASE("high-order radial datum") {
        auto certs = rate_table_segment(base_inputs(Family::E1, 2, 6, 2));
        REQUIRE(certs.size() == 2);
        for (const auto& c : certs) {
            CHECK(c.rate.exponent == Fraction(-2, 3));
            CHECK(c.rate.log_power == 0);
            CHECK(c.resolved());
        }
        CHECK(certs[0].side == "upper");
        CHECK(certs[1].evaluate(1e-3) <= certs[0].evaluate(1e-3));
    }
    SUBCASE("low-order case carries an unresolved determinant ratio") {
        auto certs = rate_table_segment(base_inputs(Family::E2, 2, 2, 1));
        REQUIRE(certs.size() == 2);
        CHECK(certs[0].rate.exponent == Fraction(-1, 2));
        CHECK_FALSE(certs[0].resolved());
        CHECK(certs[0].note.find("unresolved") != std::string::npos);
    }
    SUBCASE("resolved prefactors from limit data") {
        FactorData f;
        f.d = 2;
        f.a = MatrixXd::Identity(3, 3);
        f.Q = VectorXd::Zero(3);
        f.Q[0] = 2.0;
        const StarredSummary st = starred_summary(f);
        auto in = base_inputs(Family::E1, 2, 2, 2);
        in.starred = &st;
        auto certs = rate_table_segment(in);
        CHECK(certs[0].resolved());
        CHECK(certs[0].prefactor == doctest::Approx(2.0));  // det F1*^1 = Q1, det D* = 1
        CHECK(certs[1].note.find("alpha0 = 1") != std::string::npos);
    }
    SUBCASE("vanishing determinants flag the lower bound") {
        FactorData f;
        f.d = 2;
        f.a = MatrixXd::Identity(3, 3);
        f.Q = VectorXd::Zero(3);
        const StarredSummary st = starred_summary(f);
        auto in = base_inputs(Family::E1, 2, 2, 2);
        in.starred = &st;
        auto certs = rate_table_segment(in);
        CHECK(certs[1].note.find("unavailable") != std::string::npos);
    }
    SUBCASE("low convexity order in high dimension uses the full determinant ratio") {
        FactorData f;
        f.d = 4;
        const int N = f.N();
        f.a = MatrixXd::Identity(N, N);
        f.Q = VectorXd::Zero(N);
        f.Q[0] = 0.5;
        const StarredSummary st = starred_summary(f);
        auto in = base_inputs(Family::E1, 4, 2, 2);
        in.starred = &st;
        auto certs = rate_table_segment(in);
        CHECK(certs[0].case_label == "T1.1(i) m<d-1");
        CHECK(certs[0].rate.exponent == Fraction(-1));
        CHECK(certs[0].prefactor == doctest::Approx(0.5));
        CHECK(certs[0].prefactor_expr.find("det F3") != std::string::npos);
    }
    CHECK_THROWS_AS(rate_table_segment(base_inputs(Family::E2, 2, 6, 1)), CaseNotCovered);
}

TEST_CASE("cylinder certificates") {
    SUBCASE("tangential family keeps only the datum singularity") {
        auto certs = rate_table_cylinder(base_inputs(Family::E3, 2, 4, 1));
        REQUIRE(certs.size() == 2);
        CHECK(certs[0].rate.exponent == Fraction(-3, 4));
        CHECK(certs[0].prefactor == doctest::Approx(0.5));  // eta/(1+kappa1)
        CHECK(certs[1].prefactor == doctest::Approx(0.5));
    }
    SUBCASE("vertical family combines both prefactors") {
        auto in = base_inputs(Family::E2, 2, 4, 1);
        in.kappa1 = 1.0;
        in.kappa2 = 2.0;
        auto certs = rate_table_cylinder(in);
        CHECK(certs[0].rate.exponent == Fraction(-3, 4));
        CHECK(certs[0].prefactor ==
              doctest::Approx((std::pow(2.0, 3.0 / 4) + 1.0) / 2.0));
        CHECK(certs[1].evaluate(1e-4) <= certs[0].evaluate(1e-4));
    }
    SUBCASE("middle range composes the rate indices") {
        FactorData f;
        f.d = 3;
        f.a = MatrixXd::Identity(6, 6);
        f.Q = VectorXd::Ones(6);
        const StarredSummary st = starred_summary(f);
        auto in = base_inputs(Family::E1, 3, 5, 3);
        in.starred = &st;
        auto certs = rate_table_cylinder(in);
        CHECK(certs[0].rate.exponent == Fraction(-3, 5));
        CHECK(certs[0].resolved());
    }
    CHECK_THROWS_AS(rate_table_cylinder(base_inputs(Family::E1, 2, 6, 2)), CaseNotCovered);
}

TEST_CASE("field-corollary reduction and flat certificates") {
    SUBCASE("corollary at the touching segment") {
        auto certs = rate_table_corollary(base_inputs(Family::E1, 2, 6, 2));
        REQUIRE(certs.size() == 1);
        // rho_A / eps = eps^{1/3 - 1}
        CHECK(certs[0].rate.exponent == Fraction(-2, 3));
        CHECK(certs[0].resolved());
    }
    SUBCASE("flat certificates carry the unified form") {
        auto in = base_inputs(Family::E3, 2, 2, 1);
        auto certs = rate_table_flat(in, 0.2, 1e-6);
        REQUIRE(certs.size() == 4);
        CHECK(certs[0].case_label == "flat unified");
        CHECK(certs[0].rate.exponent == Fraction(-1));
        CHECK(certs[0].prefactor == doctest::Approx(0.2));
        CHECK(certs[2].prefactor == doctest::Approx(0.2));  // tangential: exact match
    }
}

TEST_CASE("certificate sanity properties") {
    SUBCASE("positive and monotone when singular") {
        RateCertificate c;
        c.rate = RateMonomial{Fraction(-2, 3), 1};
        c.prefactor = 0.7;
        double prev = 0;
        for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
            const double v = c.evaluate(eps);
            CHECK(v > 0);
            CHECK(v > prev);
            prev = v;
        }
    }
    SUBCASE("branch continuity within a squared log factor") {
        const double eps = 1e-4;
        const double at = rho(2, 2, 3, eps);                   // log threshold
        const double below = rho(2, 2, 2, eps);                // constant branch
        const double above = rho(2, 2, 4, eps);                // power branch
        const double L2 = std::pow(std::abs(std::log(eps)), 2);
        CHECK(at / below <= L2);
        CHECK(above / at <= L2);
        CHECK(at / below >= 1.0 / L2);
        CHECK(above / at >= 1.0 / L2);
    }
}
