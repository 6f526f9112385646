#include <doctest.h>

#include <random>

#include "lamegap/boundary.hpp"

using namespace lamegap;

namespace {
VectorXd pt1(double x) {
    VectorXd v(1);
    v[0] = x;
    return v;
}
}  // namespace

TEST_CASE("rigid basis ordering and values") {
    SUBCASE("planar rotation") {
        RigidBasis psi(2, 3);
        VectorXd x(2);
        x << 0.3, -0.7;
        const VectorXd v = psi.value(x);
        CHECK(v[0] == doctest::Approx(-0.7));
        CHECK(v[1] == doctest::Approx(-0.3));
    }
    SUBCASE("spatial translation") {
        RigidBasis psi(3, 2);
        const VectorXd v = psi.value(VectorXd::Zero(3));
        CHECK(v[0] == 0);
        CHECK(v[1] == 1);
        CHECK(v[2] == 0);
    }
    SUBCASE("the trailing spatial rotation pairs the first two axes") {
        RigidBasis psi(3, 6);
        VectorXd x(3);
        x << 0.2, 0.5, -0.1;
        const VectorXd v = psi.value(x);
        CHECK(v[0] == doctest::Approx(0.5));
        CHECK(v[1] == doctest::Approx(-0.2));
        CHECK(v[2] == 0.0);
        const MatrixXd g = psi.gradient();
        CHECK((g + g.transpose()).norm() < 1e-15);
    }
    SUBCASE("gradient is constant and antisymmetric for every mode") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int d : {2, 3, 4}) {
            for (int alpha = 1; alpha <= rigid_count(d); ++alpha) {
                RigidBasis psi(d, alpha);
                const MatrixXd g = psi.gradient();
                CHECK((g + g.transpose()).norm() < 1e-15);
                // finite differences at random points reproduce it
                VectorXd x(d);
                for (int i = 0; i < d; ++i) x[i] = u(rng);
                const double h = 1e-6;
                for (int j = 0; j < d; ++j) {
                    VectorXd e = VectorXd::Zero(d);
                    e[j] = h;
                    const VectorXd dfd = (psi.value(x + e) - psi.value(x - e)) / (2 * h);
                    CHECK((dfd - g.col(j)).norm() < 1e-9);
                }
            }
        }
    }
    CHECK_THROWS_AS(RigidBasis(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(RigidBasis(3, 0), std::invalid_argument);
}

TEST_CASE("model family values") {
    SUBCASE("radial family") {
        BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
        const VectorXd v = phi(pt1(0.3));
        CHECK(v[0] == doctest::Approx(-0.09));
        CHECK(v[1] == doctest::Approx(-0.09));
    }
    SUBCASE("vertical family") {
        BoundaryData phi = make_family(Family::E2, 2.0, 1, 3);
        VectorXd xp(2);
        xp << 0.4, -0.2;
        const VectorXd v = phi(xp);
        CHECK(v[0] == 0);
        CHECK(v[1] == 0);
        CHECK(v[2] == doctest::Approx(0.8));
    }
    SUBCASE("tangential family") {
        BoundaryData phi = make_family(Family::E3, 1.0, 3, 2);
        const VectorXd v = phi(pt1(0.5));
        CHECK(v[0] == doctest::Approx(0.125));
        CHECK(v[1] == 0);
    }
    SUBCASE("order constraints") {
        CHECK_THROWS_AS(make_family(Family::E1, 1.0, 1, 2), ConfigError);
        CHECK_THROWS_AS(make_family(Family::E2, 1.0, 2, 2), ConfigError);
        CHECK_THROWS_AS(make_family(Family::E3, 1.0, 0, 3), ConfigError);
    }
}

TEST_CASE("growth condition with equality on the profile graph") {
    GapProfile p = make_power_profile(2, 2, 1.0, 0.5, 1e-4, 1.0, 1.0);
    for (auto fam : {Family::E1, Family::E3}) {
        BoundaryData phi = make_family(fam, 1.5, fam == Family::E1 ? 2 : 3, 2);
        const double margin = phi.growth_margin(p);
        CHECK(margin <= 1e-12);
        CHECK(margin >= -1e-9);  // attained on the flat graph
    }
}

TEST_CASE("parity classification") {
    const double R = 0.5;
    CHECK(classify_parity(make_family(Family::E1, 1.0, 2, 2), R) == ParityClass::A1);
    CHECK(classify_parity(make_family(Family::E2, 1.0, 1, 2), R) == ParityClass::A2);
    CHECK(classify_parity(make_family(Family::E3, 1.0, 1, 2), R) == ParityClass::A3);
    CHECK(classify_parity(make_family(Family::E1, 2.0, 4, 3), R) == ParityClass::A1);
    CHECK(classify_parity(make_family(Family::E2, 1.0, 3, 3), R) == ParityClass::A2);
    CHECK(classify_parity(make_family(Family::E3, 1.0, 3, 3), R) == ParityClass::A3);

    SUBCASE("constants are even") {
        auto c = make_custom_boundary(
            2, {make_monomial_surface(1, {0.7}, {{0}}), make_monomial_surface(1, {-0.1}, {{0}})});
        CHECK(classify_parity(c, R) == ParityClass::A1);
    }
    SUBCASE("mixed parities fall through") {
        auto c = make_custom_boundary(
            2, {make_monomial_surface(1, {1.0}, {{2}}), make_monomial_surface(1, {1.0}, {{1}})});
        CHECK(classify_parity(c, R) == ParityClass::None);
    }
}

TEST_CASE("c2 surrogate and cutoff") {
    BoundaryData phi = make_family(Family::E1, 1.0, 2, 2);
    const double n = phi.c2_norm(0.5);
    CHECK(n == doctest::Approx(2.0).epsilon(0.05));  // second derivative dominates
    CHECK(radial_cutoff(0.0, 0.2) == 1.0);
    CHECK(radial_cutoff(0.1, 0.2) == 1.0);
    CHECK(radial_cutoff(0.2, 0.2) == 0.0);
    CHECK(radial_cutoff(0.15, 0.2) > 0.0);
    CHECK(radial_cutoff(0.15, 0.2) < 1.0);
}
