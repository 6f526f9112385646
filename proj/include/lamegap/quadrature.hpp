#pragma once

#include <functional>

#include "lamegap/boundary.hpp"
#include "lamegap/geometry.hpp"
#include "lamegap/lame.hpp"

namespace lamegap {

struct QuadOptions {
    double tol_abs = 1e-10;
    double tol_rel = 1e-8;
    long max_evals = 10'000'000;
};

struct QuadResult {
    double value = 0;
    double abs_error_estimate = 0;
    long n_evals = 0;
    int ring_depth = 0;
};

/// Integral of weight(x')/delta(x') over the cross-section ball |x'| < Rint.
/// Dyadic rings down to the crossover scale eps^{1/m} with nested Gauss rules
/// per ring; node sets are exactly mirror symmetric in every axis so that odd
/// weights cancel at machine precision. weight_radial enables the exact
/// radial reduction when the profile itself is radial.
QuadResult gap_integral(const GapProfile& profile,
                        const std::function<double(const VectorXd&)>& weight, double Rint,
                        const QuadOptions& opts = {}, bool weight_radial = false);

/// Moment integral: weight |x'|^k.
QuadResult moment_integral(const GapProfile& profile, int k, double Rint,
                           const QuadOptions& opts = {});

/// Two-term small-gap value of the k = 0 moment for a strictly convex profile
/// in the plane: sqrt(2) pi / sqrt(tau1) * eps^{-1/2} - 4 / (tau1 R).
double closed_form_convex_2d(double tau1, double R, double eps);

/// Three-dimensional analog: 2 pi / sqrt(tau1 tau2) |ln eps| plus the
/// angle-averaged logarithm of the elliptical ring radius
/// R(theta) = (R/sqrt(2)) (cos^2/tau1 + sin^2/tau2)^{-1/2} (64-point Gauss).
double closed_form_convex_3d(double tau1, double tau2, double R, double eps);

/// Leading gap energy of mode alpha: the mode constant times the k = 0 moment
/// for translations, or constant/(d-1) times the k = 2 moment for rotations.
QuadResult energy_leading(int alpha, const GapProfile& profile, const LameConstants& lame,
                          double Rint, const QuadOptions& opts = {});

/// Leading boundary functionals: -mu * int phi^alpha / delta for
/// alpha <= d-1, -(lambda+2mu) * int phi^d / delta for alpha = d, and
/// +(lambda+2mu) * int phi^d x_1 / delta for alpha = d+1. The surface measure
/// and the vertical normal component cancel exactly; the product is kept in
/// the integrand. The bounded remainder of the full functional is not
/// included.
QuadResult q_leading(int alpha, const BoundaryData& phi, const GapProfile& profile,
                     const LameConstants& lame, double Rint, const QuadOptions& opts = {});

struct ParityCheckResult {
    bool pass = false;
    double residual = 0;
    double tolerance = 0;
};

/// Verifies that the gap integral of an odd weight over an even profile
/// vanishes below the quadrature tolerance.
ParityCheckResult parity_vanish_check(const std::function<double(const VectorXd&)>& weight,
                                      const GapProfile& profile, int axis, double Rint,
                                      const QuadOptions& opts = {});

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1] (cached).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

}  // namespace lamegap
