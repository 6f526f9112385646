#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "lamegap/errors.hpp"
#include "lamegap/geometry.hpp"

namespace lamegap {

inline int rigid_count(int d) { return d * (d + 1) / 2; }

/// One element of the rigid-displacement basis: translations e_alpha for
/// alpha <= d, then the rotations x_d e_{alpha-d} - x_{alpha-d} e_d, then for
/// d >= 3 the in-plane rotations x_{j} e_i - x_i e_j over pairs i < j < d.
struct RigidBasis {
    int d = 2;
    int alpha = 1;

    RigidBasis(int d_, int alpha_);

    VectorXd value(const VectorXd& x) const;
    /// Constant gradient matrix G with G(i,j) = d psi^i / d x_j;
    /// antisymmetric by construction.
    MatrixXd gradient() const;
    /// For rotations, the active index pair (i, j) with psi = x_j e_i - x_i e_j
    /// (1-based); translations return (alpha, 0).
    std::pair<int, int> index_pair() const;
};

enum class Family { E1, E2, E3, Custom };
enum class ParityClass { A1, A2, A3, None };

std::string to_string(Family f);
std::string to_string(ParityClass c);

/// Dirichlet datum on the matrix boundary near the touching point, given as a
/// function of the cross-section variable (the trace on the lower graph).
/// Values are d-vectors; jacobians are d x (d-1).
struct BoundaryData {
    int d = 2;
    double eta = 0;
    int k = 1;
    Family family = Family::Custom;

    std::function<VectorXd(const VectorXd&)> trace;
    std::function<MatrixXd(const VectorXd&)> trace_jac;
    /// Hessian of component i with respect to x'.
    std::function<MatrixXd(const VectorXd&, int)> trace_hess;

    VectorXd operator()(const VectorXd& xp) const { return trace(xp); }

    /// Sampled surrogate for the C^2 norm: max over a fixed grid on |x'| <= R
    /// of |phi|, |jac|, |hess|.
    double c2_norm(double R) const;

    /// max |phi| - eta |x|^k over the sampled trace; nonpositive when the
    /// growth condition holds (|x| includes the graph height h(x')).
    double growth_margin(const GapProfile& profile) const;
};

/// The model families: E1 has every component -eta |x'|^k (k >= 2); E2 has
/// only the vertical component eta x_1 |x_1|^{k-1}; E3 has the tangential
/// components eta x_i |x_i|^{k-1} (k >= 1, k != 2 for E2/E3).
BoundaryData make_family(Family tag, double eta, int k, int d);

/// Custom datum from per-component monomial tables in x'.
BoundaryData make_custom_boundary(int d, std::vector<SurfacePtr> components);

/// Zero datum.
BoundaryData make_zero_boundary(int d);

/// Reflection-based parity classification on a symmetric sample grid
/// (64 pairs per axis, tolerance 1e-12). The classes are tested most
/// specific first (A1, then A3, then A2) so that data with an identically
/// zero component lands in the narrower class.
ParityClass classify_parity(const BoundaryData& phi, double R);

/// C^2 cutoff equal to 1 for r <= R/2 and 0 for r >= R (quintic smoothstep).
double radial_cutoff(double r, double R);

}  // namespace lamegap
