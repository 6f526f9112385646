#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "lamegap/errors.hpp"

namespace lamegap {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Scalar graph x_d = s(x') over the (d-1)-dimensional cross section, with
/// analytic value, gradient and Hessian. All boundary graphs and gap widths
/// are built from these.
class ScalarSurface {
  public:
    virtual ~ScalarSurface() = default;
    virtual double value(const VectorXd& xp) const = 0;
    virtual VectorXd gradient(const VectorXd& xp) const = 0;
    virtual MatrixXd hessian(const VectorXd& xp) const = 0;
    /// True when the surface depends on x' only through |x'|.
    virtual bool is_radial() const = 0;
};

using SurfacePtr = std::shared_ptr<const ScalarSurface>;

/// s(x') = 0.
SurfacePtr make_zero_surface();

/// s(x') = sum_j c_j |x'|^{p_j}, integer powers p_j >= 2.
SurfacePtr make_radial_poly_surface(std::vector<int> powers, std::vector<double> coeffs);

/// s(x') = c |x'|^m.
SurfacePtr make_power_surface(double c, int m);

/// Lower cap of the sphere of radius r tangent to x_d = 0 at the origin:
/// s(x') = r - sqrt(r^2 - |x'|^2).
SurfacePtr make_sphere_cap_surface(double r);

/// s(x') = sum_t c_t * prod_i x_i^{p_ti}; completely general monomial sum.
SurfacePtr make_monomial_surface(int dim_prime,
                                 std::vector<double> coeffs,
                                 std::vector<std::vector<int>> exponents);

/// The matrix/inclusion geometry near the touching point: boundary graphs
/// h (matrix side) and h1 (inclusion side, shifted by eps), the envelope
/// constants and the convexity order m. Immutable after construction.
struct GapProfile {
    int d = 2;           // ambient dimension, x' lives in R^{d-1}
    int m = 2;           // convexity order of the gap
    double R = 1.0;      // half-width of the validated neighborhood B'_{2R}
    double eps = 1e-2;   // translation distance of the inclusion
    SurfacePtr h;        // matrix boundary graph
    SurfacePtr h1;       // inclusion boundary graph (before the eps shift)
    double kappa1 = 0, kappa2 = 0, kappa3 = 0, kappa4 = 0;
    double tau0 = 0;     // curvature floor for the m=2 case

    bool is_radial() const { return h->is_radial() && h1->is_radial(); }

    /// Gap width eps + h1 - h; throws GeometryError outside B'_{2R} or when
    /// the computed width is not positive.
    double delta(const VectorXd& xp) const;
    VectorXd grad_delta(const VectorXd& xp) const;
    MatrixXd hess_delta(const VectorXd& xp) const;

    void check_in_domain(const VectorXd& xp) const;
};

/// Reference profile with h = 0 and gap c|x'|^m.
GapProfile make_power_profile(int d, int m, double c, double R, double eps,
                              double kappa1, double kappa2);

/// Tangent-disk reference geometry: outer radius r0, inner radius r1 < r0,
/// both tangent to x_d = 0 at the origin before the eps shift.
GapProfile make_disk_profile(double r1, double r0, double R, double eps);

/// Relative principal curvatures: eigenvalues of the Hessian of h1 - h at the
/// origin, sorted ascending. m = 2 only; throws GeometryError when a
/// non-positive eigenvalue shows the profile is not strictly convex.
/// Falls back to 5-point central differences when use_fd is set.
std::vector<double> principal_relative_curvatures(const GapProfile& profile,
                                                  bool use_fd = false);

struct ConditionCheck {
    std::string name;
    bool pass = false;
    double worst_margin = 0;   // signed: negative means violated
    VectorXd worst_point;
    std::string note;
};

struct ConditionReport {
    std::vector<ConditionCheck> checks;
    int n_samples = 0;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const ConditionCheck* find(const std::string& name) const;
};

/// Samples the gap envelope, derivative growth, touching-point normalization,
/// evenness and (for m=2) convexity conditions on a deterministic grid of
/// n_samples points per axis plus radial rays. Failures are reported, never
/// thrown.
ConditionReport validate_conditions(const GapProfile& profile, int n_samples);

/// The thin region Omega_t between the two graphs, with its top/bottom
/// boundary parametrizations and unit normals oriented out of the gap
/// (upward on the inclusion side, downward on the matrix side).
struct ThinGapRegion {
    GapProfile profile;
    double t;

    ThinGapRegion(GapProfile p, double t_);

    VectorXd point_top(const VectorXd& xp) const;     // (x', eps + h1(x'))
    VectorXd point_bottom(const VectorXd& xp) const;  // (x', h(x'))
    VectorXd normal_top(const VectorXd& xp) const;    // nu_d > 0
    VectorXd normal_bottom(const VectorXd& xp) const; // nu_d < 0
    /// Membership in the slab piece of radius t around the cross-section
    /// point zp (the touching point when zp is empty).
    bool contains(const VectorXd& x, const VectorXd& zp) const;
    bool contains(const VectorXd& x) const;
    /// Midpoint of the gap segment above x'.
    VectorXd midpoint(const VectorXd& xp) const;
};

}  // namespace lamegap
