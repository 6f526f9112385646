#pragma once

#include <Eigen/Dense>
#include <functional>

#include "lamegap/boundary.hpp"
#include "lamegap/geometry.hpp"
#include "lamegap/lame.hpp"

namespace lamegap {

/// Linear-in-height profile function crossing the gap: 0 on the matrix graph,
/// 1 on the inclusion graph, with analytic derivatives in all variables.
struct VBarEval {
    double value;
    VectorXd grad;   // length d
    MatrixXd hess;   // d x d
};

/// Evaluate the crossing profile at a point of the closed gap slab.
VBarEval vbar(const GapProfile& profile, const VectorXd& x);

/// Bridge polynomial f(v) = (v - 1/2)^2 / 2 - 1/8; vanishes at 0 and 1 with
/// minimum -1/8 at the midpoint.
inline double bridge(double v) { const double t = v - 0.5; return 0.5 * t * t - 0.125; }
inline double bridge_deriv(double v) { return v - 0.5; }

/// Vector field on one of the gap graphs, as a function of the cross-section
/// variable with its x'-jacobian (d rows, d-1 columns).
struct SurfaceField {
    int d = 2;
    std::function<VectorXd(const VectorXd&)> value;
    std::function<MatrixXd(const VectorXd&)> jac;

    static SurfaceField zero(int d);
    /// Rigid-basis element restricted to the inclusion graph x_d = eps + h1.
    static SurfaceField rigid_on_top(const RigidBasis& psi, const GapProfile& profile);
    /// Boundary datum on the matrix graph (the trace is already a function of x').
    static SurfaceField from_boundary(const BoundaryData& phi);

    /// Sampled surrogate of the C^2 norm over |x'| <= R (value, jacobian and
    /// finite-difference second derivatives on a fixed grid).
    double c2_norm(double R) const;
};

struct FieldEval {
    VectorXd value;      // length d
    MatrixXd gradient;   // d x d, (i,j) = d u^i / d x_j
};

/// The explicitly differentiable approximation to the gap solution with data
/// psi on the inclusion graph and phi on the matrix graph: the two traces are
/// blended across the gap and corrected by the bridge terms carrying the
/// cross-section derivatives of the gap width.
class LeadingTerm {
  public:
    LeadingTerm(GapProfile profile, LameConstants lame, SurfaceField psi, SurfaceField phi);

    FieldEval eval(const VectorXd& x) const;
    VectorXd value(const VectorXd& x) const { return eval(x).value; }
    MatrixXd gradient(const VectorXd& x) const { return eval(x).gradient; }

    const GapProfile& profile() const { return profile_; }
    double psi_c2() const { return psi_c2_; }
    double phi_c2() const { return phi_c2_; }

    /// Three-term remainder envelope at the cross-section point.
    double remainder_envelope(const VectorXd& xp) const;

  private:
    GapProfile profile_;
    LameConstants lame_;
    SurfaceField psi_, phi_;
    double psi_c2_ = 0, phi_c2_ = 0;
};

/// The mode fields: alpha = 0 is the datum-driven field (requires phi);
/// alpha in 1..d(d+1)/2 blends the rigid basis element from the inclusion side.
LeadingTerm u_bar(int alpha, const GapProfile& profile, const LameConstants& lame,
                  const BoundaryData* phi);

/// Generic differentiable vector field (for residual probes).
struct AuxFieldFn {
    std::function<VectorXd(const VectorXd&)> value;
    std::function<MatrixXd(const VectorXd&)> gradient;

    static AuxFieldFn from_leading(const LeadingTerm& lt);
    static AuxFieldFn rigid(const RigidBasis& psi);
    static AuxFieldFn linear(const MatrixXd& A);
};

/// Second-difference application of the elasticity operator
/// mu * Laplacian + (lambda + mu) * grad div to the field at x, using central
/// differences of the analytic gradient. The step must resolve the local gap:
/// step <= delta(x')/10 inside the slab.
VectorXd lame_residual(const GapProfile& profile, const AuxFieldFn& field,
                       const LameConstants& lame, const VectorXd& x, double step = 0);

}  // namespace lamegap
