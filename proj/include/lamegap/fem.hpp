#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <vector>

#include "lamegap/boundary.hpp"
#include "lamegap/factors.hpp"
#include "lamegap/geometry.hpp"
#include "lamegap/lame.hpp"

namespace lamegap {

/// Tangent-disk verification geometry: the matrix is the disk of radius r0
/// through the origin, the inclusion the disk of radius r1 < r0 tangent at
/// the origin and lifted by eps. The shell between them is meshed in
/// ray/layer coordinates around the inclusion center.
struct ReferenceDomain {
    double r1 = 0.5, r0 = 1.0, eps = 1e-2;
    double r_gap = 0.2;  // graph radius handed to the analytic modules

    double tau() const { return 1.0 / r1 - 1.0 / r0; }
    GapProfile profile() const { return make_disk_profile(r1, r0, r_gap, eps); }
};

struct Mesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> boundary;  // 0 interior, 1 inclusion, 2 matrix
    int n_layers = 0;
    int n_phi = 0;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    double min_angle_deg() const;
    double min_signed_area() const;
    /// Elements stacked across the gap on the symmetry segment x_1 = 0.
    int layers_across_gap() const;
};

struct MeshParams {
    int n_layers = 8;
    double angular_res = 32;  // density multiplier for the in-plane grading
    double r_gap = 0.2;
};

std::pair<ReferenceDomain, Mesh> build_reference_domain(double eps, double r1, double r0,
                                                        const MeshParams& params);

using BoundaryFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

struct SolveResult {
    Eigen::VectorXd u;       // 2 * n_nodes nodal displacements
    double solve_residual = 0;
};

/// Plane-strain P1 solver on a fixed mesh; the stiffness matrix is assembled
/// and factorized once, then reused across boundary data.
class LameSolver {
  public:
    LameSolver(const Mesh& mesh, const LameConstants& lame);

    SolveResult solve(const BoundaryFn& on_inclusion, const BoundaryFn& on_matrix) const;
    /// Energy pairing u^T K v over the full domain.
    double pairing(const SolveResult& ua, const SolveResult& ub) const;
    double energy(const SolveResult& u) const { return pairing(u, u); }

    const Mesh& mesh() const { return mesh_; }

  private:
    Mesh mesh_;
    LameConstants lame_;
    Eigen::SparseMatrix<double> K_;
    Eigen::SparseMatrix<double> Kff_, Kfb_;
    std::vector<int> free_index_;   // dof -> position in the free system or -1
    std::vector<int> fixed_dofs_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/// Piecewise-constant gradient of the P1 field at a point; elements sharing
/// the point (edges, vertices) are averaged.
Eigen::Matrix2d sample_gradient(const Mesh& mesh, const Eigen::VectorXd& u,
                                const Eigen::Vector2d& x);

/// Global extension of the near-origin datum to the matrix circle: the trace
/// formula times a C^2 radial cutoff supported on the lower arc.
BoundaryFn matrix_datum(const BoundaryData& phi, const ReferenceDomain& dom);

struct OracleRun {
    ReferenceDomain domain;
    Mesh mesh;
    FactorData factors;           // a = energy pairings, Q makes a X = Q exact
    VectorXd X;                   // free constants
    std::vector<SolveResult> modes;  // index 0 = datum problem, 1..N the rigid modes
    SolveResult combined;            // sum of the decomposition
    double flux_residual = 0;        // max |(a X - Q)_beta| / scale
};

/// Solves the datum problem and all rigid-mode problems on one mesh,
/// assembles the factor data and the free constants, and exposes the
/// combined field. Throws ConfigError when the datum violates the
/// touching-point normalization.
OracleRun solve_full(const BoundaryData& phi, double eps, const LameConstants& lame,
                     const MeshParams& params, double r1 = 0.5, double r0 = 1.0);

/// q functional: Q_alpha = -pairing(u_datum, u_alpha). The orientation is the
/// one that makes the free-constant system exact; the leading gap functional
/// carries the opposite sign (it is computed against the upward gap normal),
/// so magnitude comparisons apply.
double q_functional(const LameSolver& solver, const SolveResult& u_datum,
                    const SolveResult& u_alpha);

/// Plain-text mesh + solution dump: node table, element table, per-node
/// displacement.
void dump_solution(const Mesh& mesh, const Eigen::VectorXd& u, const std::string& path);

}  // namespace lamegap
