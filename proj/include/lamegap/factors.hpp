#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lamegap/errors.hpp"
#include "lamegap/lame.hpp"

namespace lamegap {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Provenance { Oracle, Leading, User };

/// The mode Gram matrix (energy pairings a_alpha_beta) together with the
/// datum functionals Q_alpha. Limit data (eps absent) may carry NaN in the
/// entries that diverge as the gap closes; every formula consuming limit data
/// touches only the convergent entries.
struct FactorData {
    int d = 2;
    MatrixXd a;  // N x N symmetric
    VectorXd Q;  // N
    Provenance provenance = Provenance::User;
    std::optional<double> eps;

    int N() const { return d * (d + 1) / 2; }
    bool finite() const { return a.allFinite() && Q.allFinite(); }
    /// a square and Q of matching length (toy systems allowed).
    void check_shape() const;
    /// additionally requires the full rigid-mode count d(d+1)/2.
    void check_mode_count() const;
};

struct BlockPartition {
    MatrixXd A, B, C, D;  // A is d x d, D is (N-d) x (N-d)
};

/// Contiguous split of the mode matrix at the translation/rotation boundary.
BlockPartition block_partition(const MatrixXd& F, int d);
MatrixXd reassemble(const BlockPartition& p);

/// Full-matrix column substitution (the alpha-th column replaced by Y).
MatrixXd substitute_full(const MatrixXd& F, const VectorXd& Y, int alpha);
/// Rotation-block substitution: column alpha (in d+1..N) of the lower-right
/// block replaced by the rotation part of Y.
MatrixXd substitute_dblock(const MatrixXd& F, const VectorXd& Y, int d, int alpha);
/// Bordered translation-mode matrix: rows {alpha, d+1..N}, first column Y,
/// remaining columns the rotation couplings.
MatrixXd bordered_mode_matrix(const MatrixXd& F, const VectorXd& Y, int d, int alpha);

/// Determinant via full-pivot LU on a row-equilibrated copy; scale factors
/// reapplied. Keeps the strongly graded mode matrices away from overflow.
double equilibrated_det(const MatrixXd& M);

struct SolveDiagnostics {
    double det = 0;
    double cond_estimate = 0;
    double cramer_vs_direct = 0;  // max relative discrepancy
    VectorXd cramer;
};

/// Solves the free-constant system a X = Q by a pivoted factorization and by
/// determinant ratios; the two must agree to 1e-10 relative.
std::pair<VectorXd, SolveDiagnostics> free_constants(const FactorData& f);

struct Definiteness {
    double lambda_min = 0;
    bool pass = false;
    double C = 0;  // 1 / lambda_min when positive
};

Definiteness definiteness_check(const FactorData& f);

/// Two-term small-gap expansion of the diagonal translation energies:
/// sqrt(2) pi L / sqrt(tau1) eps^{-1/2} + K (d=2) or
/// 2 pi L / sqrt(tau1 tau2) |ln eps| + K (d=3).
double diag_expansion(int alpha, int d, const LameConstants& lame,
                      const std::vector<double>& tau, double eps, double kstar);

struct GeometryFit {
    double leading_coef = 0;
    double kstar = 0;
    double rms_residual = 0;
};

/// Least squares a(eps) = c * s(eps) + K with s = eps^{-1/2} (d=2) or
/// |ln eps| (d=3). Needs >= 3 samples with distinct eps.
GeometryFit fit_geometry_constants(const std::vector<std::pair<double, double>>& samples, int d);

/// Free constants in the closed-gap limit, from limit factor data. kstar has
/// one entry per translation mode (used for d = 2, 3; ignored for d >= 4 where
/// the plain determinant ratios apply).
std::vector<double> c_alpha_asymptotic(int d, const FactorData& starred,
                                       const std::vector<double>& tau, const LameConstants& lame,
                                       double eps, const std::vector<double>& kstar);

/// Determinant summary of limit data for the rate prefactors. Entries that
/// need unavailable (non-finite) data are set to NaN.
struct StarredSummary {
    int d = 2;
    double detD = 0, detF = 0;
    std::vector<double> detF1;  // translation modes, index alpha-1
    std::vector<double> detF2;  // rotation modes, index alpha-d-1
    std::vector<double> detF3;  // all modes
    VectorXd Qstar;
    bool blocks_finite = false;  // D block, couplings and Q
    bool full_finite = false;
};

StarredSummary starred_summary(const FactorData& limit);

struct ExtrapolationResult {
    double limit = 0, amplitude = 0, exponent = 0, rms = 0;
    bool divergent = false;
};

/// Fits y(eps) = y* + c eps^p over a sweep (p searched in [0.05, 2]); flags
/// the entry divergent when |y| keeps growing as eps shrinks instead.
ExtrapolationResult extrapolate_limit(const std::vector<double>& eps,
                                      const std::vector<double>& y);

/// Entrywise limit of a factor-data sweep; divergent entries become NaN.
FactorData extrapolate_starred(const std::vector<FactorData>& sweep);

}  // namespace lamegap
