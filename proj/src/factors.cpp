#include "lamegap/factors.hpp"

#include <algorithm>
#include <cmath>

#include "lamegap/fitting.hpp"

namespace lamegap {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void FactorData::check_shape() const {
    if (a.rows() != a.cols() || Q.size() != a.rows())
        throw ConfigError("factor data has inconsistent shape");
}

void FactorData::check_mode_count() const {
    check_shape();
    if (a.rows() != N())
        throw ConfigError("factor data does not match the rigid-mode count d(d+1)/2");
}

BlockPartition block_partition(const MatrixXd& F, int d) {
    const int N = d * (d + 1) / 2;
    if (F.rows() != N || F.cols() != N)
        throw ConfigError("mode matrix must be d(d+1)/2 square");
    BlockPartition p;
    p.A = F.topLeftCorner(d, d);
    p.B = F.topRightCorner(d, N - d);
    p.C = F.bottomLeftCorner(N - d, d);
    p.D = F.bottomRightCorner(N - d, N - d);
    return p;
}

MatrixXd reassemble(const BlockPartition& p) {
    const int d = static_cast<int>(p.A.rows());
    const int N = d + static_cast<int>(p.D.rows());
    MatrixXd F(N, N);
    F.topLeftCorner(d, d) = p.A;
    F.topRightCorner(d, N - d) = p.B;
    F.bottomLeftCorner(N - d, d) = p.C;
    F.bottomRightCorner(N - d, N - d) = p.D;
    return F;
}

MatrixXd substitute_full(const MatrixXd& F, const VectorXd& Y, int alpha) {
    if (alpha < 1 || alpha > F.cols()) throw std::invalid_argument("column index out of range");
    if (Y.size() != F.rows()) throw ConfigError("substitution vector length mismatch");
    MatrixXd M = F;
    M.col(alpha - 1) = Y;
    return M;
}

MatrixXd substitute_dblock(const MatrixXd& F, const VectorXd& Y, int d, int alpha) {
    const int N = static_cast<int>(F.rows());
    if (alpha <= d || alpha > N) throw std::invalid_argument("rotation-mode index out of range");
    MatrixXd D = F.bottomRightCorner(N - d, N - d);
    D.col(alpha - d - 1) = Y.tail(N - d);
    return D;
}

MatrixXd bordered_mode_matrix(const MatrixXd& F, const VectorXd& Y, int d, int alpha) {
    const int N = static_cast<int>(F.rows());
    if (alpha < 1 || alpha > d) throw std::invalid_argument("translation-mode index out of range");
    const int n = N - d + 1;
    MatrixXd M(n, n);
    M(0, 0) = Y[alpha - 1];
    for (int c = 0; c < N - d; ++c) M(0, c + 1) = F(alpha - 1, d + c);
    for (int r = 0; r < N - d; ++r) {
        M(r + 1, 0) = Y[d + r];
        for (int c = 0; c < N - d; ++c) M(r + 1, c + 1) = F(d + r, d + c);
    }
    return M;
}

double equilibrated_det(const MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    MatrixXd S = M;
    double logscale = 0;
    int sign = 1;
    for (int r = 0; r < n; ++r) {
        const double s = S.row(r).cwiseAbs().maxCoeff();
        if (s > 0) {
            S.row(r) /= s;
            logscale += std::log(s);
        }
    }
    Eigen::FullPivLU<MatrixXd> lu(S);
    const double det_scaled = lu.determinant();
    if (det_scaled < 0) sign = -1;
    if (det_scaled == 0) return 0;
    return sign * std::exp(std::log(std::abs(det_scaled)) + logscale);
}

std::pair<VectorXd, SolveDiagnostics> free_constants(const FactorData& f) {
    f.check_shape();
    if (!f.finite()) throw NumericalError("free constants need fully resolved factor data");
    const auto def = definiteness_check(f);
    if (!def.pass) throw NumericalError("factor matrix is not positive definite");

    const int N = static_cast<int>(f.a.rows());
    SolveDiagnostics diag;

    // row-equilibrated determinants so that determinant ratios stay scaled
    MatrixXd S = f.a;
    VectorXd scales(N);
    for (int r = 0; r < N; ++r) {
        scales[r] = S.row(r).cwiseAbs().maxCoeff();
        if (scales[r] > 0) S.row(r) /= scales[r];
    }
    Eigen::FullPivLU<MatrixXd> lu(S);
    const double detS = lu.determinant();
    diag.det = equilibrated_det(f.a);
    if (std::abs(detS) < 1e-14) throw NumericalError("singular factor system");

    VectorXd Qs = f.Q;
    for (int r = 0; r < N; ++r)
        if (scales[r] > 0) Qs[r] /= scales[r];

    diag.cramer = VectorXd(N);
    for (int alpha = 1; alpha <= N; ++alpha) {
        MatrixXd Ms = substitute_full(S, Qs, alpha);
        diag.cramer[alpha - 1] = Eigen::FullPivLU<MatrixXd>(Ms).determinant() / detS;
    }

    Eigen::LDLT<MatrixXd> ldlt(f.a);
    VectorXd X = ldlt.solve(f.Q);

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(f.a);
    diag.cond_estimate = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();

    const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
    diag.cramer_vs_direct = (X - diag.cramer).cwiseAbs().maxCoeff() / scale;
    if (diag.cramer_vs_direct > 1e-10)
        throw NumericalError("determinant-ratio and factorization solves disagree");
    return {X, diag};
}

Definiteness definiteness_check(const FactorData& f) {
    f.check_shape();
    if (!f.finite()) throw NumericalError("definiteness check needs fully resolved factor data");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (f.a + f.a.transpose()));
    Definiteness out;
    out.lambda_min = es.eigenvalues().minCoeff();
    out.pass = out.lambda_min > 0;
    out.C = out.pass ? 1.0 / out.lambda_min : 0.0;
    return out;
}

double diag_expansion(int alpha, int d, const LameConstants& lame,
                      const std::vector<double>& tau, double eps, double kstar) {
    if (d != 2 && d != 3) throw std::invalid_argument("diagonal expansion needs d in {2,3}");
    if (alpha < 1 || alpha > d)
        throw std::invalid_argument("diagonal expansion covers translation modes only");
    const double L = lame_rate_constant(d, alpha, lame);
    if (d == 2) {
        if (tau.empty()) throw ConfigError("missing relative curvature");
        return std::sqrt(2.0) * kPi * L / std::sqrt(tau[0]) / std::sqrt(eps) + kstar;
    }
    if (tau.size() < 2) throw ConfigError("missing relative curvatures");
    return 2.0 * kPi * L / std::sqrt(tau[0] * tau[1]) * std::abs(std::log(eps)) + kstar;
}

GeometryFit fit_geometry_constants(const std::vector<std::pair<double, double>>& samples, int d) {
    if (samples.size() < 3) throw ConfigError("geometry fit needs at least 3 samples");
    std::vector<double> s(samples.size()), y(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double e = samples[i].first;
        s[i] = (d == 2) ? 1.0 / std::sqrt(e) : std::abs(std::log(e));
        y[i] = samples[i].second;
    }
    const double smin = *std::min_element(s.begin(), s.end());
    const double smax = *std::max_element(s.begin(), s.end());
    if (!(smax > smin * (1 + 1e-12))) throw NumericalError("geometry fit design is rank deficient");
    const LinearFit f = linear_fit(s, y);
    return {f.slope, f.intercept, f.rms_residual};
}

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericalError(std::string("starred data incomplete: ") + what);
}

}  // namespace

std::vector<double> c_alpha_asymptotic(int d, const FactorData& starred,
                                       const std::vector<double>& tau, const LameConstants& lame,
                                       double eps, const std::vector<double>& kstar) {
    starred.check_mode_count();
    if (starred.d != d) throw ConfigError("dimension mismatch in starred data");
    const int N = starred.N();
    std::vector<double> C(N, 0.0);

    if (d >= 4) {
        if (!starred.finite()) throw NumericalError("starred data incomplete for d >= 4");
        const double detF = equilibrated_det(starred.a);
        if (std::abs(detF) < 1e-300) throw NumericalError("singular starred system");
        for (int alpha = 1; alpha <= N; ++alpha)
            C[alpha - 1] = equilibrated_det(substitute_full(starred.a, starred.Q, alpha)) / detF;
        return C;
    }

    if (static_cast<int>(kstar.size()) != d)
        throw ConfigError("missing K* geometry constants for the translation modes");
    if (static_cast<int>(tau.size()) != d - 1)
        throw ConfigError("missing relative curvatures");

    const MatrixXd D = block_partition(starred.a, d).D;
    if (!D.allFinite() || !starred.Q.allFinite())
        throw NumericalError("starred data incomplete: rotation block or Q");
    const double detD = equilibrated_det(D);
    if (std::abs(detD) < 1e-300) throw NumericalError("singular starred rotation block");

    for (int alpha = 1; alpha <= d; ++alpha) {
        const MatrixXd F1 = bordered_mode_matrix(starred.a, starred.Q, d, alpha);
        if (!F1.allFinite()) throw NumericalError("starred data incomplete: mode couplings");
        const double detF1 = equilibrated_det(F1);
        const double L = lame_rate_constant(d, alpha, lame);
        if (d == 2) {
            const double G = std::sqrt(tau[0]) * kstar[alpha - 1] / (std::sqrt(2.0) * kPi * L);
            C[alpha - 1] = detF1 / detD * std::sqrt(tau[0]) * std::sqrt(eps) /
                           (std::sqrt(2.0) * kPi * L) / (1.0 + G * std::sqrt(eps));
        } else {
            const double st = std::sqrt(tau[0] * tau[1]);
            const double G = st * kstar[alpha - 1] / (2.0 * kPi * L);
            C[alpha - 1] =
                detF1 / detD * st / (2.0 * kPi * L) / (std::abs(std::log(eps)) + G);
        }
    }
    for (int alpha = d + 1; alpha <= N; ++alpha) {
        const MatrixXd F2 = substitute_dblock(starred.a, starred.Q, d, alpha);
        require_finite(F2.sum(), "rotation substitution");
        C[alpha - 1] = equilibrated_det(F2) / detD;
    }
    return C;
}

StarredSummary starred_summary(const FactorData& limit) {
    limit.check_mode_count();
    const int d = limit.d;
    const int N = limit.N();
    StarredSummary s;
    s.d = d;
    s.Qstar = limit.Q;
    const MatrixXd D = block_partition(limit.a, d).D;

    s.blocks_finite = D.allFinite() && limit.Q.allFinite();
    s.full_finite = limit.finite();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    s.detD = s.blocks_finite ? equilibrated_det(D) : nan;
    s.detF = s.full_finite ? equilibrated_det(limit.a) : nan;

    s.detF1.assign(d, nan);
    for (int alpha = 1; alpha <= d; ++alpha) {
        const MatrixXd F1 = bordered_mode_matrix(limit.a, limit.Q, d, alpha);
        if (F1.allFinite()) s.detF1[alpha - 1] = equilibrated_det(F1);
    }
    s.detF2.assign(N - d, nan);
    for (int alpha = d + 1; alpha <= N; ++alpha) {
        const MatrixXd F2 = substitute_dblock(limit.a, limit.Q, d, alpha);
        if (F2.allFinite()) s.detF2[alpha - d - 1] = equilibrated_det(F2);
    }
    s.detF3.assign(N, nan);
    if (s.full_finite)
        for (int alpha = 1; alpha <= N; ++alpha)
            s.detF3[alpha - 1] = equilibrated_det(substitute_full(limit.a, limit.Q, alpha));
    return s;
}

ExtrapolationResult extrapolate_limit(const std::vector<double>& eps,
                                      const std::vector<double>& y) {
    if (eps.size() != y.size() || eps.size() < 3)
        throw ConfigError("limit extrapolation needs >= 3 sweep points");
    const std::size_t n = eps.size();

    // indices sorted by decreasing eps
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return eps[a] > eps[b]; });

    const double y_big = y[idx.front()], y_small = y[idx.back()];
    double spread = 0, scale = 0;
    for (std::size_t i = 0; i < n; ++i) {
        spread = std::max(spread, std::abs(y[i] - y_big));
        scale = std::max(scale, std::abs(y[i]));
    }

    ExtrapolationResult out;
    if (spread <= 1e-10 * (1.0 + scale)) {  // flat entry
        out.limit = y_small;
        return out;
    }
    if (std::abs(y_small) > 2.0 * std::abs(y_big) + 1.0) {  // keeps growing
        out.divergent = true;
        out.limit = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    // grid + refinement search over the decay exponent, linear LSQ in (y*, c)
    auto residual_at = [&](double p, double& lim, double& amp) {
        double s11 = n, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double phi = std::pow(eps[i], p);
            s12 += phi;
            s22 += phi * phi;
            b1 += y[i];
            b2 += phi * y[i];
        }
        const double det = s11 * s22 - s12 * s12;
        lim = (s22 * b1 - s12 * b2) / det;
        amp = (s11 * b2 - s12 * b1) / det;
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - lim - amp * std::pow(eps[i], p);
            ss += r * r;
        }
        return std::sqrt(ss / n);
    };

    // exponents below 0.2 are excluded: on a short sweep they act as a free
    // constant and extrapolate wildly
    double best_p = 0.5, best_rms = 1e300, best_lim = 0, best_amp = 0;
    for (double p = 0.2; p <= 2.0 + 1e-9; p += 0.0125) {
        double lim, amp;
        const double rms = residual_at(p, lim, amp);
        if (rms < best_rms) {
            best_rms = rms;
            best_p = p;
            best_lim = lim;
            best_amp = amp;
        }
    }
    out.limit = best_lim;
    out.amplitude = best_amp;
    out.exponent = best_p;
    out.rms = best_rms;
    return out;
}

FactorData extrapolate_starred(const std::vector<FactorData>& sweep) {
    if (sweep.size() < 3) throw ConfigError("starred extrapolation needs >= 3 sweep points");
    const int d = sweep.front().d;
    const int N = sweep.front().N();
    std::vector<double> eps;
    for (const auto& f : sweep) {
        f.check_shape();
        if (f.d != d) throw ConfigError("sweep mixes dimensions");
        if (!f.eps) throw ConfigError("sweep entries must carry their eps");
        eps.push_back(*f.eps);
    }
    FactorData out;
    out.d = d;
    out.provenance = Provenance::Oracle;
    out.a = MatrixXd(N, N);
    out.Q = VectorXd(N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            std::vector<double> y;
            for (const auto& f : sweep) y.push_back(f.a(r, c));
            out.a(r, c) = extrapolate_limit(eps, y).limit;
        }
    for (int r = 0; r < N; ++r) {
        std::vector<double> y;
        for (const auto& f : sweep) y.push_back(f.Q[r]);
        out.Q[r] = extrapolate_limit(eps, y).limit;
    }
    return out;
}

}  // namespace lamegap
