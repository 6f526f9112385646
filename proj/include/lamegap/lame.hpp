#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "lamegap/errors.hpp"

namespace lamegap {

/// Lamé pair with the ellipticity window kappa5 <= mu, d*lambda + 2*mu <= 1/kappa5.
struct LameConstants {
    double lambda = 1.0;
    double mu = 1.0;
    double kappa5 = 0.0;  // 0 means derive the widest admissible value on demand

    double lambda_plus_2mu() const { return lambda + 2.0 * mu; }

    double effective_kappa5(int d) const {
        if (kappa5 > 0) return kappa5;
        const double lo = std::min(mu, d * lambda + 2.0 * mu);
        const double hi = std::max(mu, d * lambda + 2.0 * mu);
        return std::min(lo, 1.0 / hi);
    }

    void validate(int d) const {
        if (!(mu > 0)) throw ConfigError("mu must be positive");
        if (!(d * lambda + 2.0 * mu > 0)) throw ConfigError("d*lambda + 2*mu must be positive");
        const double k5 = effective_kappa5(d);
        if (!(k5 > 0) || mu < k5 || d * lambda + 2.0 * mu < k5 ||
            mu > 1.0 / k5 || d * lambda + 2.0 * mu > 1.0 / k5)
            throw ConfigError("ellipticity window violated: need kappa5 <= mu, d*lambda+2mu <= 1/kappa5");
    }
};

/// The per-mode constants in the leading gap energies: d=2 gives
/// (mu, lambda+2mu, lambda+2mu); d>=3 gives mu for the first d-1 translations,
/// lambda+2mu for modes d..2d-1, and 2mu for the remaining rotations.
inline double lame_rate_constant(int d, int alpha, const LameConstants& lame) {
    const int N = d * (d + 1) / 2;
    if (alpha < 1 || alpha > N) throw std::invalid_argument("mode index out of range");
    if (d == 2) return alpha == 1 ? lame.mu : lame.lambda_plus_2mu();
    if (alpha <= d - 1) return lame.mu;
    if (alpha <= 2 * d - 1) return lame.lambda_plus_2mu();
    return 2.0 * lame.mu;
}

/// (C0 E, F) for symmetric strain matrices: lambda tr(E) tr(F) + 2 mu E:F.
inline double elastic_pairing(const Eigen::MatrixXd& E, const Eigen::MatrixXd& F,
                              const LameConstants& lame) {
    return lame.lambda * E.trace() * F.trace() + 2.0 * lame.mu * E.cwiseProduct(F).sum();
}

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

}  // namespace lamegap
