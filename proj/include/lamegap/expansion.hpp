#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lamegap/aux_fields.hpp"
#include "lamegap/factors.hpp"
#include "lamegap/rates.hpp"

namespace lamegap {

/// Everything the pointwise expansion needs: geometry, material, datum,
/// limit factor data and the fitted geometry constants of the diagonal
/// energies (one per translation mode).
struct ExpansionConfig {
    GapProfile profile;
    LameConstants lame;
    BoundaryData phi;
    std::optional<FactorData> starred;
    std::vector<double> kstar;  // per translation mode, d = 2,3 paths
    std::vector<double> tau;    // relative curvatures; derived from the profile when empty

    std::vector<double> curvatures() const;
};

struct GradResult {
    MatrixXd gradient;          // d x d
    double uncertainty = 0;     // the bounded remainder band, |phi|_{C^2} scale
    std::vector<double> c_alpha;
};

/// Pointwise asymptotic gradient: sum of the mode fields weighted by the
/// limit free constants plus the datum field, with the bounded remainder
/// surfaced as an explicit uncertainty radius.
class GradExpansion {
  public:
    explicit GradExpansion(ExpansionConfig cfg);

    GradResult eval(const VectorXd& x) const;
    const std::vector<double>& free_constants_at(double eps);  // recompute for another eps

  private:
    ExpansionConfig cfg_;
    std::vector<LeadingTerm> modes_;  // index 0: datum field, then 1..N
    std::vector<double> c_alpha_;
    double phi_c2_ = 0;
};

GradResult grad_u_asymptotic(const ExpansionConfig& cfg, const VectorXd& x);

/// Certificates at the shortest segment / crossover cylinder, with resolved
/// prefactors when limit data is present.
std::vector<RateCertificate> bounds_segment(const ExpansionConfig& cfg);
std::vector<RateCertificate> bounds_cylinder(const ExpansionConfig& cfg);

/// Evaluable field-wide upper envelope
/// (H_A rho_A + H_B rho_B |x'| + eta |x'|^k) / (eps + kappa1 |x'|^m).
struct FieldEnvelope {
    ParityClass cls = ParityClass::None;
    EnvelopeConstants H;
    RateMonomial rho_A, rho_B;
    double eta = 0, kappa1 = 0;
    int k = 1, m = 2;

    double evaluate(double xprime_norm, double eps) const;
};

FieldEnvelope bounds_field(const ExpansionConfig& cfg);

/// Flat-boundary bounds at x' = (r, 0, ...): exact G-factor envelopes as
/// functions of eps, plus the unified certificate.
struct FlatBounds {
    double sigma = 0;  // measure of the flat zone B'_r
    std::function<double(double)> lower, upper, unified;
    std::vector<RateCertificate> certificates;
};

FlatBounds bounds_flat(const ExpansionConfig& cfg, double r, double eps_for_certificates);

}  // namespace lamegap
