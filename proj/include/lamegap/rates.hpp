#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lamegap/boundary.hpp"
#include "lamegap/factors.hpp"
#include "lamegap/fraction.hpp"
#include "lamegap/lame.hpp"

namespace lamegap {

/// eps^exponent |ln eps|^log_power with an exact rational exponent. Ratios of
/// rate indices may carry negative log powers.
struct RateMonomial {
    Fraction exponent{0, 1};
    int log_power = 0;

    double evaluate(double eps) const {
        double v = std::pow(eps, exponent.value());
        if (log_power != 0) v *= std::pow(std::abs(std::log(eps)), log_power);
        return v;
    }
    RateMonomial times(const RateMonomial& o) const {
        return {exponent + o.exponent, log_power + o.log_power};
    }
    RateMonomial over(const RateMonomial& o) const {
        return {exponent - o.exponent, log_power - o.log_power};
    }
    static RateMonomial one() { return {}; }
    static RateMonomial eps_power(Fraction f) { return {f, 0}; }
    std::string str() const;
};

/// Gap rate index: eps^{(d+i-1)/m - 1} above the threshold order, |ln eps| at
/// it, constant below.
RateMonomial rho_monomial(int i, int d, int m);
double rho(int i, int d, int m, double eps);

struct RhoSelectors {
    RateMonomial rho_A, rho_B;
};

/// Case selectors: the parity-enhanced classes swap the numerator index.
RhoSelectors rho_selectors(ParityClass cls, int d, int m, int k);

struct EnvelopeValue {
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string expr;
    bool resolved = false;
};

struct EnvelopeConstants {
    EnvelopeValue HA, HB;
};

/// The five-branch envelope constants for the field-wide upper bound. Branches
/// built from determinant ratios or limit functionals need starred data and
/// are reported unresolved when it is absent; requiring a resolved value is
/// the caller's decision.
EnvelopeConstants envelope_constants(ParityClass cls, int d, int m, int k, double kappa1,
                                     double kappa2, double eta, const LameConstants& lame,
                                     const StarredSummary* starred);

/// Flat-boundary gap factor: |S|^{(d+i-1)/(d-1)}
///   + |S|^{(d-2+i)/(d-1)} kappa_j^{-1/m} eps^{1/m}
///   + kappa_j^{-(d-1+i)/m} eps rho_i(d,m;eps); sigma-powers vanish at sigma=0.
double flat_gap_factor(int i, int j, int d, int m, double eps, double sigma, double kappa1,
                       double kappa2);

struct RateCertificate {
    std::string case_label;
    std::string side;      // "upper" or "lower"
    std::string location;  // "segment", "cylinder", "field", "flat"
    RateMonomial rate;
    double prefactor = std::numeric_limits<double>::quiet_NaN();
    std::string prefactor_expr;
    std::string note;

    bool resolved() const { return std::isfinite(prefactor); }
    double evaluate(double eps) const {
        return (resolved() ? prefactor : 1.0) * rate.evaluate(eps);
    }
};

struct RateTableInputs {
    Family family = Family::E1;
    int d = 2, m = 2, k = 2;
    double kappa1 = 1, kappa2 = 1, eta = 1;
    LameConstants lame;
    const StarredSummary* starred = nullptr;  // optional
};

/// Optimal bounds on the shortest segment x' = 0. Throws CaseNotCovered for
/// tuples outside the stated cases.
std::vector<RateCertificate> rate_table_segment(const RateTableInputs& in);

/// Optimal bounds on the cylinder |x'| = eps^{1/m}.
std::vector<RateCertificate> rate_table_cylinder(const RateTableInputs& in);

/// Field-envelope certificate reduced to the segment (the |x'| = 0 value of
/// the corollary bound): H_A rho_A / eps.
std::vector<RateCertificate> rate_table_corollary(const RateTableInputs& in);

/// Flat-boundary certificates at x' = (r, 0, ...), including the unified
/// form eta |Sigma'|^{k/(d-1)} / eps.
std::vector<RateCertificate> rate_table_flat(const RateTableInputs& in, double sigma,
                                             double eps_for_G);

}  // namespace lamegap
