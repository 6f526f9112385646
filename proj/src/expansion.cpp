#include "lamegap/expansion.hpp"

#include <cmath>

namespace lamegap {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

RateTableInputs table_inputs(const ExpansionConfig& cfg, const StarredSummary* st) {
    if (cfg.phi.family == Family::Custom)
        throw ConfigError("rate certificates are stated for the model families only");
    RateTableInputs in;
    in.family = cfg.phi.family;
    in.d = cfg.profile.d;
    in.m = cfg.profile.m;
    in.k = cfg.phi.k;
    in.kappa1 = cfg.profile.kappa1;
    in.kappa2 = cfg.profile.kappa2;
    in.eta = cfg.phi.eta;
    in.lame = cfg.lame;
    in.starred = st;
    return in;
}

double ball_measure(int np, double r) {
    return std::pow(kPi, 0.5 * np) / std::tgamma(0.5 * np + 1.0) * std::pow(r, np);
}

}  // namespace

std::vector<double> ExpansionConfig::curvatures() const {
    if (!tau.empty()) return tau;
    if (profile.m != 2)
        throw ConfigError("relative curvatures are only derived automatically for m = 2");
    return principal_relative_curvatures(profile);
}

GradExpansion::GradExpansion(ExpansionConfig cfg) : cfg_(std::move(cfg)) {
    const int d = cfg_.profile.d;
    if (!cfg_.starred) throw ConfigError("gradient expansion needs limit factor data");
    if (d == 2) {
        const MatrixXd J0 = cfg_.phi.trace_jac(VectorXd::Zero(1));
        if (J0.norm() > 1e-10)
            throw ConfigError("the d = 2 expansion requires a datum with vanishing gradient "
                              "at the touching point");
    }
    modes_.reserve(rigid_count(d) + 1);
    modes_.push_back(u_bar(0, cfg_.profile, cfg_.lame, &cfg_.phi));
    for (int alpha = 1; alpha <= rigid_count(d); ++alpha)
        modes_.push_back(u_bar(alpha, cfg_.profile, cfg_.lame, nullptr));
    c_alpha_ = c_alpha_asymptotic(d, *cfg_.starred, cfg_.curvatures(), cfg_.lame,
                                  cfg_.profile.eps, cfg_.kstar);
    phi_c2_ = cfg_.phi.c2_norm(cfg_.profile.R);
}

const std::vector<double>& GradExpansion::free_constants_at(double eps) {
    c_alpha_ = c_alpha_asymptotic(cfg_.profile.d, *cfg_.starred, cfg_.curvatures(), cfg_.lame,
                                  eps, cfg_.kstar);
    return c_alpha_;
}

GradResult GradExpansion::eval(const VectorXd& x) const {
    const int d = cfg_.profile.d;
    GradResult out;
    out.gradient = modes_[0].gradient(x);
    for (int alpha = 1; alpha <= rigid_count(d); ++alpha)
        out.gradient += c_alpha_[alpha - 1] * modes_[alpha].gradient(x);
    out.uncertainty = phi_c2_;
    out.c_alpha = c_alpha_;
    return out;
}

GradResult grad_u_asymptotic(const ExpansionConfig& cfg, const VectorXd& x) {
    return GradExpansion(cfg).eval(x);
}

std::vector<RateCertificate> bounds_segment(const ExpansionConfig& cfg) {
    std::optional<StarredSummary> st;
    if (cfg.starred) st = starred_summary(*cfg.starred);
    return rate_table_segment(table_inputs(cfg, st ? &*st : nullptr));
}

std::vector<RateCertificate> bounds_cylinder(const ExpansionConfig& cfg) {
    std::optional<StarredSummary> st;
    if (cfg.starred) st = starred_summary(*cfg.starred);
    return rate_table_cylinder(table_inputs(cfg, st ? &*st : nullptr));
}

double FieldEnvelope::evaluate(double xprime_norm, double eps) const {
    const double r = xprime_norm;
    const double num = H.HA.value * rho_A.evaluate(eps) +
                       H.HB.value * rho_B.evaluate(eps) * r + eta * std::pow(r, k);
    return num / (eps + kappa1 * std::pow(r, m));
}

FieldEnvelope bounds_field(const ExpansionConfig& cfg) {
    FieldEnvelope env;
    env.cls = classify_parity(cfg.phi, cfg.profile.R);
    if (env.cls == ParityClass::None)
        throw ConfigError("field envelope needs a datum in one of the parity classes");
    std::optional<StarredSummary> st;
    if (cfg.starred) st = starred_summary(*cfg.starred);
    env.H = envelope_constants(env.cls, cfg.profile.d, cfg.profile.m, cfg.phi.k,
                               cfg.profile.kappa1, cfg.profile.kappa2, cfg.phi.eta, cfg.lame,
                               st ? &*st : nullptr);
    if (!env.H.HA.resolved || !env.H.HB.resolved)
        throw ConfigError("field envelope needs limit factor data for this branch: " +
                          (env.H.HA.resolved ? env.H.HB.expr : env.H.HA.expr));
    const RhoSelectors sel = rho_selectors(env.cls, cfg.profile.d, cfg.profile.m, cfg.phi.k);
    env.rho_A = sel.rho_A;
    env.rho_B = sel.rho_B;
    env.eta = cfg.phi.eta;
    env.kappa1 = cfg.profile.kappa1;
    env.k = cfg.phi.k;
    env.m = cfg.profile.m;
    return env;
}

FlatBounds bounds_flat(const ExpansionConfig& cfg, double r, double eps_for_certificates) {
    if (!(r > 0 && r < cfg.profile.R)) throw ConfigError("flat zone radius must be in (0, R)");
    FlatBounds fb;
    const int d = cfg.profile.d;
    const int m = cfg.profile.m;
    const int k = cfg.phi.k;
    const double eta = cfg.phi.eta;
    const double k1 = cfg.profile.kappa1, k2 = cfg.profile.kappa2;
    const Family fam = cfg.phi.family;
    if (fam == Family::Custom)
        throw ConfigError("flat-boundary certificates are stated for the model families only");
    fb.sigma = ball_measure(d - 1, r);
    const double sigma = fb.sigma;
    const double sig_k = std::pow(sigma, double(k) / (d - 1));
    const double sig_1 = std::pow(sigma, 1.0 / (d - 1));

    fb.unified = [=](double eps) { return eta * sig_k / eps; };
    switch (fam) {
        case Family::E1:
            fb.upper = [=](double eps) {
                return eta *
                       (flat_gap_factor(k, 1, d, m, eps, sigma, k1, k2) /
                            flat_gap_factor(0, 2, d, m, eps, sigma, k1, k2) +
                        sig_k) /
                       eps;
            };
            fb.lower = [=](double eps) {
                return eta *
                       (flat_gap_factor(k, 2, d, m, eps, sigma, k1, k2) /
                            flat_gap_factor(0, 1, d, m, eps, sigma, k1, k2) +
                        sig_k) /
                       eps;
            };
            break;
        case Family::E2:
            fb.upper = [=](double eps) {
                return eta *
                       (sig_1 * flat_gap_factor(k + 1, 1, d, m, eps, sigma, k1, k2) /
                            flat_gap_factor(2, 2, d, m, eps, sigma, k1, k2) +
                        sig_k) /
                       eps;
            };
            fb.lower = [=](double eps) {
                return eta *
                       (sig_1 * flat_gap_factor(k + 1, 2, d, m, eps, sigma, k1, k2) /
                            flat_gap_factor(2, 1, d, m, eps, sigma, k1, k2) +
                        sig_k) /
                       eps;
            };
            break;
        default:  // E3
            fb.upper = [=](double eps) { return eta * sig_k / eps; };
            fb.lower = fb.upper;
            break;
    }
    RateTableInputs in;
    in.family = fam;
    in.d = d;
    in.m = m;
    in.k = k;
    in.kappa1 = k1;
    in.kappa2 = k2;
    in.eta = eta;
    in.lame = cfg.lame;
    fb.certificates = rate_table_flat(in, sigma, eps_for_certificates);
    return fb;
}

}  // namespace lamegap
