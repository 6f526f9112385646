#include "lamegap/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lamegap {

namespace {

Fraction frac_pow_expr(int num, int den) { return Fraction(num, den); }

double safe_pow(double base, double expo) { return std::pow(base, expo); }

// sigma^e with the convention that a vanishing flat part kills the term
double sigma_pow(double sigma, double e) {
    if (sigma == 0.0) return 0.0;
    return std::pow(sigma, e);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string RateMonomial::str() const {
    std::ostringstream os;
    os << "eps^(" << exponent.str() << ")";
    if (log_power != 0) os << "*|ln eps|^" << log_power;
    return os.str();
}

RateMonomial rho_monomial(int i, int d, int m) {
    const int t = d + i - 1;
    if (m > t) return RateMonomial{frac_pow_expr(t - m, m), 0};
    if (m == t) return RateMonomial{Fraction(0), 1};
    return RateMonomial::one();
}

double rho(int i, int d, int m, double eps) {
    if (d < 2 || m < 2) throw ConfigError("rate index needs d >= 2, m >= 2");
    if (!(eps > 0 && eps < 1)) throw ConfigError("rate index defined for eps in (0,1)");
    return rho_monomial(i, d, m).evaluate(eps);
}

RhoSelectors rho_selectors(ParityClass cls, int d, int m, int k) {
    if (cls == ParityClass::None) throw ConfigError("selectors need a parity class");
    RhoSelectors s;
    const RateMonomial r0 = rho_monomial(0, d, m);
    const RateMonomial r2 = rho_monomial(2, d, m);
    s.rho_A = (cls == ParityClass::A1) ? rho_monomial(k, d, m).over(r0)
                                       : RateMonomial::one().over(r0);
    s.rho_B = (cls == ParityClass::A2) ? rho_monomial(k + 1, d, m).over(r2)
                                       : RateMonomial::one().over(r2);
    return s;
}

EnvelopeConstants envelope_constants(ParityClass cls, int d, int m, int k, double kappa1,
                                     double kappa2, double eta, const LameConstants& lame,
                                     const StarredSummary* st) {
    if (cls == ParityClass::None) throw ConfigError("envelope constants need a parity class");
    EnvelopeConstants out;
    const int N = d * (d + 1) / 2;

    // sides that need determinant or functional data stay unresolved when the
    // limit data is absent; callers that must evaluate them enforce that
    auto max_q_over_L = [&](int lo, int hi, double kpow) -> EnvelopeValue {
        EnvelopeValue v;
        v.expr = "max_a kappa2^p |Q*_a| / L^a";
        if (!st || !st->Qstar.allFinite()) return v;
        double best = 0;
        for (int a = lo; a <= hi; ++a)
            best = std::max(best, std::abs(st->Qstar[a - 1]) / lame_rate_constant(d, a, lame));
        v.value = kpow * best;
        v.resolved = true;
        return v;
    };

    // translation side
    if (m >= d + k - 1 && cls == ParityClass::A1) {
        out.HA.value = eta * safe_pow(kappa2, double(d - 1) / m) *
                       safe_pow(kappa1, -double(d + k - 1) / m);
        out.HA.expr = "eta kappa2^{(d-1)/m} kappa1^{-(d+k-1)/m}";
        out.HA.resolved = true;
    } else if (m >= d + k - 1 || (d + 1 <= m && m < d + k - 1)) {
        out.HA = max_q_over_L(1, d, safe_pow(kappa2, double(d - 1) / m));
    } else if (d - 1 <= m && m < d + 1) {
        out.HA.expr = "max_a kappa2^{(d-1)/m} |det F1*^a| / (L^a det D*)";
        if (st && st->blocks_finite) {
            double best = 0;
            for (int a = 1; a <= d; ++a)
                if (std::isfinite(st->detF1[a - 1]))
                    best = std::max(best,
                                    std::abs(st->detF1[a - 1]) / lame_rate_constant(d, a, lame));
            out.HA.value = safe_pow(kappa2, double(d - 1) / m) * best / st->detD;
            out.HA.resolved = true;
        }
    } else {  // m < d - 1
        out.HA.expr = "max_a |det F3*^a| / det F*";
        if (st && st->full_finite) {
            double best = 0;
            for (int a = 1; a <= d; ++a) best = std::max(best, std::abs(st->detF3[a - 1]));
            out.HA.value = best / st->detF;
            out.HA.resolved = true;
        }
    }

    // rotation side
    if (m >= d + k && cls == ParityClass::A2) {
        out.HB.value =
            eta * safe_pow(kappa2, double(d + 1) / m) * safe_pow(kappa1, -double(d + k) / m);
        out.HB.expr = "eta kappa2^{(d+1)/m} kappa1^{-(d+k)/m}";
        out.HB.resolved = true;
    } else if (m >= d + k || (d + 1 <= m && m < d + k)) {
        out.HB = max_q_over_L(d + 1, N, safe_pow(kappa2, double(d + 1) / m));
    } else if (d - 1 <= m && m < d + 1) {
        out.HB.expr = "max_a |det F2*^a| / det D*";
        if (st && st->blocks_finite) {
            double best = 0;
            for (int a = d + 1; a <= N; ++a)
                if (std::isfinite(st->detF2[a - d - 1]))
                    best = std::max(best, std::abs(st->detF2[a - d - 1]));
            out.HB.value = best / st->detD;
            out.HB.resolved = true;
        }
    } else {
        out.HB.expr = "max_a |det F3*^a| / det F*";
        if (st && st->full_finite) {
            double best = 0;
            for (int a = d + 1; a <= N; ++a) best = std::max(best, std::abs(st->detF3[a - 1]));
            out.HB.value = best / st->detF;
            out.HB.resolved = true;
        }
    }
    return out;
}

double flat_gap_factor(int i, int j, int d, int m, double eps, double sigma, double kappa1,
                       double kappa2) {
    if (j != 1 && j != 2) throw ConfigError("flat gap factor: j selects kappa1 or kappa2");
    if (sigma < 0) throw ConfigError("flat gap factor: sigma must be nonnegative");
    const double kap = (j == 1) ? kappa1 : kappa2;
    const double t1 = sigma_pow(sigma, double(d + i - 1) / (d - 1));
    const double t2 =
        sigma_pow(sigma, double(d - 2 + i) / (d - 1)) * safe_pow(kap, -1.0 / m) *
        std::pow(eps, 1.0 / m);
    const double t3 = safe_pow(kap, -double(d - 1 + i) / m) * eps * rho(i, d, m, eps);
    return t1 + t2 + t3;
}

namespace {

void validate_family_order(Family family, int k) {
    if (family == Family::E1 && k < 2) throw ConfigError("family E1 requires k >= 2");
    if ((family == Family::E2 || family == Family::E3) && (k < 1 || k == 2))
        throw ConfigError("families E2/E3 require k >= 1, k != 2");
}

constexpr double kDetTol = 1e-12;

}  // namespace

std::vector<RateCertificate> rate_table_segment(const RateTableInputs& in) {
    validate_family_order(in.family, in.k);
    const int d = in.d, m = in.m, k = in.k;
    std::vector<RateCertificate> out;
    const RateMonomial eps1 = RateMonomial::eps_power(Fraction(1));
    const RateMonomial r0 = rho_monomial(0, d, m);

    if (m <= d) {
        RateCertificate up, lo;
        up.side = "upper";
        lo.side = "lower";
        up.location = lo.location = "segment";
        if (d - 1 <= m) {
            up.case_label = lo.case_label = "T1.1(i) d-1<=m<=d";
            up.rate = lo.rate = RateMonomial::one().over(eps1.times(r0));
            up.prefactor_expr = "max_a kappa2^{(d-1)/m} |det F1*^a| / (L^a det D*)";
            lo.prefactor_expr = "kappa1^{(d-1)/m} |det F1*^a0| / (L^a0 det D*)";
            if (in.starred && in.starred->blocks_finite) {
                const auto& st = *in.starred;
                double best_up = 0, best_lo = 0;
                int alpha0 = 0;
                const double ref =
                    std::abs(st.detD) * (1.0 + st.Qstar.cwiseAbs().maxCoeff());
                for (int a = 1; a <= d; ++a) {
                    const double L = lame_rate_constant(d, a, in.lame);
                    const double da = std::abs(st.detF1[a - 1]);
                    best_up = std::max(best_up, da / L);
                    if (da > kDetTol * ref && da / L > best_lo) {
                        best_lo = da / L;
                        alpha0 = a;
                    }
                }
                up.prefactor = safe_pow(in.kappa2, double(d - 1) / m) * best_up / st.detD;
                if (alpha0 > 0) {
                    lo.prefactor = safe_pow(in.kappa1, double(d - 1) / m) * best_lo / st.detD;
                    lo.note = "alpha0 = " + std::to_string(alpha0) +
                              ", det F1*^a0 = " + fmt(st.detF1[alpha0 - 1]);
                } else {
                    lo.note = "lower bound unavailable: all determinants vanish numerically";
                }
            } else {
                up.note = lo.note = "prefactor unresolved: starred factor data not supplied";
            }
        } else {  // m < d - 1
            up.case_label = lo.case_label = "T1.1(i) m<d-1";
            up.rate = lo.rate = RateMonomial::one().over(eps1);
            up.prefactor_expr = "max_a |det F3*^a| / det F*  (a <= d)";
            lo.prefactor_expr = "|det F3*^a0| / det F*";
            if (in.starred && in.starred->full_finite) {
                const auto& st = *in.starred;
                double best_up = 0, best_lo = 0;
                int alpha0 = 0;
                const double ref = std::abs(st.detF) * (1.0 + st.Qstar.cwiseAbs().maxCoeff());
                for (int a = 1; a <= d; ++a) {
                    const double da = std::abs(st.detF3[a - 1]);
                    best_up = std::max(best_up, da);
                    if (da > kDetTol * ref && da > best_lo) {
                        best_lo = da;
                        alpha0 = a;
                    }
                }
                up.prefactor = best_up / st.detF;
                if (alpha0 > 0) {
                    lo.prefactor = best_lo / st.detF;
                    lo.note = "alpha0 = " + std::to_string(alpha0);
                } else {
                    lo.note = "lower bound unavailable: all determinants vanish numerically";
                }
            } else {
                up.note = lo.note = "prefactor unresolved: starred factor data not supplied";
            }
        }
        out.push_back(up);
        out.push_back(lo);
        return out;
    }

    if (in.family == Family::E1 && m >= d + k) {
        RateCertificate up, lo;
        up.case_label = lo.case_label = "T1.1(ii) m>=d+k";
        up.side = "upper";
        lo.side = "lower";
        up.location = lo.location = "segment";
        up.rate = lo.rate = rho_monomial(k, d, m).over(eps1.times(r0));
        up.prefactor = in.eta * safe_pow(in.kappa2, double(d - 1) / m) *
                       safe_pow(in.kappa1, -double(d + k - 1) / m);
        up.prefactor_expr = "eta kappa2^{(d-1)/m} kappa1^{-(d+k-1)/m}";
        lo.prefactor = in.eta * safe_pow(in.kappa1, double(d - 1) / m) *
                       safe_pow(in.kappa2, -double(d + k - 1) / m);
        lo.prefactor_expr = "eta kappa1^{(d-1)/m} kappa2^{-(d+k-1)/m}";
        out.push_back(up);
        out.push_back(lo);
        return out;
    }

    throw CaseNotCovered("segment bounds: (" + to_string(in.family) + ", d=" +
                         std::to_string(d) + ", m=" + std::to_string(m) +
                         ", k=" + std::to_string(k) + ") is outside the stated cases");
}

std::vector<RateCertificate> rate_table_cylinder(const RateTableInputs& in) {
    validate_family_order(in.family, in.k);
    const int d = in.d, m = in.m, k = in.k;
    const int N = d * (d + 1) / 2;
    std::vector<RateCertificate> out;
    const RateMonomial r2 = rho_monomial(2, d, m);
    // 1 / eps^{1 - 1/m}
    const RateMonomial inv_eps_1m = RateMonomial::eps_power(Fraction(1 - m, m));

    auto push_pair = [&](RateCertificate up, RateCertificate lo) {
        up.side = "upper";
        lo.side = "lower";
        up.location = lo.location = "cylinder";
        out.push_back(up);
        out.push_back(lo);
    };

    if (d < m && m < d + k && k > 1) {
        RateCertificate up, lo;
        if (d + 1 <= m) {
            up.case_label = lo.case_label = "T1.2(i) d+1<=m<d+k";
            up.rate = lo.rate = inv_eps_1m.over(r2);
            up.prefactor_expr = "max_a |Q*_a|/L^a kappa2^{(d+1)/m} / (1+kappa1), a > d";
            lo.prefactor_expr = "kappa2^{(d+1)/m} |Q*_{d+1}| / ((1+kappa2) L^{d+1})";
            if (in.starred && in.starred->Qstar.allFinite()) {
                const auto& st = *in.starred;
                double best = 0;
                for (int a = d + 1; a <= N; ++a)
                    best = std::max(best, std::abs(st.Qstar[a - 1]) /
                                              lame_rate_constant(d, a, in.lame));
                up.prefactor =
                    best * safe_pow(in.kappa2, double(d + 1) / m) / (1.0 + in.kappa1);
                const double qd1 = std::abs(st.Qstar[d]);
                if (qd1 > kDetTol * (1.0 + st.Qstar.cwiseAbs().maxCoeff())) {
                    lo.prefactor = safe_pow(in.kappa2, double(d + 1) / m) * qd1 /
                                   ((1.0 + in.kappa2) * lame_rate_constant(d, d + 1, in.lame));
                    lo.note = "Q*_{d+1} = " + fmt(st.Qstar[d]);
                } else {
                    lo.note = "lower bound not certified: Q*_{d+1} vanishes numerically";
                }
            } else {
                up.note = lo.note = "prefactor unresolved: starred factor data not supplied";
            }
        } else {  // d < m < d+1: unreachable for integer m, kept for completeness
            up.case_label = lo.case_label = "T1.2(i) d<m<d+1";
            up.rate = lo.rate = inv_eps_1m;
            up.prefactor_expr = "max_a |det F2*^a| / ((1+kappa1) det D*)";
            lo.prefactor_expr = "|det F2*^{d+1}| / ((1+kappa2) det D*)";
            if (in.starred && in.starred->blocks_finite) {
                const auto& st = *in.starred;
                double best = 0;
                for (int a = d + 1; a <= N; ++a)
                    best = std::max(best, std::abs(st.detF2[a - d - 1]));
                up.prefactor = best / ((1.0 + in.kappa1) * st.detD);
                const double f2 = std::abs(st.detF2[0]);
                if (f2 > kDetTol * std::abs(st.detD)) {
                    lo.prefactor = f2 / ((1.0 + in.kappa2) * st.detD);
                } else {
                    lo.note = "lower bound not certified: det F2*^{d+1} vanishes numerically";
                }
            } else {
                up.note = lo.note = "prefactor unresolved: starred factor data not supplied";
            }
        }
        push_pair(up, lo);
        return out;
    }

    const bool plain_range = (m > d + k && k >= 1) || (m == d + k && k == 1);
    if (in.family == Family::E2) {
        if (plain_range) {
            RateCertificate up, lo;
            up.case_label = lo.case_label = "T1.2(ii) m>=d+k plain";
            up.rate = lo.rate = RateMonomial::eps_power(Fraction(k - m, m));
            up.prefactor = in.eta *
                           (safe_pow(in.kappa2, double(d + 1) / m) *
                                safe_pow(in.kappa1, -double(d + k) / m) +
                            1.0) /
                           (1.0 + in.kappa1);
            up.prefactor_expr = "eta (kappa2^{(d+1)/m} kappa1^{-(d+k)/m} + 1) / (1+kappa1)";
            lo.prefactor = in.eta *
                           (safe_pow(in.kappa1, double(d + 1) / m) *
                                safe_pow(in.kappa2, -double(d + k) / m) +
                            1.0) /
                           (1.0 + in.kappa2);
            lo.prefactor_expr = "eta (kappa1^{(d+1)/m} kappa2^{-(d+k)/m} + 1) / (1+kappa2)";
            push_pair(up, lo);
            return out;
        }
        if (m == d + k && k > 2) {
            RateCertificate up, lo;
            up.case_label = lo.case_label = "T1.2(ii) m=d+k, k>2";
            up.rate = lo.rate = rho_monomial(k + 1, d, m).times(inv_eps_1m).over(r2);
            up.prefactor = in.eta * safe_pow(in.kappa2, double(d + 1) / m) /
                           ((1.0 + in.kappa1) * safe_pow(in.kappa1, double(d + k) / m));
            up.prefactor_expr = "eta kappa2^{(d+1)/m} / ((1+kappa1) kappa1^{(d+k)/m})";
            lo.prefactor = in.eta * safe_pow(in.kappa1, double(d + 1) / m) /
                           ((1.0 + in.kappa2) * safe_pow(in.kappa2, double(d + k) / m));
            lo.prefactor_expr = "eta kappa1^{(d+1)/m} / ((1+kappa2) kappa2^{(d+k)/m})";
            push_pair(up, lo);
            return out;
        }
    }
    if (in.family == Family::E3) {
        if (plain_range) {
            RateCertificate up, lo;
            up.case_label = lo.case_label = "T1.2(iii) m>=d+k plain";
            up.rate = lo.rate = RateMonomial::eps_power(Fraction(k - m, m));
            up.prefactor = in.eta / (1.0 + in.kappa1);
            up.prefactor_expr = "eta / (1+kappa1)";
            lo.prefactor = in.eta / (1.0 + in.kappa2);
            lo.prefactor_expr = "eta / (1+kappa2)";
            push_pair(up, lo);
            return out;
        }
        if (m == d + k && k > 2) {
            RateCertificate up, lo;
            up.case_label = lo.case_label = "T1.2(iii) m=d+k, k>2";
            up.rate = lo.rate = RateMonomial::eps_power(Fraction(k - m, m));
            up.prefactor_expr =
                "(max_a kappa2^{(d+1)/m} |Q*_a|/L^a + eta) / (1+kappa1), a > d";
            lo.prefactor_expr = "kappa1^{(d+1)/m} |Q*_{d+1}| / ((1+kappa2) L^{d+1})";
            if (in.starred && in.starred->Qstar.allFinite()) {
                const auto& st = *in.starred;
                double best = 0;
                for (int a = d + 1; a <= N; ++a)
                    best = std::max(best, std::abs(st.Qstar[a - 1]) /
                                              lame_rate_constant(d, a, in.lame));
                up.prefactor = (safe_pow(in.kappa2, double(d + 1) / m) * best + in.eta) /
                               (1.0 + in.kappa1);
                const double qd1 = std::abs(st.Qstar[d]);
                if (qd1 > kDetTol * (1.0 + st.Qstar.cwiseAbs().maxCoeff())) {
                    lo.prefactor = safe_pow(in.kappa1, double(d + 1) / m) * qd1 /
                                   ((1.0 + in.kappa2) * lame_rate_constant(d, d + 1, in.lame));
                    lo.note = "Q*_{d+1} = " + fmt(st.Qstar[d]);
                } else {
                    lo.note = "lower bound not certified: Q*_{d+1} vanishes numerically";
                }
            } else {
                up.note = lo.note = "prefactor unresolved: starred factor data not supplied";
            }
            push_pair(up, lo);
            return out;
        }
    }

    throw CaseNotCovered("cylinder bounds: (" + to_string(in.family) + ", d=" +
                         std::to_string(d) + ", m=" + std::to_string(m) +
                         ", k=" + std::to_string(k) + ") is outside the stated cases");
}

std::vector<RateCertificate> rate_table_corollary(const RateTableInputs& in) {
    validate_family_order(in.family, in.k);
    ParityClass cls;
    switch (in.family) {
        case Family::E1: cls = ParityClass::A1; break;
        case Family::E2: cls = ParityClass::A2; break;
        case Family::E3: cls = ParityClass::A3; break;
        default: throw ConfigError("corollary certificates need a model family");
    }
    const RhoSelectors sel = rho_selectors(cls, in.d, in.m, in.k);
    RateCertificate up;
    up.case_label = "corollary (field bound at x'=0)";
    up.side = "upper";
    up.location = "segment";
    up.rate = sel.rho_A.over(RateMonomial::eps_power(Fraction(1)));
    const EnvelopeConstants env = envelope_constants(cls, in.d, in.m, in.k, in.kappa1,
                                                     in.kappa2, in.eta, in.lame, in.starred);
    up.prefactor_expr = env.HA.expr;
    if (env.HA.resolved) up.prefactor = env.HA.value;
    else up.note = "prefactor unresolved: starred factor data not supplied";
    return {up};
}

std::vector<RateCertificate> rate_table_flat(const RateTableInputs& in, double sigma,
                                             double eps_for_G) {
    validate_family_order(in.family, in.k);
    const int d = in.d, m = in.m, k = in.k;
    std::vector<RateCertificate> out;
    const double sig_k = sigma_pow(sigma, double(k) / (d - 1));
    const RateMonomial inv_eps = RateMonomial::eps_power(Fraction(-1));

    RateCertificate uni_up, uni_lo;
    uni_up.case_label = uni_lo.case_label = "flat unified";
    uni_up.side = "upper";
    uni_lo.side = "lower";
    uni_up.location = uni_lo.location = "flat";
    uni_up.rate = uni_lo.rate = inv_eps;
    uni_up.prefactor = uni_lo.prefactor = in.eta * sig_k;
    uni_up.prefactor_expr = uni_lo.prefactor_expr = "eta |Sigma'|^{k/(d-1)}";
    out.push_back(uni_up);
    out.push_back(uni_lo);

    RateCertificate up, lo;
    up.side = "upper";
    lo.side = "lower";
    up.location = lo.location = "flat";
    up.rate = lo.rate = inv_eps;
    const double e = eps_for_G;
    auto G = [&](int i, int j) {
        return flat_gap_factor(i, j, d, m, e, sigma, in.kappa1, in.kappa2);
    };
    switch (in.family) {
        case Family::E1:
            up.case_label = lo.case_label = "flat(i) E1";
            up.prefactor = in.eta * (G(k, 1) / G(0, 2) + sig_k);
            lo.prefactor = in.eta * (G(k, 2) / G(0, 1) + sig_k);
            up.prefactor_expr = "eta (G_k1/G_02 + |Sigma'|^{k/(d-1)})";
            lo.prefactor_expr = "eta (G_k2/G_01 + |Sigma'|^{k/(d-1)})";
            break;
        case Family::E2:
            up.case_label = lo.case_label = "flat(ii) E2";
            up.prefactor =
                in.eta * (sigma_pow(sigma, 1.0 / (d - 1)) * G(k + 1, 1) / G(2, 2) + sig_k);
            lo.prefactor =
                in.eta * (sigma_pow(sigma, 1.0 / (d - 1)) * G(k + 1, 2) / G(2, 1) + sig_k);
            up.prefactor_expr = "eta (|Sigma'|^{1/(d-1)} G_{k+1,1}/G_22 + |Sigma'|^{k/(d-1)})";
            lo.prefactor_expr = "eta (|Sigma'|^{1/(d-1)} G_{k+1,2}/G_21 + |Sigma'|^{k/(d-1)})";
            break;
        case Family::E3:
            up.case_label = lo.case_label = "flat(iii) E3";
            up.prefactor = in.eta * sig_k;
            lo.prefactor = in.eta * sig_k;
            up.prefactor_expr = lo.prefactor_expr = "eta |Sigma'|^{k/(d-1)}";
            break;
        default:
            throw ConfigError("flat certificates need a model family");
    }
    up.note = lo.note = "G factors evaluated at eps = " + fmt(e);
    out.push_back(up);
    out.push_back(lo);
    return out;
}

}  // namespace lamegap
