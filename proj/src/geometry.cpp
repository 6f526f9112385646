#include "lamegap/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lamegap {

namespace {

class ZeroSurface final : public ScalarSurface {
  public:
    double value(const VectorXd&) const override { return 0.0; }
    VectorXd gradient(const VectorXd& xp) const override { return VectorXd::Zero(xp.size()); }
    MatrixXd hessian(const VectorXd& xp) const override {
        return MatrixXd::Zero(xp.size(), xp.size());
    }
    bool is_radial() const override { return true; }
};

class RadialPolySurface final : public ScalarSurface {
  public:
    RadialPolySurface(std::vector<int> powers, std::vector<double> coeffs)
        : powers_(std::move(powers)), coeffs_(std::move(coeffs)) {
        if (powers_.size() != coeffs_.size())
            throw ConfigError("radial polynomial: powers and coeffs length mismatch");
        for (int p : powers_)
            if (p < 2) throw ConfigError("radial polynomial: powers must be >= 2");
    }

    double value(const VectorXd& xp) const override {
        const double r = xp.norm();
        double s = 0;
        for (std::size_t j = 0; j < powers_.size(); ++j)
            s += coeffs_[j] * std::pow(r, powers_[j]);
        return s;
    }

    VectorXd gradient(const VectorXd& xp) const override {
        const double r = xp.norm();
        VectorXd g = VectorXd::Zero(xp.size());
        if (r == 0.0) return g;
        for (std::size_t j = 0; j < powers_.size(); ++j) {
            const int p = powers_[j];
            g += coeffs_[j] * p * std::pow(r, p - 2) * xp;
        }
        return g;
    }

    MatrixXd hessian(const VectorXd& xp) const override {
        const int n = static_cast<int>(xp.size());
        const double r = xp.norm();
        MatrixXd H = MatrixXd::Zero(n, n);
        for (std::size_t j = 0; j < powers_.size(); ++j) {
            const int p = powers_[j];
            const double c = coeffs_[j];
            if (r == 0.0) {
                if (p == 2) H += 2.0 * c * MatrixXd::Identity(n, n);
                continue;
            }
            H += c * p * std::pow(r, p - 2) * MatrixXd::Identity(n, n);
            if (p != 2)
                H += c * p * (p - 2) * std::pow(r, p - 4) * (xp * xp.transpose());
        }
        return H;
    }

    bool is_radial() const override { return true; }

  private:
    std::vector<int> powers_;
    std::vector<double> coeffs_;
};

class SphereCapSurface final : public ScalarSurface {
  public:
    explicit SphereCapSurface(double r) : r_(r) {
        if (r <= 0) throw ConfigError("sphere cap: radius must be positive");
    }

    double value(const VectorXd& xp) const override {
        const double q = r_ * r_ - xp.squaredNorm();
        if (q <= 0) throw GeometryError("sphere cap evaluated outside its graph region");
        return r_ - std::sqrt(q);
    }

    VectorXd gradient(const VectorXd& xp) const override {
        const double q = r_ * r_ - xp.squaredNorm();
        if (q <= 0) throw GeometryError("sphere cap evaluated outside its graph region");
        return xp / std::sqrt(q);
    }

    MatrixXd hessian(const VectorXd& xp) const override {
        const double q = r_ * r_ - xp.squaredNorm();
        if (q <= 0) throw GeometryError("sphere cap evaluated outside its graph region");
        const double s = std::sqrt(q);
        const int n = static_cast<int>(xp.size());
        return MatrixXd::Identity(n, n) / s + (xp * xp.transpose()) / (s * s * s);
    }

    bool is_radial() const override { return true; }

  private:
    double r_;
};

class MonomialSurface final : public ScalarSurface {
  public:
    MonomialSurface(int np, std::vector<double> coeffs, std::vector<std::vector<int>> expo)
        : np_(np), coeffs_(std::move(coeffs)), expo_(std::move(expo)) {
        if (coeffs_.size() != expo_.size())
            throw ConfigError("monomial surface: coeffs/exponents length mismatch");
        for (const auto& e : expo_)
            if (static_cast<int>(e.size()) != np_)
                throw ConfigError("monomial surface: exponent tuple has wrong arity");
    }

    double value(const VectorXd& xp) const override {
        double s = 0;
        for (std::size_t t = 0; t < coeffs_.size(); ++t) s += coeffs_[t] * mono(xp, expo_[t]);
        return s;
    }

    VectorXd gradient(const VectorXd& xp) const override {
        VectorXd g = VectorXd::Zero(np_);
        for (std::size_t t = 0; t < coeffs_.size(); ++t)
            for (int i = 0; i < np_; ++i) g[i] += coeffs_[t] * dmono(xp, expo_[t], i);
        return g;
    }

    MatrixXd hessian(const VectorXd& xp) const override {
        MatrixXd H = MatrixXd::Zero(np_, np_);
        for (std::size_t t = 0; t < coeffs_.size(); ++t)
            for (int i = 0; i < np_; ++i)
                for (int j = 0; j < np_; ++j) H(i, j) += coeffs_[t] * d2mono(xp, expo_[t], i, j);
        return H;
    }

    bool is_radial() const override { return false; }

  private:
    static double ipow(double x, int p) {
        double r = 1;
        for (int i = 0; i < p; ++i) r *= x;
        return r;
    }
    static double mono(const VectorXd& x, const std::vector<int>& e) {
        double r = 1;
        for (int i = 0; i < static_cast<int>(e.size()); ++i) r *= ipow(x[i], e[i]);
        return r;
    }
    static double dmono(const VectorXd& x, const std::vector<int>& e, int i) {
        if (e[i] == 0) return 0;
        double r = e[i] * ipow(x[i], e[i] - 1);
        for (int j = 0; j < static_cast<int>(e.size()); ++j)
            if (j != i) r *= ipow(x[j], e[j]);
        return r;
    }
    static double d2mono(const VectorXd& x, const std::vector<int>& e, int i, int j) {
        if (i == j) {
            if (e[i] < 2) return 0;
            double r = e[i] * (e[i] - 1) * ipow(x[i], e[i] - 2);
            for (int l = 0; l < static_cast<int>(e.size()); ++l)
                if (l != i) r *= ipow(x[l], e[l]);
            return r;
        }
        if (e[i] == 0 || e[j] == 0) return 0;
        double r = e[i] * e[j] * ipow(x[i], e[i] - 1) * ipow(x[j], e[j] - 1);
        for (int l = 0; l < static_cast<int>(e.size()); ++l)
            if (l != i && l != j) r *= ipow(x[l], e[l]);
        return r;
    }

    int np_;
    std::vector<double> coeffs_;
    std::vector<std::vector<int>> expo_;
};

}  // namespace

SurfacePtr make_zero_surface() { return std::make_shared<ZeroSurface>(); }

SurfacePtr make_radial_poly_surface(std::vector<int> powers, std::vector<double> coeffs) {
    return std::make_shared<RadialPolySurface>(std::move(powers), std::move(coeffs));
}

SurfacePtr make_power_surface(double c, int m) {
    return std::make_shared<RadialPolySurface>(std::vector<int>{m}, std::vector<double>{c});
}

SurfacePtr make_sphere_cap_surface(double r) { return std::make_shared<SphereCapSurface>(r); }

SurfacePtr make_monomial_surface(int dim_prime, std::vector<double> coeffs,
                                 std::vector<std::vector<int>> exponents) {
    return std::make_shared<MonomialSurface>(dim_prime, std::move(coeffs), std::move(exponents));
}

void GapProfile::check_in_domain(const VectorXd& xp) const {
    if (static_cast<int>(xp.size()) != d - 1)
        throw GeometryError("cross-section point has wrong dimension");
    if (xp.norm() > 2.0 * R * (1.0 + 1e-12))
        throw GeometryError("point outside the validated neighborhood B'_{2R}");
}

double GapProfile::delta(const VectorXd& xp) const {
    check_in_domain(xp);
    const double v = eps + h1->value(xp) - h->value(xp);
    if (!(v > 0)) throw GeometryError("gap width is not positive");
    return v;
}

VectorXd GapProfile::grad_delta(const VectorXd& xp) const {
    check_in_domain(xp);
    return h1->gradient(xp) - h->gradient(xp);
}

MatrixXd GapProfile::hess_delta(const VectorXd& xp) const {
    check_in_domain(xp);
    return h1->hessian(xp) - h->hessian(xp);
}

GapProfile make_power_profile(int d, int m, double c, double R, double eps,
                              double kappa1, double kappa2) {
    if (d < 2) throw ConfigError("dimension must be >= 2");
    if (m < 2) throw ConfigError("convexity order must be >= 2");
    if (eps <= 0) throw ConfigError("epsilon must be positive");
    GapProfile p;
    p.d = d;
    p.m = m;
    p.R = R;
    p.eps = eps;
    p.h = make_zero_surface();
    p.h1 = make_power_surface(c, m);
    p.kappa1 = kappa1;
    p.kappa2 = kappa2;
    p.kappa3 = std::max(1.0, c) * m * (m - 1);
    p.kappa4 = p.kappa3 * (1.0 + std::pow(2.0 * R, m));
    p.tau0 = (m == 2) ? 2.0 * c : 0.0;
    return p;
}

GapProfile make_disk_profile(double r1, double r0, double R, double eps) {
    if (!(0 < r1 && r1 < r0)) throw ConfigError("disks require 0 < r1 < r0");
    if (!(eps > 0 && eps < (r0 - r1) / 2)) throw ConfigError("disks require 0 < eps < (r0-r1)/2");
    if (!(2.0 * R < r1)) throw ConfigError("graph neighborhood must satisfy 2R < r1");
    GapProfile p;
    p.d = 2;
    p.m = 2;
    p.R = R;
    p.eps = eps;
    p.h = make_sphere_cap_surface(r0);
    p.h1 = make_sphere_cap_surface(r1);
    const double tau = 1.0 / r1 - 1.0 / r0;
    // kappa2 absorbs the quartic correction on |x'| <= 2R
    const double quart = (1.0 / (r1 * r1 * r1) - 1.0 / (r0 * r0 * r0)) / 8.0;
    p.kappa1 = tau / 2.0;
    p.kappa2 = tau / 2.0 + 1.5 * quart * (2.0 * R) * (2.0 * R);
    const double qmax = std::sqrt(r1 * r1 - 4.0 * R * R);
    p.kappa3 = std::max(1.0 / qmax, r1 * r1 / (qmax * qmax * qmax)) * 1.05;
    p.kappa4 = 2.0 * (r0 + p.kappa3 * (1 + 2.0 * R + 4.0 * R * R));
    p.tau0 = 0.9 * tau;
    return p;
}

std::vector<double> principal_relative_curvatures(const GapProfile& profile, bool use_fd) {
    if (profile.m != 2)
        throw GeometryError("principal relative curvatures are defined for m = 2 profiles");
    const int n = profile.d - 1;
    const VectorXd origin = VectorXd::Zero(n);
    MatrixXd H;
    if (!use_fd) {
        H = profile.hess_delta(origin);
    } else {
        // 5-point central differences of the gap width
        const double step = std::max(1e-5, 1e-3 * profile.R);
        auto g = [&](const VectorXd& xp) { return profile.eps + profile.h1->value(xp) - profile.h->value(xp); };
        H = MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double v;
                if (i == j) {
                    VectorXd e = VectorXd::Zero(n);
                    e[i] = step;
                    v = (-g(2 * e) + 16 * g(e) - 30 * g(origin) + 16 * g(-e) - g(-2 * e)) /
                        (12 * step * step);
                } else {
                    VectorXd ei = VectorXd::Zero(n), ej = VectorXd::Zero(n);
                    ei[i] = step;
                    ej[j] = step;
                    v = (g(ei + ej) - g(ei - ej) - g(-ei + ej) + g(-ei - ej)) / (4 * step * step);
                }
                H(i, j) = v;
                H(j, i) = v;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    std::vector<double> tau(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(tau.begin(), tau.end());
    if (tau.front() <= 0)
        throw GeometryError("relative curvature matrix is not positive definite");
    return tau;
}

const ConditionCheck* ConditionReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

// Deterministic sample set: tensor grid over [-2R, 2R]^{d-1} clipped to the
// ball, plus points along each coordinate axis and the main diagonal ray.
std::vector<VectorXd> sample_points(const GapProfile& p, int n_samples) {
    const int n = p.d - 1;
    const double r2 = 2.0 * p.R;
    std::vector<VectorXd> pts;
    const int g = std::max(2, n_samples);
    if (n == 1) {
        for (int i = 0; i <= g; ++i) {
            VectorXd x(1);
            x[0] = -r2 + 2.0 * r2 * i / g;
            if (x.norm() <= r2) pts.push_back(x);
        }
    } else if (n == 2) {
        const int gs = std::max(2, static_cast<int>(std::lround(std::sqrt(double(g)))) * 2);
        for (int i = 0; i <= gs; ++i)
            for (int j = 0; j <= gs; ++j) {
                VectorXd x(2);
                x[0] = -r2 + 2.0 * r2 * i / gs;
                x[1] = -r2 + 2.0 * r2 * j / gs;
                if (x.norm() <= r2 * (1 - 1e-12)) pts.push_back(x);
            }
    } else {
        for (int axis = 0; axis < n; ++axis)
            for (int i = 1; i <= g; ++i) {
                VectorXd x = VectorXd::Zero(n);
                x[axis] = r2 * i / g;
                pts.push_back(x);
                pts.push_back(-x);
            }
    }
    // radial rays through the diagonal
    VectorXd dir = VectorXd::Ones(n) / std::sqrt(double(n));
    for (int i = 1; i <= g; ++i) {
        pts.push_back(dir * (r2 * i / g) * (1 - 1e-12));
        pts.push_back(-dir * (r2 * i / g) * (1 - 1e-12));
    }
    return pts;
}

}  // namespace

ConditionReport validate_conditions(const GapProfile& p, int n_samples) {
    if (n_samples < 1) throw ConfigError("validate_conditions requires n_samples >= 1");
    ConditionReport rep;
    auto pts = sample_points(p, n_samples);
    rep.n_samples = static_cast<int>(pts.size());
    const int n = p.d - 1;

    ConditionCheck env_lo{"H1-lower", true, 1e300, VectorXd::Zero(n), "kappa1 |x'|^m <= h1-h"};
    ConditionCheck env_hi{"H1-upper", true, 1e300, VectorXd::Zero(n), "h1-h <= kappa2 |x'|^m"};
    ConditionCheck growth{"H2", true, 1e300, VectorXd::Zero(n),
                          "|grad^j h|,|grad^j h1| <= kappa3 |x'|^{m-j}"};
    ConditionCheck cnorm{"H3", true, 1e300, VectorXd::Zero(n), "sampled C^2 norm <= kappa4"};
    ConditionCheck even{"evenness", true, 1e300, VectorXd::Zero(n),
                        "h1-h even in each coordinate (tol 1e-12)"};
    ConditionCheck posgap{"positivity", true, 1e300, VectorXd::Zero(n), "delta > 0"};

    auto update = [](ConditionCheck& c, double margin, const VectorXd& x) {
        if (margin < c.worst_margin) {
            c.worst_margin = margin;
            c.worst_point = x;
        }
        if (margin < 0) c.pass = false;
    };

    for (const auto& x : pts) {
        const double r = x.norm();
        const double gap = p.h1->value(x) - p.h->value(x);
        const double rm = std::pow(r, p.m);
        if (r > 1e-14) {
            update(env_lo, gap - p.kappa1 * rm, x);
            update(env_hi, p.kappa2 * rm - gap, x);
        }
        const double g1 = std::max(p.h->gradient(x).norm(), p.h1->gradient(x).norm());
        const double g2 = std::max(p.h->hessian(x).norm(), p.h1->hessian(x).norm());
        if (r > 1e-14) {
            update(growth, p.kappa3 * std::pow(r, p.m - 1) - g1, x);
            update(growth, p.kappa3 * std::pow(r, double(p.m - 2)) - g2, x);
        }
        const double c2 = std::abs(p.h->value(x)) + g1 + g2 + std::abs(p.h1->value(x));
        update(cnorm, p.kappa4 - c2, x);
        update(posgap, p.eps + gap, x);
        // reflection test per axis
        for (int axis = 0; axis < n; ++axis) {
            VectorXd xr = x;
            xr[axis] = -xr[axis];
            const double gr = p.h1->value(xr) - p.h->value(xr);
            update(even, 1e-12 * (1.0 + std::abs(gap)) - std::abs(gap - gr), x);
        }
    }

    ConditionCheck q2{"Q2", true, 0, VectorXd::Zero(n), "h,h1 and their gradients vanish at 0'"};
    {
        const VectorXd o = VectorXd::Zero(n);
        const double v = std::abs(p.h->value(o)) + std::abs(p.h1->value(o)) +
                         p.h->gradient(o).norm() + p.h1->gradient(o).norm();
        q2.worst_margin = 1e-12 - v;
        q2.pass = v <= 1e-12;
    }

    rep.checks = {env_lo, env_hi, growth, cnorm, even, posgap, q2};

    if (p.m == 2) {
        ConditionCheck q3{"Q3", true, 0, VectorXd::Zero(n),
                          "Hessian of h1-h at 0' is SPD with eigenvalues >= tau0"};
        try {
            auto tau = principal_relative_curvatures(p);
            q3.worst_margin = tau.front() - p.tau0;
            q3.pass = tau.front() >= p.tau0;
        } catch (const GeometryError&) {
            q3.pass = false;
            q3.worst_margin = -1;
        }
        rep.checks.push_back(q3);
    }
    return rep;
}

ThinGapRegion::ThinGapRegion(GapProfile p, double t_) : profile(std::move(p)), t(t_) {
    if (!(t > 0 && t <= 2.0 * profile.R))
        throw ConfigError("thin gap radius must satisfy 0 < t <= 2R");
}

VectorXd ThinGapRegion::point_top(const VectorXd& xp) const {
    VectorXd x(profile.d);
    x.head(profile.d - 1) = xp;
    x[profile.d - 1] = profile.eps + profile.h1->value(xp);
    return x;
}

VectorXd ThinGapRegion::point_bottom(const VectorXd& xp) const {
    VectorXd x(profile.d);
    x.head(profile.d - 1) = xp;
    x[profile.d - 1] = profile.h->value(xp);
    return x;
}

VectorXd ThinGapRegion::normal_top(const VectorXd& xp) const {
    const VectorXd g = profile.h1->gradient(xp);
    VectorXd nu(profile.d);
    const double s = std::sqrt(1.0 + g.squaredNorm());
    nu.head(profile.d - 1) = -g / s;
    nu[profile.d - 1] = 1.0 / s;
    return nu;
}

VectorXd ThinGapRegion::normal_bottom(const VectorXd& xp) const {
    const VectorXd g = profile.h->gradient(xp);
    VectorXd nu(profile.d);
    const double s = std::sqrt(1.0 + g.squaredNorm());
    nu.head(profile.d - 1) = g / s;
    nu[profile.d - 1] = -1.0 / s;
    return nu;
}

bool ThinGapRegion::contains(const VectorXd& x, const VectorXd& zp) const {
    const VectorXd xp = x.head(profile.d - 1);
    if ((xp - zp).norm() >= t) return false;
    const double xd = x[profile.d - 1];
    return xd > profile.h->value(xp) && xd < profile.eps + profile.h1->value(xp);
}

bool ThinGapRegion::contains(const VectorXd& x) const {
    return contains(x, VectorXd::Zero(profile.d - 1));
}

VectorXd ThinGapRegion::midpoint(const VectorXd& xp) const {
    VectorXd x(profile.d);
    x.head(profile.d - 1) = xp;
    x[profile.d - 1] = profile.h->value(xp) + 0.5 * profile.delta(xp);
    return x;
}

}  // namespace lamegap
