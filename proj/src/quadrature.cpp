#include "lamegap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace lamegap {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Kahan {
    double sum = 0, c = 0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> x(n), w(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

// Adaptive 1-D panel integrator: nested 20/40-point Gauss with bisection.
class PanelIntegrator {
  public:
    PanelIntegrator(std::function<double(double)> f, long budget)
        : f_(std::move(f)), budget_(budget) {}

    double integrate(double a, double b, double tol_panel, int depth) {
        const double i_lo = gauss(a, b, 20);
        const double i_hi = gauss(a, b, 40);
        const double err = std::abs(i_hi - i_lo);
        if (err <= tol_panel || depth >= 48) {
            err_total += err;
            max_depth = std::max(max_depth, depth);
            return i_hi;
        }
        if (evals > budget_)
            throw NumericalError("quadrature tolerance unreachable within eval budget");
        const double m = 0.5 * (a + b);
        return integrate(a, m, 0.5 * tol_panel, depth + 1) +
               integrate(m, b, 0.5 * tol_panel, depth + 1);
    }

    double err_total = 0;
    long evals = 0;
    int max_depth = 0;

  private:
    double gauss(double a, double b, int n) {
        const auto& [xs, ws] = gauss_legendre(n);
        const double h = 0.5 * (b - a), m = 0.5 * (a + b);
        Kahan acc;
        for (int i = 0; i < n; ++i) acc.add(ws[i] * f_(m + h * xs[i]));
        evals += n;
        return h * acc.sum;
    }

    std::function<double(double)> f_;
    long budget_;
};

std::vector<double> dyadic_breaks(double R, double core) {
    std::vector<double> b{R};
    double r = R;
    int guard = 0;
    while (r / 2 > core && guard++ < 60) {
        r /= 2;
        b.push_back(r);
    }
    b.push_back(0.0);
    return b;  // descending, ends at 0
}

double sphere_area(int np) {
    return 2.0 * std::pow(kPi, 0.5 * np) / std::tgamma(0.5 * np);
}

struct EvalCounter {
    long n = 0;
};

// Angular average over the mirrored circle node set (np = 2 cross section).
double circle_average(const std::function<double(const VectorXd&)>& f, double s, int n_theta,
                      EvalCounter& ctr) {
    Kahan acc;
    const int quarter = n_theta / 4;
    for (int j = 0; j < quarter; ++j) {
        const double th = (j + 0.5) * 2.0 * kPi / n_theta;
        const double c = s * std::cos(th), sn = s * std::sin(th);
        VectorXd xp(2);
        xp << c, sn;
        acc.add(f(xp));
        xp << -c, sn;
        acc.add(f(xp));
        xp << c, -sn;
        acc.add(f(xp));
        xp << -c, -sn;
        acc.add(f(xp));
    }
    ctr.n += 4 * quarter;
    return acc.sum * (2.0 * kPi / n_theta);
}

// Integral over the sphere |x'| = s (np = 3): polar Gauss x azimuthal
// midpoint rule, all eight sign mirrors explicit.
double sphere_average(const std::function<double(const VectorXd&)>& f, double s, int n_u,
                      int n_az, EvalCounter& ctr) {
    const auto& [us, ws] = gauss_legendre(n_u);
    Kahan acc;
    const int quarter = n_az / 4;
    for (int iu = 0; iu < (n_u + 1) / 2; ++iu) {
        const double u = std::abs(us[iu]);
        const double rho = std::sqrt(std::max(0.0, 1.0 - u * u));
        const bool self_mirror = us[iu] == 0.0;
        Kahan ring;
        for (int j = 0; j < quarter; ++j) {
            const double th = (j + 0.5) * 2.0 * kPi / n_az;
            const double c = s * rho * std::cos(th), sn = s * rho * std::sin(th);
            const double z = s * u;
            VectorXd xp(3);
            for (int sz = 0; sz < (self_mirror ? 1 : 2); ++sz) {
                const double zz = sz == 0 ? z : -z;
                xp << c, sn, zz;
                ring.add(f(xp));
                xp << -c, sn, zz;
                ring.add(f(xp));
                xp << c, -sn, zz;
                ring.add(f(xp));
                xp << -c, -sn, zz;
                ring.add(f(xp));
            }
        }
        ctr.n += 4 * quarter * (self_mirror ? 1 : 2);
        acc.add(ws[iu] * ring.sum * (2.0 * kPi / n_az));
    }
    return acc.sum;
}

}  // namespace

QuadResult gap_integral(const GapProfile& profile,
                        const std::function<double(const VectorXd&)>& weight, double Rint,
                        const QuadOptions& opts, bool weight_radial) {
    if (Rint <= 0 || Rint > profile.R * (1 + 1e-12))
        throw ConfigError("integration radius must satisfy 0 < R <= profile.R");
    const int np = profile.d - 1;
    auto integrand = [&](const VectorXd& xp) { return weight(xp) / profile.delta(xp); };

    QuadResult out;
    const double core = std::min(Rint / 2, std::pow(profile.eps, 1.0 / profile.m));
    const auto breaks = dyadic_breaks(Rint, core);
    out.ring_depth = static_cast<int>(breaks.size()) - 2;

    if (weight_radial && profile.is_radial()) {
        auto fr = [&](double s) {
            VectorXd xp = VectorXd::Zero(np);
            xp[0] = s;
            return std::pow(s, np - 1) * integrand(xp);
        };
        PanelIntegrator pi(fr, opts.max_evals);
        // rough value to convert the relative tolerance into an absolute one
        double rough = 0;
        for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
            rough += pi.integrate(breaks[j + 1], breaks[j], 1e300, 0);
        const double tol =
            std::max(opts.tol_abs, opts.tol_rel * std::abs(rough) * sphere_area(np));
        pi.err_total = 0;
        Kahan acc;
        const double tol_panel = tol / sphere_area(np) / double(breaks.size());
        for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
            acc.add(pi.integrate(breaks[j + 1], breaks[j], tol_panel, 0));
        out.value = sphere_area(np) * acc.sum;
        out.abs_error_estimate = sphere_area(np) * pi.err_total;
        out.n_evals = pi.evals;
        out.ring_depth = std::max(out.ring_depth, pi.max_depth);
        return out;
    }

    if (np == 1) {
        auto fpair = [&](double s) {
            VectorXd xp(1);
            xp[0] = s;
            const double a = integrand(xp);
            xp[0] = -s;
            return a + integrand(xp);
        };
        PanelIntegrator pi(fpair, opts.max_evals);
        double rough = 0;
        for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
            rough += pi.integrate(breaks[j + 1], breaks[j], 1e300, 0);
        const double tol = std::max(opts.tol_abs, opts.tol_rel * std::abs(rough));
        pi.err_total = 0;
        Kahan acc;
        const double tol_panel = tol / double(breaks.size());
        for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
            acc.add(pi.integrate(breaks[j + 1], breaks[j], tol_panel, 0));
        out.value = acc.sum;
        out.abs_error_estimate = pi.err_total;
        out.n_evals = 2 * pi.evals;
        out.ring_depth = std::max(out.ring_depth, pi.max_depth);
        return out;
    }

    if (np != 2 && np != 3)
        throw ConfigError("general cross-section quadrature supports d-1 <= 3 only");

    EvalCounter ctr;
    double theta_err = 0;
    const int n_rings = static_cast<int>(breaks.size()) - 1;

    // choose the angular resolution per ring by doubling until stable at a
    // representative radius, then integrate radially with the frozen rule
    std::vector<int> ring_az(n_rings), ring_u(n_rings);
    for (int j = 0; j < n_rings; ++j) {
        const double a = breaks[j + 1], b = breaks[j];
        const double s_rep = std::max(0.5 * (a + b), 1e-3 * b);
        int n_az = 16, n_u = 8;
        double prev = np == 2 ? circle_average(integrand, s_rep, n_az, ctr)
                              : sphere_average(integrand, s_rep, n_u, n_az, ctr);
        double last_diff = 0;
        for (int it = 0; it < 7; ++it) {
            const int az2 = 2 * n_az, u2 = 2 * n_u;
            const double cur = np == 2 ? circle_average(integrand, s_rep, az2, ctr)
                                       : sphere_average(integrand, s_rep, u2, az2, ctr);
            last_diff = std::abs(cur - prev);
            n_az = az2;
            if (np == 3) n_u = u2;
            prev = cur;
            if (last_diff <= 0.02 * opts.tol_rel * (1.0 + std::abs(cur))) break;
            if (ctr.n > opts.max_evals)
                throw NumericalError("quadrature tolerance unreachable within eval budget");
        }
        ring_az[j] = n_az;
        ring_u[j] = n_u;
        theta_err += last_diff * std::pow(b, np - 1) * (b - a);
    }

    auto ring_fn = [&](int j) {
        return [&, j](double s) {
            const double g = np == 2 ? circle_average(integrand, s, ring_az[j], ctr)
                                     : sphere_average(integrand, s, ring_u[j], ring_az[j], ctr);
            return std::pow(s, np - 1) * g;
        };
    };

    // rough pass to anchor the relative tolerance
    double rough = 0;
    for (int j = 0; j < n_rings; ++j) {
        PanelIntegrator pi(ring_fn(j), opts.max_evals);
        rough += pi.integrate(breaks[j + 1], breaks[j], 1e300, 0);
    }
    const double tol = std::max(opts.tol_abs, opts.tol_rel * std::abs(rough));

    Kahan acc;
    double err_radial = 0;
    int adaptive_depth = 0;
    for (int j = 0; j < n_rings; ++j) {
        PanelIntegrator pi(ring_fn(j), opts.max_evals);
        acc.add(pi.integrate(breaks[j + 1], breaks[j], tol / n_rings, 0));
        err_radial += pi.err_total;
        adaptive_depth = std::max(adaptive_depth, pi.max_depth);
        if (ctr.n > opts.max_evals)
            throw NumericalError("quadrature tolerance unreachable within eval budget");
    }
    out.value = acc.sum;
    out.abs_error_estimate = err_radial + theta_err;
    out.n_evals = ctr.n;
    out.ring_depth += adaptive_depth;
    return out;
}

QuadResult moment_integral(const GapProfile& profile, int k, double Rint,
                           const QuadOptions& opts) {
    if (k < 0) throw ConfigError("moment order must be nonnegative");
    auto w = [k](const VectorXd& xp) { return k == 0 ? 1.0 : std::pow(xp.norm(), k); };
    return gap_integral(profile, w, Rint, opts, /*weight_radial=*/true);
}

double closed_form_convex_2d(double tau1, double R, double eps) {
    if (!(tau1 > 0 && R > 0 && eps > 0))
        throw ConfigError("closed form requires positive curvature, radius and gap");
    return std::sqrt(2.0) * kPi / std::sqrt(tau1) / std::sqrt(eps) - 4.0 / (tau1 * R);
}

double closed_form_convex_3d(double tau1, double tau2, double R, double eps) {
    if (!(tau1 > 0 && tau2 > 0 && R > 0 && eps > 0))
        throw ConfigError("closed form requires positive curvatures, radius and gap");
    const auto& [xs, ws] = gauss_legendre(64);
    Kahan acc;
    for (int i = 0; i < 64; ++i) {
        const double th = 0.25 * kPi * (xs[i] + 1.0);
        const double c = std::cos(th), s = std::sin(th);
        const double rth = R / std::sqrt(2.0) / std::sqrt(c * c / tau1 + s * s / tau2);
        acc.add(ws[i] * std::log(rth));
    }
    const double theta_integral = 0.25 * kPi * acc.sum;
    const double st = std::sqrt(tau1 * tau2);
    return 2.0 * kPi / st * std::abs(std::log(eps)) + 8.0 / st * theta_integral;
}

QuadResult energy_leading(int alpha, const GapProfile& profile, const LameConstants& lame,
                          double Rint, const QuadOptions& opts) {
    const int N = rigid_count(profile.d);
    if (alpha < 1 || alpha > N) throw std::invalid_argument("mode index out of range");
    const double L = lame_rate_constant(profile.d, alpha, lame);
    QuadResult r;
    if (alpha <= profile.d) {
        r = moment_integral(profile, 0, Rint, opts);
        r.value *= L;
        r.abs_error_estimate *= L;
    } else {
        r = moment_integral(profile, 2, Rint, opts);
        const double c = L / (profile.d - 1);
        r.value *= c;
        r.abs_error_estimate *= c;
    }
    return r;
}

QuadResult q_leading(int alpha, const BoundaryData& phi, const GapProfile& profile,
                     const LameConstants& lame, double Rint, const QuadOptions& opts) {
    const int d = profile.d;
    if (alpha < 1 || alpha > d + 1)
        throw std::invalid_argument("leading functional implemented for alpha in 1..d+1");
    double coef;
    int comp;
    bool with_x1 = false;
    if (alpha <= d - 1) {
        coef = -lame.mu;
        comp = alpha - 1;
    } else if (alpha == d) {
        coef = -lame.lambda_plus_2mu();
        comp = d - 1;
    } else {
        coef = lame.lambda_plus_2mu();
        comp = d - 1;
        with_x1 = true;
    }
    auto h1 = profile.h1;
    auto w = [=](const VectorXd& xp) {
        const VectorXd g = h1->gradient(xp);
        const double s = std::sqrt(1.0 + g.squaredNorm());
        const double measure = (1.0 / s) * s;  // nu_d times the surface element
        double v = coef * phi.trace(xp)[comp] * measure;
        if (with_x1) v *= xp[0];
        return v;
    };
    return gap_integral(profile, w, Rint, opts, /*weight_radial=*/false);
}

ParityCheckResult parity_vanish_check(const std::function<double(const VectorXd&)>& weight,
                                      const GapProfile& profile, int axis, double Rint,
                                      const QuadOptions& opts) {
    if (axis < 0 || axis >= profile.d - 1)
        throw std::invalid_argument("parity axis out of range");
    const QuadResult r = gap_integral(profile, weight, Rint, opts, /*weight_radial=*/false);
    ParityCheckResult out;
    out.tolerance = std::max(opts.tol_abs, r.abs_error_estimate);
    out.residual = std::abs(r.value);
    out.pass = out.residual <= out.tolerance;
    return out;
}

}  // namespace lamegap
