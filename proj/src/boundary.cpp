#include "lamegap/boundary.hpp"

#include <cmath>

namespace lamegap {

RigidBasis::RigidBasis(int d_, int alpha_) : d(d_), alpha(alpha_) {
    if (d < 2) throw ConfigError("rigid basis: dimension must be >= 2");
    if (alpha < 1 || alpha > rigid_count(d))
        throw std::invalid_argument("rigid basis index out of range");
}

std::pair<int, int> RigidBasis::index_pair() const {
    if (alpha <= d) return {alpha, 0};
    if (alpha <= 2 * d - 1) return {alpha - d, d};  // psi = x_d e_{alpha-d} - x_{alpha-d} e_d
    // remaining rotations: pairs (i, j) with 1 <= i < j <= d-1, lexicographic
    int idx = alpha - 2 * d;
    for (int i = 1; i <= d - 1; ++i)
        for (int j = i + 1; j <= d - 1; ++j)
            if (idx-- == 0) return {i, j};
    throw std::invalid_argument("rigid basis index out of range");
}

VectorXd RigidBasis::value(const VectorXd& x) const {
    VectorXd v = VectorXd::Zero(d);
    if (alpha <= d) {
        v[alpha - 1] = 1.0;
        return v;
    }
    auto [i, j] = index_pair();  // psi = x_j e_i - x_i e_j
    v[i - 1] = x[j - 1];
    v[j - 1] = -x[i - 1];
    return v;
}

MatrixXd RigidBasis::gradient() const {
    MatrixXd g = MatrixXd::Zero(d, d);
    if (alpha <= d) return g;
    auto [i, j] = index_pair();
    g(i - 1, j - 1) = 1.0;
    g(j - 1, i - 1) = -1.0;
    return g;
}

std::string to_string(Family f) {
    switch (f) {
        case Family::E1: return "E1";
        case Family::E2: return "E2";
        case Family::E3: return "E3";
        default: return "custom";
    }
}

std::string to_string(ParityClass c) {
    switch (c) {
        case ParityClass::A1: return "A1";
        case ParityClass::A2: return "A2";
        case ParityClass::A3: return "A3";
        default: return "none";
    }
}

double radial_cutoff(double r, double R) {
    const double a = R / 2, b = R;
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double t = (b - r) / (b - a);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

namespace {

// signed odd power x |x|^{k-1} and its derivatives
double oddpow(double x, int k) { return x * std::pow(std::abs(x), k - 1); }
double oddpow_d(double x, int k) { return k * std::pow(std::abs(x), k - 1); }
double oddpow_dd(double x, int k) {
    if (k == 1) return 0.0;
    return k * (k - 1) * oddpow(x, k - 2);
}

}  // namespace

BoundaryData make_family(Family tag, double eta, int k, int d) {
    if (eta < 0) throw ConfigError("family amplitude must be nonnegative");
    if (tag == Family::E1 && k < 2)
        throw ConfigError("family E1 requires growth order k >= 2");
    if ((tag == Family::E2 || tag == Family::E3) && (k < 1 || k == 2))
        throw ConfigError("families E2/E3 require k >= 1, k != 2");
    if (tag == Family::Custom) throw ConfigError("use make_custom_boundary for custom data");

    BoundaryData phi;
    phi.d = d;
    phi.eta = eta;
    phi.k = k;
    phi.family = tag;
    const int np = d - 1;

    switch (tag) {
        case Family::E1:
            phi.trace = [=](const VectorXd& xp) {
                return VectorXd::Constant(d, -eta * std::pow(xp.norm(), k)).eval();
            };
            phi.trace_jac = [=](const VectorXd& xp) {
                MatrixXd J = MatrixXd::Zero(d, np);
                const double r = xp.norm();
                if (r == 0.0) return J;
                const VectorXd g = -eta * k * std::pow(r, k - 2) * xp;
                for (int i = 0; i < d; ++i) J.row(i) = g.transpose();
                return J;
            };
            phi.trace_hess = [=](const VectorXd& xp, int) {
                const double r = xp.norm();
                MatrixXd H = MatrixXd::Zero(np, np);
                if (r == 0.0) {
                    if (k == 2) H = -2.0 * eta * MatrixXd::Identity(np, np);
                    return H;
                }
                H = -eta * k * std::pow(r, k - 2) * MatrixXd::Identity(np, np);
                if (k != 2)
                    H -= eta * k * (k - 2) * std::pow(r, k - 4) * (xp * xp.transpose());
                return H;
            };
            break;
        case Family::E2:
            phi.trace = [=](const VectorXd& xp) {
                VectorXd v = VectorXd::Zero(d);
                v[d - 1] = eta * oddpow(xp[0], k);
                return v;
            };
            phi.trace_jac = [=](const VectorXd& xp) {
                MatrixXd J = MatrixXd::Zero(d, np);
                J(d - 1, 0) = eta * oddpow_d(xp[0], k);
                return J;
            };
            phi.trace_hess = [=](const VectorXd& xp, int i) {
                MatrixXd H = MatrixXd::Zero(np, np);
                if (i == d - 1) H(0, 0) = eta * oddpow_dd(xp[0], k);
                return H;
            };
            break;
        case Family::E3:
            phi.trace = [=](const VectorXd& xp) {
                VectorXd v = VectorXd::Zero(d);
                for (int i = 0; i < np; ++i) v[i] = eta * oddpow(xp[i], k);
                return v;
            };
            phi.trace_jac = [=](const VectorXd& xp) {
                MatrixXd J = MatrixXd::Zero(d, np);
                for (int i = 0; i < np; ++i) J(i, i) = eta * oddpow_d(xp[i], k);
                return J;
            };
            phi.trace_hess = [=](const VectorXd& xp, int i) {
                MatrixXd H = MatrixXd::Zero(np, np);
                if (i < np) H(i, i) = eta * oddpow_dd(xp[i], k);
                return H;
            };
            break;
        default: break;
    }
    return phi;
}

BoundaryData make_custom_boundary(int d, std::vector<SurfacePtr> components) {
    if (static_cast<int>(components.size()) != d)
        throw ConfigError("custom boundary needs one component table per dimension");
    BoundaryData phi;
    phi.d = d;
    phi.eta = 1.0;
    phi.k = 1;
    phi.family = Family::Custom;
    phi.trace = [components, d](const VectorXd& xp) {
        VectorXd v(d);
        for (int i = 0; i < d; ++i) v[i] = components[i]->value(xp);
        return v;
    };
    phi.trace_jac = [components, d](const VectorXd& xp) {
        MatrixXd J(d, xp.size());
        for (int i = 0; i < d; ++i) J.row(i) = components[i]->gradient(xp).transpose();
        return J;
    };
    phi.trace_hess = [components](const VectorXd& xp, int i) {
        return components[static_cast<std::size_t>(i)]->hessian(xp);
    };
    return phi;
}

BoundaryData make_zero_boundary(int d) {
    BoundaryData phi;
    phi.d = d;
    phi.eta = 0.0;
    phi.k = 1;
    phi.family = Family::Custom;
    const int np = d - 1;
    phi.trace = [d](const VectorXd&) { return VectorXd::Zero(d).eval(); };
    phi.trace_jac = [d, np](const VectorXd&) { return MatrixXd::Zero(d, np).eval(); };
    phi.trace_hess = [np](const VectorXd&, int) { return MatrixXd::Zero(np, np).eval(); };
    return phi;
}

double BoundaryData::c2_norm(double R) const {
    // fixed 201-point set: axis grids plus a diagonal ray
    const int np = d - 1;
    std::vector<VectorXd> pts;
    const int n_axis = std::max(3, 201 / (np + 1));
    for (int axis = 0; axis < np; ++axis)
        for (int i = 0; i <= n_axis; ++i) {
            VectorXd x = VectorXd::Zero(np);
            x[axis] = -R + 2.0 * R * i / n_axis;
            pts.push_back(x);
        }
    VectorXd dir = VectorXd::Ones(np) / std::sqrt(double(np));
    for (int i = 0; i <= n_axis; ++i) pts.push_back(dir * (-R + 2.0 * R * i / n_axis));

    double nrm = 0;
    for (const auto& x : pts) {
        nrm = std::max(nrm, trace(x).lpNorm<Eigen::Infinity>());
        nrm = std::max(nrm, trace_jac(x).lpNorm<Eigen::Infinity>());
        for (int i = 0; i < d; ++i) nrm = std::max(nrm, trace_hess(x, i).lpNorm<Eigen::Infinity>());
    }
    return nrm;
}

double BoundaryData::growth_margin(const GapProfile& profile) const {
    const int np = d - 1;
    double worst = -1e300;
    const int n_axis = 64;
    std::vector<VectorXd> pts;
    for (int axis = 0; axis < np; ++axis)
        for (int i = 1; i <= n_axis; ++i) {
            VectorXd x = VectorXd::Zero(np);
            x[axis] = profile.R * i / n_axis;
            pts.push_back(x);
            pts.push_back(-x);
        }
    VectorXd dir = VectorXd::Ones(np) / std::sqrt(double(np));
    for (int i = 1; i <= n_axis; ++i) pts.push_back(dir * (profile.R * i / n_axis));
    for (const auto& xp : pts) {
        const double height = profile.h->value(xp);
        const double xnorm = std::sqrt(xp.squaredNorm() + height * height);
        worst = std::max(worst,
                         trace(xp).lpNorm<Eigen::Infinity>() - eta * std::pow(xnorm, k));
    }
    return worst;
}

namespace {

struct ParityTable {
    // even[i][j] / odd[i][j]: component i behaves evenly/oddly under
    // reflection of axis j within tolerance; zero[i]: component vanishes
    std::vector<std::vector<bool>> even, odd;
    std::vector<bool> zero;
};

ParityTable parity_table(const BoundaryData& phi, double R) {
    const int d = phi.d;
    const int np = d - 1;
    ParityTable t;
    t.even.assign(d, std::vector<bool>(np, true));
    t.odd.assign(d, std::vector<bool>(np, true));
    t.zero.assign(d, true);

    const int n_pairs = 64;
    const double tol = 1e-12;
    for (int axis = 0; axis < np; ++axis) {
        for (int s = 0; s < n_pairs; ++s) {
            // deterministic low-discrepancy-ish fill of the ball of radius R
            VectorXd x(np);
            for (int c = 0; c < np; ++c) {
                const double u = std::fmod(0.5 + (s + 1) * (c + 1) * 0.6180339887498949, 1.0);
                x[c] = (2.0 * u - 1.0) * R / std::sqrt(double(np));
            }
            x[axis] = std::abs(x[axis]) + 1e-3 * R;
            VectorXd xr = x;
            xr[axis] = -xr[axis];
            const VectorXd v = phi.trace(x), vr = phi.trace(xr);
            const double scale = 1.0 + v.lpNorm<Eigen::Infinity>();
            for (int i = 0; i < d; ++i) {
                if (std::abs(v[i] - vr[i]) > tol * scale) t.even[i][axis] = false;
                if (std::abs(v[i] + vr[i]) > tol * scale) t.odd[i][axis] = false;
                if (std::abs(v[i]) > tol * scale) t.zero[i] = false;
            }
        }
    }
    return t;
}

}  // namespace

ParityClass classify_parity(const BoundaryData& phi, double R) {
    const int d = phi.d;
    const int np = d - 1;
    const ParityTable t = parity_table(phi, R);

    // A1: every component even in every cross-section axis
    {
        bool ok = true;
        for (int i = 0; i < d && ok; ++i)
            for (int j = 0; j < np && ok; ++j)
                if (!t.even[i][j]) ok = false;
        if (ok) return ParityClass::A1;
    }
    // A3 before A2: A3 pins components that must vanish, so it is the
    // narrower class when both reflection patterns match.
    {
        bool ok = true;
        if (d == 2) {
            ok = t.odd[0][0] && t.zero[1];
        } else {
            for (int i = 0; i < np && ok; ++i) ok = t.odd[i][i];
            if (ok) ok = t.odd[d - 1][0] && t.odd[d - 1][1];
            // a nonzero component even in the pinned axis defeats oddness
        }
        if (ok) return ParityClass::A3;
    }
    {
        bool ok = true;
        if (d == 2) {
            ok = t.odd[0][0] && t.odd[1][0];
        } else {
            for (int i = 0; i < np && ok; ++i) {
                bool some = false;
                for (int j = 0; j < np; ++j) some = some || t.odd[i][j];
                ok = some;
            }
            if (ok) ok = t.odd[d - 1][0];
            for (int j = 1; j < np && ok; ++j) ok = t.even[d - 1][j];
        }
        if (ok) return ParityClass::A2;
    }
    return ParityClass::None;
}

}  // namespace lamegap
