#include "lamegap/aux_fields.hpp"

#include <cmath>

namespace lamegap {

VBarEval vbar(const GapProfile& profile, const VectorXd& x) {
    const int d = profile.d;
    if (static_cast<int>(x.size()) != d)
        throw GeometryError("vbar: point has wrong dimension");
    const VectorXd xp = x.head(d - 1);
    profile.check_in_domain(xp);
    const double hb = profile.h->value(xp);
    const double ht = profile.eps + profile.h1->value(xp);
    const double xd = x[d - 1];
    const double slack = 1e-9 * (ht - hb);
    if (xd < hb - slack || xd > ht + slack)
        throw GeometryError("vbar: point outside the gap slab");

    const double del = ht - hb;
    const VectorXd gh = profile.h->gradient(xp);
    const MatrixXd Hh = profile.h->hessian(xp);
    const VectorXd gd = profile.grad_delta(xp);
    const MatrixXd Hd = profile.hess_delta(xp);

    VBarEval out;
    out.value = (xd - hb) / del;
    out.grad = VectorXd::Zero(d);
    out.grad[d - 1] = 1.0 / del;
    for (int i = 0; i < d - 1; ++i)
        out.grad[i] = -gh[i] / del - out.value * gd[i] / del;

    out.hess = MatrixXd::Zero(d, d);
    for (int i = 0; i < d - 1; ++i) {
        out.hess(i, d - 1) = -gd[i] / (del * del);
        out.hess(d - 1, i) = out.hess(i, d - 1);
        for (int j = 0; j < d - 1; ++j) {
            out.hess(i, j) = -Hh(i, j) / del + gh[i] * gd[j] / (del * del) -
                             out.grad[j] * gd[i] / del - out.value * Hd(i, j) / del +
                             out.value * gd[i] * gd[j] / (del * del);
        }
    }
    return out;
}

SurfaceField SurfaceField::zero(int d) {
    SurfaceField f;
    f.d = d;
    f.value = [d](const VectorXd&) { return VectorXd::Zero(d).eval(); };
    f.jac = [d](const VectorXd&) { return MatrixXd::Zero(d, d - 1).eval(); };
    return f;
}

SurfaceField SurfaceField::rigid_on_top(const RigidBasis& psi, const GapProfile& profile) {
    SurfaceField f;
    const int d = profile.d;
    f.d = d;
    const MatrixXd G = psi.gradient();  // constant d x d
    auto h1 = profile.h1;
    const double eps = profile.eps;
    f.value = [psi, h1, eps, d](const VectorXd& xp) {
        VectorXd x(d);
        x.head(d - 1) = xp;
        x[d - 1] = eps + h1->value(xp);
        return psi.value(x);
    };
    f.jac = [G, h1, d](const VectorXd& xp) {
        const VectorXd gh1 = h1->gradient(xp);
        MatrixXd J(d, d - 1);
        for (int j = 0; j < d - 1; ++j) J.col(j) = G.col(j) + G.col(d - 1) * gh1[j];
        return J;
    };
    return f;
}

SurfaceField SurfaceField::from_boundary(const BoundaryData& phi) {
    SurfaceField f;
    f.d = phi.d;
    f.value = phi.trace;
    f.jac = phi.trace_jac;
    return f;
}

double SurfaceField::c2_norm(double R) const {
    const int np = d - 1;
    double nrm = 0;
    const int g = 24;
    const double step = std::max(1e-6, 1e-4 * R);
    std::vector<VectorXd> pts;
    for (int axis = 0; axis < np; ++axis)
        for (int i = 0; i <= g; ++i) {
            VectorXd x = VectorXd::Zero(np);
            x[axis] = -R + 2.0 * R * i / g;
            pts.push_back(x);
        }
    if (np > 1) {
        VectorXd dir = VectorXd::Ones(np) / std::sqrt(double(np));
        for (int i = 0; i <= g; ++i) pts.push_back(dir * (-R + 2.0 * R * i / g));
    }
    for (const auto& x : pts) {
        nrm = std::max(nrm, value(x).lpNorm<Eigen::Infinity>());
        const MatrixXd J = jac(x);
        nrm = std::max(nrm, J.lpNorm<Eigen::Infinity>());
        for (int q = 0; q < np; ++q) {
            if (std::abs(x[q]) + step > R) continue;
            VectorXd e = VectorXd::Zero(np);
            e[q] = step;
            const MatrixXd D2 = (jac(x + e) - jac(x - e)) / (2 * step);
            nrm = std::max(nrm, D2.lpNorm<Eigen::Infinity>());
        }
    }
    return nrm;
}

LeadingTerm::LeadingTerm(GapProfile profile, LameConstants lame, SurfaceField psi,
                         SurfaceField phi)
    : profile_(std::move(profile)), lame_(lame), psi_(std::move(psi)), phi_(std::move(phi)) {
    lame_.validate(profile_.d);
    psi_c2_ = psi_.c2_norm(profile_.R);
    phi_c2_ = phi_.c2_norm(profile_.R);
}

FieldEval LeadingTerm::eval(const VectorXd& x) const {
    const int d = profile_.d;
    const VectorXd xp = x.head(d - 1);
    const VBarEval vb = vbar(profile_, x);
    const double v = vb.value;
    const double f = bridge(v);
    const double fp = bridge_deriv(v);

    const VectorXd Psi = psi_.value(xp);
    const VectorXd Phi = phi_.value(xp);
    const MatrixXd JPsi = psi_.jac(xp);
    const MatrixXd JPhi = phi_.jac(xp);
    const VectorXd D = Psi - Phi;
    const MatrixXd JD = JPsi - JPhi;

    const VectorXd gd = profile_.grad_delta(xp);
    const MatrixXd Hd = profile_.hess_delta(xp);

    const double c_mu = (lame_.lambda + lame_.mu) / lame_.mu;
    const double c_lam = (lame_.lambda + lame_.mu) / lame_.lambda_plus_2mu();

    // S = sum_i d_i(delta) (psi^i - phi^i) over cross-section components
    double S = 0;
    for (int i = 0; i < d - 1; ++i) S += gd[i] * D[i];

    FieldEval out;
    out.value = Psi * v + Phi * (1.0 - v);
    for (int i = 0; i < d - 1; ++i) out.value[i] += c_mu * f * D[d - 1] * gd[i];
    out.value[d - 1] += c_lam * f * S;

    out.gradient = MatrixXd::Zero(d, d);
    // vertical derivative
    for (int p = 0; p < d; ++p) {
        double g = D[p] * vb.grad[d - 1];
        if (p < d - 1) g += c_mu * fp * vb.grad[d - 1] * D[d - 1] * gd[p];
        else g += c_lam * fp * vb.grad[d - 1] * S;
        out.gradient(p, d - 1) = g;
    }
    // cross-section derivatives
    for (int q = 0; q < d - 1; ++q) {
        double dS = 0;
        for (int i = 0; i < d - 1; ++i) dS += Hd(i, q) * D[i] + gd[i] * JD(i, q);
        for (int p = 0; p < d; ++p) {
            double g = JPsi(p, q) * v + Psi[p] * vb.grad[q] + JPhi(p, q) * (1.0 - v) -
                       Phi[p] * vb.grad[q];
            if (p < d - 1) {
                g += c_mu * (fp * vb.grad[q] * D[d - 1] + f * JD(d - 1, q)) * gd[p];
                g += c_mu * f * D[d - 1] * Hd(p, q);
            } else {
                g += c_lam * (fp * vb.grad[q] * S + f * dS);
            }
            out.gradient(p, q) = g;
        }
    }
    return out;
}

double LeadingTerm::remainder_envelope(const VectorXd& xp) const {
    const double del = profile_.delta(xp);
    const VectorXd D = psi_.value(xp) - phi_.value(xp);
    const MatrixXd JD = psi_.jac(xp) - phi_.jac(xp);
    const double m = profile_.m;
    return D.norm() * std::pow(del, (m - 2.0) / m) + del * (psi_c2_ + phi_c2_) + JD.norm();
}

LeadingTerm u_bar(int alpha, const GapProfile& profile, const LameConstants& lame,
                  const BoundaryData* phi) {
    const int N = rigid_count(profile.d);
    if (alpha < 0 || alpha > N) throw std::invalid_argument("mode index out of range");
    if (alpha == 0) {
        if (!phi) throw ConfigError("mode 0 requires a boundary datum");
        return LeadingTerm(profile, lame, SurfaceField::zero(profile.d),
                           SurfaceField::from_boundary(*phi));
    }
    return LeadingTerm(profile, lame,
                       SurfaceField::rigid_on_top(RigidBasis(profile.d, alpha), profile),
                       SurfaceField::zero(profile.d));
}

AuxFieldFn AuxFieldFn::from_leading(const LeadingTerm& lt) {
    AuxFieldFn f;
    f.value = [lt](const VectorXd& x) { return lt.value(x); };
    f.gradient = [lt](const VectorXd& x) { return lt.gradient(x); };
    return f;
}

AuxFieldFn AuxFieldFn::rigid(const RigidBasis& psi) {
    AuxFieldFn f;
    f.value = [psi](const VectorXd& x) { return psi.value(x); };
    f.gradient = [psi](const VectorXd&) { return psi.gradient(); };
    return f;
}

AuxFieldFn AuxFieldFn::linear(const MatrixXd& A) {
    AuxFieldFn f;
    f.value = [A](const VectorXd& x) { return (A * x).eval(); };
    f.gradient = [A](const VectorXd&) { return A; };
    return f;
}

VectorXd lame_residual(const GapProfile& profile, const AuxFieldFn& field,
                       const LameConstants& lame, const VectorXd& x, double step) {
    const int d = profile.d;
    const VectorXd xp = x.head(d - 1);
    double del = 0;
    bool in_gap = true;
    try {
        del = profile.delta(xp);
    } catch (const GeometryError&) {
        in_gap = false;
    }
    if (step <= 0) step = in_gap ? del / 20.0 : 1e-5;
    if (in_gap && step > del / 10.0)
        throw NumericalError("finite-difference step too large relative to the gap");

    // (L u)_i = mu sum_j d_j G(i,j) + (lambda+mu) d_i tr G
    VectorXd res = VectorXd::Zero(d);
    std::vector<MatrixXd> dG(d);
    for (int q = 0; q < d; ++q) {
        VectorXd e = VectorXd::Zero(d);
        e[q] = step;
        dG[q] = (field.gradient(x + e) - field.gradient(x - e)) / (2 * step);
    }
    for (int i = 0; i < d; ++i) {
        double lap = 0;
        for (int j = 0; j < d; ++j) lap += dG[j](i, j);
        double graddiv = dG[i].trace();
        res[i] = lame.mu * lap + (lame.lambda + lame.mu) * graddiv;
    }
    return res;
}

}  // namespace lamegap
