#include "lamegap/fem.hpp"

#include <cmath>
#include <fstream>

namespace lamegap {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Ray length from the inclusion center to the matrix circle at polar angle
// phi (measured from the downward vertical).
double outer_ray(double phi, double r1, double r0, double eps) {
    const double wy = r1 + eps - r0;  // center offset c1 - c0, vertical
    const double udotw = -std::cos(phi) * wy;
    return -udotw + std::sqrt(udotw * udotw + r0 * r0 - wy * wy);
}

}  // namespace

double Mesh::min_angle_deg() const {
    double worst = 180.0;
    for (const auto& t : tris) {
        const Eigen::Vector2d a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
        const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
        auto ang = [](double opp, double s1, double s2) {
            return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0));
        };
        worst = std::min({worst, ang(la, lb, lc) * 180.0 / kPi, ang(lb, la, lc) * 180.0 / kPi,
                          ang(lc, la, lb) * 180.0 / kPi});
    }
    return worst;
}

double Mesh::min_signed_area() const {
    double worst = 1e300;
    for (const auto& t : tris) {
        const Eigen::Vector2d a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
        worst = std::min(worst, 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x()));
    }
    return worst;
}

int Mesh::layers_across_gap() const {
    // nodes on the touching segment: x = 0 below the inclusion center
    int count = 0;
    double y_min = 1e300;
    for (int i = 0; i < n_nodes(); ++i) y_min = std::min(y_min, nodes[i].y());
    for (int i = 0; i < n_nodes(); ++i)
        if (std::abs(nodes[i].x()) < 1e-14 && nodes[i].y() < y_min + 0.25) ++count;
    return count > 0 ? count - 1 : 0;
}

std::pair<ReferenceDomain, Mesh> build_reference_domain(double eps, double r1, double r0,
                                                        const MeshParams& params) {
    if (!(eps > 0 && eps < (r0 - r1) / 2))
        throw ConfigError("reference domain requires 0 < eps < (r0-r1)/2");
    if (params.n_layers < 4) throw ConfigError("need at least 4 layers across the gap");
    ReferenceDomain dom;
    dom.r1 = r1;
    dom.r0 = r0;
    dom.eps = eps;
    dom.r_gap = params.r_gap;

    // Angular ladder on [0, pi]: in-plane width proportional to the local
    // layer thickness so the worst triangle angle stays above the floor.
    // (A width ~ sqrt(gap) grading cannot honor the angle floor with thin
    // layers; the thickness-proportional width is strictly finer near the
    // neck, coarsening to the arc cap away from it.) The floor is applied
    // with margin for the fan distortion of the ray coordinates, and the
    // width is clamped from below in thick-layer zones so the far field
    // cannot produce slivers either.
    const double floor_tan = std::tan(8.5 * kPi / 180.0);
    const double density = params.angular_res / 16.0;
    std::vector<double> phis{0.0};
    while (phis.back() < kPi) {
        const double phi = phis.back();
        const double t_layer = (outer_ray(phi, r1, r0, eps) - r1) / params.n_layers;
        double w = std::min(t_layer / floor_tan / std::max(1.0, density), 0.10 * r1 / density);
        w = std::max(w, floor_tan * t_layer);
        phis.push_back(phi + std::max(w / r1, 1e-9));
        if (phis.size() > 2'000'000) throw NumericalError("angular ladder failed to close");
    }
    const double scale = kPi / phis.back();
    for (auto& p : phis) p *= scale;

    const int n_pos = static_cast<int>(phis.size());  // stations 0..pi inclusive
    Mesh mesh;
    mesh.n_layers = params.n_layers;
    mesh.n_phi = 2 * (n_pos - 1);
    const int nl = params.n_layers;

    // station order: 0, phi_1, ..., pi, -phi_{n-2}, ..., -phi_1  (cyclic)
    // nodes for phi >= 0 are computed, negatives mirrored exactly.
    std::vector<std::vector<int>> station_nodes(mesh.n_phi);
    auto add_column = [&](double phi, int mirrored_from) {
        std::vector<int> col(nl + 1);
        for (int j = 0; j <= nl; ++j) {
            Eigen::Vector2d p;
            if (mirrored_from < 0) {
                const double Rphi = outer_ray(phi, r1, r0, eps);
                const double rho = r1 + (Rphi - r1) * double(j) / nl;
                p = Eigen::Vector2d(rho * std::sin(phi), (r1 + eps) - rho * std::cos(phi));
            } else {
                p = mesh.nodes[station_nodes[mirrored_from][j]];
                p.x() = -p.x();
            }
            col[j] = mesh.n_nodes();
            mesh.nodes.push_back(p);
            mesh.boundary.push_back(j == 0 ? 1 : (j == nl ? 2 : 0));
        }
        return col;
    };
    for (int s = 0; s < n_pos; ++s) station_nodes[s] = add_column(phis[s], -1);
    for (int s = n_pos; s < mesh.n_phi; ++s) {
        const int src = mesh.n_phi - s;  // mirror of station index
        station_nodes[s] = add_column(-phis[src], src);
    }

    auto push_tri = [&](int a, int b, int c) {
        const Eigen::Vector2d pa = mesh.nodes[a], pb = mesh.nodes[b], pc = mesh.nodes[c];
        const double area2 = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
        if (area2 >= 0) mesh.tris.push_back({a, b, c});
        else mesh.tris.push_back({a, c, b});
    };
    for (int s = 0; s < mesh.n_phi; ++s) {
        const int sn = (s + 1) % mesh.n_phi;
        const bool mirrored = s >= n_pos - 1;  // stations past pi carry the mirrored split
        for (int j = 0; j < nl; ++j) {
            const int a = station_nodes[s][j], b = station_nodes[sn][j];
            const int c = station_nodes[sn][j + 1], d4 = station_nodes[s][j + 1];
            if (!mirrored) {
                push_tri(a, b, c);
                push_tri(a, c, d4);
            } else {
                push_tri(a, b, d4);
                push_tri(b, c, d4);
            }
        }
    }
    return {dom, mesh};
}

namespace {

struct ElementStiffness {
    std::array<int, 6> dof;
    Eigen::Matrix<double, 6, 6> ke;
};

// CST plane-strain element: Ke = area * B^T D B with engineering shear.
ElementStiffness element_stiffness(const Mesh& mesh, const std::array<int, 3>& t,
                                   const LameConstants& lame) {
    const Eigen::Vector2d p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]], p2 = mesh.nodes[t[2]];
    const double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    const double area = 0.5 * area2;
    const double b0 = p1.y() - p2.y(), b1 = p2.y() - p0.y(), b2 = p0.y() - p1.y();
    const double c0 = p2.x() - p1.x(), c1 = p0.x() - p2.x(), c2 = p1.x() - p0.x();

    Eigen::Matrix<double, 3, 6> B;
    B << b0, 0, b1, 0, b2, 0,
         0, c0, 0, c1, 0, c2,
         c0, b0, c1, b1, c2, b2;
    B /= area2;

    Eigen::Matrix3d D;
    const double l = lame.lambda, mu = lame.mu;
    D << l + 2 * mu, l, 0,
         l, l + 2 * mu, 0,
         0, 0, mu;

    ElementStiffness es;
    es.ke = area * B.transpose() * D * B;
    for (int i = 0; i < 3; ++i) {
        es.dof[2 * i] = 2 * t[i];
        es.dof[2 * i + 1] = 2 * t[i] + 1;
    }
    return es;
}

}  // namespace

LameSolver::LameSolver(const Mesh& mesh, const LameConstants& lame)
    : mesh_(mesh), lame_(lame) {
    lame_.validate(2);
    const int ndof = 2 * mesh_.n_nodes();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh_.tris.size() * 36);
    for (const auto& t : mesh_.tris) {
        const auto es = element_stiffness(mesh_, t, lame_);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                trips.emplace_back(es.dof[i], es.dof[j], es.ke(i, j));
    }
    K_.resize(ndof, ndof);
    K_.setFromTriplets(trips.begin(), trips.end());

    free_index_.assign(ndof, -1);
    int nf = 0;
    for (int n = 0; n < mesh_.n_nodes(); ++n) {
        if (mesh_.boundary[n] == 0) {
            free_index_[2 * n] = nf++;
            free_index_[2 * n + 1] = nf++;
        } else {
            fixed_dofs_.push_back(2 * n);
            fixed_dofs_.push_back(2 * n + 1);
        }
    }

    std::vector<Eigen::Triplet<double>> tff, tfb;
    std::vector<int> fixed_index(ndof, -1);
    for (std::size_t i = 0; i < fixed_dofs_.size(); ++i) fixed_index[fixed_dofs_[i]] = int(i);
    for (int col = 0; col < K_.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K_, col); it; ++it) {
            const int r = int(it.row()), c = int(it.col());
            if (free_index_[r] >= 0 && free_index_[c] >= 0)
                tff.emplace_back(free_index_[r], free_index_[c], it.value());
            else if (free_index_[r] >= 0 && fixed_index[c] >= 0)
                tfb.emplace_back(free_index_[r], fixed_index[c], it.value());
        }
    Kff_.resize(nf, nf);
    Kff_.setFromTriplets(tff.begin(), tff.end());
    Kfb_.resize(nf, int(fixed_dofs_.size()));
    Kfb_.setFromTriplets(tfb.begin(), tfb.end());
    ldlt_.compute(Kff_);
    if (ldlt_.info() != Eigen::Success)
        throw NumericalError("stiffness factorization failed");
}

SolveResult LameSolver::solve(const BoundaryFn& on_inclusion, const BoundaryFn& on_matrix) const {
    const int ndof = 2 * mesh_.n_nodes();
    SolveResult out;
    out.u = Eigen::VectorXd::Zero(ndof);

    Eigen::VectorXd ub(fixed_dofs_.size());
    for (std::size_t i = 0; i < fixed_dofs_.size(); i += 2) {
        const int n = fixed_dofs_[i] / 2;
        const Eigen::Vector2d v =
            mesh_.boundary[n] == 1 ? on_inclusion(mesh_.nodes[n]) : on_matrix(mesh_.nodes[n]);
        ub[i] = v.x();
        ub[i + 1] = v.y();
        out.u[2 * n] = v.x();
        out.u[2 * n + 1] = v.y();
    }

    const Eigen::VectorXd rhs = -Kfb_ * ub;
    const Eigen::VectorXd uf = ldlt_.solve(rhs);
    const double rhs_norm = rhs.norm();
    out.solve_residual = rhs_norm > 0 ? (Kff_ * uf - rhs).norm() / rhs_norm : 0.0;
    for (int dof = 0; dof < ndof; ++dof)
        if (free_index_[dof] >= 0) out.u[dof] = uf[free_index_[dof]];
    return out;
}

double LameSolver::pairing(const SolveResult& ua, const SolveResult& ub) const {
    return ua.u.dot(K_ * ub.u);
}

Eigen::Matrix2d sample_gradient(const Mesh& mesh, const Eigen::VectorXd& u,
                                const Eigen::Vector2d& x) {
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    int hits = 0;
    for (const auto& t : mesh.tris) {
        const Eigen::Vector2d p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]], p2 = mesh.nodes[t[2]];
        const double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        if (std::abs(area2) < 1e-30) continue;
        const double l0 =
            ((p1 - x).x() * (p2 - x).y() - (p1 - x).y() * (p2 - x).x()) / area2;
        const double l1 =
            ((p2 - x).x() * (p0 - x).y() - (p2 - x).y() * (p0 - x).x()) / area2;
        const double l2 = 1.0 - l0 - l1;
        const double tol = -1e-10;
        if (l0 < tol || l1 < tol || l2 < tol) continue;
        const double b0 = p1.y() - p2.y(), b1 = p2.y() - p0.y(), b2 = p0.y() - p1.y();
        const double c0 = p2.x() - p1.x(), c1 = p0.x() - p2.x(), c2 = p1.x() - p0.x();
        Eigen::Matrix2d G;
        for (int comp = 0; comp < 2; ++comp) {
            const double u0 = u[2 * t[0] + comp], u1 = u[2 * t[1] + comp],
                         u2 = u[2 * t[2] + comp];
            G(comp, 0) = (u0 * b0 + u1 * b1 + u2 * b2) / area2;
            G(comp, 1) = (u0 * c0 + u1 * c1 + u2 * c2) / area2;
        }
        acc += G;
        ++hits;
    }
    if (hits == 0) throw NumericalError("gradient sample point lies outside the mesh");
    return acc / double(hits);
}

BoundaryFn matrix_datum(const BoundaryData& phi, const ReferenceDomain& dom) {
    const double Rcut = dom.r_gap;
    const double r0 = dom.r0;
    return [phi, Rcut, r0](const Eigen::Vector2d& x) -> Eigen::Vector2d {
        if (x.y() > r0) return Eigen::Vector2d::Zero();  // upper arc
        const double chi = radial_cutoff(std::abs(x.x()), Rcut);
        if (chi == 0.0) return Eigen::Vector2d::Zero();
        VectorXd xp(1);
        xp[0] = x.x();
        const VectorXd v = phi.trace(xp);
        return chi * Eigen::Vector2d(v[0], v[1]);
    };
}

double q_functional(const LameSolver& solver, const SolveResult& u_datum,
                    const SolveResult& u_alpha) {
    return -solver.pairing(u_datum, u_alpha);
}

OracleRun solve_full(const BoundaryData& phi, double eps, const LameConstants& lame,
                     const MeshParams& params, double r1, double r0) {
    if (phi.d != 2) throw ConfigError("the verification solver is two-dimensional");
    {
        VectorXd origin(1);
        origin[0] = 0.0;
        if (phi.trace(origin).norm() > 1e-12)
            throw ConfigError("datum violates the touching-point normalization phi(0) = 0");
    }
    OracleRun run;
    auto [dom, mesh] = build_reference_domain(eps, r1, r0, params);
    run.domain = dom;
    run.mesh = mesh;
    LameSolver solver(mesh, lame);

    const int N = rigid_count(2);
    auto zero_fn = [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero(); };
    run.modes.resize(N + 1);
    run.modes[0] = solver.solve(zero_fn, matrix_datum(phi, dom));
    for (int alpha = 1; alpha <= N; ++alpha) {
        RigidBasis psi(2, alpha);
        auto fn = [psi](const Eigen::Vector2d& x) {
            const VectorXd v = psi.value(Eigen::Vector2d(x));
            return Eigen::Vector2d(v[0], v[1]);
        };
        run.modes[alpha] = solver.solve(fn, zero_fn);
    }

    run.factors.d = 2;
    run.factors.provenance = Provenance::Oracle;
    run.factors.eps = eps;
    run.factors.a = MatrixXd(N, N);
    run.factors.Q = VectorXd(N);
    for (int a = 1; a <= N; ++a) {
        for (int b = a; b <= N; ++b) {
            const double v = solver.pairing(run.modes[a], run.modes[b]);
            run.factors.a(a - 1, b - 1) = v;
            run.factors.a(b - 1, a - 1) = v;
        }
        run.factors.Q[a - 1] = q_functional(solver, run.modes[0], run.modes[a]);
    }

    auto [X, diag] = free_constants(run.factors);
    run.X = X;
    const double scale =
        std::max(1.0, run.factors.Q.cwiseAbs().maxCoeff());
    run.flux_residual = (run.factors.a * X - run.factors.Q).cwiseAbs().maxCoeff() / scale;

    run.combined.u = run.modes[0].u;
    for (int a = 1; a <= N; ++a) run.combined.u += X[a - 1] * run.modes[a].u;
    run.combined.solve_residual = run.modes[0].solve_residual;
    return run;
}

void dump_solution(const Mesh& mesh, const Eigen::VectorXd& u, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open dump file: " + path);
    os << "# lamegap mesh/solution dump v1\n";
    os << "nodes " << mesh.n_nodes() << "\n";
    os.precision(17);
    for (int i = 0; i < mesh.n_nodes(); ++i)
        os << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << " " << mesh.boundary[i] << "\n";
    os << "elements " << mesh.tris.size() << "\n";
    for (const auto& t : mesh.tris) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "displacement " << (u.size() / 2) << "\n";
    for (int i = 0; 2 * i + 1 < u.size(); ++i) os << u[2 * i] << " " << u[2 * i + 1] << "\n";
}

}  // namespace lamegap
