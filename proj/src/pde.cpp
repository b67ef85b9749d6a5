#include "finsler/pde.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "finsler/radial.hpp"

namespace finsler::pde {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

// Hessian of (1/p) H_eps^p at the gradient g: with Q = H_eps^2 / 2,
//   (2Q)^{p/2-1} hess Q + (p-2)(2Q)^{p/2-2} grad Q grad Q^T,
// hess Q = hess(H^2/2) + eps^2 I, grad Q = H grad H + eps^2 g.
void flux_hessian(const norms::MinkowskiNorm& H, double p, double eps, double gx, double gy,
                  double M[3] /* xx, xy, yy */) {
    double ex = gx, ey = gy;
    if (ex * ex + ey * ey < 1e-28) {
        // H is not differentiable at 0; any direction gives a valid
        // 0-homogeneous Hessian sample for the Newton model
        ex = 1e-14;
        ey = 0.0;
    }
    double hxx, hxy, hyy;
    H.hessian2(ex, ey, hxx, hxy, hyy);
    hxx += eps * eps;
    hyy += eps * eps;
    if (p == 2.0) {
        M[0] = hxx;
        M[1] = hxy;
        M[2] = hyy;
        return;
    }
    const double Hv = H.value2(ex, ey);
    double dHx, dHy;
    H.gradient2(ex, ey, dHx, dHy);
    const double q2 = Hv * Hv + eps * eps * (ex * ex + ey * ey);  // 2Q
    const double qx = Hv * dHx + eps * eps * ex;
    const double qy = Hv * dHy + eps * eps * ey;
    const double s1 = std::pow(q2, 0.5 * p - 1.0);
    const double s2 = (p - 2.0) * std::pow(q2, 0.5 * p - 2.0);
    M[0] = s1 * hxx + s2 * qx * qx;
    M[1] = s1 * hxy + s2 * qx * qy;
    M[2] = s1 * hyy + s2 * qy * qy;
}

double max_value(const Eigen::VectorXd& u, const Mesh2D& m) {
    double mx = 0.0;
    for (int v = 0; v < m.n_nodes(); ++v)
        if (m.active(v)) mx = std::max(mx, u[v]);
    return mx;
}

}  // namespace

double energy_J(const Mesh2D& m, const norms::MinkowskiNorm& H, double p,
                const nl::Nonlinearity& f, const Eigen::VectorXd& values,
                const SourceTerm* source, kernels::Exec exec) {
    kernels::TriState ts;
    kernels::tri_pass(m, H, p, 0.0, values.data(), ts, exec);
    std::vector<double> sbar;
    if (source) {
        std::vector<double> s_nodes(m.n_nodes(), 0.0);
        for (int v = 0; v < m.n_nodes(); ++v)
            if (m.active(v)) s_nodes[v] = (*source)(m.pos(v));
        sbar.resize(m.tris.size());
        kernels::source_bar(m, s_nodes.data(), sbar.data(), exec);
    }
    return kernels::energy_sum(m, f, ts, sbar.empty() ? nullptr : sbar.data(), exec);
}

DiscreteField solve_dirichlet(std::shared_ptr<const Mesh2D> mp, const norms::MinkowskiNorm& H,
                              const nl::Nonlinearity& f, const BoundaryData& g,
                              const SourceTerm* source, SolveOptions opt, SolveStats* stats,
                              const Eigen::VectorXd* init) {
    const Mesh2D& m = *mp;
    const double p = f.p();
    const int n = m.n_nodes();
    const int nu = m.n_unknowns();
    const auto exec = opt.exec;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    double gmean = 0.0;
    int gcount = 0;
    for (int v = 0; v < n; ++v) {
        if (m.cls[v] == mesh::NodeClass::Dirichlet) {
            u[v] = g(m.pos(v));
            gmean += u[v];
            ++gcount;
        }
    }
    if (gcount > 0) gmean /= gcount;
    if (init && init->size() == n) {
        for (int v = 0; v < n; ++v)
            if (m.cls[v] == mesh::NodeClass::Interior) u[v] = (*init)[v];
    } else {
        for (int v = 0; v < n; ++v)
            if (m.cls[v] == mesh::NodeClass::Interior) u[v] = std::max(gmean, 0.0);
    }

    std::vector<double> sbar;
    if (source) {
        std::vector<double> s_nodes(n, 0.0);
        for (int v = 0; v < n; ++v)
            if (m.active(v)) s_nodes[v] = (*source)(m.pos(v));
        sbar.resize(m.tris.size());
        kernels::source_bar(m, s_nodes.data(), sbar.data(), exec);
    }
    const double* sb = sbar.empty() ? nullptr : sbar.data();

    kernels::TriState ts;
    std::vector<double> grad(n, 0.0);
    SolveStats local_stats;
    SolveStats& st = stats ? *stats : local_stats;
    st.energies.clear();
    st.newton_iters = 0;

    Eigen::SimplicialLDLT<SpMat> solver;
    std::vector<Trip> trips;
    trips.reserve(m.tris.size() * 9);

    // one regularization scale for the whole continuation so the stage
    // functionals decrease monotonically
    double gscale = 0.0;
    {
        kernels::tri_pass(m, H, p, 0.0, u.data(), ts, exec);
        for (size_t t = 0; t < m.tris.size(); ++t)
            gscale = std::max(gscale, std::hypot(ts.gx[t], ts.gy[t]));
        double gabs = 0.0;
        for (int v = 0; v < n; ++v)
            if (m.cls[v] == mesh::NodeClass::Dirichlet) gabs = std::max(gabs, std::fabs(u[v]));
        gscale = std::max({gscale, 4.0 * gabs / std::max(m.domain_extent, 1e-12), 1.0});
    }

    for (double eps_rel : opt.eps_stages) {
        const double eps = eps_rel * gscale;

        for (int it = 0; it < opt.max_newton; ++it) {
            kernels::tri_pass(m, H, p, eps, u.data(), ts, exec);
            kernels::energy_gradient(m, f, ts, sb, grad.data(), exec);
            const double res = kernels::residual_max(m, grad.data(), u.data(), f, exec);
            st.residual = res;
            if (res <= opt.tol) break;
            ++st.newton_iters;

            // assemble the Newton matrix over the unknowns
            trips.clear();
            for (size_t t = 0; t < m.tris.size(); ++t) {
                const auto& tg = m.tris[t];
                double M[3];
                flux_hessian(H, p, eps, ts.gx[t], ts.gy[t], M);
                const double fp = f.df(std::max(ts.ubar[t], 0.0));
                for (int a = 0; a < 3; ++a) {
                    const int ia = m.unknown_of[tg.v[a]];
                    if (ia < 0) continue;
                    for (int b = 0; b < 3; ++b) {
                        const int ib = m.unknown_of[tg.v[b]];
                        if (ib < 0) continue;
                        const double kgrad =
                            tg.area * (tg.gx[a] * (M[0] * tg.gx[b] + M[1] * tg.gy[b]) +
                                       tg.gy[a] * (M[1] * tg.gx[b] + M[2] * tg.gy[b]));
                        const double kmass = tg.area * fp / 9.0;
                        trips.emplace_back(ia, ib, kgrad + kmass);
                    }
                }
            }
            SpMat K(nu, nu);
            K.setFromTriplets(trips.begin(), trips.end());

            Eigen::VectorXd rhs(nu);
            for (int k = 0; k < nu; ++k) rhs[k] = -grad[m.node_of[k]];

            Eigen::VectorXd dir;
            double shift = 0.0;
            double gd = 1.0;
            for (int attempt = 0; attempt < 4; ++attempt) {
                if (shift > 0.0) {
                    SpMat Ks = K;
                    for (int k = 0; k < nu; ++k)
                        Ks.coeffRef(k, k) += shift * m.lump[m.node_of[k]];
                    solver.compute(Ks);
                } else {
                    solver.compute(K);
                }
                if (solver.info() == Eigen::Success) {
                    dir = solver.solve(rhs);
                    gd = -rhs.dot(dir);
                    if (dir.allFinite() && gd < 0.0) break;
                }
                shift = (shift == 0.0) ? 1e-8 : shift * 100.0;
            }
            if (!(gd < 0.0))
                throw NonconvexDetected(
                    "solve_dirichlet: no descent direction (norm not strongly convex?)");

            const double J0 = kernels::energy_sum(m, f, ts, sb, exec);
            double alpha = 1.0;
            Eigen::VectorXd trial = u;
            bool accepted = false;
            for (int ls = 0; ls < 50; ++ls) {
                for (int k = 0; k < nu; ++k)
                    trial[m.node_of[k]] = u[m.node_of[k]] + alpha * dir[k];
                kernels::TriState tts;
                kernels::tri_pass(m, H, p, eps, trial.data(), tts, exec);
                const double J1 = kernels::energy_sum(m, f, tts, sb, exec);
                if (J1 <= J0 + 1e-4 * alpha * gd || J1 <= J0 + 1e-12 * (1.0 + std::fabs(J0))) {
                    u = trial;
                    st.energies.push_back(J1);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted)
                throw NonconvexDetected(
                    "solve_dirichlet: line search failed along a descent direction");
        }
    }

    kernels::tri_pass(m, H, p, 0.0, u.data(), ts, exec);
    kernels::energy_gradient(m, f, ts, sb, grad.data(), exec);
    st.residual = kernels::residual_max(m, grad.data(), u.data(), f, exec);
    st.converged = st.residual <= opt.tol * 10.0;

    DiscreteField out;
    out.mesh = mp;
    out.values = std::move(u);
    out.energy = kernels::energy_sum(m, f, ts, sb, exec);
    out.converged = st.converged;
    (void)max_value;
    return out;
}

LargeSolution2D monotone_large_solution(std::shared_ptr<const Mesh2D> mp,
                                        const norms::MinkowskiNorm& H,
                                        const nl::Nonlinearity& f, KSchedule sched,
                                        SolveOptions opt) {
    const Mesh2D& m = *mp;
    if (!nl::ko_holds(f))
        throw DivergentIntegral("monotone_large_solution: (KO) fails, no blow-up limit");

    if (sched.k_max <= 0.0) {
        // boundary data above the blow-up value at a sub-cell distance adds
        // no resolvable interior information
        double th1 = 1e300;
        const norms::DualNorm dual(H);
        for (int k = 0; k < 256; ++k) {
            const double th = 2.0 * M_PI * k / 256;
            th1 = std::min(th1, dual.value2(std::cos(th), std::sin(th)));
        }
        sched.k_max = nl::phi(f, 0.05 * m.h * th1);
    }

    LargeSolution2D out;
    out.mesh = mp;
    out.interior_margin = m.domain_extent / 10.0;
    out.min_increment = std::numeric_limits<double>::infinity();

    double k = sched.k0;
    bool capped = false;
    Eigen::VectorXd prev;
    for (int stage = 0; stage < sched.max_stages; ++stage) {
        if (k >= sched.k_max) {
            k = sched.k_max;
            capped = true;
        }
        auto g = [k](const Eigen::Vector2d&) { return k; };
        const DiscreteField fld =
            solve_dirichlet(mp, H, f, g, nullptr, opt, nullptr, prev.size() ? &prev : nullptr);
        out.ks.push_back(k);
        out.fields_by_k.push_back(fld.values);

        if (prev.size()) {
            double change = 0.0, min_inc = std::numeric_limits<double>::infinity();
            for (int v = 0; v < m.n_nodes(); ++v) {
                if (m.cls[v] != mesh::NodeClass::Interior) continue;
                const double d = fld.values[v] - prev[v];
                min_inc = std::min(min_inc, d);
                if (m.delta[v] > out.interior_margin) change = std::max(change, std::fabs(d));
            }
            out.min_increment = std::min(out.min_increment, min_inc);
            out.last_change = change;
            if (change < sched.interior_tol) {
                out.interior_converged = true;
                out.limit = fld.values;
                break;
            }
        }
        prev = fld.values;
        if (capped) break;
        k *= sched.factor;
    }
    if (!out.interior_converged)
        throw NotStabilized("monotone_large_solution: interior did not stabilize "
                            "within the k schedule");

    // local bound of the Wulff-ball barrier at every interior node,
    // evaluated through log-bucketed inscribed radii (bucket floor keeps
    // the bound valid)
    double dmin = 1e300, dmax = 0.0;
    for (int v = 0; v < m.n_nodes(); ++v) {
        if (m.cls[v] != mesh::NodeClass::Interior) continue;
        dmin = std::min(dmin, m.delta[v]);
        dmax = std::max(dmax, m.delta[v]);
    }
    if (dmin < dmax) {
        const int nb = 48;
        std::vector<double> bound(nb, 0.0);
        const double lmin = std::log(dmin * 0.999), lmax = std::log(dmax);
        for (int b = 0; b < nb; ++b) {
            const double R = std::exp(lmin + (lmax - lmin) * b / nb);
            const auto omega = radial::solve_omega(R, f);
            bound[b] = omega.eval(0.5 * R);
        }
        double excess = -1e300;
        for (int v = 0; v < m.n_nodes(); ++v) {
            if (m.cls[v] != mesh::NodeClass::Interior) continue;
            const double R = 0.999 * m.delta[v];
            int b = static_cast<int>(std::floor((std::log(R) - lmin) / (lmax - lmin) * nb));
            b = std::clamp(b, 0, nb - 1);
            excess = std::max(excess, out.limit[v] - bound[b]);
        }
        out.barrier_excess = excess;
    }
    return out;
}

std::vector<AsymBand> boundary_asym_check(const Mesh2D& m, const Eigen::VectorXd& values,
                                          const std::vector<double>& deltas,
                                          const nl::Nonlinearity& f,
                                          const std::vector<double>& band_edges) {
    std::vector<AsymBand> bands;
    for (size_t e = 0; e + 1 < band_edges.size(); ++e) {
        const double hi = band_edges[e], lo = band_edges[e + 1];
        std::vector<double> ratios;
        for (int v = 0; v < m.n_nodes(); ++v) {
            if (m.cls[v] != mesh::NodeClass::Interior) continue;
            const double d = deltas[v];
            if (d < lo || d >= hi) continue;
            if (values[v] <= 0.0) continue;
            ratios.push_back(nl::psi(f, values[v]) / d);
        }
        AsymBand b;
        b.lo = lo;
        b.hi = hi;
        b.count = static_cast<int>(ratios.size());
        if (!ratios.empty()) {
            std::sort(ratios.begin(), ratios.end());
            b.min_ratio = ratios.front();
            b.max_ratio = ratios.back();
            b.median_ratio = ratios[ratios.size() / 2];
        }
        bands.push_back(b);
    }
    return bands;
}

std::vector<double> euclid_deltas(const Mesh2D& m, const geom::Domain2D& dom) {
    geom::AnisotropicDistanceField efield(dom,
                                          norms::DualNorm(norms::MinkowskiNorm::euclidean(2)));
    std::vector<double> out(m.n_nodes(), -1.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (int v = 0; v < m.n_nodes(); ++v) {
        if (m.cls[v] != mesh::NodeClass::Interior) continue;
        out[v] = efield.nearest_boundary(m.pos(v)).distance;
    }
    return out;
}

UniquenessReport uniqueness_check(const geom::AnisotropicDistanceField& field,
                                  const norms::MinkowskiNorm& H, const nl::Nonlinearity& f,
                                  double h, KSchedule sched, SolveOptions opt) {
    auto mp = std::make_shared<const Mesh2D>(Mesh2D::from_domain(field, h));
    const auto scheme_i = monotone_large_solution(mp, H, f, sched, opt);

    double th1 = 1e300;
    for (int k = 0; k < 256; ++k) {
        const double th = 2.0 * M_PI * k / 256;
        th1 = std::min(th1, field.dual().value2(std::cos(th), std::sin(th)));
    }

    // scheme (ii): Dirichlet data from the blow-up rate Phi at a shrinking
    // margin; meshes share the grid lattice so the solves chain as warm
    // starts
    const std::vector<double> margins{6.0 * h * th1, 4.0 * h * th1, 2.5 * h * th1};
    Eigen::VectorXd warm;
    std::shared_ptr<const Mesh2D> mshr;
    Eigen::VectorXd u_ii;
    for (double margin : margins) {
        mshr = std::make_shared<const Mesh2D>(Mesh2D::from_domain_shrunk(field, h, margin));
        const double gval = nl::phi(f, margin);
        auto g = [gval](const Eigen::Vector2d&) { return gval; };
        const DiscreteField fld = solve_dirichlet(mshr, H, f, g, nullptr, opt, nullptr,
                                                  warm.size() ? &warm : nullptr);
        warm = fld.values;
        u_ii = fld.values;
    }

    UniquenessReport rep;
    rep.margin_used = margins.back();
    const double interior_cut = mp->domain_extent / 10.0;
    double sup = 0.0, scale = 0.0;
    int shared = 0;
    for (int v = 0; v < mp->n_nodes(); ++v) {
        if (mp->cls[v] != mesh::NodeClass::Interior) continue;
        if (mshr->cls[v] != mesh::NodeClass::Interior) continue;
        if (mp->delta[v] <= interior_cut) continue;
        ++shared;
        sup = std::max(sup, std::fabs(scheme_i.limit[v] - u_ii[v]));
        scale = std::max(scale, std::fabs(scheme_i.limit[v]));
    }
    rep.shared_nodes = shared;
    rep.interior_sup_rel_diff = (scale > 0.0) ? sup / scale : 0.0;

    // u / Phi(delta) ratio bands for the monotone limit
    std::vector<double> edges;
    for (double e = 0.2; e >= 8.0 * h * th1; e *= 0.66) edges.push_back(e);
    if (edges.size() >= 2) {
        for (size_t e = 0; e + 1 < edges.size(); ++e) {
            AsymBand b;
            b.hi = edges[e];
            b.lo = edges[e + 1];
            std::vector<double> ratios;
            for (int v = 0; v < mp->n_nodes(); ++v) {
                if (mp->cls[v] != mesh::NodeClass::Interior) continue;
                const double d = mp->delta[v];
                if (d < b.lo || d >= b.hi) continue;
                ratios.push_back(scheme_i.limit[v] / nl::phi(f, d));
            }
            b.count = static_cast<int>(ratios.size());
            if (!ratios.empty()) {
                std::sort(ratios.begin(), ratios.end());
                b.min_ratio = ratios.front();
                b.max_ratio = ratios.back();
                b.median_ratio = ratios[ratios.size() / 2];
            }
            rep.phi_ratio_bands.push_back(b);
        }
    }
    return rep;
}

}  // namespace finsler::pde
