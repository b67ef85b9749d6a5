#include "finsler/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace finsler::kernels {

namespace {

// flux and energy density at one triangle gradient
inline void flux_at(const norms::MinkowskiNorm& H, double p, double eps, double gx, double gy,
                    double& qx, double& qy, double& edens) {
    const double gnorm2 = gx * gx + gy * gy;
    if (gnorm2 < 1e-280) {
        qx = qy = edens = 0.0;
        return;
    }
    const double Hv = H.value2(gx, gy);
    double dHx, dHy;
    H.gradient2(gx, gy, dHx, dHy);
    if (eps == 0.0) {
        const double s = std::pow(Hv, p - 1.0);
        qx = s * dHx;
        qy = s * dHy;
        edens = std::pow(Hv, p) / p;
        return;
    }
    // H_eps = sqrt(H^2 + eps^2 |g|^2); grad(H_eps^p / p) = H_eps^{p-2} (H gradH + eps^2 g)
    const double He2 = Hv * Hv + eps * eps * gnorm2;
    const double He = std::sqrt(He2);
    const double s = std::pow(He, p - 2.0);
    qx = s * (Hv * dHx + eps * eps * gx);
    qy = s * (Hv * dHy + eps * eps * gy);
    edens = std::pow(He, p) / p;
}

}  // namespace

void tri_pass(const mesh::Mesh2D& m, const norms::MinkowskiNorm& H, double p, double eps,
              const double* u, TriState& out, Exec exec) {
    const int ntri = static_cast<int>(m.tris.size());
    out.resize(ntri);
    if (exec == Exec::Serial) {
        for (int t = 0; t < ntri; ++t) {
            const auto& tg = m.tris[t];
            const double ua = u[tg.v[0]], ub = u[tg.v[1]], uc = u[tg.v[2]];
            const double gx = ua * tg.gx[0] + ub * tg.gx[1] + uc * tg.gx[2];
            const double gy = ua * tg.gy[0] + ub * tg.gy[1] + uc * tg.gy[2];
            out.gx[t] = gx;
            out.gy[t] = gy;
            out.ubar[t] = (ua + ub + uc) / 3.0;
            flux_at(H, p, eps, gx, gy, out.qx[t], out.qy[t], out.edens[t]);
        }
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int t = 0; t < ntri; ++t) {
        const auto& tg = m.tris[t];
        const double ua = u[tg.v[0]], ub = u[tg.v[1]], uc = u[tg.v[2]];
        const double gx = ua * tg.gx[0] + ub * tg.gx[1] + uc * tg.gx[2];
        const double gy = ua * tg.gy[0] + ub * tg.gy[1] + uc * tg.gy[2];
        out.gx[t] = gx;
        out.gy[t] = gy;
        out.ubar[t] = (ua + ub + uc) / 3.0;
        flux_at(H, p, eps, gx, gy, out.qx[t], out.qy[t], out.edens[t]);
    }
}

double energy_sum(const mesh::Mesh2D& m, const nl::Nonlinearity& f, const TriState& ts,
                  const double* sbar, Exec exec) {
    const int ntri = static_cast<int>(m.tris.size());
    double total = 0.0;
    if (exec == Exec::Serial) {
        for (int t = 0; t < ntri; ++t) {
            const double ub = std::max(ts.ubar[t], 0.0);
            double cell = ts.edens[t] + f.F(ub);
            if (sbar) cell -= sbar[t] * ts.ubar[t];
            total += m.tris[t].area * cell;
        }
        return total;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : total)
#endif
    for (int t = 0; t < ntri; ++t) {
        const double ub = std::max(ts.ubar[t], 0.0);
        double cell = ts.edens[t] + f.F(ub);
        if (sbar) cell -= sbar[t] * ts.ubar[t];
        total += m.tris[t].area * cell;
    }
    return total;
}

void energy_gradient(const mesh::Mesh2D& m, const nl::Nonlinearity& f, const TriState& ts,
                     const double* sbar, double* grad, Exec exec) {
    const int n = m.n_nodes();
    auto gather = [&](int v) {
        double g = 0.0;
        for (int k = m.adj_ptr[v]; k < m.adj_ptr[v + 1]; ++k) {
            const int t = m.adj_tri[k];
            const int l = m.adj_loc[k];
            const auto& tg = m.tris[t];
            double cell = ts.qx[t] * tg.gx[l] + ts.qy[t] * tg.gy[l] +
                          f.f(std::max(ts.ubar[t], 0.0)) / 3.0;
            if (sbar) cell -= sbar[t] / 3.0;
            g += tg.area * cell;
        }
        return g;
    };
    if (exec == Exec::Serial) {
        for (int v = 0; v < n; ++v) grad[v] = gather(v);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int v = 0; v < n; ++v) grad[v] = gather(v);
}

double residual_max(const mesh::Mesh2D& m, const double* grad, const double* u,
                    const nl::Nonlinearity& f, Exec exec) {
    const int nu = m.n_unknowns();
    double worst = 0.0;
    if (exec == Exec::Serial) {
        for (int k = 0; k < nu; ++k) {
            const int v = m.node_of[k];
            const double scale = 1.0 + f.f(std::max(u[v], 0.0));
            worst = std::max(worst, std::fabs(grad[v]) / (m.lump[v] * scale));
        }
        return worst;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst)
#endif
    for (int k = 0; k < nu; ++k) {
        const int v = m.node_of[k];
        const double scale = 1.0 + f.f(std::max(u[v], 0.0));
        worst = std::max(worst, std::fabs(grad[v]) / (m.lump[v] * scale));
    }
    return worst;
}

void source_bar(const mesh::Mesh2D& m, const double* s_nodes, double* sbar, Exec exec) {
    const int ntri = static_cast<int>(m.tris.size());
    if (exec == Exec::Serial) {
        for (int t = 0; t < ntri; ++t) {
            const auto& tg = m.tris[t];
            sbar[t] = (s_nodes[tg.v[0]] + s_nodes[tg.v[1]] + s_nodes[tg.v[2]]) / 3.0;
        }
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int t = 0; t < ntri; ++t) {
        const auto& tg = m.tris[t];
        sbar[t] = (s_nodes[tg.v[0]] + s_nodes[tg.v[1]] + s_nodes[tg.v[2]]) / 3.0;
    }
}

}  // namespace finsler::kernels
