#pragma once

#include "finsler/mesh.hpp"
#include "finsler/nonlinearity.hpp"
#include "finsler/norms.hpp"

namespace finsler::kernels {

// Data-parallel inner loops of the 2D solver, each in two variants: a plain
// serial reference implementation and an OpenMP one. The parallel variants
// are gather-based (one writer per output slot), so serial and parallel
// results agree exactly except for the energy reduction order.
enum class Exec { Serial, OpenMP };

struct TriState {
    std::vector<double> gx, gy;    // P1 gradient per triangle
    std::vector<double> qx, qy;    // flux H_eps^{p-1} grad H_eps per triangle
    std::vector<double> ubar;      // vertex-average value per triangle
    std::vector<double> edens;     // (1/p) H_eps^p(g) per triangle

    void resize(size_t ntri) {
        gx.resize(ntri);
        gy.resize(ntri);
        qx.resize(ntri);
        qy.resize(ntri);
        ubar.resize(ntri);
        edens.resize(ntri);
    }
};

// Per-triangle pass: gradient, regularized flux, barycenter value, energy
// density. H_eps^2 = H^2 + eps^2 |g|^2.
void tri_pass(const mesh::Mesh2D& m, const norms::MinkowskiNorm& H, double p, double eps,
              const double* u, TriState& out, Exec exec);

// Discrete energy: sum_T area [ edens + F(ubar) - sbar ubar ]. sbar may be
// null (no forcing). Reduction order differs between variants.
double energy_sum(const mesh::Mesh2D& m, const nl::Nonlinearity& f, const TriState& ts,
                  const double* sbar, Exec exec);

// Nodal gradient of the discrete energy, gathered per node:
//   dJ/du_v = sum_{T: v in T} area [ q . grad phi_v + (f(ubar) - sbar)/3 ]
void energy_gradient(const mesh::Mesh2D& m, const nl::Nonlinearity& f, const TriState& ts,
                     const double* sbar, double* grad, Exec exec);

// Scaled optimality residual at the unknowns: r_v = grad_v / lump_v is the
// discrete -div(H^{p-1} grad H) + f(u) - s at node v; scaled by the local
// absorption 1 + f(u_v). Returns the max norm.
double residual_max(const mesh::Mesh2D& m, const double* grad, const double* u,
                    const nl::Nonlinearity& f, Exec exec);

// Barycenter forcing per triangle from a nodal source sample.
void source_bar(const mesh::Mesh2D& m, const double* s_nodes, double* sbar, Exec exec);

}  // namespace finsler::kernels
