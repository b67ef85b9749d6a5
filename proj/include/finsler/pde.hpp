#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "finsler/kernels.hpp"
#include "finsler/mesh.hpp"
#include "finsler/nonlinearity.hpp"
#include "finsler/norms.hpp"

namespace finsler::pde {

using mesh::DiscreteField;
using mesh::Mesh2D;

// Energy-first 2D solver: minimize the discrete
//   J(u) = sum_T area [ (1/p) H_eps^p(grad u) + F(u_bar) - s_bar u_bar ]
// by damped Newton with an eps -> 0 continuation, Dirichlet data pinned on
// the rim nodes.

struct SolveOptions {
    double tol = 1e-9;  // scaled optimality residual, relative to 1 + f(max u)
    int max_newton = 80;
    std::vector<double> eps_stages{1e-2, 1e-4, 1e-6, 0.0};  // x gradient scale
    kernels::Exec exec = kernels::Exec::OpenMP;
};

struct SolveStats {
    int newton_iters = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> energies;  // accepted line-search energies
};

using BoundaryData = std::function<double(const Eigen::Vector2d&)>;
using SourceTerm = std::function<double(const Eigen::Vector2d&)>;

// Discrete energy of a conforming nodal field (midpoint/barycenter
// quadrature; exact for constants).
double energy_J(const Mesh2D& m, const norms::MinkowskiNorm& H, double p,
                const nl::Nonlinearity& f, const Eigen::VectorXd& values,
                const SourceTerm* source = nullptr,
                kernels::Exec exec = kernels::Exec::OpenMP);

DiscreteField solve_dirichlet(std::shared_ptr<const Mesh2D> m, const norms::MinkowskiNorm& H,
                              const nl::Nonlinearity& f, const BoundaryData& g,
                              const SourceTerm* source = nullptr, SolveOptions opt = {},
                              SolveStats* stats = nullptr,
                              const Eigen::VectorXd* init = nullptr);

struct KSchedule {
    double k0 = 1.0;
    double factor = 2.0;
    int max_stages = 40;
    // boundary-data cap (below the grid-resolvable blow-up scale extra k
    // adds no interior information); non-positive means "derive from h"
    double k_max = 0.0;
    double interior_tol = 1e-5;
};

struct LargeSolution2D {
    std::shared_ptr<const Mesh2D> mesh;
    std::vector<double> ks;
    std::vector<Eigen::VectorXd> fields_by_k;
    Eigen::VectorXd limit;
    bool interior_converged = false;
    double last_change = 0.0;
    double min_increment = 0.0;    // monotonicity across the schedule
    double barrier_excess = 0.0;   // worst u - omega(R/2) over interior nodes
    double interior_margin = 0.0;  // delta threshold used for the stop rule
};

// Large solution as the increasing limit of Dirichlet solves with g = k;
// stops when the interior subdomain (delta > extent/10) stops moving.
LargeSolution2D monotone_large_solution(std::shared_ptr<const Mesh2D> m,
                                        const norms::MinkowskiNorm& H,
                                        const nl::Nonlinearity& f, KSchedule sched = {},
                                        SolveOptions opt = {});

struct AsymBand {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    double min_ratio = 0.0, max_ratio = 0.0, median_ratio = 0.0;
};

// psi(u)/delta statistics per band of the distance array (band edges given
// in decreasing order).
std::vector<AsymBand> boundary_asym_check(const Mesh2D& m, const Eigen::VectorXd& values,
                                          const std::vector<double>& deltas,
                                          const nl::Nonlinearity& f,
                                          const std::vector<double>& band_edges);

struct UniquenessReport {
    double interior_sup_rel_diff = 0.0;  // between the two construction schemes
    std::vector<AsymBand> phi_ratio_bands;  // u / Phi(delta) bands (scheme i)
    double margin_used = 0.0;
    int shared_nodes = 0;
};

// Scheme (i): monotone k-limit. Scheme (ii): Dirichlet data Phi(delta) on a
// shrinking-margin domain sequence. Reports the interior sup difference.
UniquenessReport uniqueness_check(const geom::AnisotropicDistanceField& field,
                                  const norms::MinkowskiNorm& H, const nl::Nonlinearity& f,
                                  double h, KSchedule sched = {}, SolveOptions opt = {});

// Euclidean distances per node for the same mesh (comparison statistic).
std::vector<double> euclid_deltas(const Mesh2D& m, const geom::Domain2D& dom);

}  // namespace finsler::pde
