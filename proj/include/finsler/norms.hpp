#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "finsler/errors.hpp"

namespace finsler::norms {

enum class Family { Euclidean, Scaled1D, LinearMap, LambdaMu, BlockPQ, Randers };

std::string family_name(Family f);

struct BlockPqParams {
    double q = 2.0;                  // outer exponent
    std::vector<int> sizes;          // partition of the dimension
    std::vector<double> exponents;   // inner exponent per block
    std::vector<double> weights;     // positive weight per block
};

// Minkowski norm H: positively 1-homogeneous, H > 0 off the origin, C^2 off
// the origin, with positive definite Hessian of H^2/2 for valid parameters.
// Instances are immutable; every member is a pure function.
//
// Construction validates cheap structural requirements (Randers slope,
// invertibility of the linear map, parameter signs). Strong convexity is a
// sampled property checked by verify_minkowski, since some parameter choices
// (e.g. the q-norm emulation through BlockPQ) are intentionally degenerate.
class MinkowskiNorm {
  public:
    static MinkowskiNorm euclidean(int dim);
    static MinkowskiNorm scaled_1d(double gamma);
    static MinkowskiNorm linear_map(const Eigen::MatrixXd& A);
    static MinkowskiNorm lambda_mu(double lambda, double mu, int dim);
    static MinkowskiNorm block_pq(BlockPqParams params);
    static MinkowskiNorm randers(const Eigen::VectorXd& T);

    Family family() const { return family_; }
    int dim() const { return dim_; }

    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;      // throws ZeroVector
    Eigen::MatrixXd hessian_half_sq(const Eigen::VectorXd& x) const;  // of H^2/2

    // Allocation-free 2D paths for grid scans; require dim() == 2.
    double value2(double x, double y) const;
    void gradient2(double x, double y, double& gx, double& gy) const;
    void hessian2(double x, double y, double& hxx, double& hxy, double& hyy) const;

    // H(x) = H(-x) for every family except Randers with T != 0.
    bool symmetric() const;

    // Family parameters, exposed for serialization and dual construction.
    double gamma() const { return gamma_; }
    const Eigen::MatrixXd& map_matrix() const { return A_; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }
    const BlockPqParams& block_params() const { return blocks_; }
    const Eigen::VectorXd& randers_shift() const { return T_; }

  private:
    MinkowskiNorm() = default;

    Family family_ = Family::Euclidean;
    int dim_ = 0;
    double gamma_ = 1.0;
    Eigen::MatrixXd A_;        // LinearMap: the map itself
    Eigen::MatrixXd AtA_;      // cached A^T A
    double lambda_ = 0.0, mu_ = 1.0;
    BlockPqParams blocks_;
    std::vector<int> block_of_;  // index -> block id (BlockPQ)
    Eigen::VectorXd T_;
};

struct ThetaBounds {
    double theta1 = 1.0;  // min of H on the Euclidean unit sphere
    double theta2 = 1.0;  // max of H on the Euclidean unit sphere
};

// Dense sphere sweep plus local refinement.
ThetaBounds theta_bounds(const MinkowskiNorm& H, int sweep = 4096);

struct DualSolverConfig {
    int seeds_per_dim = 64;    // deterministic seed directions per dimension
    double tol = 1e-12;        // refinement tolerance (angle / position)
    int table_size = 4096;     // 2D direction table resolution
    std::uint64_t seed = 9001; // seed-direction generator for dim >= 3
};

// Dual norm H0(xi) = sup_{x != 0} <xi, x> / H(x).
//
// Euclidean / Scaled1D / LinearMap duals are closed-form; everything else is
// a sphere-constrained maximization (golden section over the angle in 2D,
// multi-start projected ascent otherwise). The maximizer doubles as the dual
// gradient, so H(gradient(xi)) = 1 holds by construction. For 2D norms
// without a closed form a direction table is precomputed once so interior
// grid scans do not pay the solver cost per query.
class DualNorm {
  public:
    explicit DualNorm(MinkowskiNorm base, DualSolverConfig cfg = {});

    const MinkowskiNorm& base() const { return base_; }
    int dim() const { return base_.dim(); }
    bool closed_form() const { return closed_; }

    double value(const Eigen::VectorXd& xi) const;            // exact solver path
    Eigen::VectorXd gradient(const Eigen::VectorXd& xi) const;  // throws ZeroVector

    // Fast 2D path: closed form when available, otherwise the direction
    // table (relative error ~ (2pi/table)^2).
    double value2(double x, double y) const;

    // Count of queries where the ascent failed to improve on the seed grid
    // (the seed value is still returned).
    long stall_count() const { return *stalls_; }

  private:
    double solve_sup(const Eigen::VectorXd& xi, Eigen::VectorXd* maximizer) const;

    MinkowskiNorm base_;
    DualSolverConfig cfg_;
    bool closed_ = false;
    Eigen::MatrixXd Ainv_t_;   // LinearMap: A^{-T}
    Eigen::MatrixXd Ainv_;     // LinearMap: A^{-1}
    std::vector<double> table_;  // dim==2, numeric families
    Eigen::MatrixXd seed_dirs_;  // dim>=3
    std::shared_ptr<long> stalls_ = std::make_shared<long>(0);
};

struct CheckEntry {
    std::string name;
    bool pass = true;
    double worst = 0.0;      // worst normalized residual seen
    double tolerance = 0.0;  // pass iff worst <= tolerance (or >= for eig)
};

struct ValidityReport {
    std::string family;
    int dim = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<CheckEntry> checks;
    bool all_pass = true;

    const CheckEntry* find(const std::string& name) const;
};

// Sampled verification of the structural identities: positivity,
// homogeneity (positive scalings), Hessian min eigenvalue, triangle
// inequality, H-Hoelder, Euler identity, and the dual identities
// H0(grad H(x)) = 1 and H0(x) grad H(grad H0(x)) = x.
ValidityReport verify_minkowski(const MinkowskiNorm& H, int samples,
                                std::uint64_t seed = 12345);

}  // namespace finsler::norms
