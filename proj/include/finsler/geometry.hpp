#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "finsler/norms.hpp"

namespace finsler::geom {

// Closed planar C^2 boundary given as dense ordered samples with tangents
// and curvatures, counterclockwise. Built-in shapes provide closed-form
// derivatives; arbitrary vertex lists get periodic finite-difference ones.
class Domain2D {
  public:
    // samples z_i on the curve, ordered CCW; tangents/curvatures per sample
    static Domain2D disk(double r, int samples = 4096);
    static Domain2D ellipse(double a, double b, int samples = 4096);
    // Wulff ball {H0(x) < r} of the given norm
    static Domain2D wulff(const norms::MinkowskiNorm& H, double r, int samples = 4096);
    static Domain2D from_vertices(const std::vector<Eigen::Vector2d>& pts);

    int size() const { return static_cast<int>(z_.size()); }
    const Eigen::Vector2d& point(int i) const { return z_[i]; }
    const Eigen::Vector2d& tangent(int i) const { return tau_[i]; }
    Eigen::Vector2d normal(int i) const;  // outward unit normal
    double curvature(int i) const { return kappa_[i]; }
    double max_curvature() const { return max_kappa_; }

    const Eigen::Vector2d& bbox_lo() const { return lo_; }
    const Eigen::Vector2d& bbox_hi() const { return hi_; }

    bool contains(const Eigen::Vector2d& x) const;  // point-in-polygon

    // local quadratic interpolation of the curve around sample i,
    // s in [-1, 1] measured in sample index units
    Eigen::Vector2d curve_at(int i, double s) const;

  private:
    void finalize();  // bbox, closure/self-intersection checks, curvature cap

    std::vector<Eigen::Vector2d> z_, tau_;
    std::vector<double> kappa_;
    Eigen::Vector2d lo_, hi_;
    double max_kappa_ = 0.0;
};

struct NearestPoint {
    double distance = 0.0;      // H0 distance
    Eigen::Vector2d z;          // nearest boundary point
    int sample_index = 0;
};

// Anisotropic distance field delta_H0(x) = min_z H0(x - z) over the
// boundary, by global sample scan plus golden-section refinement in the
// curve parameter. Immutable after construction; concurrent queries are
// fine (the optional grid cache is built once in the constructor).
class AnisotropicDistanceField {
  public:
    AnisotropicDistanceField(Domain2D domain, norms::DualNorm dual);

    const Domain2D& domain() const { return *domain_; }
    const norms::DualNorm& dual() const { return *dual_; }

    // throws OutsideDomain for exterior points
    NearestPoint query(const Eigen::Vector2d& x) const;
    double operator()(const Eigen::Vector2d& x) const { return query(x).distance; }

    // scan without the interior precondition (used for level-set work)
    NearestPoint nearest_boundary(const Eigen::Vector2d& x) const;

    // uniform interior/exterior Wulff-ball radius estimate (validated by
    // interior_exterior_balls); mu = half of it bounds the C^2 tube
    double uniform_ball_radius() const { return ball_radius_; }
    double tube_width_mu() const { return 0.5 * ball_radius_; }

  private:
    std::shared_ptr<const Domain2D> domain_;
    std::shared_ptr<const norms::DualNorm> dual_;
    double ball_radius_ = 0.0;
};

// Centers of the interior/exterior Wulff balls touching the boundary only
// at z (fixed-point iteration on x = z + R grad H(grad delta_H0), started
// from the Euclidean normal offset; verified by a discrete touching
// check). Throws BallViolation when R is too large for the domain.
std::pair<Eigen::Vector2d, Eigen::Vector2d> interior_exterior_balls(
    const AnisotropicDistanceField& field, int boundary_index, double R);

struct TubePoint {
    Eigen::Vector2d x;
    double delta = 0.0;
};

// Grid points of spacing grid_h inside the domain with delta_H0 < width.
std::vector<TubePoint> tube(const AnisotropicDistanceField& field, double width,
                            double grid_h);

}  // namespace finsler::geom
