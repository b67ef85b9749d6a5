#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "finsler/nonlinearity.hpp"
#include "finsler/norms.hpp"
#include "finsler/ode1d.hpp"

namespace finsler::radial {

// Radially symmetric problems in the dual norm H0: the blow-up profile w
// solves (t^{n-1} |w'|^{p-2} w')' = t^{n-1} f(w) with w = k at the blow-up
// end, driven to the large solution by doubling k.

struct WulffBallProblem {
    Eigen::VectorXd center;
    double R = 1.0;
    int dim = 2;
    norms::MinkowskiNorm norm = norms::MinkowskiNorm::euclidean(2);
    nl::Nonlinearity nonlinearity = nl::Nonlinearity::power(3.0, 2.0);
};

struct AnnulusProblem {
    Eigen::VectorXd center;
    double R1 = 1.0, R2 = 2.0;
    int dim = 2;
    norms::MinkowskiNorm norm = norms::MinkowskiNorm::euclidean(2);
    nl::Nonlinearity nonlinearity = nl::Nonlinearity::power(3.0, 2.0);
};

enum class BlowupEnd { Left, Right, Both };

struct RadialProfile {
    std::vector<double> t;  // strictly increasing grid
    std::vector<double> w;  // nonnegative values
    BlowupEnd blowup_end = BlowupEnd::Left;
    std::optional<double> k_ceiling;  // present for finite-k approximants
    bool converged = true;

    // monotone piecewise-linear interpolation on the grid
    double eval(double tq) const;
};

// 1D symmetric blow-up profile omega on (0, 2R) with gamma = 1; the radial
// barrier building block.
ode1d::LargeSolution1D solve_omega(double R, const nl::Nonlinearity& nonlinearity);

// v(x) = omega(R - H0(x - center)): radial supersolution on the Wulff ball.
// Construct once, evaluate many times.
class WulffBarrier {
  public:
    explicit WulffBarrier(WulffBallProblem prob);
    double eval(const Eigen::VectorXd& x) const;  // throws OutsideBall
    double bound_at_half_radius() const;          // omega(R/2)
    const WulffBallProblem& problem() const { return prob_; }

  private:
    WulffBallProblem prob_;
    norms::DualNorm dual_;
    ode1d::LargeSolution1D omega_;
};

double wulff_barrier(const WulffBallProblem& prob, const Eigen::VectorXd& x);

// Graded mesh on [lo, hi] with algebraic clustering (exponent 3) at one end.
std::vector<double> graded_grid(double lo, double hi, int cells, bool cluster_left);

// Discrete radial operator (t^{n-1} phi_eps(w'))' / cell width at the
// interior nodes of the grid (exposed for the manufactured-solution check).
std::vector<double> apply_radial_operator(const std::vector<double>& t,
                                          const std::vector<double>& w, double p, int n,
                                          double eps);

// Two-point problem w(R1) = k, w(R2) = 0 on a grid clustered at R1.
// Newton on the conservative finite-difference residual with the
// (|w'|^2 + eps^2)^{(p-2)/2} w' regularized flux. cells = 0 picks a default.
RadialProfile solve_annulus_k(const AnnulusProblem& prob, double k, int cells = 0,
                              const RadialProfile* init = nullptr);

// Doubling k until the interior subgrid { t >= R1 + (R2-R1)/20 } stops
// moving (sup change < 1e-6). Throws NoConvergence after 40 doublings.
RadialProfile solve_annulus_large(const AnnulusProblem& prob, int cells = 0);

// Ball profile on (0, R): symmetric flux at t = 0, w(R) = k at the blow-up
// end, grid clustered at R.
RadialProfile solve_ball_k(const WulffBallProblem& prob, double k, int cells = 0,
                           const RadialProfile* init = nullptr);
RadialProfile solve_ball_large(const WulffBallProblem& prob, int cells = 0);

struct AnnulusAsymRow {
    double dist = 0.0;   // t - R1
    double ratio = 0.0;  // psi(w(t)) / (t - R1)
};

// Ratios along the grid approaching R1 (blowup_end must be Left).
std::vector<AnnulusAsymRow> annulus_asym_check(const RadialProfile& profile,
                                               const nl::Nonlinearity& nonlinearity,
                                               double R1, double max_dist = 0.25);

}  // namespace finsler::radial
