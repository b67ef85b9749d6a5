#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "finsler/nonlinearity.hpp"

namespace finsler::ode1d {

// gamma^p (|u'|^{p-2} u')' = f(u) on (a,b), u -> infinity at both endpoints.
// In one dimension every Minkowski norm is H(t) = gamma |t|.
struct Interval1DProblem {
    double a = 0.0, b = 1.0;
    double gamma = 1.0;
    nl::Nonlinearity nonlinearity;

    double p() const { return nonlinearity.p(); }
    double half_width() const { return 0.5 * (b - a); }
    double center() const { return 0.5 * (a + b); }
};

// Half-length of the maximal existence interval as a function of the
// minimum value t:
//   ell(t) = gamma ((p-1)/p)^{1/p} int_0^inf ds / {F(s+t) - F(t)}^{1/p}
// The s = sigma^2 substitution removes the algebraic singularity at s = 0;
// the far end is mapped to a bounded interval with an exponent-matched
// power substitution. Throws DivergentIntegral when (KO) fails.
double ell_of_t(const Interval1DProblem& prob, double t);

// Root of ell(t0) = delta by bracketed bisection (ell is strictly
// decreasing). Throws NoRoot when delta exceeds the A2 collar length L,
// BracketFail when auto-bracketing exhausts the 2^{+-60} range.
double solve_v0(const Interval1DProblem& prob, double delta);

// Blow-up profile on (a,b): minimum v0 at c_m, evaluated on demand by
// inverting the implicit integral
//   gamma ((p-1)/p)^{1/p} int_{v0}^{u(x)} ds/{F(s)-F(v0)}^{1/p} = |x - c_m|.
// Immutable after construction; eval is reentrant (mutex-guarded
// insert-once quadrature cache).
class LargeSolution1D {
  public:
    LargeSolution1D(Interval1DProblem prob, double c_m, double v0,
                    std::optional<std::pair<double, double>> flat_zone);

    double c_m() const { return c_m_; }
    double v0() const { return v0_; }
    const std::optional<std::pair<double, double>>& flat_zone() const { return flat_zone_; }
    const Interval1DProblem& problem() const { return prob_; }

    double eval(double x) const;

  private:
    double invert_from_min(double xi) const;   // xi = |x - c_m|
    double invert_collar(double xi) const;     // A2 collar, u(junction) = 0
    double inner_integral(double u) const;     // int_{v0}^{u} {F - F(v0)}^{-1/p}

    Interval1DProblem prob_;
    double c_m_ = 0.0, v0_ = 0.0;
    std::optional<std::pair<double, double>> flat_zone_;
    double cp_ = 0.0;  // ((p-1)/p)^{1/p}

    struct Cache {
        std::mutex mu;
        std::map<double, double> g;  // u -> inner integral value
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Full construction: symmetric profile around the interval center, or the
// flat-zone profile when (A2) holds and b - a > 2L.
LargeSolution1D solve_interval(const Interval1DProblem& prob);

struct AsymRow {
    double delta = 0.0;       // distance to the endpoint
    double ratio_left = 0.0;  // gamma * psi(u(a+delta)) / delta
    double ratio_right = 0.0; // gamma * psi(u(b-delta)) / delta
};

// Boundary-asymptotics table: the ratios approach 1 as delta -> 0.
std::vector<AsymRow> asym_check_1d(const LargeSolution1D& sol,
                                   std::span<const double> margins);

}  // namespace finsler::ode1d
