#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler::nl {

// Absorption nonlinearity f: continuous, strictly increasing, f(0) = 0,
// f -> infinity; bundled with the operator exponent p >= 2 because every
// growth functional (F, the blow-up profile and its inverse) depends on both.
//
// Power(q):      f(t) = t^q, closed-form primitive.
// Tabulated:     strictly increasing samples, linear interpolation, power-law
//                extrapolation fitted to the first/last decade of samples.
class Nonlinearity {
  public:
    static Nonlinearity power(double q, double p);
    static Nonlinearity tabulated(std::vector<std::pair<double, double>> points, double p);

    double p() const { return p_; }
    bool is_power() const { return is_power_; }
    double power_q() const { return q_; }

    double f(double t) const;   // throws NegativeInput for t < 0
    double df(double t) const;  // one-sided slope at knots
    double F(double t) const;   // primitive with F(0) = 0

    // Numeric growth exponents alpha such that F(s) ~ c s^alpha, estimated
    // from doubling samples (exact for powers).
    double tail_exponent() const;
    double zero_exponent() const;

    const std::vector<double>& knots_t() const { return t_; }
    const std::vector<double>& knots_f() const { return fv_; }

  private:
    Nonlinearity() = default;

    bool is_power_ = true;
    double q_ = 1.0;
    double p_ = 2.0;
    // tabulated representation
    std::vector<double> t_, fv_, cumF_;
    double head_exp_ = 1.0;  // f ~ f1 (t/t1)^head_exp below the first knot
    double tail_exp_ = 1.0;  // f ~ fN (t/tN)^tail_exp beyond the last knot
};

enum class Osgood { A1_diverges, A2_converges };

// ((p-1)/p)^{1/p} * integral_r^infty F(s)^{-1/p} ds via the s = r/u
// substitution plus an exponent-matched power map that removes the endpoint
// singularity. Returns +infinity when the tail growth test says the
// integral diverges.
double psi(const Nonlinearity& nl, double r);

// Inverse of psi. Closed form for powers, bisection otherwise. Throws
// OutOfRange when s exceeds the (finite) limit of psi at 0+.
double phi(const Nonlinearity& nl, double s);

// Tail test: does psi converge (integral at infinity finite)?
bool ko_holds(const Nonlinearity& nl);

struct OsgoodResult {
    Osgood kind = Osgood::A1_diverges;
    // gamma = 1 value of ((p-1)/p)^{1/p} int_0^inf F^{-1/p}; +inf when the
    // tail diverges. Present only in the A2 case.
    std::optional<double> L_unit;
};

// Classifies the integrability of F^{-1/p} at 0+ from doubling partial
// integrals (Richardson-accelerated) corroborated by the numeric endpoint
// exponent. Throws Inconclusive when the two signals disagree.
OsgoodResult classify_osgood(const Nonlinearity& nl);

struct KOProfile {
    bool ko_holds = false;
    Osgood osgood = Osgood::A1_diverges;
    std::optional<double> L_unit;
    const Nonlinearity* nl = nullptr;

    double psi(double r) const;
    double phi(double s) const;
};

KOProfile make_profile(const Nonlinearity& nl);

// Closed-form profile for f(t) = t^q (test oracle and fast path):
// psi(t) = ((p-1)(q+1)/p)^{1/p} * p/(q+1-p) * t^{-(q+1-p)/p}
double power_psi_formula(double p, double q, double t);
double power_phi_formula(double p, double q, double s);

}  // namespace finsler::nl
