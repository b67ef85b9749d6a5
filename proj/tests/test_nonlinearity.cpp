#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "finsler/nonlinearity.hpp"

using namespace finsler;
using nl::Nonlinearity;

namespace {

// Inline restatement of the closed-form blow-up profile for f(t) = t^q,
// kept in the test so the quadrature path is checked against an
// independent expression.
double psi_formula(double p, double q, double t) {
    return std::pow((p - 1.0) * (q + 1.0) / p, 1.0 / p) * p / (q + 1.0 - p) *
           std::pow(t, -(q + 1.0 - p) / p);
}

Nonlinearity table_power(double q, double p, double t_lo = 2e-4, double t_hi = 64.0,
                         int per_decade = 2200) {
    std::vector<std::pair<double, double>> pts;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    for (double t = t_lo; t <= t_hi * (1.0 + 1e-12); t *= ratio)
        pts.emplace_back(t, std::pow(t, q));
    return Nonlinearity::tabulated(pts, p);
}

}  // namespace

TEST_CASE("primitive F") {
    const auto f = Nonlinearity::power(3.0, 2.0);
    CHECK(f.F(2.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(f.F(0.0) == 0.0);
    CHECK_THROWS_AS(f.F(-1.0), NegativeInput);

    // tabulated cubic on a uniform grid
    std::vector<std::pair<double, double>> pts;
    for (int k = 1; k <= 8000; ++k) {
        const double t = 5e-4 * k;
        pts.emplace_back(t, t * t * t);
    }
    const auto tab = Nonlinearity::tabulated(pts, 2.0);
    CHECK(tab.F(2.0) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("psi: paper values and quadrature vs closed form") {
    const auto f23 = Nonlinearity::power(3.0, 2.0);
    CHECK(nl::psi(f23, 2.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-8));

    // q = p-1 fails (KO): +inf sentinel
    const auto f21 = Nonlinearity::power(1.0, 2.0);
    CHECK(std::isinf(nl::psi(f21, 1.0)));
    const auto f2h = Nonlinearity::power(0.5, 2.0);
    CHECK(std::isinf(nl::psi(f2h, 1.0)));

    const auto f35 = Nonlinearity::power(5.0, 3.0);
    CHECK(nl::psi(f35, 1.0) == doctest::Approx(std::pow(4.0, 1.0 / 3.0)).epsilon(1e-8));

    for (double p : {2.0, 3.0, 4.0}) {
        for (double q : {p - 0.5, p, 2.0 * p}) {
            const auto f = Nonlinearity::power(q, p);
            for (double r : {0.1, 1.0, 10.0}) {
                CHECK(nl::psi(f, r) == doctest::Approx(psi_formula(p, q, r)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("psi is strictly decreasing where finite") {
    const auto f = Nonlinearity::power(3.0, 2.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
        const double v = nl::psi(f, r);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(nl::psi(f, 0.0), NonpositiveInput);
}

TEST_CASE("phi: closed form, round trip, bisection path") {
    const auto f23 = Nonlinearity::power(3.0, 2.0);
    CHECK(nl::phi(f23, 0.1) == doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(nl::phi(f23, nl::psi(f23, 5.0)) == doctest::Approx(5.0).epsilon(1e-8));

    // tabulated t^5 forces the bisection path; compare with the closed form
    const auto tab = table_power(5.0, 3.0);
    CHECK(nl::phi(tab, 0.5) ==
          doctest::Approx(nl::power_phi_formula(3.0, 5.0, 0.5)).epsilon(1e-4));
    const auto f35 = Nonlinearity::power(5.0, 3.0);
    CHECK(nl::phi(f35, 0.5) ==
          doctest::Approx(nl::power_phi_formula(3.0, 5.0, 0.5)).epsilon(1e-12));
}

TEST_CASE("osgood classification") {
    // near 0: F^{-1/2} ~ 2 s^{-2} diverges
    const auto a1 = nl::classify_osgood(Nonlinearity::power(3.0, 2.0));
    CHECK(a1.kind == nl::Osgood::A1_diverges);
    CHECK_FALSE(a1.L_unit.has_value());

    // (q+1)/p = 0.75 < 1 converges near zero (tail still diverges -> L = inf)
    const auto a2 = nl::classify_osgood(Nonlinearity::power(0.5, 2.0));
    CHECK(a2.kind == nl::Osgood::A2_converges);
    REQUIRE(a2.L_unit.has_value());
    CHECK(std::isinf(*a2.L_unit));
}

TEST_CASE("ko classifier matches the analytic rule q > p-1") {
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        for (double dq : {-0.2, 0.0, 0.2}) {
            const double q = p - 1.0 + dq;
            if (q <= 0.0) continue;
            CHECK(nl::ko_holds(Nonlinearity::power(q, p)) == (dq > 0.0));
        }
        CHECK(nl::ko_holds(Nonlinearity::power(2.0 * p, p)));
    }
}

TEST_CASE("A2-with-KO piecewise nonlinearity has a finite collar length") {
    // f ~ t^{1/2} near zero (dead core scale), ~ t^3 at infinity (blow-up
    // scale); the tabulated kind with power extrapolation represents it.
    std::vector<std::pair<double, double>> pts;
    const double ratio = std::pow(10.0, 1.0 / 600.0);
    for (double t = 1e-8; t <= 1e3; t *= ratio)
        pts.emplace_back(t, t <= 1.0 ? std::sqrt(t) : t * t * t);
    const auto f = Nonlinearity::tabulated(pts, 2.0);

    CHECK(nl::ko_holds(f));
    const auto os = nl::classify_osgood(f);
    CHECK(os.kind == nl::Osgood::A2_converges);
    REQUIRE(os.L_unit.has_value());
    CHECK(std::isfinite(*os.L_unit));

    // direct check of the collar integral against a dense midpoint sum
    const double p = 2.0;
    double direct = 0.0;
    {
        const int n = 400000;
        // s = sigma^4 resolves the s^{-3/4} endpoint
        const double hi = std::pow(50.0, 0.25);
        const double h = hi / n;
        for (int k = 0; k < n; ++k) {
            const double sg = (k + 0.5) * h;
            const double s = sg * sg * sg * sg;
            direct += 4.0 * sg * sg * sg * std::pow(f.F(s), -0.5) * h;
        }
        // tail beyond 50 from the quadrature-backed profile
        direct += nl::psi(f, 50.0) / std::pow((p - 1.0) / p, 1.0 / p);
    }
    const double L_direct = std::pow((p - 1.0) / p, 1.0 / p) * direct;
    CHECK(*os.L_unit == doctest::Approx(L_direct).epsilon(1e-4));
}
