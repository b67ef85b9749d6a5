#include "finsler/ode1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finsler/quadrature.hpp"

namespace finsler::ode1d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cp_of(double p) { return std::pow((p - 1.0) / p, 1.0 / p); }

// int_lo^inf {F(s+t) - F(t)}^{-1/p} ds, lo > 0, via s = lo / xi^m.
double shifted_tail(const nl::Nonlinearity& nl, double t, double lo, double p) {
    const double alpha = nl.tail_exponent();
    const double excess = alpha / p - 1.0;
    const int m = std::clamp(static_cast<int>(std::ceil(1.0 / excess)) + 1, 1, 256);
    const double Ft = nl.F(t);
    auto integrand = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double s = lo / std::pow(xi, m);
        const double d = nl.F(s + t) - Ft;
        if (!std::isfinite(d) || d <= 0.0) return 0.0;
        return lo * m * std::pow(xi, -(double)m - 1.0) * std::pow(d, -1.0 / p);
    };
    quad::AdaptiveOptions opt;
    opt.rel_tol = 1e-9;
    return quad::adaptive(integrand, 0.0, 1.0, opt);
}

}  // namespace

double ell_of_t(const Interval1DProblem& prob, double t) {
    if (!(t > 0.0)) throw NonpositiveInput("ell_of_t: t must be positive");
    const auto& f = prob.nonlinearity;
    if (!nl::ko_holds(f))
        throw DivergentIntegral("ell_of_t: (KO) fails, the existence integral diverges");
    const double p = prob.p();
    const double Ft = f.F(t);
    const double s0 = std::max(t, 1.0);

    // near field: s = sigma^2 removes the {F(s+t)-F(t)} ~ f(t) s root
    auto near_integrand = [&](double sigma) {
        const double s = sigma * sigma;
        const double d = f.F(s + t) - Ft;
        if (d <= 0.0) return 0.0;
        return 2.0 * sigma * std::pow(d, -1.0 / p);
    };
    quad::AdaptiveOptions opt;
    opt.rel_tol = 1e-9;
    const double near = quad::adaptive(near_integrand, 0.0, std::sqrt(s0), opt);
    const double far = shifted_tail(f, t, s0, p);
    return prob.gamma * cp_of(p) * (near + far);
}

double solve_v0(const Interval1DProblem& prob, double delta) {
    if (!(delta > 0.0)) throw NonpositiveInput("solve_v0: delta must be positive");

    double t_lo = 1.0, t_hi = 1.0;  // ell(t_lo) >= delta >= ell(t_hi)
    double e = ell_of_t(prob, 1.0);
    int guard = 0;
    if (e >= delta) {
        t_hi = 1.0;
        while (ell_of_t(prob, t_hi) > delta) {
            t_hi *= 2.0;
            if (++guard > 60) throw BracketFail("solve_v0: no bracket above t = 2^60");
        }
        t_lo = t_hi * 0.5;
    } else {
        t_lo = 1.0;
        double prev = e;
        while ((e = ell_of_t(prob, t_lo)) < delta) {
            // under (A2) ell is bounded by L; detect saturation of the limit
            if (++guard > 60) {
                const auto os = nl::classify_osgood(prob.nonlinearity);
                if (os.kind == nl::Osgood::A2_converges)
                    throw NoRoot("solve_v0: delta exceeds the A2 collar length L");
                throw BracketFail("solve_v0: no bracket below t = 2^-60");
            }
            if (guard > 20 && e - prev < 1e-12 * delta)
                throw NoRoot("solve_v0: delta exceeds the A2 collar length L");
            prev = e;
            t_lo *= 0.5;
        }
        t_hi = t_lo * 2.0;
    }

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (t_lo + t_hi);
        const double em = ell_of_t(prob, mid);
        if (std::fabs(em - delta) <= 1e-9 * delta) return mid;
        if (em > delta)
            t_lo = mid;
        else
            t_hi = mid;
        if (t_hi - t_lo <= 1e-14 * t_hi) break;
    }
    return 0.5 * (t_lo + t_hi);
}

LargeSolution1D::LargeSolution1D(Interval1DProblem prob, double c_m, double v0,
                                 std::optional<std::pair<double, double>> flat_zone)
    : prob_(std::move(prob)), c_m_(c_m), v0_(v0), flat_zone_(std::move(flat_zone)),
      cp_(cp_of(prob_.p())) {}

double LargeSolution1D::inner_integral(double u) const {
    // int_{v0}^{u} {F(s) - F(v0)}^{-1/p} ds, cached incrementally
    const auto& f = prob_.nonlinearity;
    const double p = prob_.p();
    const double Fv0 = f.F(v0_);
    quad::AdaptiveOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-13;

    auto regular = [&](double s) {
        const double d = f.F(s) - Fv0;
        return (d > 0.0) ? std::pow(d, -1.0 / p) : 0.0;
    };

    const double base_hi = v0_ + std::max(v0_, 1.0);
    std::scoped_lock lk(cache_->mu);
    auto& g = cache_->g;

    double u_from = v0_, g_from = 0.0;
    auto it = g.upper_bound(u);
    if (it != g.begin()) {
        --it;
        u_from = it->first;
        g_from = it->second;
    }
    double total = g_from;
    if (u_from == v0_) {
        // base segment with the s = v0 + sigma^2 substitution
        const double stop = std::min(u, base_hi);
        auto near_integrand = [&](double sigma) {
            const double d = f.F(v0_ + sigma * sigma) - Fv0;
            return (d > 0.0) ? 2.0 * sigma * std::pow(d, -1.0 / p) : 0.0;
        };
        total += quad::adaptive(near_integrand, 0.0, std::sqrt(stop - v0_), opt);
        u_from = stop;
    }
    if (u > u_from) total += quad::adaptive(regular, u_from, u, opt);
    g.emplace(u, total);
    return total;
}

double LargeSolution1D::invert_from_min(double xi) const {
    if (xi <= 0.0) return v0_;
    const double scale = prob_.gamma * cp_;
    const double target = xi / scale;

    double u_hi = v0_ + std::max(v0_, 1.0);
    int guard = 0;
    while (inner_integral(u_hi) < target) {
        u_hi = v0_ + 2.0 * (u_hi - v0_);
        if (++guard > 2000) throw BracketFail("profile inversion: no upper bracket");
    }
    double u_lo = v0_;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (u_lo + u_hi);
        const double gm = inner_integral(mid);
        if (std::fabs(gm - target) <= 1e-12 * (1.0 + target) && it > 8) return mid;
        if (gm < target)
            u_lo = mid;
        else
            u_hi = mid;
        if (u_hi - u_lo <= 1e-13 * (1.0 + u_hi)) break;
    }
    return 0.5 * (u_lo + u_hi);
}

double LargeSolution1D::invert_collar(double xi) const {
    // collar profile from a zero junction: gamma cp int_0^{u} F^{-1/p} = xi
    if (xi <= 0.0) return 0.0;
    const auto& f = prob_.nonlinearity;
    const double p = prob_.p();
    const double alpha0 = f.zero_exponent();
    const double deficit = 1.0 - alpha0 / p;
    const int m =
        std::clamp(static_cast<int>(std::ceil(1.0 / std::max(deficit, 1e-3))) + 1, 1, 256);
    auto K = [&](double v) {
        auto integrand = [&](double sigma) {
            if (sigma <= 0.0) return 0.0;
            const double Fs = f.F(std::pow(sigma, m));
            return (Fs > 0.0) ? m * std::pow(sigma, m - 1.0) * std::pow(Fs, -1.0 / p) : 0.0;
        };
        quad::AdaptiveOptions opt;
        opt.rel_tol = 1e-10;
        return prob_.gamma * cp_ * quad::adaptive(integrand, 0.0, std::pow(v, 1.0 / m), opt);
    };
    double v_hi = 1.0;
    int guard = 0;
    while (K(v_hi) < xi) {
        v_hi *= 2.0;
        if (++guard > 400) throw BracketFail("collar inversion: no upper bracket");
    }
    double v_lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (v_lo + v_hi);
        const double km = K(mid);
        if (std::fabs(km - xi) <= 1e-12 * (1.0 + xi) && it > 8) return mid;
        if (km < xi)
            v_lo = mid;
        else
            v_hi = mid;
        if (v_hi - v_lo <= 1e-13 * (1.0 + v_hi)) break;
    }
    return 0.5 * (v_lo + v_hi);
}

double LargeSolution1D::eval(double x) const {
    if (!(x > prob_.a && x < prob_.b))
        throw OutOfRange("LargeSolution1D::eval: x outside (a,b)");
    if (flat_zone_) {
        const auto [z0, z1] = *flat_zone_;
        if (x >= z0 && x <= z1) return 0.0;
        if (x > z1) return invert_collar(x - z1);
        return invert_collar(z0 - x);
    }
    return invert_from_min(std::fabs(x - c_m_));
}

LargeSolution1D solve_interval(const Interval1DProblem& prob) {
    if (!(prob.a < prob.b)) throw ConfigError("solve_interval: need a < b");
    const auto& f = prob.nonlinearity;
    if (!nl::ko_holds(f))
        throw DivergentIntegral("solve_interval: (KO) fails, no blow-up profile exists");
    const double delta = prob.half_width();
    const double c = prob.center();

    const auto os = nl::classify_osgood(f);
    if (os.kind == nl::Osgood::A2_converges) {
        const double L = prob.gamma * os.L_unit.value();
        if (delta >= L * (1.0 - 1e-9)) {
            // flat zero zone [a+L, b-L] with implicit collars on both sides
            const double z0 = std::min(prob.a + L, c);
            const double z1 = std::max(prob.b - L, c);
            return LargeSolution1D(prob, c, 0.0, std::make_pair(z0, z1));
        }
    }
    const double v0 = solve_v0(prob, delta);
    return LargeSolution1D(prob, c, v0, std::nullopt);
}

std::vector<AsymRow> asym_check_1d(const LargeSolution1D& sol,
                                   std::span<const double> margins) {
    const auto& prob = sol.problem();
    std::vector<AsymRow> rows;
    rows.reserve(margins.size());
    for (const double m : margins) {
        AsymRow row;
        row.delta = m;
        const double ul = sol.eval(prob.a + m);
        const double ur = sol.eval(prob.b - m);
        row.ratio_left = prob.gamma * nl::psi(prob.nonlinearity, ul) / m;
        row.ratio_right = prob.gamma * nl::psi(prob.nonlinearity, ur) / m;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace finsler::ode1d
