#include "finsler/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finsler/quadrature.hpp"

namespace finsler::nl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fit_loglog_slope(const std::vector<double>& t, const std::vector<double>& v,
                        size_t lo, size_t hi) {
    // least-squares slope of log v against log t over [lo, hi]
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (size_t i = lo; i <= hi; ++i) {
        if (t[i] <= 0.0 || v[i] <= 0.0) continue;
        const double x = std::log(t[i]);
        const double y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 1.0;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 1.0;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

Nonlinearity Nonlinearity::power(double q, double p) {
    if (!(q > 0.0)) throw ConfigError("power nonlinearity: q must be positive");
    if (!(p >= 2.0)) throw ConfigError("nonlinearity: p >= 2 required");
    Nonlinearity nl;
    nl.is_power_ = true;
    nl.q_ = q;
    nl.p_ = p;
    return nl;
}

Nonlinearity Nonlinearity::tabulated(std::vector<std::pair<double, double>> points, double p) {
    if (!(p >= 2.0)) throw ConfigError("nonlinearity: p >= 2 required");
    if (points.size() < 4) throw ConfigError("tabulated nonlinearity: need at least 4 samples");
    std::sort(points.begin(), points.end());
    Nonlinearity nl;
    nl.is_power_ = false;
    nl.p_ = p;
    for (const auto& [t, v] : points) {
        if (t <= 0.0) {
            if (v != 0.0) throw ConfigError("tabulated nonlinearity: f(0) must be 0");
            continue;
        }
        if (!nl.t_.empty() && (t <= nl.t_.back() || v <= nl.fv_.back()))
            throw ConfigError("tabulated nonlinearity: samples must be strictly increasing");
        if (v <= 0.0) throw ConfigError("tabulated nonlinearity: f must be positive for t > 0");
        nl.t_.push_back(t);
        nl.fv_.push_back(v);
    }
    if (nl.t_.size() < 4) throw ConfigError("tabulated nonlinearity: need at least 4 samples");

    const size_t n = nl.t_.size();
    auto decade_range = [&](double lo, double hi) {
        size_t a = 0, b = n - 1;
        while (a < n - 1 && nl.t_[a] < lo) ++a;
        while (b > 0 && nl.t_[b] > hi) --b;
        return std::pair<size_t, size_t>(a, b);
    };
    auto [h0, h1] = decade_range(nl.t_.front(), 10.0 * nl.t_.front());
    auto [e0, e1] = decade_range(nl.t_.back() / 10.0, nl.t_.back());
    nl.head_exp_ = std::max(1e-6, fit_loglog_slope(nl.t_, nl.fv_, h0, std::max(h1, h0 + 1)));
    nl.tail_exp_ = std::max(1e-6, fit_loglog_slope(nl.t_, nl.fv_, std::min(e0, e1 - 1), e1));

    // cumulative primitive at knots: exact power head + exact trapezoids
    nl.cumF_.resize(n);
    nl.cumF_[0] = nl.fv_[0] * nl.t_[0] / (nl.head_exp_ + 1.0);
    for (size_t i = 1; i < n; ++i)
        nl.cumF_[i] =
            nl.cumF_[i - 1] + 0.5 * (nl.t_[i] - nl.t_[i - 1]) * (nl.fv_[i] + nl.fv_[i - 1]);
    return nl;
}

double Nonlinearity::f(double t) const {
    if (t < 0.0) throw NegativeInput("f: negative argument");
    if (t == 0.0) return 0.0;
    if (is_power_) return std::pow(t, q_);
    if (t <= t_.front()) return fv_.front() * std::pow(t / t_.front(), head_exp_);
    if (t >= t_.back()) return fv_.back() * std::pow(t / t_.back(), tail_exp_);
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const size_t i = static_cast<size_t>(it - t_.begin());
    const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return fv_[i - 1] + w * (fv_[i] - fv_[i - 1]);
}

double Nonlinearity::df(double t) const {
    if (t < 0.0) throw NegativeInput("df: negative argument");
    if (is_power_) {
        if (t == 0.0) return (q_ > 1.0) ? 0.0 : (q_ == 1.0 ? 1.0 : kInf);
        return q_ * std::pow(t, q_ - 1.0);
    }
    if (t <= t_.front())
        return (t > 0.0)
                   ? fv_.front() * head_exp_ * std::pow(t / t_.front(), head_exp_ - 1.0) / t_.front()
                   : 0.0;
    if (t >= t_.back())
        return fv_.back() * tail_exp_ * std::pow(t / t_.back(), tail_exp_ - 1.0) / t_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const size_t i = static_cast<size_t>(it - t_.begin());
    return (fv_[i] - fv_[i - 1]) / (t_[i] - t_[i - 1]);
}

double Nonlinearity::F(double t) const {
    if (t < 0.0) throw NegativeInput("F: negative argument");
    if (t == 0.0) return 0.0;
    if (is_power_) return std::pow(t, q_ + 1.0) / (q_ + 1.0);
    if (t <= t_.front())
        return fv_.front() * t_.front() / (head_exp_ + 1.0) *
               std::pow(t / t_.front(), head_exp_ + 1.0);
    if (t >= t_.back()) {
        const double m = tail_exp_;
        return cumF_.back() +
               fv_.back() * t_.back() / (m + 1.0) * (std::pow(t / t_.back(), m + 1.0) - 1.0);
    }
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const size_t i = static_cast<size_t>(it - t_.begin());
    const double fmid = f(t);
    return cumF_[i - 1] + 0.5 * (t - t_[i - 1]) * (fv_[i - 1] + fmid);
}

double Nonlinearity::tail_exponent() const {
    // median of log2 F(2s)/F(s) along doubling samples
    std::vector<double> est;
    double s = 1.0;
    for (int k = 0; k < 40; ++k, s *= 2.0) {
        const double a = F(s), b = F(2.0 * s);
        if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0) break;
        est.push_back(std::log2(b / a));
    }
    if (est.empty()) return kInf;
    const size_t keep = std::min<size_t>(10, est.size());
    std::vector<double> last(est.end() - keep, est.end());
    std::sort(last.begin(), last.end());
    return last[last.size() / 2];
}

double Nonlinearity::zero_exponent() const {
    std::vector<double> est;
    double s = 0.5;
    for (int k = 0; k < 40; ++k, s *= 0.5) {
        const double a = F(s), b = F(2.0 * s);
        if (a <= 0.0 || b <= 0.0) break;
        est.push_back(std::log2(b / a));
    }
    if (est.empty()) return 1.0;
    const size_t keep = std::min<size_t>(10, est.size());
    std::vector<double> last(est.end() - keep, est.end());
    std::sort(last.begin(), last.end());
    return last[last.size() / 2];
}

bool ko_holds(const Nonlinearity& nl) {
    const double alpha = nl.tail_exponent();
    return alpha > nl.p() + 1e-9 * std::max(1.0, nl.p());
}

namespace {

// integral_r^infty F(s)^{-1/p} ds with s = r/xi^m; m chosen from the tail
// exponent so the integrand is bounded at xi = 0.
double tail_integral(const Nonlinearity& nl, double r, double alpha) {
    const double p = nl.p();
    const double excess = alpha / p - 1.0;
    const int m = std::clamp(static_cast<int>(std::ceil(1.0 / excess)) + 1, 1, 256);
    auto integrand = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double s = r / std::pow(xi, m);
        const double Fs = nl.F(s);
        if (!std::isfinite(Fs)) return 0.0;
        const double w = std::pow(Fs, -1.0 / p);
        return r * m * std::pow(xi, -(double)m - 1.0) * w;
    };
    quad::AdaptiveOptions opt;
    opt.rel_tol = 1e-9;
    return quad::adaptive(integrand, 0.0, 1.0, opt);
}

// integral_lo^hi F(s)^{-1/p} ds where the only (integrable) singularity is
// at s = 0; s = xi^m with m matched to the endpoint exponent.
double head_integral(const Nonlinearity& nl, double hi, double alpha0) {
    const double p = nl.p();
    const double deficit = 1.0 - alpha0 / p;  // > 0 in the A2 case
    const int m =
        std::clamp(static_cast<int>(std::ceil(1.0 / std::max(deficit, 1e-3))) + 1, 1, 256);
    auto integrand = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double s = std::pow(xi, m);
        const double Fs = nl.F(s);
        if (Fs <= 0.0) return 0.0;
        return m * std::pow(xi, m - 1.0) * std::pow(Fs, -1.0 / p);
    };
    quad::AdaptiveOptions opt;
    opt.rel_tol = 1e-9;
    const double xihi = std::pow(hi, 1.0 / m);
    return quad::adaptive(integrand, 0.0, xihi, opt);
}

}  // namespace

double psi(const Nonlinearity& nl, double r) {
    if (!(r > 0.0)) throw NonpositiveInput("psi: r must be positive");
    if (!ko_holds(nl)) return kInf;
    const double p = nl.p();
    const double cp = std::pow((p - 1.0) / p, 1.0 / p);
    return cp * tail_integral(nl, r, nl.tail_exponent());
}

double power_psi_formula(double p, double q, double t) {
    if (!(q > p - 1.0)) return kInf;
    const double c = std::pow((p - 1.0) * (q + 1.0) / p, 1.0 / p) * p / (q + 1.0 - p);
    return c * std::pow(t, -(q + 1.0 - p) / p);
}

double power_phi_formula(double p, double q, double s) {
    const double beta = (q + 1.0 - p) / p;
    const double c = std::pow((p - 1.0) * (q + 1.0) / p, 1.0 / p) * p / (q + 1.0 - p);
    return std::pow(c / s, 1.0 / beta);
}

double phi(const Nonlinearity& nl, double s) {
    if (!(s > 0.0)) throw NonpositiveInput("phi: s must be positive");
    if (!ko_holds(nl)) throw DivergentIntegral("phi: (KO) fails, psi has no finite values");
    if (nl.is_power()) return power_phi_formula(nl.p(), nl.power_q(), s);

    // bracket [t_lo, t_hi] with psi(t_hi) <= s <= psi(t_lo)
    double t_hi = 1.0;
    int guard = 0;
    while (psi(nl, t_hi) > s) {
        t_hi *= 4.0;
        if (++guard > 220) throw BracketFail("phi: no upper bracket");
    }
    double t_lo = t_hi;
    guard = 0;
    while (psi(nl, t_lo) < s) {
        t_lo *= 0.25;
        if (++guard > 220)
            throw OutOfRange("phi: s exceeds the limit of psi at 0+ (A2 range)");
    }
    while (t_hi - t_lo > 1e-9 * t_hi) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (psi(nl, mid) > s)
            t_lo = mid;
        else
            t_hi = mid;
    }
    return 0.5 * (t_lo + t_hi);
}

OsgoodResult classify_osgood(const Nonlinearity& nl) {
    const double p = nl.p();
    const double alpha0 = nl.zero_exponent();

    // doubling partial integrals I_k = int_{2^-k}^1 F^{-1/p}
    const int kmax = 40;
    std::vector<double> inc;
    double total = 0.0;
    double hi = 1.0;
    bool exploded = false;
    for (int k = 1; k <= kmax; ++k) {
        const double lo = std::pow(2.0, -k);
        auto integrand = [&](double s) {
            const double Fs = nl.F(s);
            return (Fs > 0.0) ? std::pow(Fs, -1.0 / p) : 0.0;
        };
        quad::AdaptiveOptions opt;
        opt.rel_tol = 1e-10;
        const double d = quad::adaptive(integrand, lo, hi, opt);
        inc.push_back(d);
        total += d;
        hi = lo;
        if (total > 1e6) {
            exploded = true;
            break;
        }
    }

    // geometric-tail extrapolation of the partial values
    bool converged = false;
    double extrapolated = total;
    if (inc.size() >= 6) {
        const double d1 = inc[inc.size() - 2];
        const double d2 = inc[inc.size() - 1];
        if (d1 > 0.0) {
            const double rho = d2 / d1;
            if (rho < 0.999) {
                const double rem = d2 * rho / (1.0 - rho);
                extrapolated = total + rem;
                // Cauchy criterion on the accelerated sequence
                const double prev_rem = d1 * rho / (1.0 - rho);
                const double prev_extr = total - d2 + prev_rem;
                converged =
                    std::fabs(extrapolated - prev_extr) <= 1e-8 * (1.0 + std::fabs(extrapolated));
            }
        }
    }

    const bool exponent_a2 = alpha0 < p - 1e-6;
    const bool exponent_a1 = alpha0 > p - 1e-9;

    OsgoodResult out;
    if (exploded || (exponent_a1 && !converged)) {
        out.kind = Osgood::A1_diverges;
        return out;
    }
    if (converged && exponent_a2) {
        out.kind = Osgood::A2_converges;
        const double cp = std::pow((p - 1.0) / p, 1.0 / p);
        if (ko_holds(nl)) {
            const double head = head_integral(nl, 1.0, alpha0);
            const double tail = tail_integral(nl, 1.0, nl.tail_exponent());
            out.L_unit = cp * (head + tail);
        } else {
            out.L_unit = kInf;
        }
        return out;
    }
    throw Inconclusive("classify_osgood: partial integrals neither converge nor diverge");
}

double KOProfile::psi(double r) const { return nl::psi(*nl, r); }
double KOProfile::phi(double s) const { return nl::phi(*nl, s); }

KOProfile make_profile(const Nonlinearity& nl) {
    KOProfile prof;
    prof.nl = &nl;
    prof.ko_holds = ko_holds(nl);
    const OsgoodResult os = classify_osgood(nl);
    prof.osgood = os.kind;
    prof.L_unit = os.L_unit;
    return prof;
}

}  // namespace finsler::nl
