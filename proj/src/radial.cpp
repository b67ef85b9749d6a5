#include "finsler/radial.hpp"

#include <algorithm>
#include <cmath>

namespace finsler::radial {

namespace {

inline double phi_eps(double d, double p, double eps) {
    if (p == 2.0) return d;
    return std::pow(d * d + eps * eps, 0.5 * (p - 2.0)) * d;
}

inline double dphi_eps(double d, double p, double eps) {
    if (p == 2.0) return 1.0;
    return std::pow(d * d + eps * eps, 0.5 * (p - 4.0)) * ((p - 1.0) * d * d + eps * eps);
}

// Conservative residual and tridiagonal Jacobian for
//   (t^{n-1} phi(w'))' = t^{n-1} f(w)
// on a fixed grid with Dirichlet values in w[0], w[M] (left_neumann trades
// the left Dirichlet row for a zero-flux condition at t = 0).
struct RadialSystem {
    const std::vector<double>* t;
    int n;
    double p, eps;
    const nl::Nonlinearity* f;
    bool left_neumann = false;

    int first_unknown() const { return left_neumann ? 0 : 1; }
    int last_unknown() const { return static_cast<int>(t->size()) - 2; }

    double cell_volume(int i) const {
        const auto& tt = *t;
        const int M = static_cast<int>(tt.size()) - 1;
        const double lo = (i == 0) ? tt[0] : 0.5 * (tt[i - 1] + tt[i]);
        const double hi = (i == M) ? tt[M] : 0.5 * (tt[i] + tt[i + 1]);
        return (std::pow(hi, n) - std::pow(lo, n)) / n;
    }

    void residual(const std::vector<double>& w, std::vector<double>& res,
                  std::vector<double>& scale) const {
        const auto& tt = *t;
        const int M = static_cast<int>(tt.size()) - 1;
        res.assign(M + 1, 0.0);
        scale.assign(M + 1, 1.0);
        for (int i = first_unknown(); i <= last_unknown(); ++i) {
            double flux_hi = 0.0, flux_lo = 0.0;
            {
                const double h = tt[i + 1] - tt[i];
                const double tm = 0.5 * (tt[i] + tt[i + 1]);
                flux_hi = std::pow(tm, n - 1) * phi_eps((w[i + 1] - w[i]) / h, p, eps);
            }
            if (i > 0) {
                const double h = tt[i] - tt[i - 1];
                const double tm = 0.5 * (tt[i - 1] + tt[i]);
                flux_lo = std::pow(tm, n - 1) * phi_eps((w[i] - w[i - 1]) / h, p, eps);
            }
            const double vol = cell_volume(i);
            const double src = f->f(std::max(w[i], 0.0)) * vol;
            res[i] = (flux_hi - flux_lo) - src;
            scale[i] = 1.0 + std::fabs(flux_hi) + std::fabs(flux_lo) + std::fabs(src);
        }
    }

    // tridiagonal Newton matrix rows for the unknowns
    void jacobian(const std::vector<double>& w, std::vector<double>& lo,
                  std::vector<double>& di, std::vector<double>& hi) const {
        const auto& tt = *t;
        const int M = static_cast<int>(tt.size()) - 1;
        lo.assign(M + 1, 0.0);
        di.assign(M + 1, 0.0);
        hi.assign(M + 1, 0.0);
        for (int i = first_unknown(); i <= last_unknown(); ++i) {
            const double h_hi = tt[i + 1] - tt[i];
            const double tm_hi = 0.5 * (tt[i] + tt[i + 1]);
            const double a_hi =
                std::pow(tm_hi, n - 1) * dphi_eps((w[i + 1] - w[i]) / h_hi, p, eps) / h_hi;
            double a_lo = 0.0;
            if (i > 0) {
                const double h_lo = tt[i] - tt[i - 1];
                const double tm_lo = 0.5 * (tt[i - 1] + tt[i]);
                a_lo = std::pow(tm_lo, n - 1) * dphi_eps((w[i] - w[i - 1]) / h_lo, p, eps) / h_lo;
            }
            const double vol = cell_volume(i);
            di[i] = -(a_hi + a_lo) - f->df(std::max(w[i], 0.0)) * vol;
            hi[i] = a_hi;
            lo[i] = a_lo;
        }
    }
};

void thomas_solve(std::vector<double>& lo, std::vector<double>& di, std::vector<double>& hi,
                  std::vector<double>& rhs, int i0, int i1) {
    for (int i = i0 + 1; i <= i1; ++i) {
        const double m = lo[i] / di[i - 1];
        di[i] -= m * hi[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[i1] /= di[i1];
    for (int i = i1 - 1; i >= i0; --i) rhs[i] = (rhs[i] - hi[i] * rhs[i + 1]) / di[i];
}

// Damped Newton on the radial system. Returns true when the scaled sup
// residual drops below tol.
bool newton_radial(const RadialSystem& sys, std::vector<double>& w, double tol,
                   int max_iter) {
    std::vector<double> res, scale, lo, di, hi, rhs;
    const int i0 = sys.first_unknown(), i1 = sys.last_unknown();
    double prev_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        sys.residual(w, res, scale);
        double norm = 0.0;
        for (int i = i0; i <= i1; ++i) norm = std::max(norm, std::fabs(res[i]) / scale[i]);
        if (norm <= tol) return true;
        sys.jacobian(w, lo, di, hi);
        rhs = res;
        for (int i = i0; i <= i1; ++i) rhs[i] = -rhs[i];
        thomas_solve(lo, di, hi, rhs, i0, i1);
        double alpha = 1.0;
        std::vector<double> trial = w;
        for (int ls = 0; ls < 40; ++ls) {
            for (int i = i0; i <= i1; ++i) trial[i] = std::max(w[i] + alpha * rhs[i], 0.0);
            std::vector<double> tres, tscale;
            sys.residual(trial, tres, tscale);
            double tnorm = 0.0;
            for (int i = i0; i <= i1; ++i)
                tnorm = std::max(tnorm, std::fabs(tres[i]) / tscale[i]);
            if (tnorm < norm || tnorm <= tol) break;
            alpha *= 0.5;
        }
        w = trial;
        prev_norm = norm;
    }
    std::vector<double> fres, fscale;
    sys.residual(w, fres, fscale);
    double norm = 0.0;
    for (int i = i0; i <= i1; ++i) norm = std::max(norm, std::fabs(fres[i]) / fscale[i]);
    (void)prev_norm;
    return norm <= tol;
}

constexpr int kDefaultCells = 1200;

}  // namespace

double RadialProfile::eval(double tq) const {
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return w.front();
    if (it == t.end()) return w.back();
    const size_t i = static_cast<size_t>(it - t.begin());
    const double a = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return w[i - 1] + a * (w[i] - w[i - 1]);
}

ode1d::LargeSolution1D solve_omega(double R, const nl::Nonlinearity& nonlinearity) {
    ode1d::Interval1DProblem pr{0.0, 2.0 * R, 1.0, nonlinearity};
    return ode1d::solve_interval(pr);
}

WulffBarrier::WulffBarrier(WulffBallProblem prob)
    : prob_(std::move(prob)), dual_(prob_.norm), omega_(solve_omega(prob_.R, prob_.nonlinearity)) {}

double WulffBarrier::eval(const Eigen::VectorXd& x) const {
    const double r = dual_.value(x - prob_.center);
    if (r >= prob_.R) throw OutsideBall("wulff_barrier: H0(x - center) >= R");
    return omega_.eval(prob_.R - r);
}

double WulffBarrier::bound_at_half_radius() const { return omega_.eval(0.5 * prob_.R); }

double wulff_barrier(const WulffBallProblem& prob, const Eigen::VectorXd& x) {
    return WulffBarrier(prob).eval(x);
}

std::vector<double> graded_grid(double lo, double hi, int cells, bool cluster_left) {
    std::vector<double> t(cells + 1);
    for (int i = 0; i <= cells; ++i) {
        const double xi = static_cast<double>(i) / cells;
        const double g = cluster_left ? xi * xi * xi : 1.0 - (1.0 - xi) * (1.0 - xi) * (1.0 - xi);
        t[i] = lo + (hi - lo) * g;
    }
    t.front() = lo;
    t.back() = hi;
    return t;
}

std::vector<double> apply_radial_operator(const std::vector<double>& t,
                                          const std::vector<double>& w, double p, int n,
                                          double eps) {
    std::vector<double> out(t.size(), 0.0);
    for (size_t i = 1; i + 1 < t.size(); ++i) {
        const double h_hi = t[i + 1] - t[i];
        const double h_lo = t[i] - t[i - 1];
        const double tm_hi = 0.5 * (t[i] + t[i + 1]);
        const double tm_lo = 0.5 * (t[i - 1] + t[i]);
        const double flux_hi = std::pow(tm_hi, n - 1) * phi_eps((w[i + 1] - w[i]) / h_hi, p, eps);
        const double flux_lo = std::pow(tm_lo, n - 1) * phi_eps((w[i] - w[i - 1]) / h_lo, p, eps);
        out[i] = (flux_hi - flux_lo) / (0.5 * (t[i + 1] - t[i - 1]));
    }
    return out;
}

RadialProfile solve_annulus_k(const AnnulusProblem& prob, double k, int cells,
                              const RadialProfile* init) {
    if (!(k > 0.0)) {
        // f(0) = 0 makes the zero profile exact for zero data
        RadialProfile zero;
        zero.t = graded_grid(prob.R1, prob.R2, cells > 0 ? cells : kDefaultCells, true);
        zero.w.assign(zero.t.size(), 0.0);
        zero.blowup_end = BlowupEnd::Left;
        zero.k_ceiling = 0.0;
        return zero;
    }
    const int M = cells > 0 ? cells : kDefaultCells;
    RadialProfile out;
    out.t = graded_grid(prob.R1, prob.R2, M, true);
    out.blowup_end = BlowupEnd::Left;
    out.k_ceiling = k;

    std::vector<double> w(M + 1, 0.0);
    if (init && init->t.size() == out.t.size()) {
        w = init->w;
    } else {
        for (int i = 0; i <= M; ++i)
            w[i] = k * (prob.R2 - out.t[i]) / (prob.R2 - prob.R1);
    }
    w[0] = k;
    w[M] = 0.0;

    RadialSystem sys;
    sys.t = &out.t;
    sys.n = prob.dim;
    sys.p = prob.nonlinearity.p();
    sys.f = &prob.nonlinearity;
    sys.eps = 1e-8 * std::max(1.0, k / (prob.R2 - prob.R1));
    sys.left_neumann = false;

    out.converged = newton_radial(sys, w, 1e-8, 80);
    out.w = std::move(w);
    return out;
}

RadialProfile solve_ball_k(const WulffBallProblem& prob, double k, int cells,
                           const RadialProfile* init) {
    const int M = cells > 0 ? cells : kDefaultCells;
    RadialProfile out;
    out.t = graded_grid(0.0, prob.R, M, false);
    out.blowup_end = BlowupEnd::Right;
    out.k_ceiling = k;

    std::vector<double> w(M + 1, 0.0);
    if (init && init->t.size() == out.t.size()) {
        w = init->w;
    } else {
        for (int i = 0; i <= M; ++i) w[i] = k * out.t[i] / prob.R;
    }
    w[M] = k;

    RadialSystem sys;
    sys.t = &out.t;
    sys.n = prob.dim;
    sys.p = prob.nonlinearity.p();
    sys.f = &prob.nonlinearity;
    sys.eps = 1e-8 * std::max(1.0, k / prob.R);
    sys.left_neumann = true;

    out.converged = newton_radial(sys, w, 1e-8, 80);
    out.w = std::move(w);
    return out;
}

namespace {

template <class Solver>
RadialProfile doubling_limit(const Solver& solve_k, double interior_lo, double interior_hi) {
    RadialProfile prev;
    double k = 1.0;
    for (int j = 0; j <= 40; ++j, k *= 2.0) {
        RadialProfile cur = solve_k(k, prev.t.empty() ? nullptr : &prev);
        if (!prev.t.empty()) {
            double change = 0.0;
            for (size_t i = 0; i < cur.t.size(); ++i) {
                if (cur.t[i] < interior_lo || cur.t[i] > interior_hi) continue;
                change = std::max(change, std::fabs(cur.w[i] - prev.w[i]));
            }
            if (change < 1e-6 && cur.converged) {
                cur.k_ceiling.reset();
                return cur;
            }
        }
        prev = std::move(cur);
    }
    throw NoConvergence("radial doubling: interior values did not stabilize in 40 doublings");
}

}  // namespace

RadialProfile solve_annulus_large(const AnnulusProblem& prob, int cells) {
    if (!nl::ko_holds(prob.nonlinearity))
        throw DivergentIntegral("solve_annulus_large: (KO) fails");
    auto solve = [&](double k, const RadialProfile* init) {
        return solve_annulus_k(prob, k, cells, init);
    };
    const double margin = prob.R1 + (prob.R2 - prob.R1) / 20.0;
    return doubling_limit(solve, margin, prob.R2);
}

RadialProfile solve_ball_large(const WulffBallProblem& prob, int cells) {
    if (!nl::ko_holds(prob.nonlinearity))
        throw DivergentIntegral("solve_ball_large: (KO) fails");
    auto solve = [&](double k, const RadialProfile* init) {
        return solve_ball_k(prob, k, cells, init);
    };
    const double margin = prob.R * (1.0 - 1.0 / 20.0);
    return doubling_limit(solve, 0.0, margin);
}

std::vector<AnnulusAsymRow> annulus_asym_check(const RadialProfile& profile,
                                               const nl::Nonlinearity& nonlinearity,
                                               double R1, double max_dist) {
    if (profile.blowup_end != BlowupEnd::Left)
        throw ConfigError("annulus_asym_check: profile must blow up at the left end");
    std::vector<AnnulusAsymRow> rows;
    for (size_t i = 1; i < profile.t.size(); ++i) {
        const double dist = profile.t[i] - R1;
        if (dist <= 0.0 || dist > max_dist) continue;
        if (profile.w[i] <= 0.0) continue;
        rows.push_back({dist, nl::psi(nonlinearity, profile.w[i]) / dist});
    }
    return rows;
}

}  // namespace finsler::radial
