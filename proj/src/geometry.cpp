#include "finsler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace finsler::geom {

namespace {

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

int seg_orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const double v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool segments_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
    const int o1 = seg_orient(a, b, c), o2 = seg_orient(a, b, d);
    const int o3 = seg_orient(c, d, a), o4 = seg_orient(c, d, b);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

Domain2D Domain2D::disk(double r, int samples) {
    if (!(r > 0.0)) throw ConfigError("disk: radius must be positive");
    Domain2D d;
    d.z_.resize(samples);
    d.tau_.resize(samples);
    d.kappa_.assign(samples, 1.0 / r);
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * M_PI * i / samples;
        d.z_[i] = Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
        d.tau_[i] = Eigen::Vector2d(-std::sin(th), std::cos(th));
    }
    d.finalize();
    return d;
}

Domain2D Domain2D::ellipse(double a, double b, int samples) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("ellipse: semi-axes must be positive");
    Domain2D d;
    d.z_.resize(samples);
    d.tau_.resize(samples);
    d.kappa_.resize(samples);
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * M_PI * i / samples;
        const double c = std::cos(th), s = std::sin(th);
        d.z_[i] = Eigen::Vector2d(a * c, b * s);
        const Eigen::Vector2d dz(-a * s, b * c);
        d.tau_[i] = dz.normalized();
        const double w = a * a * s * s + b * b * c * c;
        d.kappa_[i] = a * b / (w * std::sqrt(w));
    }
    d.finalize();
    return d;
}

Domain2D Domain2D::wulff(const norms::MinkowskiNorm& H, double r, int samples) {
    if (!(r > 0.0)) throw ConfigError("wulff: radius must be positive");
    if (H.dim() != 2) throw ConfigError("wulff: 2D norm required");
    const norms::DualNorm dual(H);
    std::vector<Eigen::Vector2d> pts(samples);
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * M_PI * i / samples;
        const Eigen::Vector2d dir(std::cos(th), std::sin(th));
        pts[i] = r / dual.value(dir) * dir;
    }
    return from_vertices(pts);
}

Domain2D Domain2D::from_vertices(const std::vector<Eigen::Vector2d>& pts) {
    if (pts.size() < 16) throw ConfigError("domain: need at least 16 boundary samples");
    Domain2D d;
    d.z_ = pts;
    if ((d.z_.front() - d.z_.back()).norm() < 1e-12 && d.z_.size() > 1) d.z_.pop_back();
    const int n = static_cast<int>(d.z_.size());

    // signed area for orientation; flip to CCW if needed
    double area2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& p = d.z_[i];
        const auto& q = d.z_[(i + 1) % n];
        area2 += p.x() * q.y() - q.x() * p.y();
    }
    if (area2 < 0.0) std::reverse(d.z_.begin(), d.z_.end());

    d.tau_.resize(n);
    d.kappa_.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& zm = d.z_[(i + n - 1) % n];
        const auto& zp = d.z_[(i + 1) % n];
        const Eigen::Vector2d d1 = 0.5 * (zp - zm);
        const Eigen::Vector2d d2 = zp - 2.0 * d.z_[i] + zm;
        const double sp = d1.norm();
        if (sp < 1e-15) throw ConfigError("domain: coincident boundary samples");
        d.tau_[i] = d1 / sp;
        d.kappa_[i] = std::fabs(d1.x() * d2.y() - d1.y() * d2.x()) / (sp * sp * sp);
    }
    d.finalize();
    return d;
}

void Domain2D::finalize() {
    const int n = size();
    lo_ = hi_ = z_[0];
    for (const auto& p : z_) {
        lo_ = lo_.cwiseMin(p);
        hi_ = hi_.cwiseMax(p);
    }
    max_kappa_ = *std::max_element(kappa_.begin(), kappa_.end());

    // self-intersection sweep with a uniform-cell broad phase
    double max_seg = 0.0;
    for (int i = 0; i < n; ++i)
        max_seg = std::max(max_seg, (z_[(i + 1) % n] - z_[i]).norm());
    const double cell = std::max(2.0 * max_seg, 1e-12);
    std::unordered_map<long long, std::vector<int>> buckets;
    auto key = [&](const Eigen::Vector2d& p) {
        const long long ix = static_cast<long long>(std::floor((p.x() - lo_.x()) / cell));
        const long long iy = static_cast<long long>(std::floor((p.y() - lo_.y()) / cell));
        return (ix << 24) ^ iy;
    };
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d mid = 0.5 * (z_[i] + z_[(i + 1) % n]);
        buckets[key(mid)].push_back(i);
    }
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d mid = 0.5 * (z_[i] + z_[(i + 1) % n]);
        const long long ix = static_cast<long long>(std::floor((mid.x() - lo_.x()) / cell));
        const long long iy = static_cast<long long>(std::floor((mid.y() - lo_.y()) / cell));
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = buckets.find(((ix + dx) << 24) ^ (iy + dy));
                if (it == buckets.end()) continue;
                for (int j : it->second) {
                    if (j <= i) continue;
                    const int gap = std::min(j - i, n - (j - i));
                    if (gap <= 1) continue;
                    if (segments_cross(z_[i], z_[(i + 1) % n], z_[j], z_[(j + 1) % n]))
                        throw ConfigError("domain: boundary self-intersects");
                }
            }
        }
    }
}

Eigen::Vector2d Domain2D::normal(int i) const {
    // CCW orientation: outward normal is the clockwise rotation of tau
    return Eigen::Vector2d(tau_[i].y(), -tau_[i].x());
}

bool Domain2D::contains(const Eigen::Vector2d& x) const {
    if ((x.array() < lo_.array()).any() || (x.array() > hi_.array()).any()) return false;
    const int n = size();
    bool inside = false;
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const auto& pi = z_[i];
        const auto& pj = z_[j];
        if ((pi.y() > x.y()) != (pj.y() > x.y())) {
            const double xi =
                pj.x() + (x.y() - pj.y()) / (pi.y() - pj.y()) * (pi.x() - pj.x());
            if (x.x() < xi) inside = !inside;
        }
    }
    return inside;
}

Eigen::Vector2d Domain2D::curve_at(int i, double s) const {
    const int n = size();
    const auto& zm = z_[(i + n - 1) % n];
    const auto& z0 = z_[i];
    const auto& zp = z_[(i + 1) % n];
    return z0 + 0.5 * s * (zp - zm) + 0.5 * s * s * (zp - 2.0 * z0 + zm);
}

AnisotropicDistanceField::AnisotropicDistanceField(Domain2D domain, norms::DualNorm dual)
    : domain_(std::make_shared<Domain2D>(std::move(domain))),
      dual_(std::make_shared<norms::DualNorm>(std::move(dual))) {
    // uniform-ball estimate from the curvature cap and the dual theta
    // bounds; validated per use by the touching check
    double th1 = 1e300;
    for (int k = 0; k < 512; ++k) {
        const double th = 2.0 * M_PI * k / 512;
        th1 = std::min(th1, dual_->value2(std::cos(th), std::sin(th)));
    }
    ball_radius_ = 0.5 * th1 / std::max(domain_->max_curvature(), 1e-12);
}

NearestPoint AnisotropicDistanceField::nearest_boundary(const Eigen::Vector2d& x) const {
    const auto& dom = *domain_;
    const auto& dual = *dual_;
    const int n = dom.size();
    double best = 1e300;
    int bi = 0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d w = x - dom.point(i);
        const double v = dual.value2(w.x(), w.y());
        if (v < best) {
            best = v;
            bi = i;
        }
    }
    auto dist_at = [&](double s) {
        const Eigen::Vector2d w = x - dom.curve_at(bi, s);
        return dual.value2(w.x(), w.y());
    };
    const double s = golden_min(dist_at, -1.5, 1.5, 1e-10);
    NearestPoint out;
    out.sample_index = bi;
    out.z = dom.curve_at(bi, s);
    const Eigen::Vector2d w = x - out.z;
    out.distance = dual.value2(w.x(), w.y());
    if (out.distance > best) {  // refinement never worsens the scan value
        out.z = dom.point(bi);
        out.distance = best;
    }
    return out;
}

NearestPoint AnisotropicDistanceField::query(const Eigen::Vector2d& x) const {
    if (!domain_->contains(x)) throw OutsideDomain("delta_H0: point outside the domain");
    return nearest_boundary(x);
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> interior_exterior_balls(
    const AnisotropicDistanceField& field, int boundary_index, double R) {
    const auto& dom = field.domain();
    const auto& dual = field.dual();
    const auto& H = dual.base();
    const Eigen::Vector2d z = dom.point(boundary_index);
    const Eigen::Vector2d nu = dom.normal(boundary_index);
    const double diam = (dom.bbox_hi() - dom.bbox_lo()).norm();

    // stationarity of z' -> H0(z' - c) at z' = z forces grad H0(z - c)
    // parallel to the normal; Lemma-style duality turns that into
    // c = z -+ R grad H(+-nu)
    Eigen::Vector2d x_int = z - R * H.gradient(nu);
    Eigen::Vector2d x_ext = z - R * H.gradient(-nu);

    // fixed-point refinement on the representation formula through the
    // sampled field (keeps the center consistent with the discrete curve)
    for (int it = 0; it < 25; ++it) {
        const auto np = field.nearest_boundary(x_int);
        const Eigen::Vector2d gd = dual.gradient(x_int - np.z);
        const Eigen::Vector2d next = z + R * H.gradient(gd);
        if (!next.allFinite()) break;
        const double move = (next - x_int).norm();
        x_int = 0.5 * (x_int + next);
        if (move < 1e-13 * (1.0 + diam)) break;
    }

    auto radius_to = [&](const Eigen::Vector2d& c, const Eigen::Vector2d& zz) {
        const Eigen::Vector2d w = zz - c;
        return dual.value2(w.x(), w.y());
    };

    // discrete touching check: no boundary sample strictly inside the ball;
    // near-equality only in a small arclength window around z
    const int n = dom.size();
    const double arc_window = std::max(1e-3 * (1.0 + diam), 4.0 * M_PI * diam / n);
    auto verify = [&](const Eigen::Vector2d& c, const char* which) {
        double rmin = 1e300;
        for (int i = 0; i < n; ++i) {
            const double r = radius_to(c, dom.point(i));
            rmin = std::min(rmin, r);
            if (r < R - 1e-6)
                throw BallViolation(std::string(which) +
                                    " ball: boundary sample strictly inside (R too large)");
            if (r < R + 1e-6 && (dom.point(i) - z).norm() > arc_window)
                throw BallViolation(std::string(which) +
                                    " ball: touches the boundary away from the base point");
        }
        if (rmin > R + 1e-4 * (1.0 + R))
            throw BallViolation(std::string(which) + " ball: does not reach the boundary");
    };
    if (!dom.contains(x_int)) throw BallViolation("interior ball center left the domain");
    if (dom.contains(x_ext)) throw BallViolation("exterior ball center fell inside the domain");
    verify(x_int, "interior");
    verify(x_ext, "exterior");
    return {x_int, x_ext};
}

std::vector<TubePoint> tube(const AnisotropicDistanceField& field, double width,
                            double grid_h) {
    if (!(width > 0.0) || !(grid_h > 0.0))
        throw ConfigError("tube: width and grid_h must be positive");
    const auto& dom = field.domain();
    const Eigen::Vector2d lo = dom.bbox_lo();
    const Eigen::Vector2d hi = dom.bbox_hi();
    // cell-centered lattice: avoids raster points landing exactly on the
    // sampled boundary polygon
    const int nx = static_cast<int>(std::floor((hi.x() - lo.x()) / grid_h)) + 1;
    const int ny = static_cast<int>(std::floor((hi.y() - lo.y()) / grid_h)) + 1;

    std::vector<std::vector<TubePoint>> rows(ny);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Eigen::Vector2d x(lo.x() + (i + 0.5) * grid_h, lo.y() + (j + 0.5) * grid_h);
            if (!dom.contains(x)) continue;
            const auto np = field.nearest_boundary(x);
            if (np.distance < width) rows[j].push_back({x, np.distance});
        }
    }
    std::vector<TubePoint> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

}  // namespace finsler::geom
