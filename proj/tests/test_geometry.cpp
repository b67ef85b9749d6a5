#include <doctest.h>

#include <cmath>

#include "finsler/geometry.hpp"
#include "finsler/rng.hpp"
#include "oracles.hpp"

using namespace finsler;
using geom::AnisotropicDistanceField;
using geom::Domain2D;

namespace {

norms::MinkowskiNorm diag21() {
    Eigen::Matrix2d A;
    A << 2, 0, 0, 1;
    return norms::MinkowskiNorm::linear_map(A);
}

AnisotropicDistanceField disk_euclid(double r = 1.0) {
    return AnisotropicDistanceField(Domain2D::disk(r),
                                    norms::DualNorm(norms::MinkowskiNorm::euclidean(2)));
}

}  // namespace

TEST_CASE("delta_H0 on the Euclidean disk") {
    const auto field = disk_euclid();
    const auto np = field.query(Eigen::Vector2d(0.5, 0.0));
    CHECK(np.distance == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(np.z.x() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(np.z.y() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS(field.query(Eigen::Vector2d(2.0, 0.0)), OutsideDomain);
}

TEST_CASE("delta_H0 at the center of a Wulff ball equals its radius") {
    const auto H = norms::MinkowskiNorm::lambda_mu(1.0, 1.0, 2);
    const auto dom = Domain2D::wulff(H, 0.7);
    const AnisotropicDistanceField field(dom, norms::DualNorm(H));
    CHECK(field(Eigen::Vector2d(0, 0)) == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("anisotropic distance on the unit disk vs brute force") {
    const auto H = diag21();
    const AnisotropicDistanceField field(Domain2D::disk(1.0), norms::DualNorm(H));
    const norms::DualNorm dual(H);
    const Eigen::Vector2d x(0.5, 0.0);
    double brute = 1e300;
    for (int k = 0; k < 1000000; ++k) {
        const double th = 2.0 * M_PI * k / 1000000;
        const Eigen::Vector2d z(std::cos(th), std::sin(th));
        brute = std::min(brute, dual.value2(x.x() - z.x(), x.y() - z.y()));
    }
    CHECK(field(x) == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("distance field properties: sandwich and 1-Lipschitz in H0") {
    const auto H = diag21();
    const AnisotropicDistanceField field(Domain2D::ellipse(1.0, 0.6), norms::DualNorm(H));
    const auto field_e = AnisotropicDistanceField(
        Domain2D::ellipse(1.0, 0.6), norms::DualNorm(norms::MinkowskiNorm::euclidean(2)));
    const norms::DualNorm dual(H);
    // theta bounds of H0 = |A^{-T} xi|: singular values 0.5 and 1
    const double th1 = 0.5, th2 = 1.0;

    Rng rng(2718);
    int tested = 0;
    while (tested < 60) {
        const Eigen::Vector2d x(rng.uniform(-1.0, 1.0), rng.uniform(-0.6, 0.6));
        if (!field.domain().contains(x)) continue;
        ++tested;
        const double dh = field(x);
        const double de = field_e(x);
        CHECK(dh >= th1 * de * (1.0 - 1e-6));
        CHECK(dh <= th2 * de * (1.0 + 1e-6));

        const Eigen::Vector2d y(rng.uniform(-1.0, 1.0), rng.uniform(-0.6, 0.6));
        if (!field.domain().contains(y)) continue;
        const double dy = field(y);
        const Eigen::Vector2d w = x - y;
        CHECK(std::fabs(dh - dy) <= dual.value2(w.x(), w.y()) + 1e-7);
    }
}

TEST_CASE("representation: z(x) + delta(x) grad H(grad delta) recovers x") {
    const auto H = diag21();
    const AnisotropicDistanceField field(Domain2D::disk(1.0), norms::DualNorm(H));
    const double diam = 2.0;
    Rng rng(5);
    int tested = 0;
    while (tested < 30) {
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        const double r = rng.uniform(0.9, 0.98);
        const Eigen::Vector2d x(r * std::cos(th), r * std::sin(th));
        const auto np = field.query(x);
        if (np.distance > field.tube_width_mu()) continue;
        ++tested;
        // grad delta by central differences of the field
        const double h = 1e-6;
        Eigen::Vector2d gd;
        gd.x() = (field(x + Eigen::Vector2d(h, 0)) - field(x - Eigen::Vector2d(h, 0))) / (2 * h);
        gd.y() = (field(x + Eigen::Vector2d(0, h)) - field(x - Eigen::Vector2d(0, h))) / (2 * h);
        const Eigen::Vector2d rec = np.z + np.distance * H.gradient(gd);
        CHECK((rec - x).norm() <= 1e-4 * diam);
    }
}

TEST_CASE("interior/exterior balls on the Euclidean disk") {
    const auto field = disk_euclid();
    // boundary_index 0 is z = (1, 0)
    const auto [xi, xe] = geom::interior_exterior_balls(field, 0, 0.3);
    CHECK(xi.x() == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(xi.y() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(xe.x() == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(xe.y() == doctest::Approx(0.0).epsilon(1e-6));

    CHECK_THROWS_AS(geom::interior_exterior_balls(field, 0, 1.5), BallViolation);
}

TEST_CASE("interior/exterior balls pass the touching check anisotropically") {
    const auto H = diag21();
    const AnisotropicDistanceField field(Domain2D::ellipse(1.0, 0.6), norms::DualNorm(H));
    for (int idx : {0, 512, 1024, 2000, 3000}) {
        const double R = 0.45 * field.uniform_ball_radius();
        const auto [xi, xe] = geom::interior_exterior_balls(field, idx, R);
        CHECK(field.domain().contains(xi));
        CHECK_FALSE(field.domain().contains(xe));
    }
}

TEST_CASE("tube: trivial widths and the annulus area oracle") {
    const auto field = disk_euclid();
    // width beyond the inradius captures every interior grid point
    const auto all = geom::tube(field, 1.1, 0.05);
    int interior = 0;
    for (double x = -1.0 + 0.025; x <= 1.0; x += 0.05)
        for (double y = -1.0 + 0.025; y <= 1.0; y += 0.05)
            if (field.domain().contains(Eigen::Vector2d(x, y))) ++interior;
    CHECK(static_cast<int>(all.size()) == interior);

    CHECK(geom::tube(field, 1e-6, 0.25).empty());

    const double h = 1.0 / 256.0;
    const auto band = geom::tube(field, 0.1, h);
    for (const auto& tp : band) CHECK(tp.delta < 0.1);
    const double area = band.size() * h * h;
    const double exact = M_PI * (1.0 - 0.9 * 0.9);
    CHECK(area == doctest::Approx(exact).epsilon(0.05));
}
