#include <doctest.h>

#include <cmath>

#include "finsler/norms.hpp"
#include "finsler/rng.hpp"
#include "oracles.hpp"

using namespace finsler;
using norms::DualNorm;
using norms::MinkowskiNorm;

namespace {

Eigen::Vector2d v2(double x, double y) { return Eigen::Vector2d(x, y); }

MinkowskiNorm diag21() {
    Eigen::Matrix2d A;
    A << 2, 0, 0, 1;
    return MinkowskiNorm::linear_map(A);
}

// q-norm emulation H_q through a single BlockPQ block (degenerate on axes)
MinkowskiNorm hq(double q, int dim) {
    norms::BlockPqParams bp;
    bp.q = q;
    bp.sizes = {dim};
    bp.exponents = {q};
    bp.weights = {1.0};
    return MinkowskiNorm::block_pq(bp);
}

std::vector<MinkowskiNorm> valid_families() {
    norms::BlockPqParams bp;
    bp.q = 2.0;
    bp.sizes = {2, 1};
    bp.exponents = {2.0, 2.0};
    bp.weights = {1.0, 3.0};
    Eigen::Vector2d T(0.5, 0.0);
    return {MinkowskiNorm::euclidean(2),
            MinkowskiNorm::scaled_1d(1.7),
            diag21(),
            MinkowskiNorm::lambda_mu(1.0, 1.0, 2),
            MinkowskiNorm::block_pq(bp),
            MinkowskiNorm::randers(T)};
}

}  // namespace

TEST_CASE("norm values: closed-form family evaluations") {
    CHECK(MinkowskiNorm::euclidean(2).value(v2(3, 4)) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(diag21().value(v2(1, 0)) == doctest::Approx(2.0).epsilon(1e-14));
    // lambda = 0 reduces to the Euclidean norm
    CHECK(MinkowskiNorm::lambda_mu(0.0, 1.0, 2).value(v2(1, 1)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("norm gradients: examples and finite-difference oracle") {
    const auto eu = MinkowskiNorm::euclidean(2);
    CHECK(eu.gradient(v2(0, 2))[0] == doctest::Approx(0.0));
    CHECK(eu.gradient(v2(0, 2))[1] == doctest::Approx(1.0));

    const auto s1 = MinkowskiNorm::scaled_1d(3.0);
    Eigen::VectorXd xm(1);
    xm[0] = -5.0;
    CHECK(s1.gradient(xm)[0] == doctest::Approx(-3.0));

    Eigen::Vector2d T(0.5, 0.0);
    const auto ra = MinkowskiNorm::randers(T);
    const auto g = ra.gradient(v2(1, 0));
    CHECK(g[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(0.0));

    // every family matches central finite differences to 1e-6 relative
    Rng rng(42);
    for (const auto& H : valid_families()) {
        auto f = [&](const Eigen::VectorXd& x) { return H.value(x); };
        for (int s = 0; s < 20; ++s) {
            const Eigen::VectorXd x = rng.sphere(H.dim()) * rng.uniform(0.5, 2.0);
            const Eigen::VectorXd ga = H.gradient(x);
            const Eigen::VectorXd gf = oracles::fd_gradient(f, x, 1e-5 * (1.0 + x.norm()));
            CHECK((ga - gf).norm() <= 1e-6 * (1.0 + ga.norm()));
        }
    }
}

TEST_CASE("hessian of H^2/2: examples and FD oracle") {
    const auto eu = MinkowskiNorm::euclidean(3);
    Eigen::Vector3d x3(0.3, -1.2, 0.5);
    CHECK((eu.hessian_half_sq(x3) - Eigen::Matrix3d::Identity()).norm() < 1e-14);

    const auto lm = diag21();
    Eigen::Matrix2d AtA;
    AtA << 4, 0, 0, 1;
    CHECK((lm.hessian_half_sq(v2(0.7, -0.2)) - AtA).norm() < 1e-13);

    // q-norm emulation: degenerate direction on the coordinate axis
    const auto h4 = hq(4.0, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h4.hessian_half_sq(v2(1, 0)));
    CHECK(std::fabs(es.eigenvalues().minCoeff()) <= 1e-8);

    Rng rng(43);
    for (const auto& H : valid_families()) {
        auto grad_half_sq = [&](const Eigen::VectorXd& y) {
            return (H.value(y) * H.gradient(y)).eval();
        };
        for (int s = 0; s < 10; ++s) {
            const Eigen::VectorXd x = rng.sphere(H.dim()) * rng.uniform(0.5, 2.0);
            const Eigen::MatrixXd Ha = H.hessian_half_sq(x);
            const Eigen::MatrixXd Hf = oracles::fd_hessian_from_grad(grad_half_sq, x, 3e-6);
            CHECK((Ha - Hf).norm() <= 1e-5 * (1.0 + Ha.norm()));
        }
    }
}

TEST_CASE("theta bounds") {
    const auto tb_eu = norms::theta_bounds(MinkowskiNorm::euclidean(2));
    CHECK(tb_eu.theta1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tb_eu.theta2 == doctest::Approx(1.0).epsilon(1e-10));

    const auto tb_lm = norms::theta_bounds(diag21());  // singular values of A
    CHECK(tb_lm.theta1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tb_lm.theta2 == doctest::Approx(2.0).epsilon(1e-9));

    // brute-force sphere sweep oracle for the lambda-mu family
    const auto lam = MinkowskiNorm::lambda_mu(1.0, 1.0, 2);
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 100000; ++k) {
        const double th = 2.0 * M_PI * k / 100000;
        const double v = lam.value2(std::cos(th), std::sin(th));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const auto tb = norms::theta_bounds(lam);
    CHECK(tb.theta1 == doctest::Approx(lo).epsilon(1e-8));
    CHECK(tb.theta2 == doctest::Approx(hi).epsilon(1e-8));
}

TEST_CASE("dual norm: closed forms, sweep oracle, homogeneity") {
    const DualNorm de(MinkowskiNorm::euclidean(2));
    CHECK(de.value(v2(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));

    Eigen::VectorXd xi1(1);
    xi1[0] = -3.5;
    const DualNorm ds(MinkowskiNorm::scaled_1d(2.0));
    CHECK(ds.value(xi1) == doctest::Approx(1.75).epsilon(1e-12));

    const DualNorm dm(diag21());
    CHECK(dm.value(v2(1, 0)) == doctest::Approx(0.5).epsilon(1e-12));

    // brute-force sweep at 1e6 angles against the numeric solver path
    const auto lam = MinkowskiNorm::lambda_mu(0.7, 1.3, 2);
    const DualNorm dl(lam);
    auto H2 = [&](double x, double y) { return lam.value2(x, y); };
    for (auto xi : {v2(1, 0), v2(0.3, -1.1), v2(-2, 0.5)}) {
        const double brute = oracles::sweep_sup_ratio(H2, xi[0], xi[1], 1000000);
        CHECK(dl.value(xi) == doctest::Approx(brute).epsilon(1e-6));
        CHECK(dl.value(3.0 * xi) == doctest::Approx(3.0 * dl.value(xi)).epsilon(1e-10));
    }
}

TEST_CASE("dual gradient satisfies H(grad H0(x)) = 1") {
    Rng rng(77);
    for (const auto& H : valid_families()) {
        const DualNorm dual(H);
        for (int s = 0; s < 25; ++s) {
            const Eigen::VectorXd x = rng.sphere(H.dim()) * rng.uniform(0.2, 3.0);
            const Eigen::VectorXd g = dual.gradient(x);
            CHECK(H.value(g) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("dual of the dual recovers the base norm (sampled)") {
    const auto lam = MinkowskiNorm::lambda_mu(1.0, 1.0, 2);
    const DualNorm dual(lam);
    Rng rng(5);
    for (int s = 0; s < 12; ++s) {
        const Eigen::VectorXd x = rng.sphere(2);
        // sup over the H0 unit sphere by dense sweep + local refinement
        double best = -1e300;
        for (int k = 0; k < 200000; ++k) {
            const double th = 2.0 * M_PI * k / 200000;
            const Eigen::Vector2d d(std::cos(th), std::sin(th));
            best = std::max(best, x.dot(d) / dual.value(d));
        }
        CHECK(best == doctest::Approx(lam.value(x)).epsilon(1e-6));
    }
}

TEST_CASE("2D dual table matches the exact solver") {
    const auto lam = MinkowskiNorm::lambda_mu(0.5, 2.0, 2);
    const DualNorm dual(lam);
    Rng rng(11);
    for (int s = 0; s < 200; ++s) {
        const Eigen::VectorXd x = rng.sphere(2) * rng.uniform(0.1, 5.0);
        CHECK(dual.value2(x[0], x[1]) == doctest::Approx(dual.value(x)).epsilon(1e-6));
    }
}

TEST_CASE("verify_minkowski: valid families pass, invalid ones are caught") {
    for (const auto& H : valid_families()) {
        const auto rep = norms::verify_minkowski(H, 500, 999);
        INFO(rep.family);
        for (const auto& c : rep.checks) {
            INFO(c.name, " worst=", c.worst);
            CHECK(c.pass);
        }
        CHECK(rep.all_pass);
    }

    // Randers with |T| > 1 is rejected at construction
    Eigen::Vector2d bad(1.2, 0.0);
    CHECK_THROWS_AS(MinkowskiNorm::randers(bad), InvalidNorm);

    // q-norm emulation fails exactly the strong-convexity check
    const auto rep = norms::verify_minkowski(hq(4.0, 2), 300, 999);
    CHECK_FALSE(rep.all_pass);
    const auto* sc = rep.find("strong_convexity_min_eig");
    REQUIRE(sc != nullptr);
    CHECK_FALSE(sc->pass);
}

TEST_CASE("euclidean verification residuals below 1e-9") {
    const auto rep = norms::verify_minkowski(MinkowskiNorm::euclidean(2), 1000, 2024);
    for (const auto& c : rep.checks) {
        if (c.name == "positivity" || c.name == "strong_convexity_min_eig") continue;
        INFO(c.name);
        CHECK(c.worst < 1e-9);
    }
}

TEST_CASE("property: monotone operator pairing is nonnegative") {
    Rng rng(314);
    for (const auto& H : valid_families()) {
        for (double p : {2.0, 3.0, 4.0}) {
            for (int s = 0; s < 1000; ++s) {
                const Eigen::VectorXd x = rng.sphere(H.dim()) * rng.uniform(0.1, 2.0);
                const Eigen::VectorXd y = rng.sphere(H.dim()) * rng.uniform(0.1, 2.0);
                if ((x - y).norm() < 1e-12) continue;
                const Eigen::VectorXd ax = std::pow(H.value(x), p - 1.0) * H.gradient(x);
                const Eigen::VectorXd ay = std::pow(H.value(y), p - 1.0) * H.gradient(y);
                CHECK((ax - ay).dot(x - y) >= -1e-12);
            }
        }
    }
}

TEST_CASE("property: norm equivalence theta1 |x| <= H(x) <= theta2 |x|") {
    Rng rng(15);
    for (const auto& H : valid_families()) {
        const auto tb = norms::theta_bounds(H);
        for (int s = 0; s < 500; ++s) {
            const Eigen::VectorXd x = rng.sphere(H.dim()) * rng.uniform(0.01, 10.0);
            const double v = H.value(x);
            CHECK(v >= tb.theta1 * x.norm() * (1.0 - 1e-9));
            CHECK(v <= tb.theta2 * x.norm() * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("property: gradient bound via unit-vector values") {
    Rng rng(16);
    for (const auto& H : valid_families()) {
        const int n = H.dim();
        double bound2 = 0.0;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e[i] = 1.0;
            const double hp = H.value(e);
            e[i] = -1.0;
            const double hm = H.value(e);
            bound2 += std::max(hp, hm) * std::max(hp, hm);
        }
        for (int s = 0; s < 300; ++s) {
            const Eigen::VectorXd x = rng.sphere(n) * rng.uniform(0.1, 5.0);
            CHECK(H.gradient(x).norm() <= std::sqrt(bound2) + 1e-9);
        }
    }
}
