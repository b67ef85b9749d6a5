#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace finsler {

// Deterministic sampling helpers. std::normal_distribution is
// implementation-defined, so the gaussian transform is hand-rolled to keep
// verifier reports byte-reproducible across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in [0,1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform direction on the Euclidean unit sphere S^{n-1}.
    Eigen::VectorXd sphere(int dim) {
        Eigen::VectorXd v(dim);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < dim; ++i) v[i] = gaussian();
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-24);
        return v / std::sqrt(norm2);
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace finsler
