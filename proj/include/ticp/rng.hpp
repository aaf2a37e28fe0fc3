#pragma once

// Counter-free splittable 64-bit generator (splitmix64) used everywhere
// randomness is needed, so every artifact the project writes is
// bit-reproducible across platforms. Gaussians come from Box-Muller on the
// generator's uniforms; unit vectors from a normalized Gaussian triple.

#include <cmath>
#include <cstdint>

#include "ticp/core.hpp"

namespace ticp {

class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n); n must be positive
    uint64_t next_below(uint64_t n) { return next() % n; }

  private:
    uint64_t state_;
};

// Decorrelated child seed: the (stream+1)-th output of a generator seeded
// with the parent seed.
inline uint64_t derive_stream(uint64_t seed, uint64_t stream) {
    SplitMix64 g(seed);
    uint64_t out = 0;
    for (uint64_t i = 0; i <= stream; ++i) out = g.next();
    return out;
}

// Standard normal via Box-Muller, consuming the generator two uniforms at a
// time and caching the second variate.
class GaussianGen {
  public:
    explicit GaussianGen(uint64_t seed) : gen_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = gen_.next_double();
        } while (u1 <= 0.0);
        double u2 = gen_.next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

    Vec3 next_unit_vector() {
        for (;;) {
            Vec3 v{next(), next(), next()};
            double n = v.norm();
            if (n > 1e-12) return v * (1.0 / n);
        }
    }

  private:
    SplitMix64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ticp
