#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mzphase {

/// splitmix64 mixing step (Steele, Lea, Flood 2014). Used only to derive
/// well-separated stream seeds from (seed, index) pairs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable seed-to-stream mapping: the stream for indices (a, b) under a base
/// seed is splitmix64 applied twice, folding in one index per step. Trials
/// that differ in any index get independent streams, so repetition loops can
/// run in any order or in parallel without sharing generator state.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t a,
                                        std::uint64_t b = 0) {
    std::uint64_t s = seed;
    std::uint64_t x = splitmix64(s) ^ a;
    std::uint64_t y = splitmix64(x) ^ b;
    return splitmix64(y);
}

/// Standard normal draws from a seeded mt19937_64 via the Box-Muller
/// transform on 53-bit uniforms. The uniform-to-normal mapping is spelled
/// out here (rather than delegated to std::normal_distribution) so the
/// seed-to-sample mapping is fully documented and stable on one platform.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        // map u1 = 0 to the smallest positive representable argument
        double radius = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-54));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mzphase
