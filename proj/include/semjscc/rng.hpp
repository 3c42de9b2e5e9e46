#pragma once

#include <cstdint>

#include "semjscc/core.hpp"

namespace semjscc {

// Counter-based random stream: every draw is a pure function of
// (seed, stream, counter), so parallel and serial sample loops produce
// bit-identical values no matter how the loop is sharded.
//
// The mixer is the splitmix64 finalizer applied to a Weyl-sequenced counter,
// which passes standard avalanche tests and is more than adequate for
// Monte Carlo integration.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0)
        : key_(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(stream * 0xbf58476d1ce4e5b9ULL)),
          ctr_(counter) {}

    // Substream for sample index i of a keyed estimator; draws within the
    // sample advance the counter.
    static CounterRng for_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        CounterRng r(seed, stream);
        r.key_ = mix(r.key_ + index * 0x94d049bb133111ebULL);
        return r;
    }

    std::uint64_t next_u64() { return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on (0, 1]: never returns 0, so log(u) is always finite.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; caches the second deviate.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(6.283185307179586477 * u2);
        double s = std::sin(6.283185307179586477 * u2);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace semjscc
