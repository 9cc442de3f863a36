#pragma once

#include <cmath>
#include <cstdint>

namespace parex {

/// splitmix64, used to derive independent substream seeds from a master
/// seed deterministically.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic, platform-independent normal stream: xoshiro-free
/// splitmix64 generator with Box-Muller. One instance per chunk; chunk
/// seeds derive from (master_seed, chunk_index) so results do not depend
/// on threading or chunk scheduling.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t chunk_index) {
        std::uint64_t s = master_seed;
        (void)splitmix64(s);
        s ^= 0x632be59bd9b4e019ULL * (chunk_index + 1);
        state_ = s;
        (void)splitmix64(state_);
    }

    double uniform() {
        // 53-bit mantissa in (0, 1]
        return ((splitmix64(state_) >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace parex
