#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace eamod {

// All randomness in the project flows from one experiment seed. Sub-streams
// are derived with derive_seed(base, purpose, index) so that runs are
// reproducible and streams for different purposes never collide.
enum class SeedPurpose : std::uint64_t {
    GridStations = 1,
    SynthRequests = 2,
    Subsample = 3,
    Scenario = 4,
    Solver = 5,
    Fuzz = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, SeedPurpose purpose, std::uint64_t index = 0) {
    return splitmix64(splitmix64(base ^ (static_cast<std::uint64_t>(purpose) << 32)) + index);
}

/// mt19937_64 wrapper with platform-independent uniform draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    int int_below(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace eamod
