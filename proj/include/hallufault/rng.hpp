#pragma once

#include <cstdint>

namespace hallufault {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Minimal deterministic PRNG stream. Chosen over <random> engines so that the
// draw sequence is pinned by this code alone.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi].
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

// Derives an independent per-run seed from (base, condition, run). Scheduling
// order never enters, so batch results are independent of parallelism.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t condition,
                                 std::uint64_t run) {
    std::uint64_t x = base;
    x ^= splitmix64(condition + 0x632be59bd9b4e019ULL);
    x = splitmix64(x);
    x ^= splitmix64(run + 0xd6e8feb86659fd93ULL);
    return splitmix64(x);
}

}  // namespace hallufault
