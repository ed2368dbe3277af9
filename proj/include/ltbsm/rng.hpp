#pragma once

#include <cstdint>

namespace ltbsm::rng {

// Counter-based pseudo-random draws. Every random decision in the toolkit is
// a pure function of (seed, stream tags...), so results are independent of
// evaluation order and thread count, and lazily skipped draws cost nothing.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

struct Key {
    uint64_t state;

    explicit constexpr Key(uint64_t seed) : state(seed) {}

    Key derive(uint64_t tag) const { return Key{mix(state, tag)}; }
    Key derive(uint64_t t1, uint64_t t2) const { return derive(t1).derive(t2); }
    Key derive(uint64_t t1, uint64_t t2, uint64_t t3) const {
        return derive(t1).derive(t2).derive(t3);
    }

    uint64_t bits(uint64_t index) const { return mix(state, index); }

    // uniform double in [0, 1)
    double unit(uint64_t index) const {
        return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
    }

    bool bernoulli(uint64_t index, double p) const { return unit(index) < p; }
};

// stream tags used across the toolkit; fixed values keep runs reproducible
// across refactors
enum Stream : uint64_t {
    kLossA = 0x101,
    kLossB = 0x102,
    kOutcome = 0x103,
    kInnerLossA = 0x104,
    kInnerLossB = 0x105,
    kTrial = 0x106,
    kThresholdEval = 0x107,
};

}  // namespace ltbsm::rng
