#pragma once

#include <cstdint>

namespace s2 {

// splitmix64 stream. Used wherever reproducible-by-bytes pseudo-random
// data is needed (fixtures, synthetic benchmark inputs, tests); pure
// integer state plus one float multiply, so the sequence is identical on
// every platform.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    float next_float() { return static_cast<float>(next() >> 40) * 0x1.0p-24f; }

    float uniform(float lo, float hi) { return lo + (hi - lo) * next_float(); }

    // Approximately standard normal (Irwin-Hall sum of 12 uniforms);
    // avoids libm so the bytes are platform-independent.
    float gaussian() {
        float s = 0.0f;
        for (int i = 0; i < 12; ++i) s += next_float();
        return s - 6.0f;
    }

    // Fisher-Yates index for shuffling: uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

} // namespace s2
