#pragma once

#include <cstdint>
#include <random>

namespace tricept {

// Seeded random draws used across the library. The mt19937_64 engine is
// bit-specified by the standard; the mappings below avoid std::uniform_*
// distributions, whose output is implementation-defined, so the same seed
// gives the same stream everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    // Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) {
        return engine_() % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace tricept
