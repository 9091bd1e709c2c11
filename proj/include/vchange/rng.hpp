#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "vchange/errors.hpp"

namespace vchange {

// Deterministic random source used everywhere randomness is needed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard, so identical seeds give identical streams on every platform.
// Derived draws (bounded integers, uniforms) are implemented here explicitly
// instead of going through std::*_distribution, whose results are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n) by rejection; unbiased for every n.
    uint64_t bounded(uint64_t n) {
        if (n == 0) throw UsageError("Rng::bounded: n must be positive");
        const uint64_t min = (0 - n) % n;  // 2^64 mod n
        uint64_t x = next_u64();
        while (x < min) x = next_u64();
        return x % n;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Standard normal via Box-Muller; the spare value is cached so draws come
    // in a fixed order.
    double normal(double mean = 0.0, double sigma = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + sigma * spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return mean + sigma * r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace vchange
