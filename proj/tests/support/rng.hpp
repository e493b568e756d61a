#pragma once

#include <cstdint>
#include <random>

namespace testsupport {

/// Deterministic RNG wrapper: derives uniforms from raw mt19937_64 output so
/// sequences do not depend on the standard library's distribution internals.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t bits() { return engine_(); }

    double uniform() { // [0, 1)
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) { // inclusive
        return lo + static_cast<int>(bits() % static_cast<uint64_t>(hi - lo + 1));
    }

    bool chance(double p) { return uniform() < p; }

  private:
    std::mt19937_64 engine_;
};

} // namespace testsupport
