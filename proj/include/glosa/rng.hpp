#pragma once

#include <cstdint>
#include <random>

namespace glosa {

/// Seeded Mersenne Twister (mt19937_64) with a platform-independent double
/// extraction: the raw 64-bit stream is standardized, and the top 53 bits map
/// to [0, 1) the same way everywhere.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }
    uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace glosa
