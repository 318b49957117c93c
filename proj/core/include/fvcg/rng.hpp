#pragma once

#include <cstdint>
#include <random>

namespace fvcg {

// Seeded generator whose draws are identical across standard libraries:
// mt19937_64's output sequence is fixed by the standard, and the real-valued
// draws are built from its top 53 bits instead of uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi); returns lo when the range is degenerate.
  double uniform(double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * unit(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fvcg
