#pragma once

#include <cstdint>
#include <random>

namespace coevo {

/// Seeded random stream for the agent engine.
///
/// Engine: std::mt19937_64 seeded with the 64-bit seed. Uniforms come from
/// std::generate_canonical and lie in (0, 1); binomial variates from
/// std::binomial_distribution. The draw order is fixed by the caller, so a
/// given seed reproduces a run bit for bit on the same standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  double uniform() {
    double u = 0.0;
    while (u == 0.0) u = std::generate_canonical<double, 64>(engine_);
    return u;
  }

  std::int64_t binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<std::int64_t> dist(n, p);
    return dist(engine_);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace coevo
