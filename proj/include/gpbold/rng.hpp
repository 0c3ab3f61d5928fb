#pragma once

#include <cstdint>
#include <random>

#include "gpbold/types.hpp"

namespace gpbold {

/// Deterministic random stream. One instance per chain / dataset; never
/// shared across threads. Sub-streams derived via (seed, stream) give
/// independent sequences for concurrent work items.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    gen_.seed(seq);
  }

  /// Uniform draw on [0, 1).
  double uniform() { return uniform_(gen_); }

  /// Uniform draw on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw.
  double normal() { return normal_(gen_); }

  Vector normal_vector(Index n) {
    Vector z(n);
    for (Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  /// Gamma(shape, scale) draw.
  double gamma(double shape, double scale) {
    std::gamma_distribution<double> d(shape, scale);
    return d(gen_);
  }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gpbold
