#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace pdsafe {

/// Seeded random stream.
///
/// Child streams are derived with `split(key)`; a child depends only on the
/// parent's seed and the key, never on how many numbers the parent has drawn.
/// The learner uses this to give every iteration (and every phase inside an
/// iteration) its own stream, so a run resumed at iteration k replays the
/// same draws as the uninterrupted run.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random>
/// distributions directly.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  RngStream split(std::uint64_t key) const;

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace pdsafe
