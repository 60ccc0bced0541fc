#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kspin {

/// Seedable 64-bit generator with derived substreams.
///
/// A stream is identified by (seed, ids...): the words are fed through
/// std::seed_seq into a fresh mt19937_64, so distinct id paths give
/// statistically independent generators and the same path always replays.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  bool coin() { return (engine_() >> 63) != 0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kspin
