#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bqs {

/// Philox4x32-10 block function. Maps a 128-bit counter and a 64-bit key to
/// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator: (seed, stream) select an independent sequence,
/// and every draw is a pure function of (seed, stream, position). Two
/// generators built from the same triple produce identical output on every
/// platform.
///
/// Satisfies UniformRandomBitGenerator, but std distributions are avoided in
/// this code base because their output is implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// One fair bit.
  int bit();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on {0, ..., bound - 1}; bound must be positive. Rejection
  /// sampling keeps the result exactly uniform.
  std::uint64_t below(std::uint64_t bound);

  /// A generator for a sub-stream derived from this one. Used to give each
  /// trial (or each world of a trial) its own isolated stream.
  Rng fork(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t position() const { return counter_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_words_left_ = 0;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
};

}  // namespace bqs
