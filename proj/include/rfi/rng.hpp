#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rfi {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream addressed by (base_seed, stream_id, substream).
///
/// The key is the base seed; the counter packs the stream id, the substream
/// tag and the position within the stream. Streams with distinct addresses
/// never share a counter, and re-creating a stream with the same address
/// reproduces the draw sequence bit for bit. One "draw" is one 64-bit word.
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  /// Substream tags used by the chain module.
  static constexpr std::uint32_t kPrimaryFamily = 0;
  static constexpr std::uint32_t kSecondFamily = 1;
  static constexpr std::uint32_t kInitialLaw = 2;

  RngStream(std::uint64_t base_seed, std::uint64_t stream_id, std::uint32_t substream = 0);

  std::uint64_t base_seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  std::uint32_t substream() const noexcept { return substream_; }
  /// Number of 64-bit draws consumed so far.
  std::uint64_t draws() const noexcept { return position_; }

  std::uint64_t next_u64();
  /// Uniform on [0,1) with 53 random bits. Consumes one draw.
  double uniform();
  /// Uniform on [lo,hi). Consumes one draw.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by Box-Muller (cosine branch). Consumes two draws.
  double normal();

  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint32_t substream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> block_{};
};

}  // namespace rfi
