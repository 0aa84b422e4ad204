#include "rfi/rng.hpp"

#include <cmath>
#include <numbers>

namespace rfi {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_id, std::uint32_t substream)
    : seed_(base_seed), stream_(stream_id), substream_(substream & 0xFFFFu) {}

std::uint64_t RngStream::next_u64() {
  // Each Philox block yields two 64-bit draws; block index is position / 2 (48 bits).
  const std::uint64_t block = position_ >> 1;
  if ((position_ & 1u) == 0) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block),
        static_cast<std::uint32_t>((block >> 32) & 0xFFFFu) | (substream_ << 16),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    block_ = philox4x32_10(ctr, {static_cast<std::uint32_t>(seed_),
                                 static_cast<std::uint32_t>(seed_ >> 32)});
  }
  const std::size_t half = (position_ & 1u) * 2;
  ++position_;
  return (static_cast<std::uint64_t>(block_[half + 1]) << 32) | block_[half];
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rfi
