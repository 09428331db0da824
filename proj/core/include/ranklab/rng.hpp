#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ranklab {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream.
///
/// The 64-bit seed is the Philox key; the stream id occupies the upper half
/// of the 128-bit counter and the draw index the lower half, so two streams
/// with different ids never share a counter value. Streams with equal
/// (seed, stream_id) yield identical sequences.
///
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (cached_ == 0) refill();
    return buffer_[--cached_];
  }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() noexcept {
    constexpr double scale = 1.0 / 9007199254740992.0; // 2^-53
    return (static_cast<double>((*this)() >> 11) + 0.5) * scale;
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of Philox blocks consumed so far.
  std::uint64_t blocks() const noexcept { return block_; }

  /// Derive an independent stream sharing this stream's seed.
  RngStream substream(std::uint64_t stream_id) const noexcept {
    return RngStream(seed_, stream_id);
  }

private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cached_ = 0;
};

} // namespace ranklab
