#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace rrag {

/// Philox4x32-10 counter-based block cipher (Salmon et al. 2011).
/// Output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter counter, Key key) noexcept;
};

/// Reproducible stream of uniform and normal deviates.
///
/// The key is the 64-bit master seed; the counter carries the 64-bit stream id
/// in its upper words and a 64-bit block index in its lower words, so distinct
/// stream ids never overlap. Each Philox block yields two 64-bit words, used in
/// order. Uniforms take the top 53 bits of a word and are centred in their cell,
/// so they lie strictly inside (0, 1).
///
/// Normals use the Marsaglia polar method: draw (u, v) uniform on the square
/// [-1, 1]^2, reject unless 0 < s = u^2 + v^2 < 1, and return u*f first and
/// cache v*f for the next call, where f = sqrt(-2 ln s / s).
///
/// A stream is single-owner and must not be shared between threads.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept;
  double next_normal(double mean = 0.0, double stddev = 1.0) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> words_{};
  int next_word_ = 2;
  std::optional<double> cached_normal_;
};

}  // namespace rrag
