#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace reloc {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser, used to turn user seeds into well-mixed keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Purpose tags so that environment and Monte Carlo streams never collide.
enum class StreamTag : std::uint64_t {
  Environment = 1,
  Replica = 2,
  ReplicaAlt = 3,
  Test = 99,
};

/// Counter-based random stream. The stream identity is (key, stream id);
/// the position inside it is a 64-bit block counter, so any replica index
/// maps to an independent stream without sequential seeding. Satisfies
/// UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t key, std::uint64_t stream_id) : key_(key), stream_id_(stream_id) {}

  /// Stream for (seed, purpose, index); e.g. replica r of a Monte Carlo arm.
  static Stream derive(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    return Stream(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag))), index);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (buffered_ == 0) refill();
    return buffer_[--buffered_];
  }

  /// Uniform double in the open interval (0, 1) with 53 random bits.
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<result_type, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace reloc
