#pragma once

#include <cstdint>
#include <limits>

namespace rlwe {

// Stream tags keep the draws of different consumers disjoint even when they
// share a seed and an index.
enum class StreamTag : std::uint64_t {
  kSecret = 1,
  kSample = 2,
  kUniform = 3,
  kDual = 4,
  kSwitch = 5,
  kAuxiliary = 6,
};

inline std::uint64_t stream_id(StreamTag tag, std::uint64_t index) {
  return (static_cast<std::uint64_t>(tag) << 56) ^ index;
}

/// Counter-based generator: the i-th output of a stream is a fixed bijective
/// mix of (key, i), so any stream can be opened independently and consumed on
/// any thread without changing the values it produces.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rlwe
