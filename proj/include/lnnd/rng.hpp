#pragma once

// Counter-based random streams. A stream is named by (seed, replicate, role);
// within a stream, every element (a point, an arrival, a probe) owns its own
// counter range, so any element can be regenerated in isolation and the
// result never depends on thread count or iteration order.

#include <array>
#include <cstdint>
#include <limits>

namespace lnnd {

enum class StreamRole : std::uint64_t {
  points = 1,       // coordinates of the shared point sequence X_1, X_2, ...
  arrivals = 2,     // unit-rate arrival gaps of the monotone Poisson family
  count_minus = 3,  // N(n) of the coupled triple
  count_extra = 4,  // M(n) of the coupled triple
  probes = 5,       // Monte Carlo probes (coverage checks, oracles)
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  StreamRole role = StreamRole::points;

  constexpr std::array<std::uint32_t, 2> philox_key() const noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (replicate * 0xD1B54A32D192ED03ULL));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(role) * 0xAEF17502108EF2D9ULL));
    return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  }
};

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53U;
  constexpr std::uint32_t kM1 = 0xCD9E8D57U;
  constexpr std::uint32_t kW0 = 0x9E3779B9U;
  constexpr std::uint32_t kW1 = 0xBB67AE85U;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

/// UniformRandomBitGenerator over one element of a stream. Usable with any
/// <random> distribution.
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  PhiloxEngine(const StreamKey& stream, std::uint64_t element) noexcept
      : key_(stream.philox_key()), element_(element) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (next_ == 4) refill();
    return buffer_[next_++];
  }

 private:
  void refill() noexcept {
    buffer_ = philox4x32({static_cast<std::uint32_t>(element_),
                          static_cast<std::uint32_t>(element_ >> 32),
                          static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32)},
                         key_);
    ++block_;
    next_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t element_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

}  // namespace lnnd
