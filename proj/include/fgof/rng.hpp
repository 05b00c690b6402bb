#pragma once

#include <cstdint>
#include <random>

namespace fgof {

// splitmix64 finalizer, used to turn structured ids into well-spread seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives the seed of sub-stream (purpose, index) of a master seed.  The
// derivation is a pure function, so streams can be created in any order and
// from any worker thread without coordination.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose,
                                 std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ purpose) ^ index);
}

namespace stream_purpose {
inline constexpr std::uint64_t data = 1;         // simulated samples
inline constexpr std::uint64_t multipliers = 2;  // wild bootstrap draws
inline constexpr std::uint64_t grid = 3;         // sphere grid shift
inline constexpr std::uint64_t replication = 4;  // per-replicate master seeds
}  // namespace stream_purpose

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}
  RngStream(std::uint64_t master, std::uint64_t purpose, std::uint64_t index)
      : engine_(derive_seed(master, purpose, index)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace fgof
