#pragma once

#include <array>
#include <cstdint>

namespace lfpp {

// Counter-based random numbers (Philox4x32-10). Every draw is a pure function
// of (seed, replicate, index, stream), so samples are reproducible regardless
// of evaluation order or thread count. replicate and stream are 32-bit lanes
// of the counter; the 64-bit seed is the key.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t replicate)
      : seed_(seed), replicate_(replicate) {}

  std::uint64_t seed() const { return seed_; }
  std::uint32_t replicate() const { return replicate_; }

  // 128 random bits for a given (index, stream) cell.
  std::array<std::uint32_t, 4> cell(std::uint64_t index,
                                    std::uint32_t stream) const;

  // Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
  double uniform(std::uint64_t index, std::uint32_t stream = 0) const;

  // Standard normal via Box-Muller on one counter cell.
  double normal(std::uint64_t index, std::uint32_t stream = 0) const;

  // Fair coin.
  bool coin(std::uint64_t index, std::uint32_t stream = 0) const;

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n, std::uint64_t index,
                      std::uint32_t stream = 0) const;

 private:
  std::uint64_t seed_;
  std::uint32_t replicate_;
};

}  // namespace lfpp
