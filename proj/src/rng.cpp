#include "lfpp/rng.hpp"

#include <cmath>

namespace lfpp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

std::array<std::uint32_t, 4> CounterRng::cell(std::uint64_t index,
                                              std::uint32_t stream) const {
  std::array<std::uint32_t, 4> c = {static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32),
                                    replicate_, stream};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

double CounterRng::uniform(std::uint64_t index, std::uint32_t stream) const {
  const auto c = cell(index, stream);
  const std::uint64_t u53 =
      (static_cast<std::uint64_t>(c[0]) << 21) ^ (static_cast<std::uint64_t>(c[1]) >> 11);
  // Offset by half a grid step so the value is strictly inside (0,1).
  return (static_cast<double>(u53 & ((1ull << 53) - 1)) + 0.5) * 0x1p-53;
}

double CounterRng::normal(std::uint64_t index, std::uint32_t stream) const {
  const auto c = cell(index, stream);
  const std::uint64_t a =
      ((static_cast<std::uint64_t>(c[0]) << 21) ^ (static_cast<std::uint64_t>(c[1]) >> 11)) &
      ((1ull << 53) - 1);
  const std::uint64_t b =
      ((static_cast<std::uint64_t>(c[2]) << 21) ^ (static_cast<std::uint64_t>(c[3]) >> 11)) &
      ((1ull << 53) - 1);
  const double u1 = (static_cast<double>(a) + 0.5) * 0x1p-53;
  const double u2 = (static_cast<double>(b) + 0.5) * 0x1p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

bool CounterRng::coin(std::uint64_t index, std::uint32_t stream) const {
  return (cell(index, stream)[0] & 1u) != 0;
}

std::uint64_t CounterRng::below(std::uint64_t n, std::uint64_t index,
                                std::uint32_t stream) const {
  if (n <= 1) return 0;
  const auto c = cell(index, stream);
  const std::uint64_t w =
      (static_cast<std::uint64_t>(c[0]) << 32) | c[1];
  // 128-bit multiply-shift keeps the map unbiased to ~2^-64.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(w) * n) >> 64);
}

}  // namespace lfpp
