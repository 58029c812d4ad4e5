#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "lfpp/rng.hpp"

using namespace lfpp;

TEST_CASE("known answers for the 10-round counter cipher") {
  // Published test vectors: all-zero counter/key, and the pi-digits vector.
  {
    CounterRng r(0, 0);
    const auto c = r.cell(0, 0);
    CHECK(c[0] == 0x6627e8d5u);
    CHECK(c[1] == 0xe169c58du);
    CHECK(c[2] == 0xbc57ac4cu);
    CHECK(c[3] == 0x9b00dbd8u);
  }
  {
    // counter = {243f6a88, 85a308d3, 13198a2e, 03707344},
    // key = {a4093822, 299f31d0}.
    CounterRng r(0x299f31d0a4093822ull, 0x13198a2eu);
    const auto c = r.cell(0x85a308d3243f6a88ull, 0x03707344u);
    CHECK(c[0] == 0xd16cfe09u);
    CHECK(c[1] == 0x94fdccebu);
    CHECK(c[2] == 0x5001e420u);
    CHECK(c[3] == 0x24126ea1u);
  }
  {
    CounterRng r(0xffffffffffffffffull, 0xffffffffu);
    const auto c = r.cell(0xffffffffffffffffull, 0xffffffffu);
    CHECK(c[0] == 0x408f276du);
    CHECK(c[1] == 0x41c83b0eu);
    CHECK(c[2] == 0xa20bc7c6u);
    CHECK(c[3] == 0x6d5451fdu);
  }
}

TEST_CASE("draws are pure functions of their coordinates") {
  CounterRng a(42, 7), b(42, 7);
  // Interleave calls in different orders; values depend on coordinates only.
  const double x = a.uniform(5, 1);
  (void)a.uniform(900, 3);
  (void)b.uniform(17, 0);
  CHECK(b.uniform(5, 1) == x);
  CHECK(a.cell(123, 4) == b.cell(123, 4));
  // Any coordinate change changes the cell.
  CHECK(a.cell(123, 4) != a.cell(124, 4));
  CHECK(a.cell(123, 4) != a.cell(123, 5));
  CHECK(a.cell(123, 4) != CounterRng(43, 7).cell(123, 4));
  CHECK(a.cell(123, 4) != CounterRng(42, 8).cell(123, 4));
}

TEST_CASE("uniform values are strictly inside (0,1) with mean 1/2") {
  CounterRng r(2026, 0);
  const int n = 20000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform(i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("normal draws have the right first two moments") {
  CounterRng r(77, 3);
  const int n = 20000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(i);
    s1 += z;
    s2 += z * z;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("bounded draws are in range and roughly uniform") {
  CounterRng r(9001, 0);
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 14000;
  for (int i = 0; i < draws; ++i) {
    const auto v = r.below(n, i);
    REQUIRE(v < n);
    ++counts[static_cast<std::size_t>(v)];
  }
  const double expect = static_cast<double>(draws) / n;
  const double sd = std::sqrt(expect * (1.0 - 1.0 / n));
  for (auto c : counts) CHECK(std::abs(c - expect) < 5.0 * sd);
  CHECK(r.below(1, 0) == 0);
}

TEST_CASE("coin is roughly fair") {
  CounterRng r(5, 0);
  int heads = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) heads += r.coin(i) ? 1 : 0;
  CHECK(std::abs(heads - n / 2) < 350);  // 5 sigma
}
