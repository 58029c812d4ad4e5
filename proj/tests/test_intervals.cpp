#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "lfpp/errors.hpp"
#include "lfpp/intervals.hpp"

using namespace lfpp;

namespace {

std::int64_t fl(double x) { return static_cast<std::int64_t>(std::floor(x)); }

}  // namespace

TEST_CASE("one-step partition splits into side, middle, side") {
  const auto p = make_scale_params(2, 2);
  const auto ps = partition(p, 3, 1.0, 0.0, 1);
  REQUIRE(ps.size() == 3);
  CHECK(ps[0].principal);
  CHECK_FALSE(ps[1].principal);
  CHECK(ps[2].principal);
  CHECK(ps[0].depth == 1);
  CHECK(ps[1].depth == 3);  // middle drops m+1 scale steps
  CHECK(ps[2].depth == 1);
  CHECK(ps[0].right - ps[0].left ==
        doctest::Approx(scale_length(p, 2)).epsilon(1e-12));
  CHECK(ps[1].right - ps[1].left ==
        doctest::Approx(scale_length(p, 0)).epsilon(1e-12));
  // Pieces tile the interval in order.
  CHECK(ps[0].left == 0.0);
  for (std::size_t i = 1; i < ps.size(); ++i)
    CHECK(ps[i].left == doctest::Approx(ps[i - 1].right).epsilon(1e-12));
  CHECK(ps[2].right == doctest::Approx(scale_length(p, 3)).epsilon(1e-12));
}

TEST_CASE("partition piece counts and principal lengths") {
  const auto p = make_scale_params(2, 2);
  for (int d = 1; d <= 4; ++d) {
    const auto ps = partition(p, 6, 1.3, 2.5, d);
    const double bound = std::pow(p.base(), d + p.m);
    CHECK(static_cast<double>(ps.size()) <= bound);
    int principal = 0;
    double total = 0.0;
    for (const auto& piece : ps) {
      total += piece.right - piece.left;
      if (piece.principal) {
        ++principal;
        CHECK(piece.right - piece.left ==
              doctest::Approx(1.3 * scale_length(p, 6 - d)).epsilon(1e-12));
        CHECK(piece.depth == d);
      }
    }
    CHECK(principal == (1 << d));
    CHECK(total == doctest::Approx(1.3 * scale_length(p, 6)).epsilon(1e-11));
  }
}

TEST_CASE("covering hand enumeration at l=3, d=1") {
  // With m = 2: a_3 ~ 10.73, a_2 ~ 4.86, a_0 = 1. Snapped pieces on [0, 10]:
  // left [0,4], middle [5,6], right [6,10].
  const auto p = make_scale_params(2, 2);
  const auto cs = covering(p, 3, 1.0, 0, 1);
  REQUIRE(cs.size() == 3);
  CHECK(cs[0].iv.left == 0);
  CHECK(cs[0].iv.right == 4);
  CHECK(cs[0].principal);
  CHECK(cs[1].iv.left == 5);
  CHECK(cs[1].iv.right == 6);
  CHECK_FALSE(cs[1].principal);
  CHECK(cs[2].iv.left == 6);
  CHECK(cs[2].iv.right == 10);
  CHECK(cs[2].principal);
}

TEST_CASE("covering endpoints, overlap and principal cardinality") {
  const auto p = make_scale_params(2, 2);
  for (double k : {1.0, 1.37, 2.9}) {
    for (int l = 4; l <= 6; ++l) {
      for (int d = 1; d <= 3; ++d) {
        if (k * scale_length(p, l - d) < 2.0) continue;
        const std::int64_t x = 7;
        const auto cs = covering(p, l, k, x, d);
        const std::int64_t w = fl(k * scale_length(p, l));
        CHECK(cs.front().iv.left == x);
        CHECK(cs.back().iv.right == x + w);
        const double bound = std::pow(p.base(), d + p.m);
        CHECK(static_cast<double>(cs.size()) <= bound);
        for (std::size_t i = 1; i < cs.size(); ++i) {
          // No gaps, and adjacent pieces share at most two lattice points.
          CHECK(cs[i].iv.left <= cs[i - 1].iv.right + 1);
          CHECK(cs[i - 1].iv.right - cs[i].iv.left + 1 <= 2);
        }
        const std::int64_t want = fl(k * scale_length(p, l - d)) + 1;
        int principal = 0;
        for (const auto& piece : cs)
          if (piece.principal) {
            ++principal;
            CHECK(piece.iv.points() == want);
          }
        CHECK(principal == (1 << d));
      }
    }
  }
}

TEST_CASE("principal covering is the principal subsequence") {
  const auto p = make_scale_params(2, 2);
  const auto all = covering(p, 5, 1.7, -3, 2);
  const auto pr = covering_principal(p, 5, 1.7, -3, 2);
  std::vector<CoverPiece> filtered;
  for (const auto& piece : all)
    if (piece.principal) filtered.push_back(piece);
  REQUIRE(pr.size() == filtered.size());
  for (std::size_t i = 0; i < pr.size(); ++i) {
    CHECK(pr[i].iv.left == filtered[i].iv.left);
    CHECK(pr[i].iv.right == filtered[i].iv.right);
    CHECK(pr[i].depth == filtered[i].depth);
  }
}

TEST_CASE("covering rejects sub-lattice principal scales") {
  const auto p = make_scale_params(2, 2);
  CHECK_THROWS_AS(covering(p, 1, 1.0, 0, 1), usage_error);
  CHECK_THROWS_AS(covering(p, 3, 1.0, 0, 1000), usage_error);
  CHECK_THROWS_AS(covering(p, 3, -1.0, 0, 1), usage_error);
  CHECK_THROWS_AS(partition(p, 3, 1.0, 0.0, 0), usage_error);
}

TEST_CASE("mirror padding identity between left and right pieces") {
  // Right pieces end flush at their parent's right endpoint, so every split
  // produces a left/right pair of equal width.
  const auto p = make_scale_params(2, 2);
  const auto cs = covering(p, 6, 1.37, 0, 1);
  REQUIRE(cs.size() == 3);
  CHECK(cs[0].iv.length() == cs[2].iv.length());
  const auto deep = covering(p, 6, 1.37, 0, 2);
  // First and last pieces at depth 2 still mirror each other.
  CHECK(deep.front().iv.length() == deep.back().iv.length());
}
