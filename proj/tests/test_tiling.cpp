#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "lfpp/errors.hpp"
#include "lfpp/tiling.hpp"

using namespace lfpp;

namespace {

std::int64_t fl(double x) { return static_cast<std::int64_t>(std::floor(x)); }

int count_kind(const std::vector<TileChild>& cs, TileKind k) {
  int n = 0;
  for (const auto& c : cs)
    if (c.kind == k) ++n;
  return n;
}

}  // namespace

TEST_CASE("child census at depth 4") {
  const auto p = make_scale_params(2, 2);
  const auto cs = tile_level(p, 4, 1.0);
  CHECK(count_kind(cs, TileKind::copy) == 4);
  CHECK(count_kind(cs, TileKind::layer) == 2);
  CHECK(count_kind(cs, TileKind::principal) == 8);
  CHECK(count_kind(cs, TileKind::mid) == 2 * (1 << (p.m - 1)));
}

TEST_CASE("copies sit flush against the core edges") {
  const auto p = make_scale_params(2, 2);
  const int depth = 4;
  const auto cs = tile_level(p, depth, 1.0);
  const std::int64_t W = fl(p.Gamma * scale_length(p, depth));
  const std::int64_t H = fl(scale_length(p, depth + 1));
  for (const auto& c : cs) {
    if (c.kind != TileKind::copy) continue;
    if (c.col == 1) CHECK(c.core.base.left == 0);
    if (c.col == 2) CHECK(c.core.base.right == W);
    if (c.row == 2) CHECK(c.core.span.left == 0);
    if (c.row == 1) CHECK(c.core.span.right == H);
  }
}

TEST_CASE("principal rectangles nest inside their layer") {
  const auto p = make_scale_params(2, 2);
  const auto cs = tile_level(p, 4, 1.0);
  for (const auto& q : cs) {
    if (q.kind != TileKind::principal) continue;
    bool inside_some_layer = false;
    for (const auto& lay : cs) {
      if (lay.kind != TileKind::layer || lay.row != q.row) continue;
      inside_some_layer = lay.core.contains(q.core);
    }
    CHECK(inside_some_layer);
    // Aspect: width Gamma * a_{depth-1}, span a_{depth-1}.
    CHECK(q.core.width() == fl(p.Gamma * scale_length(p, 3)));
    CHECK(q.core.height() == fl(scale_length(p, 3)));
  }
}

TEST_CASE("padded child rectangles stay inside the padded parent") {
  const auto p = make_scale_params(2, 2);
  for (int depth : {3, 4, 5}) {
    const auto parent = padded_rect(p, depth, 1.0, 0, 0);
    for (const auto& c : tile_level(p, depth, 1.0)) CHECK(parent.contains(c.rect));
  }
}

TEST_CASE("mid copies live in the middle strip") {
  const auto p = make_scale_params(2, 2);
  const int depth = 4;
  const auto cs = tile_level(p, depth, 1.0);
  const std::int64_t W = fl(p.Gamma * scale_length(p, depth));
  const std::int64_t wc = fl(p.Gamma * scale_length(p, depth - 1));
  const std::int64_t mid_x =
      static_cast<std::int64_t>(std::ceil(p.Gamma * scale_length(p, depth - 1)));
  for (const auto& c : cs) {
    if (c.kind != TileKind::mid) continue;
    CHECK(c.depth == depth - p.m - 1);
    CHECK(c.core.base.left == mid_x);
    // Clear of the right column of copies.
    CHECK(c.core.base.right <= W - wc);
  }
}

TEST_CASE("mid copy span anchors come from the principal covering") {
  const auto p = make_scale_params(2, 2);
  const int depth = 4;
  const auto anchors = covering_principal(p, depth, 1.0, 0, p.m - 1);
  REQUIRE(anchors.size() == 2);
  const std::int64_t H = fl(scale_length(p, depth + 1));
  const std::int64_t hl = fl(scale_length(p, depth));
  int seen_row1 = 0, seen_row2 = 0;
  for (const auto& c : tile_level(p, depth, 1.0)) {
    if (c.kind != TileKind::mid) continue;
    const std::int64_t ry = (c.row == 1) ? H - hl : 0;
    const std::int64_t off = c.core.span.left - ry;
    CHECK((off == anchors[0].iv.left || off == anchors[1].iv.left));
    if (c.row == 1) ++seen_row1;
    if (c.row == 2) ++seen_row2;
  }
  CHECK(seen_row1 == 2);
  CHECK(seen_row2 == 2);
}

TEST_CASE("degenerate scales are rejected") {
  const auto p = make_scale_params(2, 2);
  CHECK_THROWS_AS(tile_level(p, 1, 1.0), usage_error);
  CHECK_THROWS_AS(tile_level(p, 4, -1.0), usage_error);
}
