#pragma once

#include <vector>

#include "lfpp/intervals.hpp"
#include "lfpp/params.hpp"

namespace lfpp {

enum class TileKind {
  copy,       // full-margin copy one scale step down
  layer,      // full-width core rectangle of span a_depth (two per node)
  principal,  // aspect-Gamma core rectangle Gamma*a_{depth} x a_{depth}
  mid         // full-margin copy m+1 scale steps down, in the middle strip
};

// One child rectangle of a tiling node, in the parent's core coordinates
// (core lower-left corner at the origin).
struct TileChild {
  TileKind kind;
  int depth;      // scale index of the child's own core width unit
  int row;        // 1 = upper span position, 2 = lower
  int col;        // 1 = left, 2 = right (copies/principal), 0 otherwise
  RectRegion rect;  // full extent including margins for copy/mid kinds
  RectRegion core;  // margin-free core
};

// Margin-padded rectangle of scale `depth`: core floor(k*Gamma*a_depth) x
// floor(k*a_{depth+1}) with horizontal margins floor(k*Gamma*a_{depth-m-1})
// and vertical margins floor(k*a_{depth-m}), translated so the core's
// lower-left corner sits at z.
RectRegion padded_rect(const ScaleParams& p, int depth, double k,
                       std::int64_t zx, std::int64_t zy);
RectRegion core_rect(const ScaleParams& p, int depth, double k,
                     std::int64_t zx, std::int64_t zy);

// Children of a node of scale `depth`: 4 copies one step down (two columns x
// two span rows), 2 full-width layers, 8 principal rectangles (two stacked in
// each copy), and 2^{m-1} mid copies per span row anchored to the middle
// strip. Coordinates are relative to the node's core lower-left corner.
std::vector<TileChild> tile_level(const ScaleParams& p, int depth, double k);

}  // namespace lfpp
