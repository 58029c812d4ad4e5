#include "lfpp/tiling.hpp"

#include <cmath>

#include "lfpp/errors.hpp"

namespace lfpp {

namespace {

std::int64_t fl(double x) { return static_cast<std::int64_t>(std::floor(x)); }
std::int64_t ce(double x) { return static_cast<std::int64_t>(std::ceil(x)); }

}  // namespace

RectRegion core_rect(const ScaleParams& p, int depth, double k, std::int64_t zx,
                     std::int64_t zy) {
  const std::int64_t bw = fl(k * p.Gamma * scale_length(p, depth));
  const std::int64_t sh = fl(k * scale_length(p, depth + 1));
  return {{zx, zx + bw}, {zy, zy + sh}};
}

RectRegion padded_rect(const ScaleParams& p, int depth, double k,
                       std::int64_t zx, std::int64_t zy) {
  RectRegion core = core_rect(p, depth, k, zx, zy);
  const std::int64_t mx = fl(k * p.Gamma * scale_length(p, depth - p.m - 1));
  const std::int64_t my = fl(k * scale_length(p, depth - p.m));
  return {{core.base.left - mx, core.base.right + mx},
          {core.span.left - my, core.span.right + my}};
}

std::vector<TileChild> tile_level(const ScaleParams& p, int depth, double k) {
  if (k <= 0.0) throw usage_error("tile_level: k must be > 0");
  const std::int64_t W = fl(k * p.Gamma * scale_length(p, depth));
  const std::int64_t H = fl(k * scale_length(p, depth + 1));
  const std::int64_t wc = fl(k * p.Gamma * scale_length(p, depth - 1));
  const std::int64_t hl = fl(k * scale_length(p, depth));      // layer span
  const std::int64_t hc = fl(k * scale_length(p, depth - 1));  // principal span
  if (wc < 2 || hc < 2)
    throw usage_error("tile_level: child scale below 2 lattice units");

  // Side-piece anchors; right/top pieces end flush at the parent edge.
  const std::int64_t px = W - wc;   // right column of copies
  const std::int64_t py = H - hl;   // upper row of copies
  const std::int64_t qy = hl - hc;  // upper principal inside a layer

  std::vector<TileChild> out;
  for (int row : {1, 2}) {
    const std::int64_t ry = (row == 1) ? py : 0;
    for (int col : {1, 2}) {
      const std::int64_t cx = (col == 1) ? 0 : px;
      TileChild c;
      c.kind = TileKind::copy;
      c.depth = depth - 1;
      c.row = row;
      c.col = col;
      c.core = core_rect(p, depth - 1, k, cx, ry);
      c.rect = padded_rect(p, depth - 1, k, cx, ry);
      out.push_back(c);
      for (int s : {1, 2}) {  // stacked principal rectangles, 1 = upper
        const std::int64_t sy = ry + ((s == 1) ? qy : 0);
        TileChild q;
        q.kind = TileKind::principal;
        q.depth = depth - 1;
        q.row = row;
        q.col = col;
        q.core = {{cx, cx + wc}, {sy, sy + hc}};
        q.rect = q.core;
        out.push_back(q);
      }
    }
    // Full-width layer rectangle for this row.
    TileChild lay;
    lay.kind = TileKind::layer;
    lay.depth = depth;
    lay.row = row;
    lay.col = 0;
    lay.core = {{0, W}, {ry, ry + hl}};
    lay.rect = lay.core;
    out.push_back(lay);

    // Mid copies fill the middle strip of this row, anchored at the principal
    // span offsets one scale above their own span.
    const std::int64_t mid_x = ce(k * p.Gamma * scale_length(p, depth - 1));
    const int nmid = 1 << (p.m - 1);
    auto offs = covering_principal(p, depth, k, 0, p.m - 1 >= 1 ? p.m - 1 : 1);
    // For m = 1 the single mid copy sits at the layer bottom.
    std::vector<std::int64_t> anchors;
    if (p.m == 1) {
      anchors.push_back(0);
    } else {
      for (const auto& piece : offs) anchors.push_back(piece.iv.left);
    }
    for (int i = 0; i < nmid && i < static_cast<int>(anchors.size()); ++i) {
      TileChild mc;
      mc.kind = TileKind::mid;
      mc.depth = depth - p.m - 1;
      mc.row = row;
      mc.col = 0;
      mc.core = core_rect(p, depth - p.m - 1, k, mid_x, ry + anchors[i]);
      mc.rect = padded_rect(p, depth - p.m - 1, k, mid_x, ry + anchors[i]);
      out.push_back(mc);
    }
  }
  return out;
}

}  // namespace lfpp
