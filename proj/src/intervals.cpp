#include "lfpp/intervals.hpp"

#include <cmath>

#include "lfpp/errors.hpp"

namespace lfpp {

namespace {

void partition_rec(const ScaleParams& p, int l, double k, int d, int level,
                   double x, bool pure, std::vector<RIntervalLabeled>& out) {
  const double len = k * scale_length(p, level);
  if (level <= l - d) {
    out.push_back({x, x + len, l - level, pure});
    return;
  }
  const double side = k * scale_length(p, level - 1);
  partition_rec(p, l, k, d, level - 1, x, pure, out);
  partition_rec(p, l, k, d, level - p.m - 1, x + side, false, out);
  partition_rec(p, l, k, d, level - 1, x + len - side, pure, out);
}

}  // namespace

std::vector<RIntervalLabeled> partition(const ScaleParams& p, int l, double k,
                                        double x, int d) {
  if (k <= 0.0) throw usage_error("partition: k must be > 0");
  if (d < 1) throw usage_error("partition: d must be >= 1");
  std::vector<RIntervalLabeled> out;
  partition_rec(p, l, k, d, l, x, true, out);
  return out;
}

namespace {

// Integer covering recursion. A node is a translated copy of the snapped
// interval [y, y + floor(k*a_level)].
void covering_rec(const ScaleParams& p, int l, double k, int d, int level,
                  std::int64_t y, bool pure, bool principal_only,
                  std::vector<CoverPiece>& out) {
  const double len_r = k * scale_length(p, level);
  const std::int64_t w = static_cast<std::int64_t>(std::floor(len_r));
  if (level <= l - d) {
    out.push_back({{y, y + w}, l - level, pure});
    return;
  }
  const double side_r = k * scale_length(p, level - 1);
  const std::int64_t side_w = static_cast<std::int64_t>(std::floor(side_r));

  // Left piece keeps the parent's left endpoint.
  covering_rec(p, l, k, d, level - 1, y, pure, principal_only, out);

  // Middle piece starts at the ceiling of the real split point.
  if (!principal_only) {
    const auto mid_y = y + static_cast<std::int64_t>(std::ceil(side_r));
    covering_rec(p, l, k, d, level - p.m - 1, mid_y, false, principal_only, out);
  }

  // Right piece: the unique translate whose real right endpoint lands in
  // [parent right endpoint, parent right endpoint + 1); after snapping it
  // shares the parent's right endpoint, hence mirrors the left piece.
  const std::int64_t pr = y + w - side_w;
  // The translate must also be one of floor/ceil of the real split point.
  const double split_r = len_r - side_r;  // relative real start of right piece
  const auto lo = y + static_cast<std::int64_t>(std::floor(split_r));
  const auto hi = y + static_cast<std::int64_t>(std::ceil(split_r));
  if (pr < lo || pr > hi)
    throw numerical_error("covering: right-piece snap outside floor/ceil window");
  covering_rec(p, l, k, d, level - 1, pr, pure, principal_only, out);
}

}  // namespace

std::vector<CoverPiece> covering(const ScaleParams& p, int l, double k,
                                 std::int64_t x, int d) {
  if (k <= 0.0) throw usage_error("covering: k must be > 0");
  if (d < 1) throw usage_error("covering: d must be >= 1");
  if (k * scale_length(p, l - d) < 2.0)
    throw usage_error("covering: principal scale k*a_{l-d} must be >= 2");
  std::vector<CoverPiece> out;
  covering_rec(p, l, k, d, l, x, true, false, out);
  return out;
}

std::vector<CoverPiece> covering_principal(const ScaleParams& p, int l, double k,
                                           std::int64_t x, int d) {
  if (k <= 0.0) throw usage_error("covering: k must be > 0");
  if (d < 1) throw usage_error("covering: d must be >= 1");
  if (k * scale_length(p, l - d) < 2.0)
    throw usage_error("covering: principal scale k*a_{l-d} must be >= 2");
  std::vector<CoverPiece> out;
  covering_rec(p, l, k, d, l, x, true, true, out);
  return out;
}

}  // namespace lfpp
