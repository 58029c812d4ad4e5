#pragma once

#include <cstdint>
#include <vector>

#include "lfpp/gff.hpp"
#include "lfpp/intervals.hpp"
#include "lfpp/kernels.hpp"

namespace lfpp {

// Positive vertex weights on every lattice point of a rectangle, row-major
// like FieldSample. The canonical construction is weight = exp(gamma * field).
struct WeightedGrid {
  RectRegion region;
  std::vector<double> weight;

  double at(std::int64_t x, std::int64_t y) const {
    return weight[static_cast<std::size_t>(y - region.span.left) *
                      static_cast<std::size_t>(region.base.points()) +
                  static_cast<std::size_t>(x - region.base.left)];
  }
};

WeightedGrid make_weighted_grid(const FieldSample& field, double gamma);
WeightedGrid uniform_grid(const RectRegion& region, double w = 1.0);

// A minimising path and its weight: the sum of vertex weights along the path,
// both endpoints included.
struct PathResult {
  double weight = 0.0;
  std::vector<PointZ> path;
};

// Exact node-weighted shortest path on the 4-neighbour graph, label-setting
// with a deterministic row-major tie-break on equal-weight predecessors.
PathResult fpp_distance(const WeightedGrid& grid, PointZ x, PointZ y);

// Minimum weight over all paths joining the left and right edges of rect,
// moving only inside rect. Multi-source label-setting.
PathResult crossing_weight(const WeightedGrid& grid, const RectRegion& rect);

enum class ScanMode { point2point, crossing };

struct ExponentFit {
  double gamma = 0.0;
  std::vector<std::int64_t> sizes;
  std::vector<double> means;                 // per size, over replicas
  std::vector<std::vector<double>> values;   // [size][replicate]
  double slope = 0.0;
  double stderr_slope = 0.0;                 // bootstrap over replicas
  std::uint64_t seed = 0;
  ScanMode mode = ScanMode::point2point;
};

// For each square side N: draw zero-boundary fields, weight them with gamma,
// and record either the distance between (N/4, N/2) and (3N/4, N/2) or the
// left-right crossing weight of the centre half-square. Fits log(mean) against
// log(N) by least squares. gamma = 0 skips sampling (weights are all one).
ExponentFit exponent_scan(double gamma, const std::vector<std::int64_t>& sizes,
                          int replicas, std::uint64_t seed,
                          ScanMode mode = ScanMode::point2point,
                          std::int64_t budget = std::int64_t(1) << 30);

}  // namespace lfpp
