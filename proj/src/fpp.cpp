#include "lfpp/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "lfpp/errors.hpp"
#include "lfpp/rng.hpp"

namespace lfpp {

WeightedGrid make_weighted_grid(const FieldSample& field, double gamma) {
  WeightedGrid g;
  g.region = field.region;
  g.weight.resize(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i)
    g.weight[i] = std::exp(gamma * field.values[i]);
  return g;
}

WeightedGrid uniform_grid(const RectRegion& region, double w) {
  if (!(w > 0.0)) throw usage_error("uniform_grid: weight must be positive");
  WeightedGrid g;
  g.region = region;
  g.weight.assign(static_cast<std::size_t>(region.point_count()), w);
  return g;
}

namespace {

struct Solver {
  const WeightedGrid& grid;
  RectRegion clip;  // movement restricted to this sub-rectangle
  std::int64_t row_pts, n;
  std::vector<double> dist;
  std::vector<std::int64_t> pred;
  std::vector<char> settled;

  Solver(const WeightedGrid& g, const RectRegion& clip_)
      : grid(g),
        clip(clip_),
        row_pts(g.region.base.points()),
        n(g.region.point_count()),
        dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity()),
        pred(static_cast<std::size_t>(n), -1),
        settled(static_cast<std::size_t>(n), 0) {
    if (!g.region.contains(clip))
      throw usage_error("shortest path: rectangle outside the grid");
  }

  std::int64_t index(PointZ p) const {
    return (p.y - grid.region.span.left) * row_pts + (p.x - grid.region.base.left);
  }
  PointZ point(std::int64_t i) const {
    return {grid.region.base.left + i % row_pts,
            grid.region.span.left + i / row_pts};
  }
  bool inside(PointZ p) const {
    return p.x >= clip.base.left && p.x <= clip.base.right &&
           p.y >= clip.span.left && p.y <= clip.span.right;
  }

  // Label-setting with node costs: a vertex is charged when first settled.
  // Ties on tentative weight keep the smaller row-major predecessor.
  void run(const std::vector<PointZ>& sources) {
    using Entry = std::pair<double, std::int64_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    for (const auto& s : sources) {
      if (!inside(s)) throw usage_error("shortest path: source outside rectangle");
      const auto i = index(s);
      const double w = grid.weight[static_cast<std::size_t>(i)];
      if (w < dist[static_cast<std::size_t>(i)]) {
        dist[static_cast<std::size_t>(i)] = w;
        pred[static_cast<std::size_t>(i)] = i;  // roots point at themselves
        pq.push({w, i});
      }
    }
    while (!pq.empty()) {
      const auto [d, i] = pq.top();
      pq.pop();
      if (settled[static_cast<std::size_t>(i)]) continue;
      if (d > dist[static_cast<std::size_t>(i)]) continue;
      settled[static_cast<std::size_t>(i)] = 1;
      const auto p = point(i);
      const PointZ nbrs[4] = {
          {p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
      for (const auto& q : nbrs) {
        if (!inside(q)) continue;
        const auto j = index(q);
        if (settled[static_cast<std::size_t>(j)]) continue;
        const double cand = d + grid.weight[static_cast<std::size_t>(j)];
        if (cand < dist[static_cast<std::size_t>(j)]) {
          dist[static_cast<std::size_t>(j)] = cand;
          pred[static_cast<std::size_t>(j)] = i;
          pq.push({cand, j});
        } else if (cand == dist[static_cast<std::size_t>(j)] &&
                   i < pred[static_cast<std::size_t>(j)]) {
          pred[static_cast<std::size_t>(j)] = i;
        }
      }
    }
  }

  PathResult extract(std::int64_t target) const {
    PathResult res;
    res.weight = dist[static_cast<std::size_t>(target)];
    std::int64_t i = target;
    while (true) {
      res.path.push_back(point(i));
      const auto pr = pred[static_cast<std::size_t>(i)];
      if (pr == i) break;
      i = pr;
    }
    std::reverse(res.path.begin(), res.path.end());
    return res;
  }
};

}  // namespace

PathResult fpp_distance(const WeightedGrid& grid, PointZ x, PointZ y) {
  Solver s(grid, grid.region);
  if (!s.inside(x) || !s.inside(y))
    throw usage_error("fpp_distance: endpoints must lie in the region");
  s.run({x});
  return s.extract(s.index(y));
}

PathResult crossing_weight(const WeightedGrid& grid, const RectRegion& rect) {
  Solver s(grid, rect);
  std::vector<PointZ> sources;
  for (std::int64_t y = rect.span.left; y <= rect.span.right; ++y)
    sources.push_back({rect.base.left, y});
  s.run(sources);
  std::int64_t best = -1;
  for (std::int64_t y = rect.span.left; y <= rect.span.right; ++y) {
    const auto i = s.index({rect.base.right, y});
    if (best < 0 || s.dist[static_cast<std::size_t>(i)] <
                        s.dist[static_cast<std::size_t>(best)])
      best = i;
  }
  return s.extract(best);
}

namespace {

std::uint64_t size_seed(std::uint64_t seed, std::int64_t N) {
  return seed ^ (static_cast<std::uint64_t>(N) * 0x9E3779B97F4A7C15ull);
}

double ls_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const auto n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ExponentFit exponent_scan(double gamma, const std::vector<std::int64_t>& sizes,
                          int replicas, std::uint64_t seed, ScanMode mode,
                          std::int64_t budget) {
  if (sizes.empty()) throw usage_error("exponent_scan: no sizes given");
  if (replicas < 1) throw usage_error("exponent_scan: replicas must be >= 1");
  if (gamma < 0.0) throw usage_error("exponent_scan: gamma must be >= 0");
  std::int64_t prev = 0;
  for (const auto N : sizes) {
    if (N < 8) throw usage_error("exponent_scan: sizes must be >= 8");
    if (N <= prev) throw usage_error("exponent_scan: sizes must be ascending");
    prev = N;
    if (N * N * replicas > budget)
      throw resource_error("exponent_scan: N^2 * replicas exceeds the budget");
  }

  ExponentFit fit;
  fit.gamma = gamma;
  fit.sizes = sizes;
  fit.seed = seed;
  fit.mode = mode;

  for (const auto N : sizes) {
    RectRegion square{{0, N}, {0, N}};
    std::unique_ptr<CovModel> cov;
    if (gamma != 0.0)
      cov = std::make_unique<CovModel>(CovModel::build(square));
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r) {
      WeightedGrid grid =
          gamma == 0.0
              ? uniform_grid(square)
              : make_weighted_grid(
                    sample_field(*cov, size_seed(seed, N),
                                 static_cast<std::uint32_t>(r)),
                    gamma);
      double v;
      if (mode == ScanMode::point2point) {
        v = fpp_distance(grid, {N / 4, N / 2}, {3 * N / 4, N / 2}).weight;
      } else {
        RectRegion centre{{N / 4, 3 * N / 4}, {N / 4, 3 * N / 4}};
        v = crossing_weight(grid, centre).weight;
      }
      vals.push_back(v);
      if (gamma == 0.0 && replicas > 1) {
        // Deterministic: every replicate is identical, no need to recompute.
        while (static_cast<int>(vals.size()) < replicas) vals.push_back(v);
        break;
      }
    }
    fit.values.push_back(vals);
    double mean = 0.0;
    for (double v : vals) mean += v;
    fit.means.push_back(mean / static_cast<double>(vals.size()));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(sizes[i])));
    ly.push_back(std::log(fit.means[i]));
  }
  fit.slope = ls_slope(lx, ly);

  // Bootstrap the slope over replicas, resampling within each size.
  const int B = 200;
  CounterRng boot(seed, 0xB0075EEDu);
  std::uint64_t ctr = 0;
  std::vector<double> slopes;
  slopes.reserve(B);
  for (int b = 0; b < B; ++b) {
    std::vector<double> by(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto& vals = fit.values[i];
      double mean = 0.0;
      for (std::size_t r = 0; r < vals.size(); ++r)
        mean += vals[static_cast<std::size_t>(
            boot.below(vals.size(), ctr++))];
      by[i] = std::log(mean / static_cast<double>(vals.size()));
    }
    slopes.push_back(ls_slope(lx, by));
  }
  double bm = 0.0;
  for (double s : slopes) bm += s;
  bm /= B;
  double sv = 0.0;
  for (double s : slopes) sv += (s - bm) * (s - bm);
  fit.stderr_slope = std::sqrt(sv / (B - 1));
  return fit;
}

}  // namespace lfpp
