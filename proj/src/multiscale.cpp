#include "lfpp/multiscale.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <unordered_set>
#include <vector>

#include "lfpp/errors.hpp"
#include "lfpp/totalvar.hpp"

namespace lfpp {

namespace {

// nudge added when a real scale multiplier is recovered from an integer
// length, so floor(k * a) gives the length back exactly
constexpr double kLenEps = 1e-6;

// connector taller than this (in rows) and wider than this (in columns)
// switches the gadget from a straight column to a nested up-down crossing
constexpr std::int64_t kRecursiveMinGap = 12;
constexpr std::int64_t kRecursiveMinWin = 8;

// rng index map within a construction stream: selection draws use indices
// 0..7, the tick-phase coin 8, bridge normals 1000 and up. Connector
// sub-crossings move to stream 16*s + 8 + i.
constexpr std::uint64_t kCoinIdx = 8;
constexpr std::uint64_t kBridgeIdx = 1000;

std::uint32_t gadget_stream(std::uint32_t stream, int ordinal) {
  return 16u * stream + 8u + static_cast<std::uint32_t>(ordinal);
}

void run_workers(int threads, std::int64_t n_tasks,
                 const std::function<void(std::int64_t)>& task) {
  int use = std::max(1, threads);
  if (use == 1 || n_tasks <= 1) {
    for (std::int64_t i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= n_tasks) return;
      task(i);
    }
  };
  const int count = static_cast<int>(
      std::min<std::int64_t>(use, std::max<std::int64_t>(1, n_tasks)));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::uint64_t point_key(PointZ p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y));
}

double sum_weight(const WeightedGrid& w, const std::vector<PointZ>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s += w.at(p.x, p.y);
  return s;
}

// rows from r_from towards r_to, excluding r_to; empty when equal
void emit_column(std::vector<PointZ>& out, std::int64_t x, std::int64_t r_from,
                 std::int64_t r_to) {
  const std::int64_t step = r_to >= r_from ? 1 : -1;
  for (std::int64_t r = r_from; r != r_to; r += step) out.push_back({x, r});
}

// first-visit bookkeeping of a crossing path over every column of base
struct ColIndex {
  std::vector<std::size_t> idx;  // index into the path of the first visit
  std::vector<std::int64_t> row;
};

ColIndex first_visits(const std::vector<PointZ>& pts, IntervalZ base) {
  ColIndex ci;
  const auto n = static_cast<std::size_t>(base.points());
  ci.idx.assign(n, SIZE_MAX);
  ci.row.assign(n, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = pts[i].x - base.left;
    if (c < 0 || c >= static_cast<std::int64_t>(n)) continue;
    auto& slot = ci.idx[static_cast<std::size_t>(c)];
    if (slot == SIZE_MAX) {
      slot = i;
      ci.row[static_cast<std::size_t>(c)] = pts[i].y;
    }
  }
  for (std::size_t c = 0; c < n; ++c)
    if (ci.idx[c] == SIZE_MAX)
      throw usage_error("multiscale: layer path must visit every column");
  return ci;
}

// largest depth d in [1, target] whose principal scale k*a_{1-d} supports a
// covering; 0 when even depth 1 is too small for the span
int adaptive_span_depth(const ScaleParams& sp, double k_v, int target) {
  for (int d = target; d >= 1; --d)
    if (k_v * scale_length(sp, 1 - d) >= 2.0) return d;
  return 0;
}

std::int64_t mid_row(IntervalZ J) { return J.left + J.length() / 2; }

}  // namespace

// ---------------------------------------------------------------------------
// Uniform nested-span crossing.

StrategyOneResult strategy1_crossing(const RectRegion& rect,
                                     const WeightedGrid& w,
                                     const ScaleParams& sp, int level_geom,
                                     double k_geom, const CounterRng& rng,
                                     std::uint32_t stream) {
  if (!w.region.contains(rect))
    throw usage_error("strategy1: rect must lie inside the weighted grid");
  if (level_geom < 0) throw usage_error("strategy1: level_geom must be >= 0");

  std::vector<CoverPiece> bases;
  if (level_geom == 0) {
    bases.push_back({rect.base, 1, true});
  } else {
    if (static_cast<std::int64_t>(
            std::floor(k_geom * scale_length(sp, level_geom))) !=
        rect.base.length())
      throw usage_error("strategy1: base length must equal floor(k * a_level)");
    bases = covering(sp, level_geom, k_geom, rect.base.left, 1);
  }

  const double k_v =
      (static_cast<double>(rect.span.length()) + kLenEps) / scale_length(sp, 1);

  StrategyOneResult out;
  out.plan.level = level_geom;
  out.plan.rect = rect;

  // span selection per base piece: leftmost picks uniformly at its depth, a
  // later piece nests inside the last piece to its left at least as long
  std::vector<IntervalZ> chosen(bases.size());
  std::uint64_t sel_idx = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    int parent = -1;
    for (std::size_t j = i; j-- > 0;)
      if (bases[j].iv.length() >= bases[i].iv.length()) {
        parent = static_cast<int>(j);
        break;
      }
    const int d_eff = adaptive_span_depth(sp, k_v, bases[i].depth);
    std::vector<IntervalZ> cands;
    if (d_eff == 0) {
      cands.push_back(parent >= 0 ? chosen[static_cast<std::size_t>(parent)]
                                  : rect.span);
    } else {
      const auto all =
          covering_principal(sp, 1, k_v, rect.span.left, d_eff);
      for (const auto& piece : all) {
        if (parent >= 0) {
          const auto& J = chosen[static_cast<std::size_t>(parent)];
          if (piece.iv.left < J.left || piece.iv.right > J.right) continue;
        }
        cands.push_back(piece.iv);
      }
      if (cands.empty())
        cands.push_back(parent >= 0 ? chosen[static_cast<std::size_t>(parent)]
                                    : rect.span);
    }
    const auto pick = rng.below(cands.size(), sel_idx++, stream);
    chosen[i] = cands[static_cast<std::size_t>(pick)];
    out.plan.skeleton.push_back({bases[i].iv, chosen[i]});
  }

  // emission: pieces chopped into a disjoint left-right partition of the
  // base, straight segments at span mid-rows, vertical junction gadgets
  auto& pts = out.crossing.path;
  std::int64_t prev_end = rect.base.left - 1;
  std::int64_t prev_row = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const std::int64_t s = std::max(bases[i].iv.left, prev_end + 1);
    const std::int64_t e = bases[i].iv.right;
    if (s > e)
      throw numerical_error("strategy1: covering piece vanished after chop");
    const std::int64_t r = mid_row(chosen[i]);
    if (i > 0) {
      if (s != prev_end + 1)
        throw numerical_error("strategy1: pieces must stay contiguous");
      if (r != prev_row) {
        std::vector<PointZ> gpts;
        emit_column(gpts, s, prev_row, r);
        GadgetSpec g;
        g.column_rect = {{s, s},
                         {std::min(prev_row, r + (r > prev_row ? -1 : 1)),
                          std::max(prev_row, r + (r > prev_row ? -1 : 1))}};
        g.mode = GadgetMode::straight;
        g.weight = sum_weight(w, gpts);
        out.plan.gadgets.push_back(g);
        out.gadget_weight += g.weight;
        for (const auto& p : gpts) pts.push_back(p);
      }
    }
    for (std::int64_t x = s; x <= e; ++x) pts.push_back({x, r});
    prev_end = e;
    prev_row = r;
  }
  out.crossing.weight = sum_weight(w, pts);
  return out;
}

// ---------------------------------------------------------------------------
// Switch layout.

SwitchLayout make_switch_layout(const RectRegion& rect,
                                std::int64_t switch_len) {
  if (switch_len < 2) throw usage_error("switch layout: switch_len must be >= 2");
  if (rect.span.points() < 6 || rect.span.points() % 2 != 0)
    throw usage_error("switch layout: span rows must be even and >= 6");
  if (rect.base.points() < 4)
    throw usage_error("switch layout: base too small");

  SwitchLayout lay;
  lay.rect = rect;
  const std::int64_t half = rect.span.points() / 2;
  lay.band_bot = {rect.base, {rect.span.left, rect.span.left + half - 1}};
  lay.band_top = {rect.base, {rect.span.left + half, rect.span.right}};
  lay.row_lo = lay.band_bot.span.left + lay.band_bot.span.length() / 2;
  lay.row_hi = lay.band_top.span.left + lay.band_top.span.length() / 2;
  lay.vertical_child = static_cast<double>(lay.band_top.span.length());
  lay.a_child = lay.vertical_child / 2.0;

  for (std::int64_t a = rect.base.left; a <= rect.base.right;
       a += switch_len) {
    const std::int64_t b = std::min(a + switch_len - 1, rect.base.right);
    lay.intervals.push_back({a, b});
    lay.short_interval.push_back(b - a + 1 < switch_len / 4);
  }

  // exact covariance of the gain sums under the band-conditional field:
  // cov(full rectangle) minus the two independent band-interior parts
  const SeparableGreen gr(rect);
  const SeparableGreen gt(lay.band_top);
  const SeparableGreen gb(lay.band_bot);
  const int K = static_cast<int>(lay.intervals.size());
  auto trim = [&](IntervalZ I) {
    return IntervalZ{std::max(I.left, rect.base.left + 1),
                     std::min(I.right, rect.base.right - 1)};
  };
  lay.gain_cov.assign(static_cast<std::size_t>(K) * K, 0.0);
  std::vector<std::vector<SeparableGreen::LineSpec>> full(K), top(K), bot(K);
  for (int j = 0; j < K; ++j) {
    const auto I = trim(lay.intervals[static_cast<std::size_t>(j)]);
    if (I.left > I.right)
      throw usage_error("switch layout: interval has no interior columns");
    full[static_cast<std::size_t>(j)] = {{I, lay.row_hi, 0.5},
                                         {I, lay.row_lo, -0.5}};
    top[static_cast<std::size_t>(j)] = {{I, lay.row_hi, 0.5}};
    bot[static_cast<std::size_t>(j)] = {{I, lay.row_lo, -0.5}};
  }
  for (int j = 0; j < K; ++j)
    for (int j2 = j; j2 < K; ++j2) {
      const auto a = static_cast<std::size_t>(j);
      const auto b = static_cast<std::size_t>(j2);
      const double c = gr.line_cov(full[a], full[b]) -
                       gt.line_cov(top[a], top[b]) -
                       gb.line_cov(bot[a], bot[b]);
      lay.gain_cov[a * static_cast<std::size_t>(K) + b] = c;
      lay.gain_cov[b * static_cast<std::size_t>(K) + a] = c;
    }
  lay.transform = make_sequential_transform(lay.gain_cov, K);
  return lay;
}

std::vector<double> gain_line_sums(const SwitchLayout& lay,
                                   const FieldSample& coarse_top,
                                   const FieldSample& coarse_bot) {
  std::vector<double> g;
  g.reserve(lay.intervals.size());
  for (const auto& I : lay.intervals) {
    const IntervalZ t{std::max(I.left, lay.rect.base.left + 1),
                      std::min(I.right, lay.rect.base.right - 1)};
    const double hi = line_sum(coarse_top, t, lay.row_hi);
    const double lo = line_sum(coarse_bot, t, lay.row_lo);
    g.push_back(0.5 * (hi - lo));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Strategy two: switched crossing.

namespace {

struct SwitchGadget {
  GadgetSpec spec;
  std::vector<PointZ> pts;
  std::int64_t col_prev = 0;  // splice column on the layer being left
  std::int64_t col_next = 0;  // splice column on the layer being entered
};

// straight or nested connector between the two layer paths inside the
// right-quarter window of the interval
SwitchGadget build_switch_gadget(const SwitchLayout& lay, const WeightedGrid& w,
                                 const ColIndex& top_ci, const ColIndex& bot_ci,
                                 IntervalZ interval, const ScaleParams& sp,
                                 const CounterRng& rng, std::uint32_t stream,
                                 int ordinal) {
  const std::int64_t ilen = interval.points();
  const std::int64_t wlen = std::max<std::int64_t>(1, ilen / 4);
  const std::int64_t w0 = interval.right - wlen + 1;
  const auto base_left = lay.rect.base.left;

  auto row_top = [&](std::int64_t x) {
    return top_ci.row[static_cast<std::size_t>(x - base_left)];
  };
  auto row_bot = [&](std::int64_t x) {
    return bot_ci.row[static_cast<std::size_t>(x - base_left)];
  };

  // cheapest straight connector column in the window, leftmost on ties
  std::int64_t best_x = w0;
  double best_cost = 0.0;
  bool have = false;
  for (std::int64_t x = w0; x <= interval.right; ++x) {
    const std::int64_t rt = row_top(x), rb = row_bot(x);
    if (rt <= rb)
      throw numerical_error("switch gadget: layer paths out of order");
    double cost = 0.0;
    for (std::int64_t r = rb + 1; r < rt; ++r) cost += w.at(x, r);
    if (!have || cost < best_cost) {
      have = true;
      best_cost = cost;
      best_x = x;
    }
  }

  SwitchGadget g;
  const std::int64_t gap = row_top(best_x) - row_bot(best_x) - 1;

  // nested mode only when the connector block between the path envelopes is
  // roomy enough for an up-down crossing
  bool nested = gap >= kRecursiveMinGap && wlen >= kRecursiveMinWin;
  std::int64_t env_lo = 0, env_hi = 0;
  if (nested) {
    env_lo = row_bot(w0);
    env_hi = row_top(w0);
    for (std::int64_t x = w0; x <= interval.right; ++x) {
      env_lo = std::max(env_lo, row_bot(x));
      env_hi = std::min(env_hi, row_top(x));
    }
    if (env_hi - env_lo - 1 < 5) nested = false;
  }

  if (!nested) {
    emit_column(g.pts, best_x, row_bot(best_x) + 1, row_top(best_x));
    g.spec.mode = GadgetMode::straight;
    g.spec.column_rect = {{best_x, best_x},
                          {row_bot(best_x) + 1, row_top(best_x) - 1}};
    if (gap == 0)
      g.spec.column_rect = {{best_x, best_x}, {row_bot(best_x), row_bot(best_x)}};
    g.col_prev = best_x;
    g.col_next = best_x;
    g.spec.weight = sum_weight(w, g.pts);
    return g;
  }

  // transposed nested crossing of the connector block
  const RectRegion conn{{w0, interval.right}, {env_lo + 1, env_hi - 1}};
  RectRegion trect{conn.span, conn.base};
  WeightedGrid tw;
  tw.region = trect;
  tw.weight.resize(static_cast<std::size_t>(trect.point_count()));
  for (std::int64_t y = trect.span.left; y <= trect.span.right; ++y)
    for (std::int64_t x = trect.base.left; x <= trect.base.right; ++x)
      tw.weight[static_cast<std::size_t>(y - trect.span.left) *
                    static_cast<std::size_t>(trect.base.points()) +
                static_cast<std::size_t>(x - trect.base.left)] = w.at(y, x);
  const double kg =
      (static_cast<double>(trect.base.length()) + kLenEps) / scale_length(sp, 1);
  const int lg = kg * scale_length(sp, 0) >= 2.0 ? 1 : 0;
  const auto sub =
      strategy1_crossing(trect, tw, sp, lg, kg, rng, gadget_stream(stream, ordinal));
  for (const auto& p : sub.crossing.path) g.pts.push_back({p.y, p.x});

  const std::int64_t xc_b = g.pts.front().x;
  const std::int64_t xc_t = g.pts.back().x;
  emit_column(g.pts, xc_b, row_bot(xc_b) + 1, conn.span.left);
  emit_column(g.pts, xc_t, row_top(xc_t) - 1, conn.span.right);
  g.spec.mode = GadgetMode::recursive;
  g.spec.column_rect = conn;
  g.col_prev = xc_t;
  g.col_next = xc_b;
  g.spec.weight = sum_weight(w, g.pts);
  return g;
}

}  // namespace

StrategyTwoResult strategy2_crossing(const SwitchLayout& lay,
                                     const WeightedGrid& w,
                                     const PathResult& top_path,
                                     const PathResult& bot_path,
                                     const std::vector<double>& gains_raw,
                                     double gamma, double d_prev,
                                     const ScaleParams& sp,
                                     const CounterRng& rng, std::uint32_t stream,
                                     int force_coin) {
  const auto K = lay.intervals.size();
  if (gains_raw.size() != K)
    throw usage_error("strategy2: one gain per switch interval required");
  if (d_prev <= 0.0) throw usage_error("strategy2: d_prev must be positive");
  if (gamma < 0.0) throw usage_error("strategy2: gamma must be >= 0");
  if (!w.region.contains(lay.rect))
    throw usage_error("strategy2: rect must lie inside the weighted grid");

  const auto top_ci = first_visits(top_path.path, lay.rect.base);
  const auto bot_ci = first_visits(bot_path.path, lay.rect.base);

  StrategyTwoResult out;
  out.plan.rect = lay.rect;
  out.plan.switch_intervals = lay.intervals;
  out.coin = force_coin >= 0 ? (force_coin != 0)
                             : rng.coin(kCoinIdx, stream);

  // per-interval mean layer heights and the gain walk scaling
  std::vector<double> dnu(K, 0.0);
  for (std::size_t j = 0; j < K; ++j) {
    const auto& I = lay.intervals[j];
    double st = 0.0, sb = 0.0;
    for (std::int64_t x = I.left; x <= I.right; ++x) {
      st += static_cast<double>(
          top_ci.row[static_cast<std::size_t>(x - lay.rect.base.left)]);
      sb += static_cast<double>(
          bot_ci.row[static_cast<std::size_t>(x - lay.rect.base.left)]);
    }
    dnu[j] = (st - sb) / static_cast<double>(I.points()) / lay.vertical_child;
    if (dnu[j] <= 0.0)
      throw numerical_error("strategy2: layer height gap must be positive");
  }

  const auto etas = lay.transform.apply(gains_raw);

  double inv_lam2 = 0.0;
  double T = 0.0;
  std::vector<double> tgrid(K + 1, 0.0);
  for (std::size_t j = 0; j < K; ++j) {
    const double c =
        gamma * d_prev * dnu[j] / (2.0 * sp.Gamma * lay.a_child);
    const double v = lay.transform.cond_var[j];
    inv_lam2 += gamma * gamma / (16.0 * lay.a_child * lay.a_child) * v;
    T += c * c * v;
    tgrid[j + 1] = T;
  }
  out.clock_total = T;
  out.lambda_star_val = inv_lam2 > 0.0 ? 1.0 / std::sqrt(inv_lam2) : 0.0;
  // design window alpha/4 <= lambda*^-2 <= alpha/2, with a 4x grace factor
  out.regime_flag =
      inv_lam2 > 0.0 &&
      (inv_lam2 < sp.alpha / 16.0 || inv_lam2 > 2.0 * sp.alpha);

  std::vector<int> k_of(K, out.coin ? 1 : 2);

  // with no coarse signal at all every deviation from the coin layer would
  // only pay junction costs, so the selector stays put
  const bool has_signal =
      std::any_of(etas.begin(), etas.end(), [](double e) { return e != 0.0; });

  if (gamma > 0.0 && T > 0.0 && has_signal && K >= 1) {
    const double lam = out.lambda_star_val;
    // discrete gain walk at the clock points, Brownian-bridge fill down to
    // the tick resolution dt <= lambda*^2 / 400
    std::vector<double> svals(K + 1, 0.0);
    for (std::size_t j = 0; j < K; ++j) {
      const double c =
          gamma * d_prev * dnu[j] / (2.0 * sp.Gamma * lay.a_child);
      svals[j + 1] = svals[j] + c * etas[j];
    }
    const double max_dt = lam * lam / 400.0;
    std::int64_t total = 0;
    std::vector<std::int64_t> steps(K, 1);
    for (std::size_t j = 0; j < K; ++j) {
      const double dt = tgrid[j + 1] - tgrid[j];
      if (!(dt > 0.0))
        throw numerical_error("strategy2: clock must be strictly increasing");
      steps[j] = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::ceil(dt / max_dt)));
      total += steps[j];
      if (total > 20000000)
        throw resource_error("strategy2: tick grid beyond 2e7 steps");
    }
    PathSample walk;
    walk.times.reserve(static_cast<std::size_t>(total) + 1);
    walk.values.reserve(static_cast<std::size_t>(total) + 1);
    walk.times.push_back(0.0);
    walk.values.push_back(0.0);
    std::uint64_t gi = 0;
    for (std::size_t j = 0; j < K; ++j) {
      const double t0 = tgrid[j], t1 = tgrid[j + 1];
      const double dt = (t1 - t0) / static_cast<double>(steps[j]);
      double cur_t = t0;
      double cur_v = walk.values.back();
      for (std::int64_t s = 1; s <= steps[j]; ++s) {
        const double nxt_t = s == steps[j] ? t1 : t0 + dt * static_cast<double>(s);
        if (s == steps[j]) {
          cur_v = svals[j + 1];
        } else {
          const double h = nxt_t - cur_t;
          const double rem = t1 - cur_t;
          const double mean = cur_v + (svals[j + 1] - cur_v) * h / rem;
          const double var = h * (rem - h) / rem;
          cur_v = mean + std::sqrt(std::max(0.0, var)) *
                             rng.normal(kBridgeIdx + gi++, stream);
        }
        cur_t = nxt_t;
        walk.times.push_back(nxt_t);
        walk.values.push_back(cur_v);
      }
    }

    const std::int64_t cap =
        std::max<std::int64_t>(1, std::min(default_cap(lam),
                                           static_cast<std::int64_t>(
                                               std::floor(3.0 * sp.alpha))));
    PathSample scan = walk;
    if (!out.coin)
      for (auto& v : scan.values) v = -v;
    const auto up = uptick_partition(scan, lam, cap);
    const auto& q = up.partition.points;

    // cell sign rule: the walk decreasing over a cell points at the top layer
    auto value_at = [&](double t) {
      const auto it =
          std::lower_bound(walk.times.begin(), walk.times.end(), t);
      return walk.values[static_cast<std::size_t>(it - walk.times.begin())];
    };
    std::vector<int> cell_k(q.size() - 1, 0);
    for (std::size_t c = 0; c + 1 < q.size(); ++c) {
      const double a = value_at(q[c]), b = value_at(q[c + 1]);
      if (a > b)
        cell_k[c] = 1;
      else if (a < b)
        cell_k[c] = 2;
      else
        cell_k[c] = out.coin ? 1 : 2;
    }
    for (std::size_t j = 0; j < K; ++j) {
      const double pos = tgrid[j];
      auto c = static_cast<std::size_t>(
          std::upper_bound(q.begin(), q.end(), pos) - q.begin());
      c = c > 0 ? c - 1 : 0;
      if (c >= cell_k.size()) c = cell_k.size() - 1;
      k_of[j] = cell_k[c];
    }
  }

  out.plan.layer_choice = k_of;
  for (std::size_t j = 0; j < K; ++j)
    out.plan.skeleton.push_back(
        {lay.intervals[j], (k_of[j] == 1 ? lay.band_top : lay.band_bot).span});

  // assembly: follow the chosen layer, splice at the switch gadgets
  auto& pts = out.crossing.path;
  auto slice = [&](const std::vector<PointZ>& src, std::size_t a,
                   std::size_t b) {
    for (std::size_t i = a; i <= b; ++i) pts.push_back(src[i]);
  };
  const auto* cur_pts = k_of[0] == 1 ? &top_path.path : &bot_path.path;
  const auto* cur_ci = k_of[0] == 1 ? &top_ci : &bot_ci;
  std::size_t cur_start = 0;
  int ordinal = 0;
  for (std::size_t j = 0; j + 1 < K; ++j) {
    if (k_of[j + 1] == k_of[j]) continue;
    auto g = build_switch_gadget(lay, w, top_ci, bot_ci, lay.intervals[j], sp,
                                 rng, stream, ordinal++);
    // leaving the top layer splices at the top contact, entering at the

    // bottom contact, and vice versa
    const std::int64_t leave_col = k_of[j] == 1 ? g.col_prev : g.col_next;
    const std::int64_t enter_col = k_of[j] == 1 ? g.col_next : g.col_prev;
    slice(*cur_pts, cur_start,
          cur_ci->idx[static_cast<std::size_t>(leave_col -
                                               lay.rect.base.left)]);
    for (const auto& p : g.pts) pts.push_back(p);
    out.gadget_weight += g.spec.weight;
    out.plan.gadgets.push_back(g.spec);
    ++out.switches;
    cur_pts = k_of[j + 1] == 1 ? &top_path.path : &bot_path.path;
    cur_ci = k_of[j + 1] == 1 ? &top_ci : &bot_ci;
    cur_start = cur_ci->idx[static_cast<std::size_t>(enter_col -
                                                     lay.rect.base.left)];
  }
  slice(*cur_pts, cur_start, cur_pts->size() - 1);
  out.crossing.weight = sum_weight(w, pts);
  return out;
}

// ---------------------------------------------------------------------------

bool check_connected_crossing(const std::vector<PointZ>& points,
                              const RectRegion& rect) {
  if (points.empty()) return false;
  std::unordered_set<std::uint64_t> set;
  set.reserve(points.size() * 2);
  for (const auto& p : points) {
    if (!rect.base.contains(p.x) || !rect.span.contains(p.y)) return false;
    set.insert(point_key(p));
  }
  std::vector<PointZ> queue;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& p : points)
    if (p.x == rect.base.left && !seen.count(point_key(p))) {
      queue.push_back(p);
      seen.insert(point_key(p));
    }
  if (queue.empty()) return false;
  bool right = false;
  while (!queue.empty()) {
    const auto p = queue.back();
    queue.pop_back();
    if (p.x == rect.base.right) right = true;
    const PointZ nb[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1},
                          {p.x, p.y - 1}};
    for (const auto& q : nb) {
      const auto k = point_key(q);
      if (set.count(k) && !seen.count(k)) {
        seen.insert(k);
        queue.push_back(q);
      }
    }
  }
  return right;
}

double compare_vs_optimal(const WeightedGrid& w, const RectRegion& rect,
                          const PathResult& built) {
  const auto opt = crossing_weight(w, rect);
  if (!(opt.weight > 0.0))
    throw numerical_error("compare_vs_optimal: optimal weight must be positive");
  return built.weight / opt.weight;
}

// ---------------------------------------------------------------------------
// Full experiment.

RectRegion multiscale_rect(const MultiscaleConfig& cfg, int level) {
  const double k = cfg.width_mult * static_cast<double>(cfg.base_n);
  const auto width = static_cast<std::int64_t>(
      std::floor(k * scale_length(cfg.sp, level)));
  const std::int64_t rows =
      (cfg.base_n / 2 + 1) * (std::int64_t(1) << (level - 1));
  return {{0, width}, {0, rows - 1}};
}

namespace {

struct LevelAccum {
  double w_sum = 0.0;
  double join_sum = 0.0;
  double switch_sum = 0.0;
  double lam_sum = 0.0;
  std::int64_t flags = 0;
  std::int64_t n = 0;
  std::int64_t n_s2 = 0;
};

struct ReplicaOut {
  std::vector<LevelAccum> acc;  // by level, index 0 unused
  std::vector<int> top_choice;  // layer per top interval
  double s1_top = 0.0;
  double s2_top = 0.0;
  double opt_ratio = 0.0;
  std::int64_t max_switches = 0;
  bool connected = true;
};

struct RunContext {
  MultiscaleConfig cfg;
  double k_geom = 0.0;
  std::vector<RectRegion> rects;      // by level, index 0 unused
  std::vector<SwitchLayout> layouts;  // by level, index 0/1 unused
};

SwitchLayout shift_layout(const SwitchLayout& src, std::int64_t dx,
                          std::int64_t dy) {
  SwitchLayout lay = src;
  auto shift_rect = [&](RectRegion& r) {
    r.base.left += dx;
    r.base.right += dx;
    r.span.left += dy;
    r.span.right += dy;
  };
  shift_rect(lay.rect);
  shift_rect(lay.band_top);
  shift_rect(lay.band_bot);
  lay.row_hi += dy;
  lay.row_lo += dy;
  for (auto& I : lay.intervals) {
    I.left += dx;
    I.right += dx;
  }
  return lay;
}

FieldSample restrict_field(const FieldSample& s, const RectRegion& sub) {
  FieldSample out;
  out.region = sub;
  out.seed = s.seed;
  out.replicate = s.replicate;
  out.values.resize(static_cast<std::size_t>(sub.point_count()));
  std::size_t k = 0;
  for (std::int64_t y = sub.span.left; y <= sub.span.right; ++y)
    for (std::int64_t x = sub.base.left; x <= sub.base.right; ++x)
      out.values[k++] = s.at(x, y);
  return out;
}

// one band chain: left-right children of the previous level joined through a
// straight mid segment; returns the chain path and the child weights
struct ChainOut {
  PathResult path;
  std::vector<double> child_weights;
};

struct Builder {
  const RunContext* ctx = nullptr;
  const WeightedGrid* grid = nullptr;
  CounterRng rng;
  ReplicaOut* out = nullptr;
  int node_ctr = 0;

  Builder(const RunContext& c, const WeightedGrid& g, CounterRng r,
          ReplicaOut& o)
      : ctx(&c), grid(&g), rng(r), out(&o) {}

  PathResult build(int level, const RectRegion& rect, const FieldSample* field);

  ChainOut chain(int level, const RectRegion& band, const FieldSample* fine,
                 std::uint32_t stream, std::uint64_t sel_base);
};

ChainOut Builder::chain(int level, const RectRegion& band,
                        const FieldSample* fine, std::uint32_t stream,
                        std::uint64_t sel_base) {
  const auto& sp = ctx->cfg.sp;
  const auto pieces = covering(sp, level, ctx->k_geom, band.base.left, 1);

  // effective column ranges: children keep the full covering piece, mid
  // segments absorb the overlap on both sides
  const auto n = pieces.size();
  std::vector<std::int64_t> ps(n), pe(n);
  std::int64_t prev_e = band.base.left - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (pieces[i].principal) {
      ps[i] = pieces[i].iv.left;
      pe[i] = pieces[i].iv.right;
      if (i > 0 && ps[i] != prev_e + 1)
        throw numerical_error("chain: covering pieces must stay contiguous");
    } else {
      ps[i] = prev_e + 1;
      pe[i] = i + 1 < n ? pieces[i + 1].iv.left - 1 : pieces[i].iv.right;
      if (ps[i] > pe[i])
        throw numerical_error("chain: mid segment vanished after chop");
    }
    prev_e = pe[i];
  }
  if (ps.front() != band.base.left || pe.back() != band.base.right)
    throw numerical_error("chain: covering must span the base");

  ChainOut co;
  auto& pts = co.path.path;
  std::int64_t prev_row = 0;
  std::uint64_t sel = sel_base;
  const double k_v = (static_cast<double>(band.span.length()) + kLenEps) /
                     scale_length(sp, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<PointZ> ppts;
    std::int64_t enter_row = 0, exit_row = 0;
    if (pieces[i].principal) {
      const RectRegion child{pieces[i].iv, band.span};
      FieldSample child_field;
      const FieldSample* cf = nullptr;
      if (level - 1 >= 2 && fine != nullptr) {
        child_field = restrict_field(*fine, child);
        cf = &child_field;
      }
      auto sub = build(level - 1, child, cf);
      co.child_weights.push_back(sub.weight);
      ppts = std::move(sub.path);
      enter_row = ppts.front().y;
      exit_row = ppts.back().y;
    } else {
      // straight mid segment at a uniformly chosen principal span
      const int d_eff = adaptive_span_depth(sp, k_v, sp.m + 1);
      IntervalZ J = band.span;
      if (d_eff >= 1) {
        const auto cands =
            covering_principal(sp, 1, k_v, band.span.left, d_eff);
        J = cands[static_cast<std::size_t>(
                      rng.below(cands.size(), sel++, stream))]
                .iv;
      }
      const std::int64_t r = mid_row(J);
      for (std::int64_t x = ps[i]; x <= pe[i]; ++x) ppts.push_back({x, r});
      enter_row = r;
      exit_row = r;
    }
    if (i > 0) {
      std::vector<PointZ> gpts;
      emit_column(gpts, ps[i], prev_row, enter_row);
      for (const auto& p : gpts) pts.push_back(p);
    }
    for (auto& p : ppts) pts.push_back(p);
    prev_row = exit_row;
  }
  co.path.weight = sum_weight(*grid, pts);
  return co;
}

PathResult Builder::build(int level, const RectRegion& rect,
                          const FieldSample* field) {
  const int node_id = node_ctr++;
  const auto stream = static_cast<std::uint32_t>(64 + node_id);
  const auto& cfg = ctx->cfg;
  const auto& sp = cfg.sp;

  if (level == 1) {
    auto s1 = strategy1_crossing(rect, *grid, sp, 1, ctx->k_geom, rng, stream);
    auto& acc = out->acc[1];
    acc.w_sum += s1.crossing.weight;
    acc.n += 1;
    if (!check_connected_crossing(s1.crossing.path, rect))
      out->connected = false;
    if (level == cfg.levels) {
      out->s1_top = s1.crossing.weight;
      out->s2_top = s1.crossing.weight;
      out->opt_ratio = compare_vs_optimal(*grid, rect, s1.crossing);
    }
    return std::move(s1.crossing);
  }

  const auto lay = shift_layout(ctx->layouts[static_cast<std::size_t>(level)],
                                rect.base.left - ctx->rects[static_cast<std::size_t>(level)].base.left,
                                rect.span.left - ctx->rects[static_cast<std::size_t>(level)].span.left);

  MarkovParts mk_top, mk_bot;
  const bool have_field = field != nullptr;
  if (have_field) {
    mk_top = markov_decompose(*field, lay.band_top);
    mk_bot = markov_decompose(*field, lay.band_bot);
  }

  auto top = chain(level, lay.band_top,
                   have_field ? &mk_top.fine : nullptr, stream, 0);
  auto bot = chain(level, lay.band_bot,
                   have_field ? &mk_bot.fine : nullptr, stream, 4);

  std::vector<double> gains(lay.intervals.size(), 0.0);
  if (have_field && cfg.gamma > 0.0)
    gains = gain_line_sums(lay, mk_top.coarse, mk_bot.coarse);

  double d_prev = 0.0;
  std::int64_t nch = 0;
  for (const auto& cw : top.child_weights) {
    d_prev += cw;
    ++nch;
  }
  for (const auto& cw : bot.child_weights) {
    d_prev += cw;
    ++nch;
  }
  d_prev = nch > 0 ? d_prev / static_cast<double>(nch) : 1.0;

  auto s2 = strategy2_crossing(lay, *grid, top.path, bot.path, gains,
                               cfg.gamma, d_prev, sp, rng, stream, -1);
  s2.plan.level = level;

  auto& acc = out->acc[static_cast<std::size_t>(level)];
  acc.w_sum += s2.crossing.weight;
  acc.join_sum += s2.gadget_weight;
  acc.switch_sum += s2.switches;
  acc.lam_sum += s2.lambda_star_val;
  acc.flags += s2.regime_flag ? 1 : 0;
  acc.n += 1;
  acc.n_s2 += 1;
  out->max_switches = std::max<std::int64_t>(out->max_switches, s2.switches);
  if (!check_connected_crossing(s2.crossing.path, rect)) out->connected = false;

  if (level == cfg.levels) {
    out->top_choice = s2.plan.layer_choice;
    // paired comparison on a shared start: strategy one stays on the layer
    // strategy two's coin selected, so the difference isolates the switching
    // machinery instead of re-rolling the layer lottery
    out->s1_top = (s2.coin != 0 ? top.path : bot.path).weight;
    out->s2_top = s2.crossing.weight;
    out->opt_ratio = compare_vs_optimal(*grid, rect, s2.crossing);
  }
  return std::move(s2.crossing);
}

}  // namespace

MultiscaleReport recursive_run(const MultiscaleConfig& cfg) {
  if (cfg.levels < 1 || cfg.levels > 4)
    throw usage_error("recursive_run: levels must be in 1..4");
  if (cfg.base_n < 8 || cfg.base_n % 2 != 0)
    throw usage_error("recursive_run: base_n must be even and >= 8");
  if (cfg.width_mult < 2.0)
    throw usage_error("recursive_run: width_mult must be >= 2");
  if (cfg.replicas < 1)
    throw usage_error("recursive_run: replicas must be >= 1");
  if (cfg.gamma < 0.0) throw usage_error("recursive_run: gamma must be >= 0");

  RunContext ctx;
  ctx.cfg = cfg;
  ctx.k_geom = cfg.width_mult * static_cast<double>(cfg.base_n);
  ctx.rects.resize(static_cast<std::size_t>(cfg.levels) + 1);
  ctx.layouts.resize(static_cast<std::size_t>(cfg.levels) + 1);
  for (int lv = 1; lv <= cfg.levels; ++lv)
    ctx.rects[static_cast<std::size_t>(lv)] = multiscale_rect(cfg, lv);
  const auto& top_rect = ctx.rects[static_cast<std::size_t>(cfg.levels)];
  if (top_rect.point_count() > 4000000)
    throw resource_error("recursive_run: top rectangle beyond 4e6 points");
  const auto switch_len =
      static_cast<std::int64_t>(std::floor(cfg.sp.beta * cfg.base_n));
  for (int lv = 2; lv <= cfg.levels; ++lv)
    ctx.layouts[static_cast<std::size_t>(lv)] =
        make_switch_layout(ctx.rects[static_cast<std::size_t>(lv)], switch_len);

  const bool need_field = cfg.gamma > 0.0;
  std::optional<CovModel> cov;
  if (need_field) cov.emplace(CovModel::build(top_rect));

  std::vector<ReplicaOut> reps(static_cast<std::size_t>(cfg.replicas));
  auto task = [&](std::int64_t r) {
    auto& ro = reps[static_cast<std::size_t>(r)];
    ro.acc.assign(static_cast<std::size_t>(cfg.levels) + 1, LevelAccum{});
    WeightedGrid grid;
    FieldSample field;
    if (need_field) {
      field = sample_field(*cov, cfg.seed, static_cast<std::uint32_t>(r));
      grid = make_weighted_grid(field, cfg.gamma);
    } else {
      grid = uniform_grid(top_rect);
    }
    Builder b(ctx, grid,
              CounterRng(cfg.seed, static_cast<std::uint32_t>(r)), ro);
    b.build(cfg.levels, top_rect, need_field ? &field : nullptr);
  };
  run_workers(cfg.threads, cfg.replicas, task);

  // sequential reduction in replica order
  MultiscaleReport rep;
  rep.replicas = cfg.replicas;
  rep.all_connected = true;
  rep.opt_ratio_min = 0.0;
  const auto R = static_cast<std::size_t>(cfg.replicas);
  std::size_t Ktop = 0;
  if (cfg.levels >= 2) {
    const auto& top_lay = ctx.layouts[static_cast<std::size_t>(cfg.levels)];
    Ktop = top_lay.intervals.size();
    for (const auto f : top_lay.short_interval)
      rep.any_short_interval = rep.any_short_interval || f;
  }
  rep.layer_one_share.assign(Ktop, 0.0);

  std::vector<std::vector<double>> level_means(
      static_cast<std::size_t>(cfg.levels) + 1);
  double s1_sum = 0.0, s2_sum = 0.0, s1_sq = 0.0, s2_sq = 0.0;
  double diff_sum = 0.0, diff_sq = 0.0, ratio_sum = 0.0, ratio_min = 1e300;
  double pooled_one = 0.0;
  std::int64_t pooled_n = 0;
  for (std::size_t r = 0; r < R; ++r) {
    const auto& ro = reps[r];
    rep.all_connected = rep.all_connected && ro.connected;
    rep.max_switches = std::max(rep.max_switches, ro.max_switches);
    for (int lv = 1; lv <= cfg.levels; ++lv) {
      const auto& a = ro.acc[static_cast<std::size_t>(lv)];
      if (a.n == 0) continue;
      level_means[static_cast<std::size_t>(lv)].push_back(
          a.w_sum / static_cast<double>(a.n));
      ReplicaRecord rec;
      rec.level = lv;
      rec.replicate = static_cast<std::int64_t>(r);
      rec.d = a.w_sum / static_cast<double>(a.n);
      rec.d_join = a.n_s2 > 0 ? a.join_sum / static_cast<double>(a.n_s2) : 0.0;
      rec.switches =
          a.n_s2 > 0 ? a.switch_sum / static_cast<double>(a.n_s2) : 0.0;
      rep.records.push_back(rec);
    }
    s1_sum += ro.s1_top;
    s1_sq += ro.s1_top * ro.s1_top;
    s2_sum += ro.s2_top;
    s2_sq += ro.s2_top * ro.s2_top;
    const double d = ro.s2_top - ro.s1_top;
    diff_sum += d;
    diff_sq += d * d;
    ratio_sum += ro.opt_ratio;
    ratio_min = std::min(ratio_min, ro.opt_ratio);
    for (std::size_t j = 0; j < ro.top_choice.size() && j < Ktop; ++j) {
      if (ro.top_choice[j] == 1) {
        rep.layer_one_share[j] += 1.0;
        pooled_one += 1.0;
      }
      ++pooled_n;
    }
  }
  const double Rd = static_cast<double>(R);
  auto se_of = [&](double sum, double sq) {
    if (R < 2) return 0.0;
    const double mean = sum / Rd;
    const double var = std::max(0.0, sq / Rd - mean * mean);
    return std::sqrt(var / (Rd - 1.0));
  };
  rep.s1_top_mean = s1_sum / Rd;
  rep.s1_top_se = se_of(s1_sum, s1_sq);
  rep.s2_top_mean = s2_sum / Rd;
  rep.s2_top_se = se_of(s2_sum, s2_sq);
  rep.paired_diff_mean = diff_sum / Rd;
  rep.paired_diff_se = se_of(diff_sum, diff_sq);
  rep.opt_ratio_mean = ratio_sum / Rd;
  rep.opt_ratio_min = R > 0 ? ratio_min : 0.0;
  for (auto& s : rep.layer_one_share) s /= Rd;
  rep.layer_share_pooled =
      pooled_n > 0 ? pooled_one / static_cast<double>(pooled_n) : 0.0;

  for (int lv = 1; lv <= cfg.levels; ++lv) {
    LevelStats st;
    st.level = lv;
    double wsum = 0.0, jsum = 0.0, ssum = 0.0, lsum = 0.0;
    std::int64_t n = 0, ns2 = 0, flags = 0;
    for (const auto& ro : reps) {
      const auto& a = ro.acc[static_cast<std::size_t>(lv)];
      wsum += a.w_sum;
      jsum += a.join_sum;
      ssum += a.switch_sum;
      lsum += a.lam_sum;
      n += a.n;
      ns2 += a.n_s2;
      flags += a.flags;
    }
    st.samples = n;
    st.d_mean = n > 0 ? wsum / static_cast<double>(n) : 0.0;
    st.d_join_mean = ns2 > 0 ? jsum / static_cast<double>(ns2) : 0.0;
    st.switches_mean = ns2 > 0 ? ssum / static_cast<double>(ns2) : 0.0;
    st.lambda_star_mean = ns2 > 0 ? lsum / static_cast<double>(ns2) : 0.0;
    st.regime_flag_share =
        ns2 > 0 ? static_cast<double>(flags) / static_cast<double>(ns2) : 0.0;
    const auto& means = level_means[static_cast<std::size_t>(lv)];
    if (means.size() >= 2) {
      double s = 0.0, sq = 0.0;
      for (double v : means) {
        s += v;
        sq += v * v;
      }
      const double mR = static_cast<double>(means.size());
      const double var = std::max(0.0, sq / mR - (s / mR) * (s / mR));
      st.d_se = std::sqrt(var / (mR - 1.0));
    }
    if (lv >= 2) {
      const auto& prev = level_means[static_cast<std::size_t>(lv) - 1];
      const auto& curr = level_means[static_cast<std::size_t>(lv)];
      LevelStats& pst = rep.stats[static_cast<std::size_t>(lv) - 2];
      if (pst.d_mean > 0.0) st.ratio = st.d_mean / pst.d_mean;
      if (prev.size() == curr.size() && curr.size() >= 2) {
        double s = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < curr.size(); ++i) {
          const double v = curr[i] / prev[i];
          s += v;
          sq += v * v;
        }
        const double mR = static_cast<double>(curr.size());
        const double var = std::max(0.0, sq / mR - (s / mR) * (s / mR));
        st.ratio_se = std::sqrt(var / (mR - 1.0));
      }
    }
    rep.stats.push_back(st);
  }
  return rep;
}

}  // namespace lfpp
