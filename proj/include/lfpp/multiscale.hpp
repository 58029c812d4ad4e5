#pragma once

#include <cstdint>
#include <vector>

#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/intervals.hpp"
#include "lfpp/params.hpp"
#include "lfpp/rng.hpp"

namespace lfpp {

// Hierarchical left-right crossing builder. A level-L rectangle is split into
// two stacked layer bands; each band carries a chain of level-(L-1) crossings
// joined by straight mid segments, and the final crossing switches between the
// two layers at penalised change points driven by the coarse-field line sums.

enum class GadgetMode { straight, recursive };

// A vertical connector splicing two horizontal pieces together.
struct GadgetSpec {
  RectRegion column_rect;  // lattice columns/rows the connector occupies
  GadgetMode mode = GadgetMode::straight;
  double weight = 0.0;     // total weight of the connector points
};

struct CrossingPlan {
  int level = 0;
  RectRegion rect;
  std::vector<IntervalZ> switch_intervals;  // left to right, partition the base
  std::vector<int> layer_choice;            // per interval: 1 = top, 2 = bottom
  std::vector<GadgetSpec> gadgets;          // one per executed switch
  std::vector<RectRegion> skeleton;         // chosen sub-rectangles
};

// ---------------------------------------------------------------------------
// Uniform nested-span crossing (the decorrelation strategy): bases are the
// depth-1 covering pieces of the rectangle base, every base gets a straight
// segment at the mid-row of a uniformly chosen principal span, and consecutive
// segments are joined by straight column gadgets. Selections never look at
// the field; only the returned weight does.

struct StrategyOneResult {
  CrossingPlan plan;
  PathResult crossing;         // points ordered left to right
  double gadget_weight = 0.0;  // junction share of the weight
};

// level_geom >= 1 covers the base with covering(sp, level_geom, k_geom, .);
// level_geom == 0 treats the whole base as a single piece. Requires
// floor(k_geom * a_level) == base length so the covering fits exactly.
// Randomness comes from rng at the given stream, indices consumed from 0.
StrategyOneResult strategy1_crossing(const RectRegion& rect,
                                     const WeightedGrid& w,
                                     const ScaleParams& sp, int level_geom,
                                     double k_geom, const CounterRng& rng,
                                     std::uint32_t stream);

// ---------------------------------------------------------------------------
// Layer-switch machinery. The layout part depends only on the geometry and is
// reused across replicates; the expensive piece is the exact covariance of the
// gain line sums under the band-conditional (coarse) field.

struct SwitchLayout {
  RectRegion rect;
  RectRegion band_top, band_bot;        // equal halves, bottom first in y
  std::int64_t row_hi = 0, row_lo = 0;  // centre rows of the two bands
  std::vector<IntervalZ> intervals;     // switch intervals, partition the base
  std::vector<bool> short_interval;     // trailing interval below len/4
  std::vector<double> gain_cov;         // k*k covariance of the gain sums
  SequentialTransform transform;        // sequential decorrelation of gains
  double vertical_child = 0.0;          // band span length
  double a_child = 0.0;                 // half the band span length
};

// switch_len is the nominal interval length in columns (floor(beta * N)); the
// last interval keeps the remainder and is flagged when shorter than
// switch_len / 4.
SwitchLayout make_switch_layout(const RectRegion& rect, std::int64_t switch_len);

// Gain variable per interval: half the difference of the coarse line sums
// along the two centre rows, sum over the interval's interior columns. Gives
// the antisymmetric layer preference (negative favours the top layer).
std::vector<double> gain_line_sums(const SwitchLayout& lay,
                                   const FieldSample& coarse_top,
                                   const FieldSample& coarse_bot);

struct StrategyTwoResult {
  CrossingPlan plan;
  PathResult crossing;
  double lambda_star_val = 0.0;  // penalty scale of the switch optimisation
  double clock_total = 0.0;      // total variance clock of the gain walk
  int switches = 0;
  double gadget_weight = 0.0;    // switch-gadget share of the weight
  bool regime_flag = false;      // lambda*^-2 off the design window by > 4x
  int coin = 0;                  // tick-phase coin actually used
};

// Builds the switched crossing from two prebuilt layer chains. gains_raw are
// the per-interval gain sums (gain_line_sums); d_prev is the expected child
// crossing weight feeding the penalty scale. force_coin in {0,1} pins the
// tick-phase coin (mirror checks); -1 draws it from rng. Randomness is
// consumed from rng at the given stream.
StrategyTwoResult strategy2_crossing(const SwitchLayout& lay,
                                     const WeightedGrid& w,
                                     const PathResult& top_path,
                                     const PathResult& bot_path,
                                     const std::vector<double>& gains_raw,
                                     double gamma, double d_prev,
                                     const ScaleParams& sp,
                                     const CounterRng& rng, std::uint32_t stream,
                                     int force_coin = -1);

// ---------------------------------------------------------------------------

// True when the deduplicated point set is 4-connected inside rect and joins
// the left edge to the right edge.
bool check_connected_crossing(const std::vector<PointZ>& points,
                              const RectRegion& rect);

// Ratio of the built crossing weight to the exact optimal crossing weight of
// rect; a feasible construction always returns >= 1 up to roundoff.
double compare_vs_optimal(const WeightedGrid& w, const RectRegion& rect,
                          const PathResult& built);

// ---------------------------------------------------------------------------

struct LevelStats {
  int level = 0;
  double d_mean = 0.0;
  double d_se = 0.0;             // over per-replicate means
  double d_join_mean = 0.0;      // switch-gadget share of d
  double switches_mean = 0.0;
  double ratio = 0.0;            // d_mean / previous level d_mean (0 at level 1)
  double ratio_se = 0.0;         // spread of per-replicate ratios
  double lambda_star_mean = 0.0;
  double regime_flag_share = 0.0;
  std::int64_t samples = 0;      // crossings measured at this level
};

struct ReplicaRecord {
  int level = 0;
  std::int64_t replicate = 0;
  double d = 0.0;       // mean crossing weight at this level in the replicate
  double d_join = 0.0;  // mean switch-gadget weight
  double switches = 0.0;
};

struct MultiscaleConfig {
  ScaleParams sp;            // delta, m, Gamma, alpha, beta
  std::int64_t base_n = 16;  // N, sets band heights and switch interval length
  double width_mult = 8.0;   // lattice width multiplier of the base scale
  double gamma = 0.0;
  int levels = 2;            // 1..4
  int replicas = 50;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MultiscaleReport {
  std::vector<LevelStats> stats;        // level 1 first
  std::vector<ReplicaRecord> records;   // per (level, replicate)
  double s1_top_mean = 0.0;             // single uniformly chosen layer
  double s1_top_se = 0.0;
  double s2_top_mean = 0.0;             // switched crossing
  double s2_top_se = 0.0;
  double paired_diff_mean = 0.0;        // s2 - s1, same replicate
  double paired_diff_se = 0.0;
  double opt_ratio_mean = 0.0;          // built / optimal at the top level
  double opt_ratio_min = 0.0;
  std::vector<double> layer_one_share;  // per top interval, share of choice 1
  double layer_share_pooled = 0.0;
  std::int64_t max_switches = 0;
  bool all_connected = false;
  bool any_short_interval = false;
  std::int64_t replicas = 0;
};

// Full experiment: canonical rectangles per level, one field replicate per
// run, recursive chain assembly and layer switching, exact optimal-crossing
// comparison at the top. Deterministic for fixed (seed, config) regardless of
// thread count.
MultiscaleReport recursive_run(const MultiscaleConfig& cfg);

// Canonical level rectangle of the run geometry: base [0, floor(k * a_level)]
// with k = width_mult * base_n, span height (base_n / 2 + 1) * 2^(level-1)
// rows starting at 0.
RectRegion multiscale_rect(const MultiscaleConfig& cfg, int level);

}  // namespace lfpp
