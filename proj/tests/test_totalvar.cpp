#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "lfpp/errors.hpp"
#include "lfpp/rng.hpp"
#include "lfpp/totalvar.hpp"

using namespace lfpp;

namespace {

PathSample hand_path() {
  PathSample p;
  p.times = {0.0, 1.0, 2.0, 3.0};
  p.values = {0.0, 1.0, -1.0, 2.0};
  return p;
}

PathSample random_path(std::int64_t points, std::uint64_t seed, double scale) {
  PathSample p;
  CounterRng rng(seed, 0);
  p.times.resize(static_cast<std::size_t>(points));
  p.values.resize(static_cast<std::size_t>(points));
  p.values[0] = 0.0;
  for (std::int64_t i = 0; i < points; ++i) {
    p.times[static_cast<std::size_t>(i)] = static_cast<double>(i);
    if (i > 0) {
      p.values[static_cast<std::size_t>(i)] =
          p.values[static_cast<std::size_t>(i - 1)] +
          scale * rng.normal(static_cast<std::uint64_t>(i));
    }
  }
  return p;
}

// direct evaluation over an explicit internal point set
double phi_direct(const PathSample& p, const std::vector<std::size_t>& internal,
                  double lam) {
  std::vector<std::size_t> idx;
  idx.push_back(0);
  for (std::size_t k : internal) idx.push_back(k);
  idx.push_back(p.times.size() - 1);
  double total = 0.0;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    total += std::abs(p.values[idx[i]] - p.values[idx[i - 1]]);
  }
  return total - lam * static_cast<double>(internal.size());
}

// eight triangular legs of amplitude 1 on a dyadic grid
PathSample zigzag_path() {
  PathSample p;
  const std::size_t n = 2048;
  p.times.resize(n + 1);
  p.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    p.times[i] = static_cast<double>(i) / 2048.0;
    std::size_t ph = i % 512;
    double v = (ph <= 256) ? static_cast<double>(ph) : static_cast<double>(512 - ph);
    p.values[i] = v / 256.0;
  }
  return p;
}

}  // namespace

TEST_CASE("phi_value hand cases and monotone telescoping") {
  auto p = hand_path();
  auto pen = constant_penalty(0.5, 3.0);

  TimePartition trivial{{0.0, 3.0}};
  CHECK(phi_value(p, trivial, pen) == doctest::Approx(2.0).epsilon(1e-14));

  TimePartition full{{0.0, 1.0, 2.0, 3.0}};
  CHECK(phi_value(p, full, pen) == doctest::Approx(5.0).epsilon(1e-14));

  // interpolated internal point
  TimePartition mid{{0.0, 1.5, 3.0}};
  // f(1.5) = 0, so |0-0| + |2-0| - 0.5
  CHECK(phi_value(p, mid, pen) == doctest::Approx(1.5).epsilon(1e-14));

  PathSample inc;
  inc.times = {0.0, 1.0, 2.0, 3.0, 4.0};
  inc.values = {0.0, 0.5, 1.1, 2.0, 3.3};
  auto pen2 = constant_penalty(0.25, 4.0);
  TimePartition trivial2{{0.0, 4.0}};
  double base = phi_value(inc, trivial2, pen2);
  TimePartition several{{0.0, 1.0, 2.5, 3.0, 4.0}};
  CHECK(phi_value(inc, several, pen2) <= base);

  CHECK_THROWS_AS(phi_value(p, TimePartition{{0.0}}, pen), usage_error);
  CHECK_THROWS_AS(phi_value(p, TimePartition{{0.0, 0.5, 0.5, 3.0}}, pen),
                  usage_error);
  CHECK_THROWS_AS(phi_value(p, TimePartition{{-1.0, 3.0}}, pen), usage_error);
}

TEST_CASE("dp matches exhaustive search on a 12 point path") {
  auto p = random_path(12, 20260823, 0.8);
  double lam = 0.3;
  auto pen = constant_penalty(lam, p.times.back());
  auto dp = phi_optimal_dp(p, pen);

  double best = -1e300;
  for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
    std::vector<std::size_t> internal;
    for (std::size_t b = 0; b < 10; ++b) {
      if (mask & (1u << b)) internal.push_back(b + 1);
    }
    best = std::max(best, phi_direct(p, internal, lam));
  }
  CHECK(dp.value == doctest::Approx(best).epsilon(1e-12));
  CHECK(phi_value(p, dp.partition, pen) == doctest::Approx(dp.value).epsilon(1e-12));
}

TEST_CASE("dp endpoints: huge penalty and zero penalty") {
  auto p = random_path(40, 7, 1.0);
  double tv = 0.0;
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    tv += std::abs(p.values[i] - p.values[i - 1]);
  }
  auto big = phi_optimal_dp(p, constant_penalty(tv + 10.0, p.times.back()));
  CHECK(big.partition.points.size() == 2);
  CHECK(big.value ==
        doctest::Approx(std::abs(p.values.back() - p.values.front())).epsilon(1e-13));

  auto zero = phi_optimal_dp(p, constant_penalty(0.0, p.times.back()));
  CHECK(zero.value == doctest::Approx(tv).epsilon(1e-12));
}

TEST_CASE("dp dominates sampled partitions and refinement never loses") {
  auto p = random_path(64, 91, 0.6);
  auto pen = constant_penalty(0.4, p.times.back());
  auto dp = phi_optimal_dp(p, pen);
  CounterRng rng(55, 0);
  for (int rep = 0; rep < 50; ++rep) {
    TimePartition part;
    part.points.push_back(p.times.front());
    for (std::size_t i = 1; i + 1 < p.times.size(); ++i) {
      if (rng.uniform(static_cast<std::uint64_t>(rep) * 64 + i) < 0.3) {
        part.points.push_back(p.times[i]);
      }
    }
    part.points.push_back(p.times.back());
    CHECK(dp.value >= phi_value(p, part, pen) - 1e-12);
  }

  PathSample fine;
  for (std::size_t i = 0; i + 1 < p.times.size(); ++i) {
    fine.times.push_back(p.times[i]);
    fine.values.push_back(p.values[i]);
    fine.times.push_back(0.5 * (p.times[i] + p.times[i + 1]));
    fine.values.push_back(0.5 * (p.values[i] + p.values[i + 1]));
  }
  fine.times.push_back(p.times.back());
  fine.values.push_back(p.values.back());
  auto dp_fine = phi_optimal_dp(fine, pen);
  CHECK(dp_fine.value >= dp.value - 1e-12);
}

TEST_CASE("lambda_star closed form, homogeneity, and integral identity") {
  CHECK(lambda_star(constant_penalty(0.37)) == doctest::Approx(0.37).epsilon(1e-14));

  StepPenalty two;
  two.breakpoints = {0.0, 0.5, 1.0};
  two.levels = {1.0, 2.0};
  double ls = lambda_star(two);
  CHECK(ls == doctest::Approx(std::sqrt(8.0 / 5.0)).epsilon(1e-14));

  StepPenalty scaled = two;
  for (auto& lv : scaled.levels) lv *= 3.0;
  CHECK(lambda_star(scaled) == doctest::Approx(3.0 * ls).epsilon(1e-14));

  double integral = 0.0;
  for (std::size_t j = 0; j < two.levels.size(); ++j) {
    double ds = two.breakpoints[j + 1] - two.breakpoints[j];
    integral += ds * (ls / two.levels[j]) * (ls / two.levels[j]);
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));

  StepPenalty bad = two;
  bad.levels[1] = 0.0;
  CHECK_THROWS_AS(lambda_star(bad), usage_error);

  CHECK(integral_inv_lambda(two) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("time change is the identity for constant penalties") {
  auto tc = time_change(constant_penalty(0.7, 2.0));
  CHECK(tc.forward(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(tc.forward(2.0) == 1.0);
  CHECK(tc.inverse(0.25) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tc.transformed.levels[0] == 0.7);
}

TEST_CASE("time change breakpoint images and round trip") {
  StepPenalty two;
  two.breakpoints = {0.0, 0.5, 1.0};
  two.levels = {1.0, 2.0};
  auto tc = time_change(two);
  CHECK(tc.forward(0.5) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(tc.forward(1.0) == 1.0);
  CHECK(tc.transformed.breakpoints[1] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(tc.transformed.breakpoints[2] == 1.0);
  CHECK(tc.inverse(0.8) == doctest::Approx(0.5).epsilon(1e-13));
  for (int i = 0; i <= 1000; ++i) {
    double u = static_cast<double>(i) / 1000.0;
    CHECK(tc.forward(tc.inverse(u)) == doctest::Approx(u).epsilon(1e-12));
    double t = static_cast<double>(i) / 1000.0;
    CHECK(tc.inverse(tc.forward(t)) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("clock change preserves the expected penalized variation") {
  StepPenalty two;
  two.breakpoints = {0.0, 0.5, 1.0};
  two.levels = {1.0, 2.0};
  auto tc = time_change(two);
  double ls = lambda_star(two);
  const std::int64_t n = 2000;
  const int paths = 3000;
  std::vector<double> grid_part = {0.25, 0.5, 0.85};

  // original clock: evaluate phi at the preimage partition
  TimePartition pre;
  pre.points.push_back(0.0);
  for (double u : grid_part) pre.points.push_back(tc.inverse(u));
  pre.points.push_back(1.0);
  std::vector<double> lhs(paths);
  for (int r = 0; r < paths; ++r) {
    auto b = sample_brownian_path(1.0, n, 411, static_cast<std::uint32_t>(r));
    lhs[static_cast<std::size_t>(r)] = phi_value(b, pre, two);
  }

  // flattened clock: scaled gains against the transformed penalty
  std::vector<double> rhs(paths);
  for (int r = 0; r < paths; ++r) {
    auto w = sample_brownian_path(1.0, n, 733, static_cast<std::uint32_t>(r));
    std::vector<std::int64_t> cuts = {0, 500, 1000, 1700, n};
    double total = 0.0;
    for (std::size_t s = 1; s < cuts.size(); ++s) {
      double gain = 0.0;
      for (std::int64_t j = cuts[s - 1]; j < cuts[s]; ++j) {
        double lt = tc.transformed.value_at(static_cast<double>(j) / n);
        gain += (lt / ls) * (w.values[static_cast<std::size_t>(j + 1)] -
                             w.values[static_cast<std::size_t>(j)]);
      }
      total += std::abs(gain);
    }
    for (std::size_t s = 1; s + 1 < cuts.size(); ++s) {
      total -= tc.transformed.value_at(static_cast<double>(cuts[s]) / n);
    }
    rhs[static_cast<std::size_t>(r)] = total;
  }

  double ml = 0.0, mr = 0.0, vl = 0.0, vr = 0.0;
  for (int r = 0; r < paths; ++r) {
    ml += lhs[static_cast<std::size_t>(r)];
    mr += rhs[static_cast<std::size_t>(r)];
  }
  ml /= paths;
  mr /= paths;
  for (int r = 0; r < paths; ++r) {
    vl += (lhs[static_cast<std::size_t>(r)] - ml) * (lhs[static_cast<std::size_t>(r)] - ml);
    vr += (rhs[static_cast<std::size_t>(r)] - mr) * (rhs[static_cast<std::size_t>(r)] - mr);
  }
  double se = std::sqrt(vl / (paths - 1) / paths + vr / (paths - 1) / paths);
  CHECK(std::abs(ml - mr) <= 3.0 * se);
}

TEST_CASE("uptick scan finds every extremum of the dyadic zigzag") {
  auto p = zigzag_path();
  double lam = 0.5;
  CHECK(default_cap(lam) == 8);
  auto res = uptick_partition(p, lam, default_cap(lam));

  REQUIRE(res.record.xis.size() == 8);
  CHECK(res.record.taus[0] == 0.0625);
  CHECK(res.record.xis[0] == 0.0);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(res.record.xis[j] == static_cast<double>(256 * j) / 2048.0);
  }
  REQUIRE(res.record.deltas.size() == 7);
  for (double d : res.record.deltas) CHECK(d == 1.0);

  REQUIRE(res.partition.points.size() == 9);
  CHECK(res.partition.points.front() == 0.0);
  CHECK(res.partition.points.back() == 1.0);
  CHECK(static_cast<std::int64_t>(res.partition.points.size()) <=
        default_cap(lam) + 2);

  auto pen = constant_penalty(lam, 1.0);
  CHECK(phi_value(p, res.partition, pen) == doctest::Approx(4.5).epsilon(1e-14));
  CHECK(phi_optimal_dp(p, pen).value == doctest::Approx(4.5).epsilon(1e-14));
}

TEST_CASE("uptick scan edge behavior") {
  PathSample flat;
  const std::size_t n = 2000;
  flat.times.resize(n + 1);
  flat.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    flat.times[i] = static_cast<double>(i) / n;
    flat.values[i] = 0.1 * std::sin(6.28318530717958648 * flat.times[i]);
  }
  flat.values[0] = 0.0;
  auto res = uptick_partition(flat, 0.5, 8);
  CHECK(res.record.taus.empty());
  CHECK(res.partition.points.size() == 2);

  auto capped = uptick_partition(zigzag_path(), 0.5, 3);
  CHECK(capped.record.xis.size() == 3);

  PathSample coarse;
  coarse.times = {0.0, 0.5, 1.0};
  coarse.values = {0.0, 1.0, 0.0};
  CHECK_THROWS_AS(uptick_partition(coarse, 0.5, 8), usage_error);
  CHECK_THROWS_AS(uptick_partition(zigzag_path(), 0.5, 0), usage_error);
}

TEST_CASE("tick grid sizing rule") {
  CHECK(tick_grid_steps(0.5, 1.0) == 1600);
  CHECK(tick_grid_steps(0.05, 1.0) == 160000);
  CHECK_THROWS_AS(tick_grid_steps(1e-4, 1.0), resource_error);
  CHECK_THROWS_AS(tick_grid_steps(-1.0, 1.0), usage_error);
}

TEST_CASE("renewal statistics are exact on the deterministic zigzag") {
  std::vector<PathSample> paths = {zigzag_path()};
  auto st = renewal_stats(0.5, paths);
  CHECK(st.n_tau == 1);
  CHECK(st.mean_tau1 == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(st.n_delta == 7);
  CHECK(st.mean_delta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.se_delta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  double theta = M_PI * M_PI / 16.0;
  CHECK(st.theta == doctest::Approx(theta).epsilon(1e-14));
  CHECK(st.mean_mgf == doctest::Approx(std::exp(theta * 0.0625)).epsilon(1e-13));
  CHECK(st.mgf_reference ==
        doctest::Approx(1.0 / std::cos(M_PI * std::sqrt(2.0) / 8.0)).epsilon(1e-14));
}

TEST_CASE("simulated renewal statistics match the continuum laws") {
  double lam = 0.3;
  auto st = renewal_simulate(lam, 8, 3000, 90210, 1);
  CHECK(st.n_tau == 3000);
  CHECK(st.n_delta == 3000 * 7);
  CHECK(std::abs(st.mean_tau1 - lam * lam) <= 3.0 * st.se_tau1);
  CHECK(std::abs(st.mean_delta - 2.0 * lam) <= 3.0 * st.se_delta);
  CHECK(std::abs(st.mean_mgf - st.mgf_reference) <= 3.0 * st.se_mgf);
  // the gap beyond the guaranteed level is exponential, so the sample sd
  // of the gaps should sit near lambda_star
  double sd = st.se_delta * std::sqrt(static_cast<double>(st.n_delta));
  CHECK(sd == doctest::Approx(lam).epsilon(0.1));

  auto again = renewal_simulate(lam, 8, 3000, 90210, 1);
  CHECK(again.mean_tau1 == st.mean_tau1);
  auto threaded = renewal_simulate(lam, 8, 3000, 90210, 3);
  CHECK(threaded.mean_tau1 == st.mean_tau1);
  CHECK(threaded.mean_delta == st.mean_delta);
}

TEST_CASE("strategy experiment on a constant penalty") {
  auto pen = constant_penalty(0.3, 1.0);
  auto rep = strategy_experiment(pen, 200, 5150, 1);
  CHECK(rep.lambda_star_val == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(rep.cap_k == 23);
  CHECK(rep.grid_steps == 4445);
  CHECK(rep.max_internal_points <= rep.cap_k);
  CHECK(rep.penalty_constant);
  CHECK(rep.integral_inv_lambda == doctest::Approx(1.0 / 0.3).epsilon(1e-13));
  CHECK(rep.mean_phi_oracle >= rep.mean_phi_strategy);
  CHECK(rep.mean_phi_oracle >= rep.dunlap_low - 3.0 * rep.se_oracle);
  CHECK(rep.mean_phi_oracle <= rep.dunlap_high + 3.0 * rep.se_oracle);

  auto rep2 = strategy_experiment(pen, 200, 5150, 1);
  CHECK(rep2.mean_phi_strategy == rep.mean_phi_strategy);
  CHECK(rep2.mean_phi_oracle == rep.mean_phi_oracle);
  auto rep3 = strategy_experiment(pen, 200, 5150, 3);
  CHECK(rep3.mean_phi_strategy == rep.mean_phi_strategy);
  CHECK(rep3.mean_phi_oracle == rep.mean_phi_oracle);
}

TEST_CASE("strategy experiment with a two level penalty") {
  StepPenalty pen;
  pen.breakpoints = {0.0, 0.5, 1.0};
  pen.levels = {0.25, 0.5};
  double ls = lambda_star(pen);
  CHECK(ls == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-14));
  auto rep = strategy_experiment(pen, 100, 777, 1);
  CHECK(!rep.penalty_constant);
  CHECK(std::isnan(rep.dunlap_low));
  CHECK(rep.mean_phi_oracle >= rep.mean_phi_strategy);
  CHECK(rep.max_internal_points <= rep.cap_k);
  CHECK(rep.mean_phi_strategy > 0.0);

  StepPenalty steep;
  steep.breakpoints = {0.0, 0.5, 1.0};
  steep.levels = {1.0, 2.0};
  CHECK_THROWS_AS(strategy_experiment(steep, 100, 1, 1), usage_error);
  CHECK_THROWS_AS(strategy_experiment(pen, 1, 1, 1), usage_error);
}
