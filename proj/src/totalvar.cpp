#include "lfpp/totalvar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <thread>

#include "lfpp/errors.hpp"
#include "lfpp/rng.hpp"

namespace lfpp {

namespace {

constexpr std::int64_t kDpGridLimit = 2000000;
constexpr std::int64_t kStepLimit = 50000000;

void check_path(const PathSample& path) {
  if (path.times.size() != path.values.size() || path.times.size() < 2) {
    throw usage_error("path needs matching times/values with at least 2 points");
  }
  for (std::size_t i = 1; i < path.times.size(); ++i) {
    if (!(path.times[i] > path.times[i - 1])) {
      throw usage_error("path times must be strictly increasing");
    }
  }
  if (path.values[0] != 0.0) {
    throw usage_error("path must start at value 0");
  }
}

void check_penalty(const StepPenalty& penalty, bool need_positive) {
  if (penalty.breakpoints.size() < 2 ||
      penalty.levels.size() + 1 != penalty.breakpoints.size()) {
    throw usage_error("penalty needs k+1 breakpoints for k levels");
  }
  for (std::size_t j = 1; j < penalty.breakpoints.size(); ++j) {
    if (!(penalty.breakpoints[j] > penalty.breakpoints[j - 1])) {
      throw usage_error("penalty breakpoints must be strictly increasing");
    }
  }
  for (double lv : penalty.levels) {
    if (!(lv >= 0.0) || (need_positive && lv <= 0.0)) {
      throw usage_error("penalty levels out of range");
    }
  }
}

double domain_slack(double a, double b) {
  return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// linear interpolation on the sample grid
double path_at(const PathSample& path, double t) {
  const auto& ts = path.times;
  if (t <= ts.front()) return path.values.front();
  if (t >= ts.back()) return path.values.back();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t j = static_cast<std::size_t>(it - ts.begin()) - 1;
  double u = (t - ts[j]) / (ts[j + 1] - ts[j]);
  return path.values[j] + u * (path.values[j + 1] - path.values[j]);
}

struct MeanSe {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  std::int64_t n = 0;
};

MeanSe pooled_stats(double sum, double sumsq, std::int64_t n) {
  MeanSe out;
  out.n = n;
  if (n < 1) return out;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double var = (sumsq - sum * out.mean) / static_cast<double>(n - 1);
  out.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  return out;
}

MeanSe vector_stats(const std::vector<double>& xs) {
  double s = 0.0, s2 = 0.0;
  for (double x : xs) {
    s += x;
    s2 += x * x;
  }
  return pooled_stats(s, s2, static_cast<std::int64_t>(xs.size()));
}

void run_workers(int threads, std::int64_t n_tasks,
                 const std::function<void(std::int64_t)>& task) {
  int use = std::max(1, threads);
  if (use == 1 || n_tasks <= 1) {
    for (std::int64_t r = 0; r < n_tasks; ++r) task(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::int64_t r = next.fetch_add(1);
      if (r >= n_tasks) return;
      task(r);
    }
  };
  std::vector<std::thread> pool;
  int count = static_cast<int>(std::min<std::int64_t>(use, n_tasks));
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

double StepPenalty::value_at(double t) const {
  double lo = breakpoints.front();
  double hi = breakpoints.back();
  double slack = domain_slack(lo, hi);
  if (t < lo - slack || t > hi + slack) {
    throw usage_error("time outside the penalty domain");
  }
  t = std::min(std::max(t, lo), hi);
  auto it = std::upper_bound(breakpoints.begin() + 1, breakpoints.end() - 1, t);
  std::size_t j = static_cast<std::size_t>(it - (breakpoints.begin() + 1));
  return levels[j];
}

bool StepPenalty::constant() const {
  for (std::size_t j = 1; j < levels.size(); ++j) {
    if (levels[j] != levels[0]) return false;
  }
  return true;
}

StepPenalty constant_penalty(double level, double horizon) {
  if (!(horizon > 0.0)) throw usage_error("penalty horizon must be positive");
  StepPenalty p;
  p.breakpoints = {0.0, horizon};
  p.levels = {level};
  return p;
}

double phi_value(const PathSample& path, const TimePartition& part,
                 const StepPenalty& penalty) {
  check_path(path);
  check_penalty(penalty, false);
  const auto& q = part.points;
  if (q.size() < 2) throw usage_error("partition needs at least two points");
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (!(q[i] > q[i - 1])) {
      throw usage_error("partition points must be strictly increasing");
    }
  }
  double lo = path.times.front();
  double hi = path.times.back();
  double slack = domain_slack(lo, hi);
  if (q.front() < lo - slack || q.back() > hi + slack) {
    throw usage_error("partition leaves the path domain");
  }
  double total = 0.0;
  double prev = path_at(path, q[0]);
  for (std::size_t i = 1; i < q.size(); ++i) {
    double cur = path_at(path, q[i]);
    total += std::abs(cur - prev);
    prev = cur;
  }
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    total -= penalty.value_at(q[i]);
  }
  return total;
}

DpResult phi_optimal_dp(const PathSample& path, const StepPenalty& penalty) {
  check_path(path);
  check_penalty(penalty, false);
  std::int64_t n = static_cast<std::int64_t>(path.times.size());
  if (n > kDpGridLimit) throw resource_error("path grid too large for the DP");
  // both endpoints must sit inside the penalty domain
  penalty.value_at(path.times.front());
  penalty.value_at(path.times.back());

  const auto& f = path.values;
  // best(i) = max over partitions ending at grid point i, i not yet charged;
  // split |f_i - f_p| into the two sign branches and keep running maxima of
  // charged-best(p) -/+ f_p so each point is O(1)
  double best_plus = -f[0];   // max of charged(p) - f_p
  double best_minus = f[0];   // max of charged(p) + f_p
  std::int64_t arg_plus = 0;
  std::int64_t arg_minus = 0;
  std::vector<std::int64_t> pred(static_cast<std::size_t>(n), 0);
  double value = 0.0;
  for (std::int64_t i = 1; i < n; ++i) {
    double up = f[static_cast<std::size_t>(i)] + best_plus;
    double down = -f[static_cast<std::size_t>(i)] + best_minus;
    if (up >= down) {
      value = up;
      pred[static_cast<std::size_t>(i)] = arg_plus;
    } else {
      value = down;
      pred[static_cast<std::size_t>(i)] = arg_minus;
    }
    if (i + 1 < n) {
      double charged = value - penalty.value_at(path.times[static_cast<std::size_t>(i)]);
      double cp = charged - f[static_cast<std::size_t>(i)];
      double cm = charged + f[static_cast<std::size_t>(i)];
      if (cp > best_plus) {
        best_plus = cp;
        arg_plus = i;
      }
      if (cm > best_minus) {
        best_minus = cm;
        arg_minus = i;
      }
    }
  }
  DpResult out;
  out.value = value;
  std::vector<std::int64_t> chain;
  std::int64_t idx = n - 1;
  chain.push_back(idx);
  while (idx != 0) {
    idx = pred[static_cast<std::size_t>(idx)];
    chain.push_back(idx);
  }
  out.partition.points.reserve(chain.size());
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    out.partition.points.push_back(path.times[static_cast<std::size_t>(*it)]);
  }
  return out;
}

double lambda_star(const StepPenalty& penalty) {
  check_penalty(penalty, true);
  double sum = 0.0;
  for (std::size_t j = 0; j < penalty.levels.size(); ++j) {
    double ds = penalty.breakpoints[j + 1] - penalty.breakpoints[j];
    sum += ds / (penalty.levels[j] * penalty.levels[j]);
  }
  return 1.0 / std::sqrt(sum);
}

double integral_inv_lambda(const StepPenalty& penalty) {
  check_penalty(penalty, true);
  double sum = 0.0;
  for (std::size_t j = 0; j < penalty.levels.size(); ++j) {
    double ds = penalty.breakpoints[j + 1] - penalty.breakpoints[j];
    sum += ds / penalty.levels[j];
  }
  return sum;
}

double TimeChange::forward(double t) const {
  const auto& bp = source.breakpoints;
  double slack = domain_slack(bp.front(), bp.back());
  if (t < bp.front() - slack || t > bp.back() + slack) {
    throw usage_error("time outside the clock change domain");
  }
  if (t <= bp.front()) return 0.0;
  if (t >= bp.back()) return 1.0;
  auto it = std::upper_bound(bp.begin() + 1, bp.end() - 1, t);
  std::size_t j = static_cast<std::size_t>(it - (bp.begin() + 1));
  double lv = source.levels[j];
  return (cum_[j] + (t - bp[j]) / (lv * lv)) / norm_;
}

double TimeChange::inverse(double u) const {
  double slack = 1e-9;
  if (u < -slack || u > 1.0 + slack) {
    throw usage_error("argument outside [0, 1]");
  }
  if (u <= 0.0) return source.breakpoints.front();
  if (u >= 1.0) return source.breakpoints.back();
  double c = u * norm_;
  auto it = std::upper_bound(cum_.begin() + 1, cum_.end() - 1, c);
  std::size_t j = static_cast<std::size_t>(it - (cum_.begin() + 1));
  double lv = source.levels[j];
  return source.breakpoints[j] + (c - cum_[j]) * lv * lv;
}

TimeChange time_change(const StepPenalty& penalty) {
  check_penalty(penalty, true);
  TimeChange tc;
  tc.source = penalty;
  std::size_t k = penalty.levels.size();
  tc.cum_.assign(k + 1, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double ds = penalty.breakpoints[j + 1] - penalty.breakpoints[j];
    tc.cum_[j + 1] = tc.cum_[j] + ds / (penalty.levels[j] * penalty.levels[j]);
  }
  tc.norm_ = tc.cum_.back();
  tc.transformed.levels = penalty.levels;
  tc.transformed.breakpoints.assign(k + 1, 0.0);
  for (std::size_t j = 1; j < k; ++j) {
    tc.transformed.breakpoints[j] = tc.cum_[j] / tc.norm_;
  }
  tc.transformed.breakpoints[k] = 1.0;
  return tc;
}

std::int64_t default_cap(double lambda_star_val) {
  if (!(lambda_star_val > 0.0)) throw usage_error("lambda_star must be positive");
  return static_cast<std::int64_t>(std::ceil(2.0 / (lambda_star_val * lambda_star_val)));
}

std::int64_t tick_grid_steps(double lambda_star_val, double horizon) {
  if (!(lambda_star_val > 0.0) || !(horizon > 0.0)) {
    throw usage_error("tick grid needs positive level and horizon");
  }
  double raw = std::ceil((400.0 / (lambda_star_val * lambda_star_val)) * horizon);
  if (!(raw <= static_cast<double>(kStepLimit))) {
    throw resource_error("tick grid would exceed the step limit");
  }
  return static_cast<std::int64_t>(raw);
}

UptickResult uptick_partition(const PathSample& path, double lambda_star_val,
                              std::int64_t cap_k) {
  check_path(path);
  if (!(lambda_star_val > 0.0)) throw usage_error("lambda_star must be positive");
  if (cap_k < 1) throw usage_error("cap must be at least 1");
  double max_dt = lambda_star_val * lambda_star_val / 400.0;
  for (std::size_t i = 1; i < path.times.size(); ++i) {
    if (path.times[i] - path.times[i - 1] > max_dt * (1.0 + 1e-9)) {
      throw usage_error("path grid too coarse for tick detection");
    }
  }

  UptickResult out;
  auto& rec = out.record;
  int dir = 1;  // looking for an upward move of lambda_star from the running min
  double ext_val = path.values[0];
  std::size_t ext_idx = 0;
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    double v = path.values[i];
    bool trigger = false;
    if (dir > 0) {
      if (v - ext_val >= lambda_star_val) {
        trigger = true;
      } else if (v < ext_val) {
        ext_val = v;
        ext_idx = i;
      }
    } else {
      if (ext_val - v >= lambda_star_val) {
        trigger = true;
      } else if (v > ext_val) {
        ext_val = v;
        ext_idx = i;
      }
    }
    if (trigger) {
      rec.taus.push_back(path.times[i]);
      if (!rec.xi_values.empty()) {
        rec.deltas.push_back(std::abs(ext_val - rec.xi_values.back()));
      }
      rec.xis.push_back(path.times[ext_idx]);
      rec.xi_values.push_back(ext_val);
      dir = -dir;
      ext_val = v;
      ext_idx = i;
      if (static_cast<std::int64_t>(rec.xis.size()) >= cap_k) break;
    }
  }

  auto& pts = out.partition.points;
  pts.push_back(path.times.front());
  for (double x : rec.xis) {
    if (x > pts.back() && x < path.times.back()) pts.push_back(x);
  }
  pts.push_back(path.times.back());
  return out;
}

PathSample sample_brownian_path(double horizon, std::int64_t steps,
                                std::uint64_t seed, std::uint32_t replicate) {
  if (!(horizon > 0.0) || steps < 1) {
    throw usage_error("path needs a positive horizon and at least one step");
  }
  if (steps > kStepLimit) throw resource_error("path step count over the limit");
  CounterRng rng(seed, replicate);
  PathSample path;
  std::size_t n = static_cast<std::size_t>(steps);
  path.times.resize(n + 1);
  path.values.resize(n + 1);
  double sdt = std::sqrt(horizon / static_cast<double>(steps));
  path.times[0] = 0.0;
  path.values[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    path.times[i + 1] =
        static_cast<double>(i + 1) * horizon / static_cast<double>(steps);
    path.values[i + 1] = path.values[i] + sdt * rng.normal(i);
  }
  return path;
}

RenewalStats renewal_stats(double lambda_star_val,
                           const std::vector<PathSample>& paths) {
  if (!(lambda_star_val > 0.0)) throw usage_error("lambda_star must be positive");
  RenewalStats out;
  out.theta = M_PI * M_PI / (64.0 * lambda_star_val * lambda_star_val);
  out.mgf_reference = 1.0 / std::cos(std::sqrt(2.0 * out.theta) * lambda_star_val);
  out.n_paths = static_cast<std::int64_t>(paths.size());
  std::vector<double> taus, mgfs;
  double dsum = 0.0, dsumsq = 0.0;
  std::int64_t dcnt = 0;
  for (const auto& path : paths) {
    auto res = uptick_partition(path, lambda_star_val,
                                std::numeric_limits<std::int64_t>::max());
    if (!res.record.taus.empty()) {
      double t1 = res.record.taus.front() - path.times.front();
      taus.push_back(t1);
      mgfs.push_back(std::exp(out.theta * t1));
    }
    for (double d : res.record.deltas) {
      dsum += d;
      dsumsq += d * d;
      ++dcnt;
    }
  }
  auto ts = vector_stats(taus);
  auto ms = vector_stats(mgfs);
  auto ds = pooled_stats(dsum, dsumsq, dcnt);
  out.mean_tau1 = ts.mean;
  out.se_tau1 = ts.se;
  out.mean_mgf = ms.mean;
  out.se_mgf = ms.se;
  out.mean_delta = ds.mean;
  out.se_delta = ds.se;
  out.n_tau = ts.n;
  out.n_delta = ds.n;
  return out;
}

RenewalStats renewal_simulate(double lambda_star_val,
                              std::int64_t legs_per_path,
                              std::int64_t n_paths, std::uint64_t seed,
                              int threads) {
  if (!(lambda_star_val > 0.0)) throw usage_error("lambda_star must be positive");
  if (legs_per_path < 2 || n_paths < 2) {
    throw usage_error("need at least 2 legs per path and 2 paths");
  }
  if (legs_per_path > 10000) throw resource_error("too many legs per path");
  double lam = lambda_star_val;
  double dt = lam * lam / 400.0;
  double sdt = std::sqrt(dt);
  // generous run-off horizon; leg durations have exponential tails
  std::int64_t cap_steps = 20000 * legs_per_path;

  std::vector<double> tau1(static_cast<std::size_t>(n_paths), -1.0);
  std::vector<double> dsum(static_cast<std::size_t>(n_paths), 0.0);
  std::vector<double> dsumsq(static_cast<std::size_t>(n_paths), 0.0);
  std::vector<std::int64_t> dcnt(static_cast<std::size_t>(n_paths), 0);

  auto task = [&](std::int64_t r) {
    CounterRng rng(seed, static_cast<std::uint32_t>(r));
    double w = 0.0;
    double ext = 0.0;
    int dir = 1;
    bool have_prev = false;
    double prev_xi = 0.0;
    std::int64_t legs = 0;
    std::size_t ri = static_cast<std::size_t>(r);
    for (std::int64_t i = 0; i < cap_steps; ++i) {
      std::uint64_t cell = static_cast<std::uint64_t>(3 * i);
      double z = rng.normal(cell);
      double u1 = rng.uniform(cell + 1);
      double u2 = rng.uniform(cell + 2);
      double wn = w + sdt * z;
      double d = wn - w;
      // extrema of the Brownian bridge across this step, exact in law
      double bmax = 0.5 * (w + wn + std::sqrt(d * d - 2.0 * dt * std::log(u1)));
      double bmin = 0.5 * (w + wn - std::sqrt(d * d - 2.0 * dt * std::log(u2)));
      bool trigger = false;
      double xi_val = 0.0;
      if (dir > 0) {
        if (bmax - ext >= lam) {
          trigger = true;
          xi_val = ext;
          ext = bmax;
        } else if (bmin < ext) {
          ext = bmin;
        }
      } else {
        if (ext - bmin >= lam) {
          trigger = true;
          xi_val = ext;
          ext = bmin;
        } else if (bmax > ext) {
          ext = bmax;
        }
      }
      w = wn;
      if (trigger) {
        if (tau1[ri] < 0.0) tau1[ri] = static_cast<double>(i + 1) * dt;
        if (have_prev) {
          double delta = std::abs(xi_val - prev_xi);
          dsum[ri] += delta;
          dsumsq[ri] += delta * delta;
          ++dcnt[ri];
        }
        prev_xi = xi_val;
        have_prev = true;
        dir = -dir;
        if (++legs >= legs_per_path) break;
      }
    }
  };
  run_workers(threads, n_paths, task);

  RenewalStats out;
  out.theta = M_PI * M_PI / (64.0 * lam * lam);
  out.mgf_reference = 1.0 / std::cos(std::sqrt(2.0 * out.theta) * lam);
  out.n_paths = n_paths;
  std::vector<double> taus, mgfs;
  double ds = 0.0, ds2 = 0.0;
  std::int64_t dn = 0;
  for (std::int64_t r = 0; r < n_paths; ++r) {
    std::size_t ri = static_cast<std::size_t>(r);
    if (tau1[ri] >= 0.0) {
      taus.push_back(tau1[ri]);
      mgfs.push_back(std::exp(out.theta * tau1[ri]));
    }
    ds += dsum[ri];
    ds2 += dsumsq[ri];
    dn += dcnt[ri];
  }
  auto ts = vector_stats(taus);
  auto ms = vector_stats(mgfs);
  auto dd = pooled_stats(ds, ds2, dn);
  out.mean_tau1 = ts.mean;
  out.se_tau1 = ts.se;
  out.mean_mgf = ms.mean;
  out.se_mgf = ms.se;
  out.mean_delta = dd.mean;
  out.se_delta = dd.se;
  out.n_tau = ts.n;
  out.n_delta = dd.n;
  return out;
}

StrategyReport strategy_experiment(const StepPenalty& penalty,
                                   std::int64_t n_paths, std::uint64_t seed,
                                   int threads) {
  check_penalty(penalty, true);
  if (std::abs(penalty.breakpoints.front()) > 1e-12 ||
      std::abs(penalty.breakpoints.back() - 1.0) > 1e-12) {
    throw usage_error("strategy penalty must live on [0, 1]");
  }
  if (n_paths < 2) throw usage_error("need at least 2 paths");
  double lam = lambda_star(penalty);
  if (lam > 0.5 + 1e-12) {
    throw usage_error("strategy requires lambda_star <= 0.5");
  }
  TimeChange tc = time_change(penalty);
  std::int64_t steps = tick_grid_steps(lam, 1.0);
  std::size_t n = static_cast<std::size_t>(steps);
  double burn_in = 13.0 * lam * lam * std::log(1.0 / lam);
  std::int64_t cap = default_cap(lam);

  // shared grids: the flattened clock is uniform, the original clock is its
  // piecewise linear preimage, and the step levels drive the gain increments
  std::vector<double> utimes(n + 1), btimes(n + 1), step_level(n);
  for (std::size_t i = 0; i <= n; ++i) {
    utimes[i] = static_cast<double>(i) / static_cast<double>(steps);
    btimes[i] = tc.inverse(utimes[i]);
  }
  btimes[0] = penalty.breakpoints.front();
  btimes[n] = penalty.breakpoints.back();
  for (std::size_t i = 0; i < n; ++i) {
    step_level[i] = tc.transformed.value_at(utimes[i]);
  }

  std::vector<double> phi_s(static_cast<std::size_t>(n_paths));
  std::vector<double> phi_o(static_cast<std::size_t>(n_paths));
  std::vector<std::int64_t> internal(static_cast<std::size_t>(n_paths));

  int use = std::max(1, threads);
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    PathSample wpath, bpath;
    wpath.times = utimes;
    bpath.times = btimes;
    wpath.values.assign(n + 1, 0.0);
    bpath.values.assign(n + 1, 0.0);
    double sdt = std::sqrt(1.0 / static_cast<double>(steps));
    for (;;) {
      std::int64_t r = next.fetch_add(1);
      if (r >= n_paths) return;
      CounterRng rng(seed, static_cast<std::uint32_t>(r));
      for (std::size_t i = 0; i < n; ++i) {
        double dw = sdt * rng.normal(i);
        wpath.values[i + 1] = wpath.values[i] + dw;
        bpath.values[i + 1] = bpath.values[i] + (step_level[i] / lam) * dw;
      }
      auto up = uptick_partition(wpath, lam, cap);
      TimePartition qstar;
      qstar.points.push_back(btimes[0]);
      for (double x : up.record.xis) {
        if (x < burn_in || x >= 1.0) continue;
        std::size_t idx = static_cast<std::size_t>(
            std::llround(x * static_cast<double>(steps)));
        if (btimes[idx] > qstar.points.back()) {
          qstar.points.push_back(btimes[idx]);
        }
      }
      qstar.points.push_back(btimes[n]);
      std::size_t ri = static_cast<std::size_t>(r);
      internal[ri] = static_cast<std::int64_t>(qstar.points.size()) - 2;
      phi_s[ri] = phi_value(bpath, qstar, penalty);
      phi_o[ri] = phi_optimal_dp(bpath, penalty).value;
    }
  };
  std::vector<std::thread> pool;
  int count = static_cast<int>(std::min<std::int64_t>(use, n_paths));
  if (count == 1) {
    worker();
  } else {
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  StrategyReport rep;
  rep.penalty = penalty;
  rep.lambda_star_val = lam;
  rep.burn_in = burn_in;
  rep.cap_k = cap;
  rep.grid_steps = steps;
  rep.n_paths = n_paths;
  rep.seed = seed;
  auto ss = vector_stats(phi_s);
  auto os = vector_stats(phi_o);
  rep.mean_phi_strategy = ss.mean;
  rep.se_strategy = ss.se;
  rep.mean_phi_oracle = os.mean;
  rep.se_oracle = os.se;
  rep.integral_inv_lambda = integral_inv_lambda(penalty);
  rep.penalty_constant = penalty.constant();
  if (rep.penalty_constant) {
    rep.dunlap_low = penalty.levels[0];
    rep.dunlap_high = 1.0 / penalty.levels[0] + penalty.levels[0];
  } else {
    rep.dunlap_low = std::numeric_limits<double>::quiet_NaN();
    rep.dunlap_high = std::numeric_limits<double>::quiet_NaN();
  }
  double ksum = 0.0;
  std::int64_t kmax = 0;
  for (std::int64_t k : internal) {
    ksum += static_cast<double>(k);
    kmax = std::max(kmax, k);
  }
  rep.mean_internal_points = ksum / static_cast<double>(n_paths);
  rep.max_internal_points = kmax;
  return rep;
}

}  // namespace lfpp
