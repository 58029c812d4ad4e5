#pragma once

// Penalized total variation of sampled Brownian paths.
//
// Phi over a partition charges the penalty at internal partition points only:
//   Phi(f, P) = sum_i |f(t_i) - f(t_{i-1})| - sum_{0<i<k+1} lambda(t_i).
// The module provides an exact grid DP for the optimal partition, the
// equalizing penalty level lambda_star for a step penalty, the piecewise
// linear clock change that flattens the penalty, the alternating
// uptick/downtick partition builder, renewal statistics of the tick times,
// and a Monte Carlo driver comparing the tick-based partition strategy
// against the DP optimum.

#include <cstdint>
#include <vector>

namespace lfpp {

// path sampled on a strictly increasing time grid; values[0] must be 0
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
};

// positive step function on [breakpoints.front(), breakpoints.back()],
// constant on [s_{j-1}, s_j); the final breakpoint maps to the last piece
struct StepPenalty {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  double value_at(double t) const;
  double horizon() const { return breakpoints.back(); }
  bool constant() const;
};

StepPenalty constant_penalty(double level, double horizon = 1.0);

// ascending time points; first/last act as the endpoints of the evaluation
struct TimePartition {
  std::vector<double> points;
};

// alternating tick bookkeeping: taus are the detection times, xis the times
// of the leg extrema, xi_values the path values there, deltas the absolute
// gaps between consecutive extrema
struct RenewalRecord {
  std::vector<double> taus;
  std::vector<double> xis;
  std::vector<double> xi_values;
  std::vector<double> deltas;
};

double phi_value(const PathSample& path, const TimePartition& part,
                 const StepPenalty& penalty);

struct DpResult {
  double value;
  TimePartition partition;
};

// exact maximizer of phi over partitions with internal points on the grid
DpResult phi_optimal_dp(const PathSample& path, const StepPenalty& penalty);

// equalizing level: integral of (lambda_star / lambda)^2 over the horizon is 1
double lambda_star(const StepPenalty& penalty);

double integral_inv_lambda(const StepPenalty& penalty);

// piecewise linear clock change F with F(horizon) = 1 exactly; the
// transformed penalty lives on [0, 1] and takes the same level values
class TimeChange {
 public:
  StepPenalty source;
  StepPenalty transformed;

  double forward(double t) const;
  double inverse(double u) const;

 private:
  std::vector<double> cum_;  // cumulative integral of 1/lambda^2 at breakpoints
  double norm_ = 1.0;
  friend TimeChange time_change(const StepPenalty& penalty);
};

TimeChange time_change(const StepPenalty& penalty);

struct UptickResult {
  TimePartition partition;
  RenewalRecord record;
};

// deterministic alternating tick scan on the path grid; extremum ties keep
// the earliest index; stops after cap_k extrema
UptickResult uptick_partition(const PathSample& path, double lambda_star_val,
                              std::int64_t cap_k);

std::int64_t default_cap(double lambda_star_val);

// grid fine enough for tick detection at this level: steps per unit time
std::int64_t tick_grid_steps(double lambda_star_val, double horizon);

PathSample sample_brownian_path(double horizon, std::int64_t steps,
                                std::uint64_t seed, std::uint32_t replicate);

struct RenewalStats {
  double theta = 0.0;          // exponential moment evaluation point
  double mgf_reference = 0.0;  // sec(sqrt(2 theta) lambda_star)
  double mean_tau1 = 0.0;
  double se_tau1 = 0.0;
  double mean_mgf = 0.0;
  double se_mgf = 0.0;
  double mean_delta = 0.0;
  double se_delta = 0.0;
  std::int64_t n_tau = 0;
  std::int64_t n_delta = 0;
  std::int64_t n_paths = 0;
};

// plain grid estimates from user supplied paths
RenewalStats renewal_stats(double lambda_star_val,
                           const std::vector<PathSample>& paths);

// unbiased Monte Carlo driver: within-step Brownian bridge extrema remove the
// first-passage discretization bias, and each path runs to a fixed number of
// completed legs so long legs are never censored by a horizon
RenewalStats renewal_simulate(double lambda_star_val,
                              std::int64_t legs_per_path,
                              std::int64_t n_paths, std::uint64_t seed,
                              int threads = 1);

struct StrategyReport {
  StepPenalty penalty;
  double lambda_star_val = 0.0;
  double burn_in = 0.0;  // transformed-clock time before ticks are consumed
  std::int64_t cap_k = 0;
  std::int64_t grid_steps = 0;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  double mean_phi_strategy = 0.0;
  double se_strategy = 0.0;
  double mean_phi_oracle = 0.0;
  double se_oracle = 0.0;
  double integral_inv_lambda = 0.0;
  bool penalty_constant = false;
  double dunlap_low = 0.0;   // lambda when the penalty is constant
  double dunlap_high = 0.0;  // 1/lambda + lambda when the penalty is constant
  double mean_internal_points = 0.0;
  std::int64_t max_internal_points = 0;
};

// tick-partition strategy vs the DP oracle on shared simulated paths; the
// penalty must live on [0, 1] and satisfy lambda_star <= 0.5
StrategyReport strategy_experiment(const StepPenalty& penalty,
                                   std::int64_t n_paths, std::uint64_t seed,
                                   int threads = 1);

}  // namespace lfpp
