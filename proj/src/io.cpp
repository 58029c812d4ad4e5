#include "lfpp/io.hpp"

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include "lfpp/errors.hpp"

namespace lfpp {

std::string format_g(double v) {
  char buf[40];
  const auto r =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

namespace {

std::string fmt_i(std::int64_t v) { return std::to_string(v); }

double parse_double_strict(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc{} || r.ptr != e)
    throw usage_error("penalty spec: bad number '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto end = comma == std::string::npos ? s.size() : comma;
    out.push_back(parse_double_strict(s.substr(pos, end - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// "key": value pairs joined into one object line
std::string json_object(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s = "{";
  for (std::size_t i = 0; i < kv.size(); ++i) {
    if (i > 0) s += ", ";
    s += "\"" + kv[i].first + "\": " + kv[i].second;
  }
  s += "}";
  return s;
}

std::string json_array(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) s += ", ";
    s += items[i];
  }
  s += "]";
  return s;
}

}  // namespace

StepPenalty parse_penalty(const std::string& spec) {
  const auto semi = spec.find(';');
  if (semi == std::string::npos)
    throw usage_error("penalty spec: expected 'levels=...;breaks=...'");
  const auto left = spec.substr(0, semi);
  const auto right = spec.substr(semi + 1);
  if (left.rfind("levels=", 0) != 0 || right.rfind("breaks=", 0) != 0 ||
      right.find(';') != std::string::npos)
    throw usage_error("penalty spec: expected 'levels=...;breaks=...'");

  StepPenalty p;
  p.levels = parse_list(left.substr(7));
  p.breakpoints = parse_list(right.substr(7));
  if (p.levels.empty() || p.breakpoints.size() != p.levels.size() + 1)
    throw usage_error("penalty spec: need one more break than levels");
  for (double l : p.levels)
    if (!(l > 0.0)) throw usage_error("penalty spec: levels must be positive");
  for (std::size_t i = 1; i < p.breakpoints.size(); ++i)
    if (!(p.breakpoints[i] > p.breakpoints[i - 1]))
      throw usage_error("penalty spec: breaks must increase strictly");
  return p;
}

std::string field_csv(const FieldSample& s) {
  std::string out = "# region=" + fmt_i(s.region.base.length()) + "x" +
                    fmt_i(s.region.span.length()) + " seed=" +
                    std::to_string(s.seed) + " replicate=" +
                    std::to_string(s.replicate) + "\n";
  out += "x,y,value\n";
  for (std::int64_t y = s.region.span.left; y <= s.region.span.right; ++y)
    for (std::int64_t x = s.region.base.left; x <= s.region.base.right; ++x)
      out += fmt_i(x) + "," + fmt_i(y) + "," + format_g(s.at(x, y)) + "\n";
  return out;
}

std::string scan_csv(const ExponentFit& fit) {
  std::string out = "N,replicate,value\n";
  for (std::size_t i = 0; i < fit.sizes.size(); ++i)
    for (std::size_t r = 0; r < fit.values[i].size(); ++r)
      out += fmt_i(fit.sizes[i]) + "," + fmt_i(static_cast<std::int64_t>(r)) +
             "," + format_g(fit.values[i][r]) + "\n";
  return out;
}

std::string scan_json(const ExponentFit& fit) {
  std::vector<std::string> sizes;
  sizes.reserve(fit.sizes.size());
  for (auto n : fit.sizes) sizes.push_back(fmt_i(n));
  return json_object({{"gamma", format_g(fit.gamma)},
                      {"sizes", json_array(sizes)},
                      {"slope", format_g(fit.slope)},
                      {"stderr", format_g(fit.stderr_slope)},
                      {"seed", std::to_string(fit.seed)}}) +
         "\n";
}

std::string tv_json(const StrategyReport& rep) {
  std::vector<std::string> pieces;
  for (std::size_t i = 0; i < rep.penalty.levels.size(); ++i)
    pieces.push_back(json_array({format_g(rep.penalty.breakpoints[i]),
                                 format_g(rep.penalty.breakpoints[i + 1]),
                                 format_g(rep.penalty.levels[i])}));
  return json_object(
             {{"penalty", json_array(pieces)},
              {"lambda_star", format_g(rep.lambda_star_val)},
              {"n_paths", fmt_i(rep.n_paths)},
              {"seed", std::to_string(rep.seed)},
              {"mean_phi_strategy", format_g(rep.mean_phi_strategy)},
              {"mean_phi_oracle", format_g(rep.mean_phi_oracle)},
              {"integral_inv_lambda", format_g(rep.integral_inv_lambda)},
              {"se_strategy", format_g(rep.se_strategy)},
              {"se_oracle", format_g(rep.se_oracle)}}) +
         "\n";
}

std::string multiscale_csv(const MultiscaleReport& rep) {
  std::string out = "level,replicate,d,d_join,switches\n";
  for (const auto& r : rep.records)
    out += fmt_i(r.level) + "," + fmt_i(r.replicate) + "," + format_g(r.d) +
           "," + format_g(r.d_join) + "," + format_g(r.switches) + "\n";
  return out;
}

std::string multiscale_json(const MultiscaleReport& rep,
                            const MultiscaleConfig& cfg) {
  std::vector<std::string> levels;
  for (const auto& st : rep.stats)
    levels.push_back(json_object(
        {{"level", fmt_i(st.level)},
         {"d_mean", format_g(st.d_mean)},
         {"d_se", format_g(st.d_se)},
         {"d_join_mean", format_g(st.d_join_mean)},
         {"switches_mean", format_g(st.switches_mean)},
         {"ratio", format_g(st.ratio)},
         {"ratio_se", format_g(st.ratio_se)},
         {"lambda_star_mean", format_g(st.lambda_star_mean)},
         {"regime_flag_share", format_g(st.regime_flag_share)},
         {"samples", fmt_i(st.samples)}}));
  std::vector<std::string> shares;
  for (double s : rep.layer_one_share) shares.push_back(format_g(s));
  const auto config = json_object(
      {{"base_n", fmt_i(cfg.base_n)},
       {"width_mult", format_g(cfg.width_mult)},
       {"gamma", format_g(cfg.gamma)},
       {"levels", fmt_i(cfg.levels)},
       {"replicas", fmt_i(cfg.replicas)},
       {"seed", std::to_string(cfg.seed)},
       {"m", fmt_i(cfg.sp.m)},
       {"m_gamma", fmt_i(cfg.sp.m_Gamma)},
       {"beta", format_g(cfg.sp.beta)},
       {"delta", format_g(cfg.sp.delta)}});
  return json_object(
             {{"config", config},
              {"levels", json_array(levels)},
              {"s1_top_mean", format_g(rep.s1_top_mean)},
              {"s1_top_se", format_g(rep.s1_top_se)},
              {"s2_top_mean", format_g(rep.s2_top_mean)},
              {"s2_top_se", format_g(rep.s2_top_se)},
              {"paired_diff_mean", format_g(rep.paired_diff_mean)},
              {"paired_diff_se", format_g(rep.paired_diff_se)},
              {"opt_ratio_mean", format_g(rep.opt_ratio_mean)},
              {"opt_ratio_min", format_g(rep.opt_ratio_min)},
              {"layer_one_share", json_array(shares)},
              {"layer_share_pooled", format_g(rep.layer_share_pooled)},
              {"max_switches", fmt_i(rep.max_switches)},
              {"all_connected", rep.all_connected ? "true" : "false"},
              {"any_short_interval",
               rep.any_short_interval ? "true" : "false"},
              {"replicas", fmt_i(rep.replicas)}}) +
         "\n";
}

}  // namespace lfpp
