#include "run.hpp"

#include <charconv>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "lfpp/errors.hpp"
#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/io.hpp"
#include "lfpp/kernels.hpp"
#include "lfpp/multiscale.hpp"
#include "lfpp/params.hpp"
#include "lfpp/totalvar.hpp"

namespace lfpp {

namespace {

// tracks which keys a command consumed so leftovers can be rejected
struct Config {
  const std::map<std::string, std::string>* kv;
  std::set<std::string> used;

  const std::string* find(const std::string& key) {
    const auto it = kv->find(key);
    if (it == kv->end()) return nullptr;
    used.insert(key);
    return &it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    return v ? *v : fallback;
  }

  std::string require(const std::string& key) {
    const auto* v = find(key);
    if (!v) throw usage_error("missing required key '" + key + "'");
    return *v;
  }

  template <typename T>
  T parse_num(const std::string& key, const std::string& text) {
    T out{};
    const char* b = text.data();
    const char* e = b + text.size();
    std::from_chars_result r{};
    if constexpr (std::is_floating_point_v<T>)
      r = std::from_chars(b, e, out);
    else
      r = std::from_chars(b, e, out, 10);
    if (r.ec != std::errc{} || r.ptr != e)
      throw usage_error("key '" + key + "': bad value '" + text + "'");
    return out;
  }

  std::int64_t i64(const std::string& key, std::int64_t fallback) {
    const auto* v = find(key);
    return v ? parse_num<std::int64_t>(key, *v) : fallback;
  }

  std::int64_t i64_req(const std::string& key) {
    return parse_num<std::int64_t>(key, require(key));
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    const auto* v = find(key);
    return v ? parse_num<std::uint64_t>(key, *v) : fallback;
  }

  double real(const std::string& key, double fallback) {
    const auto* v = find(key);
    return v ? parse_num<double>(key, *v) : fallback;
  }

  void finish() const {
    for (const auto& kvp : *kv)
      if (!used.count(kvp.first))
        throw usage_error("unknown key '" + kvp.first + "'");
  }
};

PointZ parse_point(Config& c, const std::string& key) {
  const auto text = c.require(key);
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw usage_error("key '" + key + "': expected 'x,y'");
  PointZ p;
  p.x = c.parse_num<std::int64_t>(key, text.substr(0, comma));
  p.y = c.parse_num<std::int64_t>(key, text.substr(comma + 1));
  return p;
}

std::vector<std::int64_t> parse_sizes(Config& c, const std::string& key) {
  const auto text = c.require(key);
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string::npos ? text.size() : comma;
    out.push_back(c.parse_num<std::int64_t>(key, text.substr(pos, end - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<Artifact> run_kernels(Config& c) {
  const auto sub = c.require("sub");
  std::vector<Artifact> out;
  if (sub == "poisson") {
    const auto M = c.i64_req("M");
    const auto N = c.i64_req("N");
    const auto v = parse_point(c, "v");
    c.finish();
    const auto bps = boundary_points(M, N);
    const auto row = poisson_row(M, N, v);
    std::string csv = "x,y,p\n";
    for (std::size_t i = 0; i < bps.size(); ++i)
      csv += std::to_string(bps[i].x) + "," + std::to_string(bps[i].y) + "," +
             format_g(row[i]) + "\n";
    out.push_back({"poisson.csv", csv});
  } else if (sub == "green") {
    const auto M = c.i64_req("M");
    const auto N = c.i64_req("N");
    c.finish();
    const RectRegion region{{0, M}, {0, N}};
    const auto table = green_table(region);
    std::vector<PointZ> interior;
    for (std::int64_t y = 1; y < N; ++y)
      for (std::int64_t x = 1; x < M; ++x) interior.push_back({x, y});
    std::string csv = "x1,y1,x2,y2,value\n";
    const auto n = interior.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        csv += std::to_string(interior[i].x) + "," +
               std::to_string(interior[i].y) + "," +
               std::to_string(interior[j].x) + "," +
               std::to_string(interior[j].y) + "," +
               format_g(table[i * n + j]) + "\n";
    out.push_back({"green.csv", csv});
  } else if (sub == "potential") {
    const auto x = c.i64_req("x");
    const auto y = c.i64_req("y");
    const auto mode_s = c.str("mode", "exact");
    c.finish();
    PotentialMode mode;
    if (mode_s == "exact")
      mode = PotentialMode::exact;
    else if (mode_s == "asymptotic")
      mode = PotentialMode::asymptotic;
    else
      throw usage_error("mode must be exact or asymptotic");
    std::string csv = "x,y,value\n" + std::to_string(x) + "," +
                      std::to_string(y) + "," +
                      format_g(potential_kernel(x, y, mode)) + "\n";
    out.push_back({"potential.csv", csv});
  } else {
    throw usage_error("kernels: sub must be poisson, green or potential");
  }
  return out;
}

std::vector<Artifact> run_gff(Config& c) {
  const auto M = c.i64_req("M");
  const auto N = c.i64_req("N");
  const auto seed = c.u64("seed", 1);
  const auto replicate = c.i64("replicate", 0);
  c.finish();
  if (replicate < 0 || replicate > std::int64_t(0xffffffff))
    throw usage_error("replicate out of range");
  const RectRegion region{{0, M}, {0, N}};
  const auto cov = CovModel::build(region);
  const auto field =
      sample_field(cov, seed, static_cast<std::uint32_t>(replicate));
  return {{"field.csv", field_csv(field)}};
}

std::vector<Artifact> run_fpp_scan(Config& c) {
  const auto gamma = c.real("gamma", 0.0);
  const auto sizes = parse_sizes(c, "sizes");
  const auto replicas = c.i64("replicas", 8);
  const auto seed = c.u64("seed", 1);
  const auto mode_s = c.str("mode", "point2point");
  c.str("threads", "");  // accepted for uniformity; the scan is sequential
  c.finish();
  ScanMode mode;
  if (mode_s == "point2point")
    mode = ScanMode::point2point;
  else if (mode_s == "crossing")
    mode = ScanMode::crossing;
  else
    throw usage_error("mode must be point2point or crossing");
  const auto fit =
      exponent_scan(gamma, sizes, static_cast<int>(replicas), seed, mode);
  return {{"scan.csv", scan_csv(fit)}, {"fit.json", scan_json(fit)}};
}

std::vector<Artifact> run_tv(Config& c) {
  const auto penalty = parse_penalty(c.require("penalty"));
  const auto paths = c.i64("paths", 10000);
  const auto seed = c.u64("seed", 1);
  const auto threads = c.i64("threads", 1);
  c.finish();
  const auto rep = strategy_experiment(penalty, paths, seed,
                                       static_cast<int>(threads));
  return {{"report.json", tv_json(rep)}};
}

std::vector<Artifact> run_multiscale(Config& c) {
  MultiscaleConfig cfg;
  const auto m = c.i64("m", 2);
  const auto m_gamma = c.i64("m_gamma", 2);
  const auto beta = c.real("beta", 4.0);
  cfg.gamma = c.real("gamma", 0.0);
  cfg.base_n = c.i64("base_n", 32);
  cfg.width_mult = c.real("width_mult", 8.0);
  cfg.levels = static_cast<int>(c.i64("levels", 2));
  cfg.replicas = static_cast<int>(c.i64("replicas", 50));
  cfg.seed = c.u64("seed", 1);
  cfg.threads = static_cast<int>(c.i64("threads", 1));
  c.finish();
  cfg.sp = make_scale_params(static_cast<int>(m), static_cast<int>(m_gamma),
                             cfg.gamma, beta);
  const auto rep = recursive_run(cfg);
  return {{"levels.csv", multiscale_csv(rep)},
          {"summary.json", multiscale_json(rep, cfg)}};
}

}  // namespace

std::vector<Artifact> run_command(const std::string& command,
                                  const std::map<std::string, std::string>& cfg) {
  Config c{&cfg, {}};
  if (command == "kernels") return run_kernels(c);
  if (command == "gff") return run_gff(c);
  if (command == "fpp-scan") return run_fpp_scan(c);
  if (command == "tv") return run_tv(c);
  if (command == "multiscale") return run_multiscale(c);
  throw usage_error("unknown command '" + command +
                    "' (kernels, gff, fpp-scan, tv, multiscale)");
}

}  // namespace lfpp
