// Command-line front end. Flags are collected into the same flat key=value
// configuration the C API consumes; a config file seeds the map and explicit
// flags override it, so every run is a pure function of (command, map).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfpp.h"

namespace {

using KvMap = std::map<std::string, std::string>;

// flat key=value lines, blank lines and # comments allowed
bool load_config_file(const std::string& path, KvMap& kv, std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "cannot open config file '" + path + "'";
    return false;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const auto text = line.substr(first, last - first + 1);
    if (text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
      err = path + ":" + std::to_string(lineno) + ": expected key=value";
      return false;
    }
    kv[text.substr(0, eq)] = text.substr(eq + 1);
  }
  return true;
}

// "k=v,k=v" shorthand for scale parameters
bool parse_params_list(const std::string& text, KvMap& kv, std::string& err) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string::npos ? text.size() : comma;
    const auto item = text.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      err = "--params: expected k=v,k=v shorthand, got '" + item + "'";
      return false;
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return true;
}

struct StringOpt {
  CLI::Option* opt = nullptr;
  std::string value;
  std::string key;
};

// registers a pass-through option; the raw text the user typed is forwarded
// unparsed so the library does all numeric validation
StringOpt* add_kv(CLI::App* cmd, std::vector<std::unique_ptr<StringOpt>>& pool,
                  const std::string& flag, const std::string& key,
                  const std::string& help) {
  pool.push_back(std::make_unique<StringOpt>());
  auto* s = pool.back().get();
  s->key = key;
  s->opt = cmd->add_option(flag, s->value, help);
  return s;
}

int run(const std::string& command, const KvMap& kv, const std::string& out_dir,
        const std::string& format) {
  std::vector<const char*> keys, values;
  keys.reserve(kv.size());
  values.reserve(kv.size());
  for (const auto& p : kv) {
    keys.push_back(p.first.c_str());
    values.push_back(p.second.c_str());
  }

  lfpp_result* res = nullptr;
  const int status = lfpp_run(command.c_str(), keys.data(), values.data(),
                              static_cast<int>(kv.size()), &res);
  if (status != 0) {
    std::cerr << "error: " << lfpp_result_error(res) << "\n";
    lfpp_result_free(res);
    return status;
  }

  int written = 0;
  for (int i = 0; i < lfpp_result_count(res); ++i) {
    const std::string name = lfpp_result_name(res, i);
    if (format == "csv" && !name.ends_with(".csv")) continue;
    if (format == "json" && !name.ends_with(".json")) continue;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << lfpp_result_data(res, i)) || !out.flush()) {
      std::cerr << "error: cannot write " << path.string() << "\n";
      lfpp_result_free(res);
      return 3;
    }
    std::cout << "wrote " << path.string() << "\n";
    ++written;
  }
  lfpp_result_free(res);
  if (written == 0) {
    std::cerr << "error: no artifact matches format '" << format << "'\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crossing-weight laboratory for fields on lattice rectangles"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".", format, seed_text, threads_text;
  auto* config_opt =
      app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--out-dir", out_dir, "directory for output artifacts");
  app.add_option("--format", format, "write only csv or only json artifacts")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed_text, "random seed");
  auto* threads_opt = app.add_option("--threads", threads_text,
                                     "worker threads for replica loops");

  std::vector<std::unique_ptr<StringOpt>> pool;

  auto* kernels = app.add_subcommand("kernels", "walk kernel tables");
  std::string kernels_sub;
  kernels->add_option("sub", kernels_sub, "poisson, green or potential")
      ->required();
  add_kv(kernels, pool, "--M", "M", "rectangle width");
  add_kv(kernels, pool, "--N", "N", "rectangle height");
  add_kv(kernels, pool, "--v", "v", "interior start point x,y");
  add_kv(kernels, pool, "--x", "x", "lattice offset x");
  add_kv(kernels, pool, "--y", "y", "lattice offset y");
  add_kv(kernels, pool, "--mode", "mode", "exact or asymptotic");

  auto* gff = app.add_subcommand("gff", "sample one zero-boundary field");
  add_kv(gff, pool, "--M", "M", "rectangle width");
  add_kv(gff, pool, "--N", "N", "rectangle height");
  add_kv(gff, pool, "--replicate", "replicate", "replicate index");

  auto* scan = app.add_subcommand("fpp-scan", "distance exponent scan");
  add_kv(scan, pool, "--gamma", "gamma", "weight exponent");
  add_kv(scan, pool, "--sizes", "sizes", "comma list of square sides");
  add_kv(scan, pool, "--replicas", "replicas", "fields per size");
  add_kv(scan, pool, "--mode", "mode", "point2point or crossing");

  auto* tv = app.add_subcommand("tv", "penalized total variation experiment");
  add_kv(tv, pool, "--penalty", "penalty",
         "step penalty 'levels=a,b,c;breaks=0,t1,t2,T'");
  add_kv(tv, pool, "--paths", "paths", "simulated paths");

  auto* ms = app.add_subcommand("multiscale", "recursive crossing experiment");
  add_kv(ms, pool, "--levels", "levels", "construction levels");
  add_kv(ms, pool, "--gamma", "gamma", "weight exponent");
  add_kv(ms, pool, "--replicas", "replicas", "field replicates");
  add_kv(ms, pool, "--base-n", "base_n", "band height unit N");
  add_kv(ms, pool, "--width-mult", "width_mult", "width multiplier of N");
  std::string params_text;
  auto* params_opt = ms->add_option(
      "--params", params_text, "scale shorthand m=..,m_gamma=..,beta=..");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto* cmd = app.get_subcommands().front();
  KvMap kv;
  std::string err;
  if (config_opt->count() > 0 && !load_config_file(config_path, kv, err)) {
    std::cerr << "error: " << err << "\n";
    return 2;
  }
  if (params_opt->count() > 0 && !parse_params_list(params_text, kv, err)) {
    std::cerr << "error: " << err << "\n";
    return 2;
  }
  for (const auto& s : pool)
    if (s->opt->count() > 0 && cmd->get_option_no_throw(s->opt->get_name()))
      kv[s->key] = s->value;
  if (cmd == kernels) kv["sub"] = kernels_sub;
  if (seed_opt->count() > 0) kv["seed"] = seed_text;
  if (threads_opt->count() > 0) kv["threads"] = threads_text;
  if (const char* env = std::getenv("LFPP_THREADS"); env && *env)
    kv["threads"] = env;

  try {
    return run(cmd->get_name(), kv, out_dir, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
