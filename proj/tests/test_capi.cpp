// End-to-end checks of the C entry point: artifact contents for small exact
// cases, error status mapping, and byte determinism across thread counts.

#include <cmath>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "lfpp.h"

namespace {

struct RunOut {
  int status = 0;
  std::string error;
  std::map<std::string, std::string> files;
};

RunOut run(const char* command,
           const std::map<std::string, std::string>& kv) {
  std::vector<const char*> keys, values;
  for (const auto& p : kv) {
    keys.push_back(p.first.c_str());
    values.push_back(p.second.c_str());
  }
  lfpp_result* res = nullptr;
  RunOut out;
  out.status = lfpp_run(command, keys.data(), values.data(),
                        static_cast<int>(kv.size()), &res);
  REQUIRE(res != nullptr);
  CHECK(lfpp_result_status(res) == out.status);
  out.error = lfpp_result_error(res);
  for (int i = 0; i < lfpp_result_count(res); ++i)
    out.files[lfpp_result_name(res, i)] = lfpp_result_data(res, i);
  lfpp_result_free(res);
  return out;
}

// splits csv body lines after the header row
std::vector<std::string> body_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::size_t pos = text.find('\n');
  REQUIRE(pos != std::string::npos);
  ++pos;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    rows.push_back(text.substr(pos, nl - pos));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return rows;
}

}  // namespace

TEST_CASE("capi kernels poisson table sums to one") {
  const auto out =
      run("kernels", {{"sub", "poisson"}, {"M", "8"}, {"N", "4"}, {"v", "3,2"}});
  REQUIRE(out.status == 0);
  CHECK(out.error.empty());
  REQUIRE(out.files.count("poisson.csv") == 1);
  const auto rows = body_rows(out.files.at("poisson.csv"));
  CHECK(rows.size() == 24);  // boundary of an 8x4 rectangle
  double sum = 0.0;
  for (const auto& r : rows) sum += std::stod(r.substr(r.rfind(',') + 1));
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("capi kernels green on the smallest interior") {
  const auto out = run("kernels", {{"sub", "green"}, {"M", "2"}, {"N", "2"}});
  REQUIRE(out.status == 0);
  // single interior point, G(v, v) = escape-weighted self visits = 1
  CHECK(out.files.at("green.csv") == "x1,y1,x2,y2,value\n1,1,1,1,1\n");
}

TEST_CASE("capi kernels potential at a neighbor of the origin") {
  const auto out =
      run("kernels", {{"sub", "potential"}, {"x", "1"}, {"y", "0"},
                      {"mode", "exact"}});
  REQUIRE(out.status == 0);
  const auto rows = body_rows(out.files.at("potential.csv"));
  REQUIRE(rows.size() == 1);
  const double v = std::stod(rows[0].substr(rows[0].rfind(',') + 1));
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("capi gff header and determinism") {
  const std::map<std::string, std::string> kv = {
      {"M", "8"}, {"N", "6"}, {"seed", "5"}, {"replicate", "2"}};
  const auto a = run("gff", kv);
  REQUIRE(a.status == 0);
  const auto& csv = a.files.at("field.csv");
  CHECK(csv.rfind("# region=8x6 seed=5 replicate=2\nx,y,value\n0,0,0\n", 0) ==
        0);
  const auto b = run("gff", kv);
  CHECK(b.files.at("field.csv") == csv);
}

TEST_CASE("capi fpp-scan flat-weight golden") {
  const std::map<std::string, std::string> kv = {
      {"gamma", "0"}, {"sizes", "16,32"}, {"replicas", "2"}, {"seed", "9"}};
  const auto out = run("fpp-scan", kv);
  REQUIRE(out.status == 0);
  // every vertex costs one, so the between-quarters distance is N/2 + 1
  CHECK(out.files.at("scan.csv") ==
        "N,replicate,value\n16,0,9\n16,1,9\n32,0,17\n32,1,17\n");
  const auto& fit = out.files.at("fit.json");
  CHECK(fit.find("\"gamma\": 0, \"sizes\": [16, 32], ") != std::string::npos);
  CHECK(fit.find("\"seed\": 9") != std::string::npos);
  CHECK(run("fpp-scan", kv).files.at("fit.json") == fit);
}

TEST_CASE("capi tv report carries the requested penalty") {
  std::map<std::string, std::string> kv = {{"penalty", "levels=0.2;breaks=0,1"},
                                           {"paths", "400"},
                                           {"seed", "3"},
                                           {"threads", "1"}};
  const auto out = run("tv", kv);
  REQUIRE(out.status == 0);
  const auto& rep = out.files.at("report.json");
  CHECK(rep.find("\"penalty\": [[0, 1, 0.2]]") != std::string::npos);
  CHECK(rep.find("\"lambda_star\": 0.2") != std::string::npos);
  CHECK(rep.find("\"n_paths\": 400") != std::string::npos);
  CHECK(rep.find("\"integral_inv_lambda\": 5") != std::string::npos);

  kv["threads"] = "3";
  CHECK(run("tv", kv).files.at("report.json") == rep);
}

TEST_CASE("capi tv rejects a malformed penalty") {
  const auto out = run("tv", {{"penalty", "levels=0.2;breaks=1,0"}});
  CHECK(out.status == 2);
  CHECK_FALSE(out.error.empty());
  CHECK(out.files.empty());
}

TEST_CASE("capi multiscale flat-weight goldens") {
  std::map<std::string, std::string> kv = {
      {"base_n", "8"}, {"width_mult", "4"}, {"gamma", "0"},
      {"replicas", "3"}, {"seed", "7"}};
  const auto out = run("multiscale", kv);
  REQUIRE(out.status == 0);
  CHECK(out.files.at("levels.csv") ==
        "level,replicate,d,d_join,switches\n"
        "1,0,71,0,0\n2,0,156,0,0\n"
        "1,1,71,0,0\n2,1,156,0,0\n"
        "1,2,71,0,0\n2,2,156,0,0\n");
  const auto& sum = out.files.at("summary.json");
  CHECK(sum.find("\"ratio\": 2.19718309859") != std::string::npos);
  CHECK(sum.find("\"max_switches\": 0") != std::string::npos);
  CHECK(sum.find("\"all_connected\": true") != std::string::npos);
  CHECK(sum.find("\"opt_ratio_mean\": 1") != std::string::npos);

  kv["threads"] = "2";
  CHECK(run("multiscale", kv).files.at("summary.json") == sum);
}

TEST_CASE("capi rejects unknown commands and keys") {
  auto out = run("orbit", {});
  CHECK(out.status == 2);
  CHECK(out.error.find("unknown command") != std::string::npos);

  out = run("gff", {{"M", "4"}, {"N", "4"}, {"frobnicate", "1"}});
  CHECK(out.status == 2);
  CHECK(out.error.find("frobnicate") != std::string::npos);

  out = run("kernels", {{"sub", "poisson"}, {"M", "8"}, {"N", "4"}});
  CHECK(out.status == 2);  // missing v

  out = run("kernels", {{"sub", "poisson"}, {"M", "8"}, {"N", "4"},
                        {"v", "0,0"}});
  CHECK(out.status == 2);  // boundary point is not interior
}

TEST_CASE("capi null argument handling") {
  lfpp_result* res = nullptr;
  CHECK(lfpp_run(nullptr, nullptr, nullptr, 0, &res) == 2);
  REQUIRE(res != nullptr);
  CHECK(lfpp_result_status(res) == 2);
  CHECK(lfpp_result_count(res) == 0);
  CHECK(lfpp_result_name(res, 0) == nullptr);
  CHECK(lfpp_result_data(res, -1) == nullptr);
  lfpp_result_free(res);

  CHECK(lfpp_result_status(nullptr) == 2);
  CHECK(std::strlen(lfpp_result_error(nullptr)) > 0);
  CHECK(lfpp_result_count(nullptr) == 0);
  lfpp_result_free(nullptr);

  CHECK(lfpp_version() != nullptr);
}
