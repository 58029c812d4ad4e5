#include "lfpp.h"

#include <map>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "lfpp/errors.hpp"
#include "run.hpp"

struct lfpp_result {
  int status = 0;
  std::string error;
  std::vector<lfpp::Artifact> artifacts;
};

extern "C" {

int lfpp_run(const char* command, const char* const* keys,
             const char* const* values, int n_pairs, lfpp_result** out) {
  if (out) *out = nullptr;
  auto res = std::make_unique<lfpp_result>();
  if (!command || n_pairs < 0 || (n_pairs > 0 && (!keys || !values))) {
    res->status = 2;
    res->error = "null command or key/value arrays";
  } else {
    try {
      std::map<std::string, std::string> cfg;
      for (int i = 0; i < n_pairs; ++i) {
        if (!keys[i]) throw lfpp::usage_error("null key");
        cfg[keys[i]] = values[i] ? values[i] : "";
      }
      res->artifacts = lfpp::run_command(command, cfg);
    } catch (const lfpp::usage_error& e) {
      res->status = 2;
      res->error = e.what();
    } catch (const lfpp::resource_error& e) {
      res->status = 3;
      res->error = e.what();
    } catch (const lfpp::numerical_error& e) {
      res->status = 4;
      res->error = e.what();
    } catch (const std::bad_alloc&) {
      res->status = 3;
      res->error = "out of memory";
    } catch (const std::exception& e) {
      res->status = 4;
      res->error = e.what();
    }
  }
  const int status = res->status;
  if (out) *out = res.release();
  return status;
}

int lfpp_result_status(const lfpp_result* res) {
  return res ? res->status : 2;
}

const char* lfpp_result_error(const lfpp_result* res) {
  return res ? res->error.c_str() : "null result";
}

int lfpp_result_count(const lfpp_result* res) {
  return res ? static_cast<int>(res->artifacts.size()) : 0;
}

const char* lfpp_result_name(const lfpp_result* res, int index) {
  if (!res || index < 0 || index >= static_cast<int>(res->artifacts.size()))
    return nullptr;
  return res->artifacts[static_cast<std::size_t>(index)].name.c_str();
}

const char* lfpp_result_data(const lfpp_result* res, int index) {
  if (!res || index < 0 || index >= static_cast<int>(res->artifacts.size()))
    return nullptr;
  return res->artifacts[static_cast<std::size_t>(index)].data.c_str();
}

void lfpp_result_free(lfpp_result* res) { delete res; }

const char* lfpp_version(void) { return "0.1.0"; }

}  // extern "C"
