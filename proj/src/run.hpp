#pragma once

// Command dispatch behind the C API: a command name plus a flat key=value
// configuration produce a list of named text artifacts. All validation errors
// surface as usage_error so callers can map them to exit codes.

#include <map>
#include <string>
#include <vector>

namespace lfpp {

struct Artifact {
  std::string name;
  std::string data;
};

// commands: kernels, gff, fpp-scan, tv, multiscale. Unknown commands and
// unknown or malformed keys throw usage_error.
std::vector<Artifact> run_command(const std::string& command,
                                  const std::map<std::string, std::string>& cfg);

}  // namespace lfpp
