#pragma once

#include <string>
#include <vector>

namespace homlab {

// Everything needed to reproduce a run bit-exactly: the command, preset,
// config overrides, seed, thread count, tool version and output paths.
// Serialized in the same line-based key=value format as config files.
struct RunManifest {
  std::string command;
  std::string preset;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string version;
  std::vector<std::pair<std::string, std::string>> outputs;  // kind -> path
};

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

// Reconstructs the argv that reproduces the run (output paths included).
std::vector<std::string> manifest_to_args(const RunManifest& m);

}  // namespace homlab
