#include "homlab/manifest.hpp"

#include <fstream>
#include <sstream>

#include "homlab/config.hpp"
#include "homlab/errors.hpp"

namespace homlab {

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write to '" + path + "'");
  out << "command = " << m.command << '\n';
  if (!m.preset.empty()) out << "preset = " << m.preset << '\n';
  out << "seed = " << m.seed << '\n';
  out << "threads = " << m.threads << '\n';
  out << "version = " << m.version << '\n';
  for (const auto& [key, value] : m.overrides)
    out << "override." << key << " = " << value << '\n';
  for (const auto& [kind, p] : m.outputs)
    out << "output." << kind << " = " << p << '\n';
  out.flush();
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunManifest m;
  for (const ConfigEntry& e : parse_config(buffer.str())) {
    if (e.key == "command") {
      m.command = e.value;
    } else if (e.key == "preset") {
      m.preset = e.value;
    } else if (e.key == "seed") {
      m.seed = std::stoull(e.value);
    } else if (e.key == "threads") {
      m.threads = std::stoi(e.value);
    } else if (e.key == "version") {
      m.version = e.value;
    } else if (e.key.rfind("override.", 0) == 0) {
      m.overrides.emplace_back(e.key.substr(9), e.value);
    } else if (e.key.rfind("output.", 0) == 0) {
      m.outputs.emplace_back(e.key.substr(7), e.value);
    } else {
      throw ValidationError("manifest '" + path + "': unknown key '" + e.key +
                            "'");
    }
  }
  if (m.command.empty())
    throw ValidationError("manifest '" + path + "': missing command");
  return m;
}

std::vector<std::string> manifest_to_args(const RunManifest& m) {
  std::vector<std::string> args{m.command};
  if (!m.preset.empty()) {
    args.push_back("--preset");
    args.push_back(m.preset);
  }
  args.push_back("--seed");
  args.push_back(std::to_string(m.seed));
  args.push_back("--threads");
  args.push_back(std::to_string(m.threads));
  for (const auto& [key, value] : m.overrides) {
    args.push_back("--set");
    args.push_back(key + "=" + value);
  }
  for (const auto& [kind, path] : m.outputs) {
    if (kind == "csv") {
      args.push_back("--csv");
      args.push_back(path);
    } else if (kind == "svg") {
      args.push_back("--svg");
      args.push_back(path);
    } else if (kind == "manifest") {
      args.push_back("--manifest");
      args.push_back(path);
    } else if (kind == "hist") {
      args.push_back("--hist");
      args.push_back(path);
    }
  }
  return args;
}

}  // namespace homlab
