#pragma once

#include <string>
#include <vector>

#include "homlab/oracle.hpp"
#include "homlab/presets.hpp"
#include "homlab/syncloop.hpp"

namespace homlab {

// One `key = value` assignment from a config file.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Everything a command can draw on: the scan preset, the sync-loop
// configuration and the oracle settings.
struct ToolConfig {
  Preset preset;
  LoopConfig loop;
  OracleSettings oracle;
};

// Line-based `key = value` format, `#` starts a comment, blank lines are
// ignored. Keys are dotted per module (dip.sigma_J, scan.rep_rate, ...);
// values are SI numbers except where noted in the CLI help.
std::vector<ConfigEntry> parse_config(const std::string& text);

// Applies entries; unknown keys and invariant violations raise
// ValidationError naming the key and line. Changing any dip.* key recomputes
// the dip model the scan draws from.
void apply_overrides(ToolConfig& config, const std::vector<ConfigEntry>& entries);

// Recognized keys with units and meaning, for --help.
const std::vector<std::pair<std::string, std::string>>& config_key_help();

}  // namespace homlab
