#include "homlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "homlab/errors.hpp"

namespace homlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const ConfigEntry& e, const std::string& what) {
  std::ostringstream os;
  os << "config line " << e.line << ": key '" << e.key << "': " << what;
  throw ValidationError(os.str());
}

double parse_double(const ConfigEntry& e) {
  try {
    size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) fail(e, "trailing characters in '" + e.value + "'");
    return v;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    fail(e, "not a number: '" + e.value + "'");
  }
}

double parse_sigma_t(const ConfigEntry& e) {
  if (e.value == "unfiltered" || e.value == "inf")
    return std::numeric_limits<double>::infinity();
  return parse_double(e);
}

bool parse_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail(e, "expected true/false/1/0, got '" + e.value + "'");
}

std::uint64_t parse_u64(const ConfigEntry& e) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(e.value, &pos);
    if (pos != e.value.size()) fail(e, "trailing characters in '" + e.value + "'");
    return v;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    fail(e, "not an unsigned integer: '" + e.value + "'");
  }
}

int parse_int(const ConfigEntry& e) {
  const std::uint64_t v = parse_u64(e);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
    fail(e, "out of range");
  return static_cast<int>(v);
}

}  // namespace

std::vector<ConfigEntry> parse_config(const std::string& text) {
  std::vector<ConfigEntry> entries;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << line << ": expected 'key = value', got '"
         << stripped << "'";
      throw ValidationError(os.str());
    }
    ConfigEntry e;
    e.key = trim(stripped.substr(0, eq));
    e.value = trim(stripped.substr(eq + 1));
    e.line = line;
    if (e.key.empty()) {
      std::ostringstream os;
      os << "config line " << line << ": empty key";
      throw ValidationError(os.str());
    }
    if (e.value.empty()) {
      std::ostringstream os;
      os << "config line " << line << ": empty value for key '" << e.key << "'";
      throw ValidationError(os.str());
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void apply_overrides(ToolConfig& config, const std::vector<ConfigEntry>& entries) {
  bool dip_changed = false;
  for (const ConfigEntry& e : entries) {
    Preset& p = config.preset;
    ExperimentConfig& x = p.experiment;
    LoopConfig& l = config.loop;
    OracleSettings& o = config.oracle;
    if (e.key == "dip.sigma_p") {
      p.dip.sigma_p = parse_double(e);
      dip_changed = true;
    } else if (e.key == "dip.sigma_S") {
      p.dip.sigma_s = parse_double(e);
      dip_changed = true;
    } else if (e.key == "dip.sigma_T") {
      p.dip.sigma_t = parse_sigma_t(e);
      dip_changed = true;
    } else if (e.key == "dip.sigma_J") {
      p.dip.sigma_j = parse_double(e);
      dip_changed = true;
    } else if (e.key == "scan.rep_rate") {
      x.rep_rate_hz = parse_double(e);
    } else if (e.key == "scan.pair_prob_a") {
      x.pair_prob_a = parse_double(e);
    } else if (e.key == "scan.pair_prob_b") {
      x.pair_prob_b = parse_double(e);
    } else if (e.key == "scan.trigger_efficiency") {
      x.trigger_efficiency = parse_double(e);
    } else if (e.key == "scan.signal_efficiency") {
      x.signal_efficiency = parse_double(e);
    } else if (e.key == "scan.scan_step") {
      x.scan_step_s = parse_double(e);
    } else if (e.key == "scan.scan_span") {
      x.scan_span_s = parse_double(e);
    } else if (e.key == "scan.dwell_per_point") {
      x.dwell_per_point_s = parse_double(e);
    } else if (e.key == "scan.block_duration") {
      x.block_duration_s = parse_double(e);
    } else if (e.key == "scan.drift_rate") {
      x.drift_rate_s_per_sqrt_s = parse_double(e);
    } else if (e.key == "scan.drift_compensation") {
      x.drift_compensation = parse_bool(e);
    } else if (e.key == "scan.scenario") {
      x.scenario = scenario_from_string(e.value);
    } else if (e.key == "scan.seed") {
      x.seed = parse_u64(e);
    } else if (e.key == "scan.intensity_ratio") {
      p.thermal_intensity_ratio = parse_double(e);
    } else if (e.key == "oracle.quadrature_order") {
      o.quadrature_order = parse_int(e);
    } else if (e.key == "oracle.jitter_nodes") {
      o.jitter_nodes = parse_int(e);
    } else if (e.key == "sync.rep_rate") {
      l.rep_rate_hz = parse_double(e);
    } else if (e.key == "sync.harmonic") {
      l.harmonic = parse_int(e);
    } else if (e.key == "sync.loop_bandwidth") {
      l.loop_bandwidth_hz = parse_double(e);
    } else if (e.key == "sync.detector_gain") {
      l.detector_gain_v_per_rad = parse_double(e);
    } else if (e.key == "sync.vco_gain") {
      l.vco_gain_rad_s_per_v = parse_double(e);
    } else if (e.key == "sync.actuator_bandwidth") {
      l.actuator_bandwidth_hz = parse_double(e);
    } else if (e.key == "sync.white_freq_psd") {
      l.free_run_noise.white_freq_psd = parse_double(e);
    } else if (e.key == "sync.rw_freq_psd") {
      l.free_run_noise.rw_freq_psd = parse_double(e);
    } else if (e.key == "sync.timestep") {
      l.timestep_s = parse_double(e);
    } else if (e.key == "sync.handover_threshold") {
      l.handover_threshold_rad = parse_double(e);
    } else {
      fail(e, "unknown key");
    }
  }

  // Re-check every touched invariant; propagate new dip parameters into the
  // scan's dip model.
  for (const ConfigEntry& e : entries) {
    try {
      if (e.key.rfind("dip.", 0) == 0 && dip_changed) {
        config.preset.dip.validate();
        config.preset.experiment.dip =
            DipModel{config.preset.experiment.dip.baseline,
                     dip_depth(config.preset.dip), dip_width(config.preset.dip)};
        config.preset.experiment.dip.validate();
        dip_changed = false;  // recompute once
      } else if (e.key.rfind("scan.", 0) == 0) {
        config.preset.experiment.validate();
        if (!(config.preset.thermal_intensity_ratio > 0.0))
          throw ValidationError("intensity ratio must be > 0");
      } else if (e.key.rfind("oracle.", 0) == 0) {
        config.oracle.validate();
      } else if (e.key.rfind("sync.", 0) == 0) {
        config.loop.validate();
      }
    } catch (const ValidationError& err) {
      fail(e, err.what());
    }
  }
}

const std::vector<std::pair<std::string, std::string>>& config_key_help() {
  static const std::vector<std::pair<std::string, std::string>> help{
      {"dip.sigma_p", "pump r.m.s. bandwidth, rad/s"},
      {"dip.sigma_S", "signal filter r.m.s. bandwidth, rad/s"},
      {"dip.sigma_T", "trigger filter r.m.s. bandwidth, rad/s, or 'unfiltered'"},
      {"dip.sigma_J", "pair timing jitter r.m.s., s"},
      {"scan.rep_rate", "laser repetition rate, Hz"},
      {"scan.pair_prob_a", "pair probability per pulse, source a"},
      {"scan.pair_prob_b", "pair probability per pulse, source b"},
      {"scan.trigger_efficiency", "per trigger detector, [0,1]"},
      {"scan.signal_efficiency", "per signal detector, [0,1]"},
      {"scan.scan_step", "delay step, s"},
      {"scan.scan_span", "scan half-span, s"},
      {"scan.dwell_per_point", "measurement time per point, s"},
      {"scan.block_duration", "readjustment block length, s"},
      {"scan.drift_rate", "delay drift Wiener coefficient, s/sqrt(s)"},
      {"scan.drift_compensation", "true/false"},
      {"scan.scenario", "indistinguishable|orthogonal|unpolarized|thermal"},
      {"scan.seed", "unsigned 64-bit"},
      {"scan.intensity_ratio", "thermal mean intensity ratio r:1"},
      {"oracle.quadrature_order", "Gauss-Hermite points per axis, >= 16"},
      {"oracle.jitter_nodes", "Gauss-Hermite points for the jitter average, >= 8"},
      {"sync.rep_rate", "Hz"},
      {"sync.harmonic", "fine-lock harmonic, integer >= 1"},
      {"sync.loop_bandwidth", "feedback bandwidth, Hz"},
      {"sync.detector_gain", "V/rad"},
      {"sync.vco_gain", "rad/s/V"},
      {"sync.actuator_bandwidth", "piezo pole, Hz"},
      {"sync.white_freq_psd", "phase random walk drive, rad^2/s"},
      {"sync.rw_freq_psd", "frequency random walk drive, rad^2/s^3"},
      {"sync.timestep", "s"},
      {"sync.handover_threshold", "rad"},
  };
  return help;
}

}  // namespace homlab
