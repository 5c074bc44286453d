#pragma once

#include <string>
#include <vector>

#include "homlab/analytic.hpp"
#include "homlab/eventsim.hpp"
#include "homlab/syncloop.hpp"

namespace homlab {

// Provenance of a preset value: "paper" = published experiment parameter,
// "inferred" = calibrated or inverted here (not published), "trivial" =
// bookkeeping/derived arithmetic.
struct ProvenancedValue {
  std::string key;
  std::string value;
  std::string provenance;  // paper | inferred | trivial
  std::string note;
};

struct Preset {
  std::string name;
  std::string description;
  DipParams dip;
  ExperimentConfig experiment;
  double thermal_intensity_ratio = 1.0;
  std::vector<ProvenancedValue> provenance;
};

// fig3a: indistinguishable inputs, fig3b: orthogonally polarized,
// fig3c: unpolarized, fig3d: thermal beams with a 2:1 rate imbalance.
const std::vector<std::string>& preset_names();
Preset make_preset(const std::string& name);

// Synchronization-loop preset with noise levels calibrated to a 260 fs
// fine-lock residual.
LoopConfig default_loop_config();
std::vector<ProvenancedValue> loop_provenance();

// Pair-emission timing spread from the group-velocity mismatch, solved from
// the published totals under the quadrature assumption.
inline constexpr double kSyncJitterRms = 260e-15;
inline constexpr double kGvmJitterRms = 234.3e-15;
inline constexpr double kPairJitterRms = 350e-15;

}  // namespace homlab
