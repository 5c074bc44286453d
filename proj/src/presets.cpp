#include "homlab/presets.hpp"

#include <cmath>
#include <sstream>

#include "homlab/errors.hpp"
#include "homlab/units.hpp"

namespace homlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// UV pump: 394.25 nm centre, r.m.s. widths 0.7 and 0.9 nm for the two
// lasers; the symmetric model uses their mean.
constexpr double kPumpCenterNm = 394.25;
constexpr double kPumpRmsNmA = 0.7;
constexpr double kPumpRmsNmB = 0.9;
constexpr double kPumpRmsNm = 0.5 * (kPumpRmsNmA + kPumpRmsNmB);

// Predicted dip for indistinguishable inputs; the filter bandwidths are
// recovered from these by inversion and are therefore "inferred".
constexpr double kTargetVisibility = 0.84;
constexpr double kTargetWidth = 0.86e-12;

DipParams paper_dip_params() {
  const double sigma_p = rms_omega_from_nm(kPumpCenterNm, kPumpRmsNm);
  const FilterSolution filters =
      solve_filters(kTargetVisibility, kTargetWidth, sigma_p, kPairJitterRms);
  return DipParams{sigma_p, filters.sigma_s, filters.sigma_t, kPairJitterRms};
}

ExperimentConfig base_experiment(const DipParams& dip) {
  ExperimentConfig c;
  c.rep_rate_hz = 76e6;
  // Emission and detection numbers are not published; these are chosen so the
  // fitted visibility comes out with a ~0.04 bootstrap error at 900 s/point.
  c.pair_prob_a = 1.3e-3;
  c.pair_prob_b = 1.3e-3;
  c.trigger_efficiency = 0.25;
  c.signal_efficiency = 0.25;
  c.scan_step_s = 300e-15;
  c.scan_span_s = 4.5e-12;
  c.dwell_per_point_s = 900.0;
  c.block_duration_s = 60.0;
  c.drift_rate_s_per_sqrt_s = 1e-14;  // ~ one scan step of drift over 900 s
  c.drift_compensation = true;
  c.scenario = Scenario::indistinguishable;
  c.dip = DipModel{0.5, dip_depth(dip), dip_width(dip)};
  c.seed = 1;
  return c;
}

std::vector<ProvenancedValue> scan_provenance(const Preset& p) {
  std::vector<ProvenancedValue> out;
  auto add = [&](const std::string& k, double v, const std::string& prov,
                 const std::string& note) {
    out.push_back({k, fmt(v), prov, note});
  };
  add("pump.center_nm", kPumpCenterNm, "paper", "UV centre wavelength");
  add("pump.rms_nm", kPumpRmsNm, "paper",
      "mean of the two published widths 0.7 and 0.9 nm");
  add("dip.sigma_p", p.dip.sigma_p, "trivial", "rad/s, unit conversion");
  add("dip.sigma_S", p.dip.sigma_s, "inferred",
      "recovered by inversion of the dip predictions");
  add("dip.sigma_T", p.dip.sigma_t, "inferred",
      "recovered by inversion of the dip predictions");
  add("dip.sigma_J", p.dip.sigma_j, "paper", "pair timing jitter, s");
  add("dip.depth", p.experiment.dip.depth, "trivial", "from the closed form");
  add("dip.rms_width_s", p.experiment.dip.rms_width_s, "trivial",
      "from the closed form");
  add("dip.baseline", p.experiment.dip.baseline, "trivial",
      "far-delay coincidence probability");
  add("scan.rep_rate", p.experiment.rep_rate_hz, "paper", "Hz");
  add("scan.pair_prob_a", p.experiment.pair_prob_a, "inferred",
      "calibrated to the published uncertainty regime");
  add("scan.pair_prob_b", p.experiment.pair_prob_b, "inferred",
      "calibrated to the published uncertainty regime");
  add("scan.trigger_efficiency", p.experiment.trigger_efficiency, "inferred",
      "calibrated to the published uncertainty regime");
  add("scan.signal_efficiency", p.experiment.signal_efficiency, "inferred",
      "calibrated to the published uncertainty regime");
  add("scan.scan_step", p.experiment.scan_step_s, "paper", "s");
  add("scan.scan_span", p.experiment.scan_span_s, "trivial",
      "protocol arithmetic, 31 points");
  add("scan.dwell_per_point", p.experiment.dwell_per_point_s, "paper", "s");
  add("scan.block_duration", p.experiment.block_duration_s, "paper", "s");
  add("scan.drift_rate", p.experiment.drift_rate_s_per_sqrt_s, "inferred",
      "uncorrected drift ~ one step per point");
  add("scan.seed", static_cast<double>(p.experiment.seed), "trivial", "");
  if (p.experiment.scenario == Scenario::thermal)
    add("scan.intensity_ratio", p.thermal_intensity_ratio, "paper",
        "~factor 2 rate imbalance between the sources");
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig3a", "fig3b", "fig3c", "fig3d"};
  return names;
}

Preset make_preset(const std::string& name) {
  Preset p;
  p.name = name;
  p.dip = paper_dip_params();
  p.experiment = base_experiment(p.dip);
  if (name == "fig3a") {
    p.description = "indistinguishable heralded photons";
    p.experiment.scenario = Scenario::indistinguishable;
  } else if (name == "fig3b") {
    p.description = "orthogonally polarized inputs, no interference";
    p.experiment.scenario = Scenario::orthogonal;
  } else if (name == "fig3c") {
    p.description = "unpolarized inputs, matched polarizations interfere";
    p.experiment.scenario = Scenario::unpolarized;
  } else if (name == "fig3d") {
    p.description = "thermal beams with ~2:1 mean intensities";
    p.experiment.scenario = Scenario::thermal;
    p.thermal_intensity_ratio = 2.0;
  } else {
    throw ValidationError("unknown preset '" + name +
                          "' (available: fig3a fig3b fig3c fig3d)");
  }
  p.provenance = scan_provenance(p);
  return p;
}

LoopConfig default_loop_config() {
  LoopConfig c;
  c.rep_rate_hz = 76e6;
  c.harmonic = 9;
  c.loop_bandwidth_hz = 10e3;
  c.detector_gain_v_per_rad = 0.5;
  c.vco_gain_rad_s_per_v = 8e4;
  c.actuator_bandwidth_hz = 40e3;
  // Calibrated so the fine-lock residual lands at 260 fs r.m.s.; the
  // frequency random walk contributes a few percent of the variance.
  c.free_run_noise = NoiseBudget{3.7e-1, 1.0e4};
  c.timestep_s = 1e-6;
  c.handover_threshold_rad = 0.2;
  c.initial_phase_rad = 2.5;
  return c;
}

std::vector<ProvenancedValue> loop_provenance() {
  const LoopConfig c = default_loop_config();
  std::vector<ProvenancedValue> out;
  auto add = [&](const std::string& k, double v, const std::string& prov,
                 const std::string& note) {
    out.push_back({k, fmt(v), prov, note});
  };
  add("sync.rep_rate", c.rep_rate_hz, "paper", "Hz");
  add("sync.harmonic", c.harmonic, "paper", "fine lock at 684 MHz");
  add("sync.loop_bandwidth", c.loop_bandwidth_hz, "paper",
      "electronic feedback bandwidth, Hz");
  add("sync.detector_gain", c.detector_gain_v_per_rad, "inferred", "V/rad");
  add("sync.vco_gain", c.vco_gain_rad_s_per_v, "inferred", "rad/s/V");
  add("sync.actuator_bandwidth", c.actuator_bandwidth_hz, "inferred",
      "piezo pole, Hz");
  add("sync.white_freq_psd", c.free_run_noise.white_freq_psd, "inferred",
      "calibrated to the 260 fs residual");
  add("sync.rw_freq_psd", c.free_run_noise.rw_freq_psd, "inferred",
      "calibrated to the 260 fs residual");
  add("sync.timestep", c.timestep_s, "trivial", "s");
  add("sync.handover_threshold", c.handover_threshold_rad, "inferred", "rad");
  add("sync.gvm_rms", kGvmJitterRms, "inferred",
      "solved from the published jitter totals in quadrature");
  add("sync.pair_jitter", kPairJitterRms, "paper", "s");
  return out;
}

}  // namespace homlab
