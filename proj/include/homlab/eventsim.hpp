#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homlab/analytic.hpp"

namespace homlab {

// Counting-experiment configuration. Delay-setting accuracy (+/-100 fs,
// uniform) and the post-readjustment drift residual (+/-30 fs, uniform) are
// fixed protocol constants, not tunables.
struct ExperimentConfig {
  double rep_rate_hz = 76e6;
  double pair_prob_a = 0.0;  // pair emission probability per pulse, source a
  double pair_prob_b = 0.0;
  double trigger_efficiency = 0.0;  // per trigger detector
  double signal_efficiency = 0.0;   // per signal detector
  double scan_step_s = 300e-15;
  double scan_span_s = 4.5e-12;  // scan runs over [-span, +span]
  double dwell_per_point_s = 900.0;
  double block_duration_s = 60.0;
  double drift_rate_s_per_sqrt_s = 1e-14;  // Wiener coefficient of the delay drift
  bool drift_compensation = true;  // readjust the delay at block boundaries
  bool allow_multi_pair = false;   // reserved; multi-pair emission not modelled
  Scenario scenario = Scenario::indistinguishable;
  DipModel dip;  // baseline = coincidence probability far from zero delay
  std::uint64_t seed = 1;

  int n_points() const;
  int blocks_per_point() const;
  // Mean fourfold rate far from the dip, in events/s.
  double baseline_rate_hz() const;
  void validate() const;
};

inline constexpr double kDelaySettingBound = 100e-15;   // s, uniform half-width
inline constexpr double kDriftResidualBound = 30e-15;   // s, after readjustment

struct ScanPoint {
  double set_delay_s = 0.0;
  std::vector<double> realized_delay_s;     // one per block
  std::vector<std::uint64_t> fourfold_counts;  // one per block
};

struct ScanResult {
  std::vector<ScanPoint> points;
  ExperimentConfig config;  // echo, with seed
  double intensity_ratio = 1.0;  // thermal runs only
  std::string warning;
};

// Runs the dip scan for the indistinguishable / orthogonal / unpolarized
// scenarios: per block, fourfold candidates are drawn Poisson at the baseline
// rate and thinned by the interference factor at the block's effective delay.
// Unpolarized inputs sample per-event polarizations; only matched pairs
// interfere. Deterministic for a given (config, seed) and independent of
// `threads` (0 = hardware concurrency).
ScanResult run_scan(const ExperimentConfig& config, int threads = 0);

// Thermal-statistics variant: each block averages coincidence weights over
// complex circular-Gaussian field samples with mean intensity ratio r:1 and
// mode overlap sqrt(depth) * exp(-delta^2 / (4 w^2)), then draws Poisson
// counts around the block mean.
ScanResult simulate_thermal(const ExperimentConfig& config, double intensity_ratio,
                            int samples_per_block = 4096, int threads = 0);

struct ScanFit {
  DipModel model;
  double center_s = 0.0;
  double visibility = 0.0;
  double visibility_sigma = 0.0;  // bootstrap standard error
  double depth_sigma = 0.0;
  double residual_rms = 0.0;
  int bootstrap_resamples = 0;
};

inline constexpr std::uint64_t kDefaultBootstrapSeed = 0xb005'7a9e'5eed'0001ULL;
inline constexpr int kBootstrapResamples = 200;

// Weighted nonlinear least squares of the Gaussian dip over per-point
// aggregated counts with Poisson weights; uncertainties from a 200-resample
// block bootstrap. Deterministic given the scan and the bootstrap seed.
ScanFit fit_dip(const ScanResult& scan,
                std::uint64_t bootstrap_seed = kDefaultBootstrapSeed);

}  // namespace homlab
