#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace homlab {

// Free-running phase-noise budget of the laser pair, referred to the phase
// detector at the active harmonic. white_freq_psd drives a phase random walk
// (rad^2/s); rw_freq_psd drives a frequency random walk (rad^2/s^3).
struct NoiseBudget {
  double white_freq_psd = 0.0;
  double rw_freq_psd = 0.0;
};

// Diagnostic hook: a deterministic sinusoidal phase disturbance, used to map
// the closed-loop error transfer function.
struct ToneInjection {
  double freq_hz = 0.0;
  double amplitude_rad = 0.0;
};

// Two-stage repetition-rate lock: a coarse loop at the fundamental acquires,
// then hands over to a fine loop at `harmonic`. The loop is simulated in the
// phase domain at one sample per timestep; the 10 kHz feedback bandwidth sets
// the PI design crossover and the piezo actuator contributes a first-order
// pole above it.
struct LoopConfig {
  double rep_rate_hz = 76e6;
  int harmonic = 9;  // fine-lock harmonic (coarse stage always runs at 1)
  double loop_bandwidth_hz = 10e3;
  double detector_gain_v_per_rad = 0.5;
  double vco_gain_rad_s_per_v = 8e4;
  double actuator_bandwidth_hz = 40e3;
  NoiseBudget free_run_noise;
  double timestep_s = 1e-6;
  double handover_threshold_rad = 0.2;
  double initial_phase_rad = 2.5;
  std::optional<ToneInjection> injected_tone;

  void validate() const;
};

// Residual timing error samples; timing = phase error / (2 pi N rep_rate) at
// the harmonic active when the sample was taken.
struct JitterSeries {
  double timestep_s = 0.0;
  std::vector<double> samples_s;
  double coarse_lock_time_s = 0.0;  // first time the coarse residual was in band
  double handover_time_s = 0.0;     // fine loop takeover
};

struct LoopDesign {
  double kp = 0.0;             // proportional gain, V/V
  double ki = 0.0;             // integral gain, V/V/s
  double phase_margin_deg = 0.0;
  double crossover_hz = 0.0;
};

// PI gains from (loop bandwidth, 60 deg phase margin target) for the plant
// detector * N * VCO / s behind the actuator pole; the achieved margin is
// computed from the full open loop. Margins below 10 deg raise NumericalError
// before any simulation runs.
LoopDesign design_loop(const LoopConfig& config, int harmonic);

// Open-loop transfer function L(j 2 pi f) of the linearized loop.
std::complex<double> loop_transfer(const LoopDesign& design, const LoopConfig& config,
                                   int harmonic, double freq_hz);

// Integrates the loop for `duration_s`. Coarse stage locks at the fundamental;
// when the residual stays below the handover threshold for ten loop time
// constants, the fine stage at config.harmonic takes over. Raises
// NumericalError if the handover is never reached.
JitterSeries simulate_lock(const LoopConfig& config, double duration_s,
                           std::uint64_t seed);

// R.m.s. of the samples after discarding the lock transient; requires at
// least 1000 remaining samples.
double rms_jitter(const JitterSeries& series, double discard_s);

// Quadrature combination of independent Gaussian jitter contributions.
double combined_pair_jitter(double sync_rms_s, double gvm_rms_s);

}  // namespace homlab
