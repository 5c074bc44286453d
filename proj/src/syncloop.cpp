#include "homlab/syncloop.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "homlab/errors.hpp"
#include "homlab/rng.hpp"

namespace homlab {

void LoopConfig::validate() const {
  if (!(rep_rate_hz > 0.0))
    throw ValidationError("LoopConfig: rep rate must be > 0");
  if (harmonic < 1) throw ValidationError("LoopConfig: harmonic must be >= 1");
  if (!(loop_bandwidth_hz > 0.0) || !(actuator_bandwidth_hz > 0.0))
    throw ValidationError("LoopConfig: bandwidths must be > 0");
  if (!(loop_bandwidth_hz < actuator_bandwidth_hz &&
        actuator_bandwidth_hz < rep_rate_hz))
    throw ValidationError(
        "LoopConfig: requires loop bandwidth < actuator bandwidth < rep rate");
  if (!(detector_gain_v_per_rad > 0.0) || !(vco_gain_rad_s_per_v > 0.0))
    throw ValidationError("LoopConfig: gains must be > 0");
  if (!(timestep_s > 0.0) || timestep_s >= 1.0 / (20.0 * actuator_bandwidth_hz))
    throw ValidationError(
        "LoopConfig: timestep must be < 1 / (20 * actuator bandwidth)");
  if (!(handover_threshold_rad > 0.0))
    throw ValidationError("LoopConfig: handover threshold must be > 0");
  if (!(free_run_noise.white_freq_psd >= 0.0) ||
      !(free_run_noise.rw_freq_psd >= 0.0))
    throw ValidationError("LoopConfig: noise PSD levels must be >= 0");
}

LoopDesign design_loop(const LoopConfig& config, int harmonic) {
  config.validate();
  const double wc = 2.0 * std::numbers::pi * config.loop_bandwidth_hz;
  const double wa = 2.0 * std::numbers::pi * config.actuator_bandwidth_hz;
  constexpr double target_margin = 60.0 * std::numbers::pi / 180.0;
  // Place the PI zero so the margin target holds including the actuator lag.
  const double zero_angle = target_margin + std::atan(wc / wa);
  const double wz = wc / std::tan(zero_angle);
  // |L(j wc)| = 1 fixes the gain.
  const double mag_no_gain = std::sqrt(1.0 + (wc / wz) * (wc / wz)) /
                             (wc * wc * std::sqrt(1.0 + (wc / wa) * (wc / wa)));
  const double plant_gain = config.detector_gain_v_per_rad *
                            config.vco_gain_rad_s_per_v *
                            static_cast<double>(harmonic);

  LoopDesign d;
  d.kp = 1.0 / (mag_no_gain * plant_gain * wz);
  d.ki = d.kp * wz;

  // Achieved margin from the full open loop.
  auto mag = [&](double f) { return std::abs(loop_transfer(d, config, harmonic, f)); };
  double lo = config.loop_bandwidth_hz * 1e-3, hi = config.loop_bandwidth_hz * 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (mag(mid) > 1.0 ? lo : hi) = mid;
  }
  d.crossover_hz = std::sqrt(lo * hi);
  const double phase =
      std::arg(loop_transfer(d, config, harmonic, d.crossover_hz));
  d.phase_margin_deg = (std::numbers::pi + phase) * 180.0 / std::numbers::pi;
  if (d.phase_margin_deg < 10.0) {
    std::ostringstream os;
    os << "design_loop: unstable configuration, phase margin "
       << d.phase_margin_deg << " deg < 10 deg";
    throw NumericalError(os.str());
  }
  return d;
}

std::complex<double> loop_transfer(const LoopDesign& design, const LoopConfig& config,
                                   int harmonic, double freq_hz) {
  const std::complex<double> s{0.0, 2.0 * std::numbers::pi * freq_hz};
  const double wa = 2.0 * std::numbers::pi * config.actuator_bandwidth_hz;
  const std::complex<double> pi_filter = design.kp + design.ki / s;
  const std::complex<double> actuator = 1.0 / (1.0 + s / wa);
  const double plant_gain = config.detector_gain_v_per_rad *
                            config.vco_gain_rad_s_per_v *
                            static_cast<double>(harmonic);
  return plant_gain * pi_filter * actuator / s;
}

JitterSeries simulate_lock(const LoopConfig& config, double duration_s,
                           std::uint64_t seed) {
  config.validate();
  if (!(duration_s >= 100.0 / config.loop_bandwidth_hz))
    throw ValidationError(
        "simulate_lock: duration must be >= 100 / loop bandwidth");

  const LoopDesign coarse = design_loop(config, 1);
  const LoopDesign fine = design_loop(config, config.harmonic);

  const double dt = config.timestep_s;
  const std::size_t steps = static_cast<std::size_t>(duration_s / dt);
  const double wa = 2.0 * std::numbers::pi * config.actuator_bandwidth_hz;
  const double actuator_alpha = 1.0 - std::exp(-wa * dt);
  const double white_sigma = std::sqrt(config.free_run_noise.white_freq_psd * dt);
  const double rw_sigma = std::sqrt(config.free_run_noise.rw_freq_psd * dt);
  const double tau_loop =
      1.0 / (2.0 * std::numbers::pi * config.loop_bandwidth_hz);
  const std::size_t dwell_steps =
      static_cast<std::size_t>(std::ceil(10.0 * tau_loop / dt));

  RandomStream rs(seed, 0);

  JitterSeries series;
  series.timestep_s = dt;
  series.samples_s.resize(steps);
  series.coarse_lock_time_s = -1.0;
  series.handover_time_s = -1.0;

  double phase = config.initial_phase_rad;  // error at the active harmonic
  double integrator = 0.0;
  double actuator = 0.0;
  double freq_walk = 0.0;
  int active_harmonic = 1;
  const LoopDesign* design = &coarse;
  std::size_t in_band = 0;
  double tone_prev = 0.0;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;

    const double u = config.detector_gain_v_per_rad * std::sin(phase);
    integrator += design->ki * u * dt;
    const double pi_out = design->kp * u + integrator;
    actuator += actuator_alpha * (pi_out - actuator);

    double dphase = -static_cast<double>(active_harmonic) *
                    config.vco_gain_rad_s_per_v * actuator * dt;
    dphase += white_sigma * rs.normal();
    freq_walk += rw_sigma * rs.normal();
    dphase += freq_walk * dt;
    if (config.injected_tone) {
      const double tone_now =
          config.injected_tone->amplitude_rad *
          std::sin(2.0 * std::numbers::pi * config.injected_tone->freq_hz *
                   (t + dt));
      dphase += tone_now - tone_prev;
      tone_prev = tone_now;
    }
    phase += dphase;

    if (active_harmonic == 1) {
      if (std::abs(phase) < config.handover_threshold_rad) {
        if (in_band == 0 && series.coarse_lock_time_s < 0.0)
          series.coarse_lock_time_s = t;
        ++in_band;
        if (in_band >= dwell_steps) {
          // Fine stage takes over: the same timing error reads N times
          // larger at the harmonic detector.
          // The piezo and integrator states carry over; only the detector
          // changes scale.
          phase *= static_cast<double>(config.harmonic);
          active_harmonic = config.harmonic;
          design = &fine;
          series.handover_time_s = t;
        }
      } else {
        in_band = 0;
      }
    }

    series.samples_s[k] =
        phase / (2.0 * std::numbers::pi * static_cast<double>(active_harmonic) *
                 config.rep_rate_hz);
  }

  if (series.handover_time_s < 0.0)
    throw NumericalError(
        "simulate_lock: handover to the fine loop was never reached");
  return series;
}

double rms_jitter(const JitterSeries& series, double discard_s) {
  if (!(series.timestep_s > 0.0))
    throw ValidationError("rms_jitter: series has no timestep");
  const double duration =
      series.timestep_s * static_cast<double>(series.samples_s.size());
  if (!(discard_s >= 0.0) || discard_s >= duration)
    throw ValidationError("rms_jitter: discard must lie within the series");
  const std::size_t skip =
      static_cast<std::size_t>(std::ceil(discard_s / series.timestep_s));
  const std::size_t n = series.samples_s.size() - skip;
  if (n < 1000)
    throw ValidationError(
        "rms_jitter: fewer than 1000 samples remain after the discard "
        "(statistics error)");
  double ss = 0.0;
  for (std::size_t k = skip; k < series.samples_s.size(); ++k)
    ss += series.samples_s[k] * series.samples_s[k];
  return std::sqrt(ss / static_cast<double>(n));
}

double combined_pair_jitter(double sync_rms_s, double gvm_rms_s) {
  if (!(sync_rms_s >= 0.0) || !(gvm_rms_s >= 0.0))
    throw ValidationError("combined_pair_jitter: inputs must be >= 0");
  return std::hypot(sync_rms_s, gvm_rms_s);
}

}  // namespace homlab
