#include "homlab/eventsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <thread>

#include "homlab/dipfit.hpp"
#include "homlab/errors.hpp"
#include "homlab/rng.hpp"

namespace homlab {

namespace {
constexpr std::uint64_t kDriftStreamId = 0xffff'ffff'0000'0001ULL;
}

int ExperimentConfig::n_points() const {
  const int side = static_cast<int>(std::floor(scan_span_s / scan_step_s + 1e-9));
  return 2 * side + 1;
}

int ExperimentConfig::blocks_per_point() const {
  return static_cast<int>(std::round(dwell_per_point_s / block_duration_s));
}

double ExperimentConfig::baseline_rate_hz() const {
  return rep_rate_hz * pair_prob_a * pair_prob_b * trigger_efficiency *
         trigger_efficiency * signal_efficiency * signal_efficiency *
         dip.baseline;
}

void ExperimentConfig::validate() const {
  if (!(rep_rate_hz > 0.0))
    throw ValidationError("ExperimentConfig: rep rate must be > 0");
  for (double p : {pair_prob_a, pair_prob_b, trigger_efficiency, signal_efficiency})
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError(
          "ExperimentConfig: probabilities and efficiencies must lie in [0, 1]");
  if (!(scan_step_s > 0.0))
    throw ValidationError("ExperimentConfig: scan step must be > 0");
  if (!(scan_span_s >= scan_step_s))
    throw ValidationError("ExperimentConfig: scan span must cover >= 1 step");
  if (!(block_duration_s > 0.0))
    throw ValidationError("ExperimentConfig: block duration must be > 0");
  if (!(dwell_per_point_s > 0.0))
    throw ValidationError("ExperimentConfig: dwell per point must be > 0");
  const double blocks = dwell_per_point_s / block_duration_s;
  if (std::abs(blocks - std::round(blocks)) > 1e-9 * std::max(1.0, blocks) ||
      std::round(blocks) < 1.0)
    throw ValidationError(
        "ExperimentConfig: dwell must be a positive integer multiple of the "
        "block duration");
  if (!(drift_rate_s_per_sqrt_s >= 0.0))
    throw ValidationError("ExperimentConfig: drift rate must be >= 0");
  if (allow_multi_pair)
    throw ValidationError(
        "ExperimentConfig: multi-pair emission is reserved and must stay off");
  dip.validate();
}

namespace {

std::vector<double> scan_delays(const ExperimentConfig& c) {
  const int n = c.n_points();
  const int side = (n - 1) / 2;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = (i - side) * c.scan_step_s;
  return d;
}

// Effective per-block delay offsets from drift, generated sequentially in a
// dedicated stream so that scan points stay independent of each other and of
// the thread schedule. With compensation the readjustment at every block
// boundary leaves a uniform residual; without it the Wiener walk accumulates
// across the whole scan.
std::vector<std::vector<double>> drift_offsets(const ExperimentConfig& c) {
  const int n = c.n_points();
  const int blocks = c.blocks_per_point();
  std::vector<std::vector<double>> out(n, std::vector<double>(blocks, 0.0));
  RandomStream rs(c.seed, kDriftStreamId);
  const double step_sigma =
      c.drift_rate_s_per_sqrt_s * std::sqrt(c.block_duration_s);
  double walk = 0.0;
  for (int p = 0; p < n; ++p) {
    for (int b = 0; b < blocks; ++b) {
      if (c.drift_compensation) {
        out[p][b] = (c.drift_rate_s_per_sqrt_s > 0.0)
                        ? rs.uniform(-kDriftResidualBound, kDriftResidualBound)
                        : 0.0;
      } else {
        out[p][b] = walk;
        walk += step_sigma * rs.normal();
      }
    }
  }
  return out;
}

template <typename PointFn>
void for_each_point(int n_points, int threads, PointFn&& fn) {
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_points));
  if (n_threads == 1) {
    for (int p = 0; p < n_points; ++p) fn(p);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (int p = next.fetch_add(1); p < n_points; p = next.fetch_add(1)) fn(p);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ScanResult run_scan(const ExperimentConfig& config, int threads) {
  config.validate();
  if (config.scenario == Scenario::thermal)
    throw ValidationError("run_scan: thermal scans run via simulate_thermal");

  const std::vector<double> delays = scan_delays(config);
  const auto drift = drift_offsets(config);
  const int blocks = config.blocks_per_point();
  const double block_mean = config.baseline_rate_hz() * config.block_duration_s;
  const double w = config.dip.rms_width_s;
  const double depth = config.dip.depth;

  ScanResult result;
  result.config = config;
  result.points.resize(delays.size());
  if (block_mean * blocks * static_cast<double>(delays.size()) < 1e-6)
    result.warning = "degenerate statistics: expected fourfold counts ~ 0";

  for_each_point(static_cast<int>(delays.size()), threads, [&](int p) {
    RandomStream rs(config.seed, static_cast<std::uint64_t>(p));
    ScanPoint& point = result.points[p];
    point.set_delay_s = delays[p];
    point.realized_delay_s.resize(blocks);
    point.fourfold_counts.resize(blocks);
    const double set_err = rs.uniform(-kDelaySettingBound, kDelaySettingBound);
    for (int b = 0; b < blocks; ++b) {
      const double delta = delays[p] + set_err + drift[p][b];
      point.realized_delay_s[b] = delta;
      const double g = std::exp(-0.5 * delta * delta / (w * w));
      const double knock = depth * g;
      const std::uint64_t candidates = rs.poisson(block_mean);
      std::uint64_t kept = 0;
      for (std::uint64_t m = 0; m < candidates; ++m) {
        bool interferes = false;
        switch (config.scenario) {
          case Scenario::indistinguishable:
            interferes = true;
            break;
          case Scenario::orthogonal:
            interferes = false;
            break;
          case Scenario::unpolarized: {
            // H/V sampled per photon; only matched combinations interfere.
            const bool pol_a = rs.uniform01() < 0.5;
            const bool pol_b = rs.uniform01() < 0.5;
            interferes = (pol_a == pol_b);
            break;
          }
          case Scenario::thermal:
            break;
        }
        if (interferes && rs.uniform01() < knock) continue;  // suppressed
        ++kept;
      }
      point.fourfold_counts[b] = kept;
    }
  });
  return result;
}

ScanResult simulate_thermal(const ExperimentConfig& config, double intensity_ratio,
                            int samples_per_block, int threads) {
  config.validate();
  if (!(intensity_ratio > 0.0))
    throw ValidationError("simulate_thermal: intensity ratio must be > 0");
  if (samples_per_block < 16)
    throw ValidationError("simulate_thermal: need >= 16 field samples per block");

  const std::vector<double> delays = scan_delays(config);
  const auto drift = drift_offsets(config);
  const int blocks = config.blocks_per_point();
  const double block_mean = config.baseline_rate_hz() * config.block_duration_s;
  const double w = config.dip.rms_width_s;
  const double depth = config.dip.depth;
  const double r = intensity_ratio;
  // far-delay mean of I_c * I_d for <|a|^2> = r, <|b|^2> = 1
  const double far_mean = 0.5 * (r * r + r + 1.0);

  ScanResult result;
  result.config = config;
  result.intensity_ratio = intensity_ratio;
  result.points.resize(delays.size());
  if (block_mean * blocks * static_cast<double>(delays.size()) < 1e-6)
    result.warning = "degenerate statistics: expected fourfold counts ~ 0";

  for_each_point(static_cast<int>(delays.size()), threads, [&](int p) {
    RandomStream rs(config.seed, static_cast<std::uint64_t>(p));
    ScanPoint& point = result.points[p];
    point.set_delay_s = delays[p];
    point.realized_delay_s.resize(blocks);
    point.fourfold_counts.resize(blocks);
    const double set_err = rs.uniform(-kDelaySettingBound, kDelaySettingBound);
    for (int b = 0; b < blocks; ++b) {
      const double delta = delays[p] + set_err + drift[p][b];
      point.realized_delay_s[b] = delta;
      const double overlap =
          std::sqrt(depth) * std::exp(-0.25 * delta * delta / (w * w));
      const double unmatched = 1.0 - overlap * overlap;
      double acc = 0.0;
      for (int s = 0; s < samples_per_block; ++s) {
        const std::complex<double> a{std::sqrt(0.5 * r) * rs.normal(),
                                     std::sqrt(0.5 * r) * rs.normal()};
        const std::complex<double> bb{std::sqrt(0.5) * rs.normal(),
                                      std::sqrt(0.5) * rs.normal()};
        const double nb = std::norm(bb);
        const double ic = 0.5 * std::norm(a + overlap * bb) + 0.5 * unmatched * nb;
        const double id = 0.5 * std::norm(a - overlap * bb) + 0.5 * unmatched * nb;
        acc += ic * id;
      }
      const double mean_weight = acc / static_cast<double>(samples_per_block);
      point.fourfold_counts[b] = rs.poisson(block_mean * mean_weight / far_mean);
    }
  });
  return result;
}

ScanFit fit_dip(const ScanResult& scan, std::uint64_t bootstrap_seed) {
  const size_t n = scan.points.size();
  if (n < 7)
    throw ValidationError("fit_dip: need >= 7 delay points (statistics error)");

  DipFitData data;
  data.x.reserve(n);
  data.y.reserve(n);
  data.sigma.reserve(n);
  std::uint64_t total = 0;
  for (const ScanPoint& p : scan.points) {
    std::uint64_t y = 0;
    for (std::uint64_t c : p.fourfold_counts) y += c;
    total += y;
    data.x.push_back(p.set_delay_s);
    data.y.push_back(static_cast<double>(y));
    data.sigma.push_back(std::sqrt(std::max<double>(1.0, static_cast<double>(y))));
  }
  if (total == 0)
    throw ValidationError("fit_dip: all counts are zero (statistics error)");

  const double span = *std::max_element(data.x.begin(), data.x.end()) -
                      *std::min_element(data.x.begin(), data.x.end());
  if (scan.config.dip.rms_width_s > 0.0 &&
      span < 4.0 * scan.config.dip.rms_width_s)
    throw ValidationError(
        "fit_dip: scan must span at least +/- 2 dip widths (statistics error)");

  const DipFitResult fit = fit_gaussian_dip(data);

  // Block bootstrap for the uncertainty: resample blocks within each point,
  // refit from the full-data solution.
  RandomStream rs(bootstrap_seed, 0);
  std::vector<double> vis_samples;
  std::vector<double> depth_samples;
  vis_samples.reserve(kBootstrapResamples);
  DipFitData boot = data;
  const DipFitInit init{fit.baseline, fit.depth, fit.center, fit.width};
  for (int resample = 0; resample < kBootstrapResamples; ++resample) {
    for (size_t i = 0; i < n; ++i) {
      const auto& counts = scan.points[i].fourfold_counts;
      const size_t k = counts.size();
      std::uint64_t y = 0;
      for (size_t b = 0; b < k; ++b) {
        const size_t pick = std::min<size_t>(
            k - 1, static_cast<size_t>(rs.uniform01() * static_cast<double>(k)));
        y += counts[pick];
      }
      boot.y[i] = static_cast<double>(y);
      boot.sigma[i] = std::sqrt(std::max<double>(1.0, static_cast<double>(y)));
    }
    try {
      const DipFitResult bf = fit_gaussian_dip(boot, init);
      depth_samples.push_back(bf.depth);
      vis_samples.push_back(visibility_from_depth(bf.depth));
    } catch (const NumericalError&) {
      // a failed resample carries no information; skip it
    }
  }
  auto sample_std = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };

  ScanFit out;
  out.model = DipModel{fit.baseline, std::clamp(fit.depth, 0.0, 1.0), fit.width};
  out.center_s = fit.center;
  out.visibility = visibility_from_depth(fit.depth);
  out.visibility_sigma = sample_std(vis_samples);
  out.depth_sigma = sample_std(depth_samples);
  out.residual_rms = fit.residual_rms;
  out.bootstrap_resamples = static_cast<int>(vis_samples.size());
  return out;
}

}  // namespace homlab
