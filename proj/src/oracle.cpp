#include "homlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "homlab/dipfit.hpp"
#include "homlab/errors.hpp"
#include "homlab/quadrature.hpp"

namespace homlab {

void JointSpectralAmplitude::validate() const {
  pump.validate();
  signal_filter.validate();
  if (trigger_filter) trigger_filter->validate();
  if (!(pump.rms_bandwidth_rad_s > 0.0))
    throw ValidationError("JointSpectralAmplitude: pump bandwidth must be > 0");
  if (!(signal_filter.rms_bandwidth_rad_s > 0.0))
    throw ValidationError(
        "JointSpectralAmplitude: signal filter bandwidth must be > 0 "
        "(state not normalizable)");
  // Energy conservation: photon centre frequencies must add up to the pump's.
  const double sum = signal_filter.center_omega_rad_s() +
                     (trigger_filter ? trigger_filter->center_omega_rad_s()
                                     : signal_filter.center_omega_rad_s());
  const double wp = pump.center_omega_rad_s();
  if (std::abs(sum / wp - 1.0) > 1e-6)
    throw ValidationError(
        "JointSpectralAmplitude: photon centre frequencies do not add up to "
        "the pump frequency");
}

JointSpectralAmplitude jsa_from_dip_params(const DipParams& p,
                                           double pump_center_nm) {
  p.validate();
  if (!(p.sigma_s > 0.0))
    throw ValidationError("jsa_from_dip_params: sigma_s must be > 0");
  JointSpectralAmplitude jsa;
  jsa.pump = SpectralGaussian{pump_center_nm * 1e-9, p.sigma_p};
  jsa.signal_filter = SpectralGaussian{2.0 * pump_center_nm * 1e-9, p.sigma_s};
  if (!p.trigger_unfiltered())
    jsa.trigger_filter = SpectralGaussian{2.0 * pump_center_nm * 1e-9, p.sigma_t};
  jsa.validate();
  return jsa;
}

void OracleSettings::validate() const {
  if (quadrature_order < 16)
    throw ValidationError("OracleSettings: quadrature_order must be >= 16");
  if (jitter_nodes < 8)
    throw ValidationError("OracleSettings: jitter_nodes must be >= 8");
  if (!(convergence_rel_tol > 0.0))
    throw ValidationError("OracleSettings: convergence tolerance must be > 0");
  if (!(exchange_overlap >= 0.0 && exchange_overlap <= 1.0))
    throw ValidationError("OracleSettings: exchange_overlap must lie in [0, 1]");
}

namespace {

struct SourceShape {
  double sigma_p;
  double sigma_t;  // +inf when unfiltered
  double sigma_s;

  // Amplitude in centred detuning coordinates (x = signal, t = trigger).
  double amplitude(double x, double t) const {
    const double sum = x + t;
    double e = -sum * sum / (4.0 * sigma_p * sigma_p) -
               x * x / (4.0 * sigma_s * sigma_s);
    if (std::isfinite(sigma_t)) e -= t * t / (4.0 * sigma_t * sigma_t);
    return std::exp(e);
  }

  // Envelope scale of the trigger axis: this trigger frequency enters two
  // amplitude factors, so the slowest decay rate is
  // 1/(2 sigma_p^2) + 1/(2 sigma_t^2).
  double trigger_scale() const {
    if (!std::isfinite(sigma_t)) return sigma_p;
    return sigma_p * sigma_t / std::hypot(sigma_p, sigma_t);
  }
};

SourceShape shape_of(const JointSpectralAmplitude& jsa) {
  return {jsa.pump.rms_bandwidth_rad_s,
          jsa.trigger_filter ? jsa.trigger_filter->rms_bandwidth_rad_s
                             : std::numeric_limits<double>::infinity(),
          jsa.signal_filter.rms_bandwidth_rad_s};
}

// Tensor-product Gauss-Hermite evaluation of the exchange integral. The
// trigger axes are contracted first into the kernels
//   K_src(i, j) = sum_k W_k f_src(x_i, t_k) f_src(x_j, t_k),
// leaving a double sum over the two signal axes per delay. Summation order is
// fixed, so results do not depend on how callers schedule delay points.
class ExchangeEvaluator {
 public:
  ExchangeEvaluator(const SourceShape& a, const SourceShape& b, int order)
      : order_(order) {
    const QuadratureRule rule = gauss_hermite(order);

    // Signal envelope shared by both sources: each signal frequency appears
    // once in f_a and once in f_b.
    const double inv2sx = 0.25 / (a.sigma_p * a.sigma_p) +
                          0.25 / (a.sigma_s * a.sigma_s) +
                          0.25 / (b.sigma_p * b.sigma_p) +
                          0.25 / (b.sigma_s * b.sigma_s);
    const double sx = std::sqrt(0.5 / inv2sx);

    x_.resize(order_);
    wx_.resize(order_);
    for (int i = 0; i < order_; ++i) {
      x_[i] = std::numbers::sqrt2 * sx * rule.nodes[i];
      wx_[i] = std::numbers::sqrt2 * sx * rule.weights[i] *
               std::exp(rule.nodes[i] * rule.nodes[i]);
    }

    kernel_a_ = trigger_kernel(a, rule);
    kernel_b_ = trigger_kernel(b, rule);
    norm_a_ = source_norm(a, rule);
    norm_b_ = source_norm(b, rule);
  }

  // Re of the exchange integral, normalized by the single-pair norms.
  double normalized_overlap(double delay_s) const {
    double acc = 0.0;
    for (int i = 0; i < order_; ++i) {
      for (int j = 0; j < order_; ++j) {
        const double phase = (x_[i] - x_[j]) * delay_s;
        acc += wx_[i] * wx_[j] * std::cos(phase) *
               kernel_a_[idx(i, j)] * kernel_b_[idx(j, i)];
      }
    }
    return acc / (norm_a_ * norm_b_);
  }

 private:
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * order_ + j; }

  std::vector<double> trigger_kernel(const SourceShape& s,
                                     const QuadratureRule& rule) const {
    const double st = s.trigger_scale();
    std::vector<double> t(order_), wt(order_);
    for (int k = 0; k < order_; ++k) {
      t[k] = std::numbers::sqrt2 * st * rule.nodes[k];
      wt[k] = std::numbers::sqrt2 * st * rule.weights[k] *
              std::exp(rule.nodes[k] * rule.nodes[k]);
    }
    std::vector<double> f(static_cast<size_t>(order_) * order_);
    for (int i = 0; i < order_; ++i)
      for (int k = 0; k < order_; ++k)
        f[idx(i, k)] = s.amplitude(x_[i], t[k]);
    std::vector<double> kernel(static_cast<size_t>(order_) * order_, 0.0);
    for (int i = 0; i < order_; ++i) {
      for (int j = 0; j <= i; ++j) {
        double acc = 0.0;
        for (int k = 0; k < order_; ++k)
          acc += wt[k] * f[idx(i, k)] * f[idx(j, k)];
        kernel[idx(i, j)] = acc;
        kernel[idx(j, i)] = acc;
      }
    }
    return kernel;
  }

  // integral |f|^2 over both axes with the same rule and scales.
  double source_norm(const SourceShape& s, const QuadratureRule& rule) const {
    const double st = s.trigger_scale();
    double acc = 0.0;
    for (int i = 0; i < order_; ++i) {
      double row = 0.0;
      for (int k = 0; k < order_; ++k) {
        const double t = std::numbers::sqrt2 * st * rule.nodes[k];
        const double wt = std::numbers::sqrt2 * st * rule.weights[k] *
                          std::exp(rule.nodes[k] * rule.nodes[k]);
        const double f = s.amplitude(x_[i], t);
        row += wt * f * f;
      }
      acc += wx_[i] * row;
    }
    return acc;
  }

  int order_;
  std::vector<double> x_, wx_;
  std::vector<double> kernel_a_, kernel_b_;
  double norm_a_ = 1.0, norm_b_ = 1.0;
};

double probability_from_overlap(double overlap, double exchange_scale) {
  return 0.5 * (1.0 - exchange_scale * overlap);
}

}  // namespace

double coincidence_probability(const JointSpectralAmplitude& jsa_a,
                               const JointSpectralAmplitude& jsa_b,
                               double delay_s, const OracleSettings& settings) {
  jsa_a.validate();
  jsa_b.validate();
  settings.validate();
  const SourceShape a = shape_of(jsa_a);
  const SourceShape b = shape_of(jsa_b);
  const ExchangeEvaluator coarse(a, b, settings.quadrature_order);
  const ExchangeEvaluator fine(a, b, 2 * settings.quadrature_order);
  const double p1 = probability_from_overlap(coarse.normalized_overlap(delay_s),
                                             settings.exchange_overlap);
  const double p2 = probability_from_overlap(fine.normalized_overlap(delay_s),
                                             settings.exchange_overlap);
  if (std::abs(p2 - p1) >
      std::max(settings.convergence_rel_tol * std::abs(p2), 1e-9)) {
    std::ostringstream os;
    os << "coincidence_probability: quadrature not converged at delay "
       << delay_s << " s (order " << settings.quadrature_order << " -> "
       << 2 * settings.quadrature_order << " changed " << p1 << " -> " << p2
       << ")";
    throw NumericalError(os.str());
  }
  return p2;
}

std::vector<double> jitter_average(const std::function<double(double)>& curve,
                                   const std::vector<double>& delays_s,
                                   double sigma_j, int nodes) {
  if (nodes < 8) throw ValidationError("jitter_average: nodes must be >= 8");
  if (!(sigma_j >= 0.0))
    throw ValidationError("jitter_average: sigma_j must be >= 0");
  std::vector<double> out(delays_s.size());
  if (sigma_j == 0.0) {
    for (size_t i = 0; i < delays_s.size(); ++i) out[i] = curve(delays_s[i]);
    return out;
  }
  const QuadratureRule rule = gauss_hermite(nodes);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (size_t i = 0; i < delays_s.size(); ++i) {
    double acc = 0.0;
    for (int m = 0; m < nodes; ++m) {
      const double tau = std::numbers::sqrt2 * sigma_j * rule.nodes[m];
      acc += rule.weights[m] * curve(delays_s[i] - tau);
    }
    out[i] = acc * inv_sqrt_pi;
  }
  return out;
}

namespace {

// Cubic Hermite (Catmull-Rom) interpolation on a sorted grid.
double interp_cubic(const std::vector<double>& xs, const std::vector<double>& ys,
                    double x) {
  const size_t n = xs.size();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t j = (it == xs.begin()) ? 0 : static_cast<size_t>(it - xs.begin()) - 1;
  j = std::min(j, n - 2);
  const double h = xs[j + 1] - xs[j];
  const double u = (x - xs[j]) / h;
  const double y0 = ys[j], y1 = ys[j + 1];
  const double m0 = (j == 0) ? (y1 - y0) / h
                             : (ys[j + 1] - ys[j - 1]) / (xs[j + 1] - xs[j - 1]);
  const double m1 = (j + 2 >= n)
                        ? (y1 - y0) / h
                        : (ys[j + 2] - ys[j]) / (xs[j + 2] - xs[j]);
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * m0 +
         (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * m1;
}

}  // namespace

std::vector<double> jitter_average(const std::vector<double>& grid_delays_s,
                                   const std::vector<double>& grid_values,
                                   const std::vector<double>& out_delays_s,
                                   double sigma_j, int nodes) {
  if (grid_delays_s.size() != grid_values.size() || grid_delays_s.size() < 4)
    throw ValidationError("jitter_average: grid needs >= 4 matching points");
  if (!std::is_sorted(grid_delays_s.begin(), grid_delays_s.end()))
    throw ValidationError("jitter_average: grid delays must be sorted");
  if (nodes < 8) throw ValidationError("jitter_average: nodes must be >= 8");
  if (!(sigma_j >= 0.0))
    throw ValidationError("jitter_average: sigma_j must be >= 0");

  if (sigma_j > 0.0) {
    const QuadratureRule rule = gauss_hermite(nodes);
    const double span = std::numbers::sqrt2 * sigma_j *
                        std::max(std::abs(rule.nodes.front()),
                                 std::abs(rule.nodes.back()));
    const auto [lo, hi] =
        std::minmax_element(out_delays_s.begin(), out_delays_s.end());
    if (out_delays_s.empty() || *lo - span < grid_delays_s.front() ||
        *hi + span > grid_delays_s.back()) {
      std::ostringstream os;
      os << "jitter_average: grid covers [" << grid_delays_s.front() << ", "
         << grid_delays_s.back() << "] s but the average needs ["
         << (out_delays_s.empty() ? 0.0 : *lo - span) << ", "
         << (out_delays_s.empty() ? 0.0 : *hi + span) << "] s";
      throw ValidationError(os.str());
    }
  }

  return jitter_average(
      [&](double d) { return interp_cubic(grid_delays_s, grid_values, d); },
      out_delays_s, sigma_j, nodes);
}

OracleDipResult oracle_dip(const DipParams& params, const OracleSettings& settings) {
  params.validate();
  settings.validate();
  const JointSpectralAmplitude jsa = jsa_from_dip_params(params);
  const SourceShape shape = shape_of(jsa);

  const double w_pred = dip_width(params);
  std::vector<double> delays = settings.delay_grid_s;
  if (delays.empty()) {
    constexpr int kPoints = 33;
    delays.resize(kPoints);
    for (int i = 0; i < kPoints; ++i)
      delays[i] = -4.5 * w_pred + 9.0 * w_pred * i / double(kPoints - 1);
  } else {
    const auto [lo, hi] = std::minmax_element(delays.begin(), delays.end());
    if (*hi - *lo < 4.0 * w_pred)
      throw ValidationError(
          "oracle_dip: delay grid must span at least 4 predicted widths");
  }

  const ExchangeEvaluator eval(shape, shape, settings.quadrature_order);
  const auto bare = [&](double d) {
    return probability_from_overlap(eval.normalized_overlap(d),
                                    settings.exchange_overlap);
  };
  const std::vector<double> probs =
      jitter_average(bare, delays, params.sigma_j, settings.jitter_nodes);

  // Order-doubling probe at zero delay, where the integrand is hardest.
  OracleDipResult out;
  {
    const ExchangeEvaluator fine(shape, shape, 2 * settings.quadrature_order);
    const double p1 = bare(0.0);
    const double p2 = probability_from_overlap(fine.normalized_overlap(0.0),
                                               settings.exchange_overlap);
    out.order_doubling_change = std::abs(p2 - p1);
    if (out.order_doubling_change >
        std::max(settings.convergence_rel_tol * std::abs(p2), 1e-9))
      throw NumericalError("oracle_dip: quadrature not converged at zero delay");
  }

  DipFitData data{delays, probs, {}};
  const DipFitResult fit = fit_gaussian_dip(data);
  if (fit.residual_rms > 1e-4 * fit.baseline) {
    std::ostringstream os;
    os << "oracle_dip: dip fit residual r.m.s. " << fit.residual_rms
       << " exceeds 1e-4 of baseline " << fit.baseline;
    throw NumericalError(os.str());
  }

  out.model = DipModel{fit.baseline, std::clamp(fit.depth, 0.0, 1.0), fit.width};
  out.visibility = visibility_from_depth(fit.depth);
  out.center_s = fit.center;
  out.residual_rms = fit.residual_rms;
  out.delays_s = std::move(delays);
  out.probabilities = probs;
  return out;
}

}  // namespace homlab
