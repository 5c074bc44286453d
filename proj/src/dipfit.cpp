#include "homlab/dipfit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "homlab/errors.hpp"

namespace homlab {

namespace {

struct Params {
  double b, a, c, w;
};

double model(const Params& p, double x) {
  const double u = (x - p.c) / p.w;
  return p.b * (1.0 - p.a * std::exp(-0.5 * u * u));
}

double chi2(const Params& p, const DipFitData& d, const std::vector<double>& sig) {
  double s = 0.0;
  for (size_t i = 0; i < d.x.size(); ++i) {
    const double r = (d.y[i] - model(p, d.x[i])) / sig[i];
    s += r * r;
  }
  return s;
}

Params initial_guess(const DipFitData& d) {
  const size_t n = d.x.size();
  const auto [xmin_it, xmax_it] = std::minmax_element(d.x.begin(), d.x.end());
  const double span = *xmax_it - *xmin_it;
  const double xmid = 0.5 * (*xmax_it + *xmin_it);

  // Baseline from the outer third of the scan.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return std::abs(d.x[i] - xmid) > std::abs(d.x[j] - xmid);
  });
  double b0 = 0.0;
  const size_t outer = std::max<size_t>(2, n / 3);
  for (size_t k = 0; k < outer; ++k) b0 += d.y[order[k]];
  b0 /= static_cast<double>(outer);

  const size_t imin = static_cast<size_t>(
      std::min_element(d.y.begin(), d.y.end()) - d.y.begin());
  const double ymin = d.y[imin];
  double a0 = b0 > 0.0 ? std::clamp(1.0 - ymin / b0, 0.0, 0.999) : 0.0;
  const double c0 = d.x[imin];

  // Width from the half-depth region around the minimum.
  double w0 = span / 8.0;
  if (a0 > 0.02 && b0 > 0.0) {
    const double half_level = b0 - 0.5 * (b0 - ymin);
    double lo = c0, hi = c0;
    for (size_t i = 0; i < n; ++i) {
      if (d.y[i] < half_level) {
        lo = std::min(lo, d.x[i]);
        hi = std::max(hi, d.x[i]);
      }
    }
    if (hi > lo) w0 = (hi - lo) / 2.3548200450309493;
  } else {
    w0 = span / 6.0;
  }
  if (!(w0 > 0.0)) w0 = span > 0.0 ? span / 8.0 : 1.0;
  return {b0, a0, c0, w0};
}

}  // namespace

DipFitResult fit_gaussian_dip(const DipFitData& data,
                              std::optional<DipFitInit> init) {
  const size_t n = data.x.size();
  if (n < 5 || data.y.size() != n)
    throw ValidationError("fit_gaussian_dip: need >= 5 (x, y) points");
  std::vector<double> sig = data.sigma;
  if (sig.empty()) sig.assign(n, 1.0);
  if (sig.size() != n)
    throw ValidationError("fit_gaussian_dip: sigma size mismatch");
  for (double s : sig)
    if (!(s > 0.0)) throw ValidationError("fit_gaussian_dip: sigma must be > 0");

  Params p = init ? Params{init->baseline, init->depth, init->center, init->width}
                  : initial_guess(data);
  if (!(p.w != 0.0)) p.w = 1.0;
  p.w = std::abs(p.w);

  double lambda = 1e-3;
  double cur = chi2(p, data, sig);
  int iterations = 0;
  bool converged = false;

  for (int it = 0; it < 500; ++it) {
    ++iterations;
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (size_t i = 0; i < n; ++i) {
      const double u = (data.x[i] - p.c) / p.w;
      const double g = std::exp(-0.5 * u * u);
      const double m = p.b * (1.0 - p.a * g);
      const double r = (data.y[i] - m) / sig[i];
      Eigen::Vector4d grad;  // d(model)/d(b, a, c, w)
      grad(0) = 1.0 - p.a * g;
      grad(1) = -p.b * g;
      grad(2) = -p.b * p.a * g * u / p.w;
      grad(3) = -p.b * p.a * g * u * u / p.w;
      grad /= sig[i];
      jtj += grad * grad.transpose();
      jtr += grad * r;
    }

    Eigen::Matrix4d damped = jtj;
    const double floor = 1e-30 + 1e-14 * jtj.diagonal().maxCoeff();
    for (int k = 0; k < 4; ++k)
      damped(k, k) += lambda * std::max(jtj(k, k), floor) + floor;
    const Eigen::Vector4d step = damped.ldlt().solve(jtr);
    if (!step.allFinite()) {
      lambda *= 4.0;
      if (lambda > 1e14) break;
      continue;
    }

    Params trial{p.b + step(0), p.a + step(1), p.c + step(2), p.w + step(3)};
    trial.w = std::abs(trial.w);
    if (!(trial.w > 0.0)) trial.w = 0.5 * p.w;
    const double trial_chi2 = chi2(trial, data, sig);
    if (trial_chi2 <= cur) {
      const double rel_drop = (cur - trial_chi2) / std::max(cur, 1e-300);
      double rel_step = 0.0;
      rel_step = std::max(rel_step, std::abs(step(0)) / std::max(std::abs(p.b), 1e-300));
      rel_step = std::max(rel_step, std::abs(step(1)));
      rel_step = std::max(rel_step, std::abs(step(2)) / p.w);
      rel_step = std::max(rel_step, std::abs(step(3)) / p.w);
      p = trial;
      cur = trial_chi2;
      lambda = std::max(lambda * 0.3, 1e-14);
      if (rel_drop < 1e-14 || rel_step < 1e-13) {
        converged = true;
        break;
      }
    } else {
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
  }

  if (!converged && lambda > 1e14) {
    std::ostringstream os;
    os << "fit_gaussian_dip: no convergence; chi2 = " << cur
       << " over " << n << " points";
    throw NumericalError(os.str());
  }

  DipFitResult out;
  out.baseline = p.b;
  out.depth = p.a;
  out.center = p.c;
  out.width = std::abs(p.w);
  out.chi2 = cur;
  out.iterations = iterations;
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = data.y[i] - model(p, data.x[i]);
    rss += r * r;
  }
  out.residual_rms = std::sqrt(rss / static_cast<double>(n));
  return out;
}

}  // namespace homlab
