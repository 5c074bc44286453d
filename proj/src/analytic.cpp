#include "homlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "homlab/errors.hpp"

namespace homlab {

void DipParams::validate() const {
  if (!(sigma_p > 0.0)) throw ValidationError("DipParams: sigma_p must be > 0");
  if (!(sigma_s >= 0.0)) throw ValidationError("DipParams: sigma_s must be >= 0");
  if (!(sigma_t >= 0.0)) throw ValidationError("DipParams: sigma_t must be >= 0");
  if (!(sigma_j >= 0.0)) throw ValidationError("DipParams: sigma_j must be >= 0");
  if (std::isnan(sigma_t)) throw ValidationError("DipParams: sigma_t is NaN");
}

void DipModel::validate() const {
  if (!(baseline >= 0.0)) throw ValidationError("DipModel: baseline must be >= 0");
  if (!(depth >= 0.0 && depth <= 1.0))
    throw ValidationError("DipModel: depth must lie in [0, 1]");
  if (!(rms_width_s > 0.0))
    throw ValidationError("DipModel: rms width must be > 0");
}

namespace {

// X as defined for dip_depth. The unfiltered trigger takes the exact
// sigma_t -> infinity limit of the heralding factor.
double mixing_term(const DipParams& p) {
  const double p2 = p.sigma_p * p.sigma_p;
  const double s2 = p.sigma_s * p.sigma_s;
  const double jitter_mix = 2.0 * p2 * p.sigma_j * p.sigma_j * s2;
  const double broadened = s2 + p2 + jitter_mix;
  if (p.trigger_unfiltered()) return broadened;
  const double t2 = p.sigma_t * p.sigma_t;
  return broadened * (p2 + t2) / (p2 + s2 + t2);
}

}  // namespace

double dip_depth(const DipParams& p) {
  p.validate();
  const double x = mixing_term(p);
  const double d = p.sigma_p / std::sqrt(x);
  // X >= sigma_p^2 holds for all valid inputs; anything beyond rounding is an
  // internal inconsistency.
  if (d > 1.0 + 1e-12)
    throw NumericalError("dip_depth: computed depth exceeds 1");
  return std::min(d, 1.0);
}

double visibility(const DipParams& p) {
  p.validate();
  const double x = mixing_term(p);
  return p.sigma_p / (2.0 * std::sqrt(x) - p.sigma_p);
}

double visibility_from_depth(double depth) { return depth / (2.0 - depth); }

double depth_from_visibility(double vis) { return 2.0 * vis / (1.0 + vis); }

double dip_width(const DipParams& p) {
  p.validate();
  if (!(p.sigma_s > 0.0) || !(p.sigma_p > 0.0))
    throw ValidationError("dip_width: diverges for sigma_s = 0 or sigma_p = 0");
  const double p2 = p.sigma_p * p.sigma_p;
  const double s2 = p.sigma_s * p.sigma_s;
  const double num = std::sqrt(p2 + s2 * (1.0 + 2.0 * p.sigma_j * p.sigma_j * p2));
  return num / (std::sqrt(2.0) * p.sigma_s * p.sigma_p);
}

double zukowski_limit(double sigma_p, double sigma_s) {
  if (!(sigma_p > 0.0) || !(sigma_s >= 0.0))
    throw ValidationError("zukowski_limit: requires sigma_p > 0, sigma_s >= 0");
  return sigma_p / (2.0 * std::hypot(sigma_p, sigma_s) - sigma_p);
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "indistinguishable") return Scenario::indistinguishable;
  if (name == "orthogonal") return Scenario::orthogonal;
  if (name == "unpolarized") return Scenario::unpolarized;
  if (name == "thermal") return Scenario::thermal;
  throw ValidationError("unknown scenario '" + name + "'");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::indistinguishable: return "indistinguishable";
    case Scenario::orthogonal: return "orthogonal";
    case Scenario::unpolarized: return "unpolarized";
    case Scenario::thermal: return "thermal";
  }
  throw ValidationError("unknown scenario value");
}

double scenario_visibility(Scenario s, double depth, double intensity_ratio) {
  if (!(depth >= 0.0 && depth <= 1.0))
    throw ValidationError("scenario_visibility: depth must lie in [0, 1]");
  switch (s) {
    case Scenario::indistinguishable:
      return visibility_from_depth(depth);
    case Scenario::orthogonal:
      return 0.0;
    case Scenario::unpolarized:
      return visibility_from_depth(0.5 * depth);
    case Scenario::thermal: {
      if (!(intensity_ratio > 0.0))
        throw ValidationError("scenario_visibility: intensity ratio must be > 0");
      const double r = intensity_ratio;
      return depth * r / (2.0 * (1.0 + r * r) + r * (2.0 - depth));
    }
  }
  throw ValidationError("unknown scenario value");
}

namespace {

struct Targets {
  double vis;
  double width;
  double sigma_p;
  double sigma_j;
};

double forward_vis(const Targets& t, double sigma_s, double sigma_t) {
  return visibility({t.sigma_p, sigma_s, sigma_t, t.sigma_j});
}

double forward_width(const Targets& t, double sigma_s) {
  return dip_width({t.sigma_p, sigma_s, 1.0, t.sigma_j});
}

// sigma_s follows from the width alone:
//   w^2 = (sigma_p^2 + sigma_s^2 K) / (2 sigma_s^2 sigma_p^2),
//   K = 1 + 2 sigma_j^2 sigma_p^2
// => sigma_s^2 = sigma_p^2 / (2 w^2 sigma_p^2 - K). Returns 0 if the width is
// below the sigma_s -> infinity floor.
double sigma_s_from_width(const Targets& t) {
  const double p2 = t.sigma_p * t.sigma_p;
  const double k = 1.0 + 2.0 * t.sigma_j * t.sigma_j * p2;
  const double den = 2.0 * t.width * t.width * p2 - k;
  if (!(den > 0.0)) return 0.0;
  return t.sigma_p / std::sqrt(den);
}

std::string frontier_report(const Targets& t) {
  std::ostringstream os;
  os.precision(6);
  const double p2 = t.sigma_p * t.sigma_p;
  const double k = 1.0 + 2.0 * t.sigma_j * t.sigma_j * p2;
  const double w_floor = std::sqrt(k / (2.0 * p2));
  os << "reachable frontier at sigma_p = " << t.sigma_p
     << " rad/s, sigma_j = " << t.sigma_j << " s: width > " << w_floor << " s";
  const double ss = sigma_s_from_width(t);
  if (ss > 0.0) {
    const double v_lo = forward_vis(t, ss, DipParams::kUnfilteredTrigger);
    // sigma_t -> 0 gives the strongest heralding and the largest visibility.
    const double v_hi = forward_vis(t, ss, 1e-9 * t.sigma_p);
    os << "; at width = " << t.width << " s visibility spans [" << v_lo << ", "
       << v_hi << "] vs requested " << t.vis;
  } else {
    os << "; requested width " << t.width << " s is below that floor";
  }
  return os.str();
}

}  // namespace

FilterSolution solve_filters(double v_target, double w_target_s, double sigma_p,
                             double sigma_j) {
  if (!(v_target > 0.0 && v_target < 1.0))
    throw ValidationError("solve_filters: target visibility must lie in (0, 1)");
  if (!(w_target_s > 0.0))
    throw ValidationError("solve_filters: target width must be > 0");
  if (!(sigma_p > 0.0) || !(sigma_j >= 0.0))
    throw ValidationError("solve_filters: requires sigma_p > 0, sigma_j >= 0");

  const Targets t{v_target, w_target_s, sigma_p, sigma_j};
  constexpr double kRelTol = 1e-9;
  const auto residual = [&](double sigma_s, double sigma_t) {
    const double rv = forward_vis(t, sigma_s, sigma_t) / t.vis - 1.0;
    const double rw = forward_width(t, sigma_s) / t.width - 1.0;
    return std::pair<double, double>{rv, rw};
  };
  const auto norm = [](const std::pair<double, double>& r) {
    return std::max(std::abs(r.first), std::abs(r.second));
  };

  // Coarse log-grid seed over (sigma_s, sigma_t), including the unfiltered
  // trigger row. Ties break toward the smallest sigma_s.
  double best_s = 0.0, best_t = 0.0, best_norm = std::numeric_limits<double>::max();
  constexpr int kGrid = 48;
  for (int i = 0; i < kGrid; ++i) {
    const double ls = std::lerp(std::log(1e-3 * sigma_p), std::log(10.0 * sigma_p),
                                i / double(kGrid - 1));
    const double ss = std::exp(ls);
    for (int j = 0; j <= kGrid; ++j) {
      const double st = (j == kGrid)
                            ? DipParams::kUnfilteredTrigger
                            : std::exp(std::lerp(std::log(1e-3 * sigma_p),
                                                 std::log(1e2 * sigma_p),
                                                 j / double(kGrid - 1)));
      const double n = norm(residual(ss, st));
      if (n < best_norm - 1e-15 ||
          (n < best_norm + 1e-15 && ss < best_s)) {
        best_norm = n;
        best_s = ss;
        best_t = st;
      }
    }
  }

  // 1-D Newton on ln sigma_s against the width; the width does not depend on
  // sigma_t, which makes the 2-D system triangular.
  double ls = std::log(sigma_s_from_width(t) > 0.0 ? sigma_s_from_width(t)
                                                   : best_s);
  int iterations = 0;
  for (int it = 0; it < 80; ++it) {
    ++iterations;
    const double ss = std::exp(ls);
    const double f = forward_width(t, ss) / t.width - 1.0;
    if (std::abs(f) < 1e-14) break;
    const double h = 1e-7;
    const double df = (forward_width(t, std::exp(ls + h)) -
                       forward_width(t, std::exp(ls - h))) /
                      (2.0 * h * t.width);
    if (df == 0.0) break;
    double step = -f / df;
    step = std::clamp(step, -1.0, 1.0);
    ls += step;
    if (std::abs(step) < 1e-15) break;
  }
  const double sigma_s = std::exp(ls);
  if (!(std::abs(forward_width(t, sigma_s) / t.width - 1.0) < kRelTol))
    throw NumericalError("solve_filters: no solution; " + frontier_report(t));

  // Unfiltered-trigger candidate: visibility already at its sigma_t -> inf
  // floor for this sigma_s.
  {
    const double v_inf = forward_vis(t, sigma_s, DipParams::kUnfilteredTrigger);
    if (std::abs(v_inf / t.vis - 1.0) < kRelTol)
      return {sigma_s, DipParams::kUnfilteredTrigger, iterations};
  }

  // Damped 2-D Newton on (ln sigma_s, ln sigma_t) with a numerical Jacobian.
  double lt = std::isinf(best_t) ? std::log(sigma_p) : std::log(best_t);
  ls = std::log(sigma_s);
  auto res = residual(std::exp(ls), std::exp(lt));
  for (int it = 0; it < 200 && norm(res) >= 1e-13; ++it) {
    ++iterations;
    const double h = 1e-7;
    const auto r_s = residual(std::exp(ls + h), std::exp(lt));
    const auto r_t = residual(std::exp(ls), std::exp(lt + h));
    const double a = (r_s.first - res.first) / h;   // dVr/dls
    const double b = (r_t.first - res.first) / h;   // dVr/dlt
    const double c = (r_s.second - res.second) / h; // dWr/dls
    const double d = (r_t.second - res.second) / h; // dWr/dlt
    const double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det))
      throw NumericalError("solve_filters: singular Jacobian; " +
                           frontier_report(t));
    double step_s = -(d * res.first - b * res.second) / det;
    double step_t = -(-c * res.first + a * res.second) / det;
    const double clip = std::max({1.0, std::abs(step_s), std::abs(step_t)});
    step_s /= clip;
    step_t /= clip;
    double damp = 1.0;
    for (int half = 0; half < 50; ++half) {
      const auto trial = residual(std::exp(ls + damp * step_s),
                                  std::exp(lt + damp * step_t));
      if (norm(trial) < norm(res)) {
        ls += damp * step_s;
        lt += damp * step_t;
        res = trial;
        break;
      }
      damp *= 0.5;
      if (half == 49)
        throw NumericalError("solve_filters: stalled; " + frontier_report(t));
    }
    // A trigger bandwidth pushed far above the pump means the finite-sigma_t
    // branch cannot reach the target.
    if (lt > std::log(1e8 * sigma_p))
      throw NumericalError("solve_filters: no solution; " + frontier_report(t));
  }
  if (!(norm(res) < kRelTol))
    throw NumericalError("solve_filters: no solution; " + frontier_report(t));
  return {std::exp(ls), std::exp(lt), iterations};
}

}  // namespace homlab
