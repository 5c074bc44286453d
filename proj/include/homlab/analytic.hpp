#pragma once

#include <limits>
#include <string>

namespace homlab {

// Parameters of the two-source dip model: pump bandwidth, filter bandwidths
// of the interfering (signal) and trigger photons, and the r.m.s. Gaussian
// timing jitter between the two pair emissions. Bandwidths are intensity
// r.m.s. widths in rad/s; the jitter is in seconds. An unfiltered trigger is
// the distinguished value sigma_t = +infinity and is handled exactly, never
// as a large float fed through the general expression.
struct DipParams {
  double sigma_p = 0.0;  // pump, rad/s
  double sigma_s = 0.0;  // signal filter, rad/s
  double sigma_t = 0.0;  // trigger filter, rad/s; +inf = unfiltered
  double sigma_j = 0.0;  // pair timing jitter, s

  static constexpr double kUnfilteredTrigger =
      std::numeric_limits<double>::infinity();

  bool trigger_unfiltered() const { return std::isinf(sigma_t); }
  void validate() const;
};

// Gaussian dip C(delta) = baseline * (1 - depth * exp(-delta^2 / 2 w^2)).
struct DipModel {
  double baseline = 0.0;     // coincidence level far from zero delay
  double depth = 0.0;        // relative suppression at delta = 0, in [0, 1]
  double rms_width_s = 0.0;  // w

  void validate() const;
};

// Relative dip depth D = sigma_p / sqrt(X) with
//   X = (sigma_s^2 + sigma_p^2 + 2 sigma_p^2 sigma_j^2 sigma_s^2)
//       * (sigma_p^2 + sigma_t^2) / (sigma_p^2 + sigma_s^2 + sigma_t^2).
// D = 1 exactly when X = sigma_p^2 (no filtering penalty, no jitter).
double dip_depth(const DipParams& p);

// Two-photon visibility sigma_p / (2 sqrt(X) - sigma_p), identically equal to
// D / (2 - D). Convention: V = (Cmax - Cmin) / (Cmax + Cmin).
double visibility(const DipParams& p);

double visibility_from_depth(double depth);  // D -> D/(2-D)
double depth_from_visibility(double vis);    // V -> 2V/(1+V)

// R.m.s. dip width
//   w = sqrt(sigma_p^2 + sigma_s^2 (1 + 2 sigma_j^2 sigma_p^2))
//       / (sqrt(2) sigma_s sigma_p).
// Diverges as sigma_s -> 0 or sigma_p -> 0.
double dip_width(const DipParams& p);

// Zero-jitter, unfiltered-trigger limit sigma_p / (2 sqrt(sigma_p^2 +
// sigma_s^2) - sigma_p).
double zukowski_limit(double sigma_p, double sigma_s);

enum class Scenario { indistinguishable, orthogonal, unpolarized, thermal };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario s);

// Visibility of the delay scan for a given input state, expressed through the
// triggered dip depth D and (for thermal beams) the mean intensity ratio r:1.
//   indistinguishable: D / (2 - D)
//   orthogonal:        0
//   unpolarized:       (D/2) / (2 - D/2)
//   thermal:           D r / (2 (1 + r^2) + r (2 - D))
double scenario_visibility(Scenario s, double depth, double intensity_ratio = 1.0);

struct FilterSolution {
  double sigma_s = 0.0;
  double sigma_t = 0.0;  // +inf when the target visibility sits on the
                         // unfiltered-trigger limit
  int iterations = 0;
};

// Recovers the filter bandwidths (sigma_s, sigma_t) that reproduce a target
// (visibility, width) pair at fixed sigma_p and sigma_j. Damped 2-D Newton
// iteration on log-bandwidths, seeded by a coarse log-grid scan; ties during
// seeding break toward the smallest sigma_s. Throws NumericalError with a
// description of the reachable (V, w) frontier when the targets cannot be
// met. The returned pair reproduces the targets to 1e-9 relative.
FilterSolution solve_filters(double v_target, double w_target_s, double sigma_p,
                             double sigma_j);

}  // namespace homlab
