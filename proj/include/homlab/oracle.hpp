#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "homlab/analytic.hpp"
#include "homlab/units.hpp"

namespace homlab {

// Two-photon joint spectral amplitude of one heralded SPDC pair:
//   f(w_s, w_t) = pump_envelope(w_s + w_t - w_p0) * g_S(w_s) * g_T(w_t)
// with Gaussian factors whose intensity r.m.s. widths are the stored
// bandwidths. Phase matching is taken as flat over the filter passbands, so
// the pump envelope and the filters are the whole amplitude. An absent
// trigger filter means the trigger photon is detected unfiltered.
struct JointSpectralAmplitude {
  SpectralGaussian pump;
  SpectralGaussian signal_filter;
  std::optional<SpectralGaussian> trigger_filter;

  void validate() const;
};

// Degenerate collinear chain: photons centred at twice the pump wavelength.
JointSpectralAmplitude jsa_from_dip_params(const DipParams& p,
                                           double pump_center_nm = 394.25);

struct OracleSettings {
  int quadrature_order = 48;  // Gauss-Hermite points per spectral axis (>= 16)
  int jitter_nodes = 16;      // Gauss-Hermite points for the jitter average (>= 8)
  std::vector<double> delay_grid_s;  // empty: auto grid over +/- 4.5 widths
  double convergence_rel_tol = 1e-6;
  // Scale of the exchange term; 1 = indistinguishable photons, 0 = fully
  // distinguishable (e.g. orthogonally polarized inputs).
  double exchange_overlap = 1.0;

  void validate() const;
};

// Coincidence probability behind the 50:50 beam splitter for heralded pairs
// from two sources at relative signal delay `delay_s`:
//   P = 1/2 [1 - Re I(delay) / (N_a N_b)],
//   I = integral f_a(w_s, w_t) f_a*(w_s', w_t) f_b(w_s', w_t')
//                f_b*(w_s, w_t') exp(i (w_s - w_s') delay) dw^4,
// evaluated by tensor-product Gauss-Hermite quadrature. The result is checked
// against the doubled order; disagreement beyond the settings tolerance
// raises NumericalError.
double coincidence_probability(const JointSpectralAmplitude& jsa_a,
                               const JointSpectralAmplitude& jsa_b,
                               double delay_s, const OracleSettings& settings);

// Gaussian-weighted average of a delay curve over the pair-time offset,
// evaluated at Gauss-Hermite nodes. The callable form samples the curve
// exactly where needed.
std::vector<double> jitter_average(const std::function<double(double)>& curve,
                                   const std::vector<double>& delays_s,
                                   double sigma_j, int nodes);

// Grid form: the input curve is interpolated (cubic Hermite) at the shifted
// nodes. The grid must cover every requested delay shifted by the full node
// span, otherwise a coverage ValidationError is raised.
std::vector<double> jitter_average(const std::vector<double>& grid_delays_s,
                                   const std::vector<double>& grid_values,
                                   const std::vector<double>& out_delays_s,
                                   double sigma_j, int nodes);

struct OracleDipResult {
  DipModel model;            // fitted baseline, depth, r.m.s. width
  double visibility = 0.0;   // depth/(2-depth)
  double center_s = 0.0;
  double residual_rms = 0.0;
  double order_doubling_change = 0.0;  // |P_2n(0) - P_n(0)|
  std::vector<double> delays_s;
  std::vector<double> probabilities;
};

// Full first-principles pipeline: build both sources from the dip parameters,
// sweep the delay, average over the timing jitter, and fit the Gaussian dip
// with the shared fitting routine. The fit residual must stay below 1e-4 of
// the baseline.
OracleDipResult oracle_dip(const DipParams& params, const OracleSettings& settings);

}  // namespace homlab
