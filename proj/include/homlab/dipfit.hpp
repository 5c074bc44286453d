#pragma once

#include <optional>
#include <vector>

namespace homlab {

// Weighted least-squares fit of the Gaussian dip
//   m(x) = baseline * (1 - depth * exp(-(x - center)^2 / (2 width^2))).
// Shared by the quadrature oracle and the event-level simulation so both
// report depth and width under the same convention.

struct DipFitData {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;  // per-point standard deviation; empty = unweighted
};

struct DipFitInit {
  double baseline;
  double depth;
  double center;
  double width;
};

struct DipFitResult {
  double baseline = 0.0;
  double depth = 0.0;
  double center = 0.0;
  double width = 0.0;        // r.m.s. width, always reported positive
  double residual_rms = 0.0; // unweighted r.m.s. of (y - model)
  double chi2 = 0.0;
  int iterations = 0;
};

// Levenberg-Marquardt with analytic Jacobian. Throws NumericalError with the
// residual norm when the iteration fails to converge.
DipFitResult fit_gaussian_dip(const DipFitData& data,
                              std::optional<DipFitInit> init = std::nullopt);

}  // namespace homlab
