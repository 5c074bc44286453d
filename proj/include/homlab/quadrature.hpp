#pragma once

#include <vector>

namespace homlab {

// Gauss-Hermite rule: integrates f against exp(-x^2) on the real line,
//   integral ~= sum_i weights[i] * f(nodes[i]).
// Nodes are sorted ascending and symmetric about zero.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch construction (symmetric tridiagonal eigenproblem). Supported
// up to a few hundred points; weights stay representable in double precision
// throughout that range.
QuadratureRule gauss_hermite(int n);

}  // namespace homlab
