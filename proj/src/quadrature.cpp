#include "homlab/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "homlab/errors.hpp"

namespace homlab {

QuadratureRule gauss_hermite(int n) {
  if (n < 1 || n > 512)
    throw ValidationError("gauss_hermite: order must lie in [1, 512]");

  // Jacobi matrix of the (physicists') Hermite polynomials: zero diagonal,
  // off-diagonal beta_k = sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw NumericalError("gauss_hermite: eigen decomposition failed");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(std::numbers::pi);  // integral of exp(-x^2)
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  // Symmetrize against eigensolver rounding: average the +/- node pairs.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace homlab
