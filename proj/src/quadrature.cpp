#include "spectral_atlas/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace atlas {
namespace {

// Golub-Welsch: nodes are the eigenvalues of the Legendre Jacobi matrix,
// weights come from the first eigenvector components.
GaussLegendre16 build_rule() {
  constexpr int n = 16;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussLegendre16 rule{};
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double v = solver.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = 2.0 * v * v;
  }
  // Symmetrize to remove eigensolver rounding.
  for (int i = 0; i < n / 2; ++i) {
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
    const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = -x;
    rule.nodes[b] = x;
    rule.weights[a] = rule.weights[b] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendre16& gauss_legendre16() {
  static const GaussLegendre16 rule = build_rule();
  return rule;
}

}  // namespace atlas
