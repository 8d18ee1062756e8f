#pragma once

// Laguerre basis e_n(x) = sqrt(n!/Gamma(n+alpha+1)) x^{alpha/2} e^{-x/2} L_n^(alpha)(x) of L^2(R_+, dx)
// and the exact matrices of the operators x^gamma d^k in it.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace affq {

struct BasisSpec {
  double alpha = 1.0;
  int n_max = 30;  ///< truncation index N; matrices are (N+1) x (N+1)

  /// Throws DomainError unless alpha > -1 and n_max >= 1. alpha > 0 is checked where it matters.
  void validate() const;
  int dim() const { return n_max + 1; }
};

double basis_function(double alpha, int n, double x);
/// e_0(x) .. e_N(x).
std::vector<double> basis_values(const BasisSpec& basis, double x);
/// e_n'(x) for n = 0..N.
std::vector<double> basis_derivatives(const BasisSpec& basis, double x);

/// <e_m | x^gamma d^k e_n>, exact by Gauss-Laguerre with weight x^{alpha+gamma-k} e^{-x}.
/// Throws DivergenceError when alpha + gamma - k <= -1.
Eigen::MatrixXd xpow_deriv_matrix(const BasisSpec& basis, double gamma, int k);

/// Matrix of Q^gamma P^k = x^gamma (-i d/dx)^k.
Eigen::MatrixXcd qp_monomial_matrix(const BasisSpec& basis, double gamma, int k);
Eigen::MatrixXcd position_matrix(const BasisSpec& basis, double beta = 1.0);
Eigen::MatrixXcd momentum_matrix(const BasisSpec& basis, int k = 1);
/// D = (QP + PQ)/2 = -i (x d/dx + 1/2).
Eigen::MatrixXcd dilation_matrix(const BasisSpec& basis);

/// <e_m | v | e_n> for a multiplication operator, by Gauss-Laguerre with n_nodes nodes
/// (0 picks 2N + 60).
Eigen::MatrixXd multiplication_matrix(const BasisSpec& basis, const std::function<double(double)>& v,
                                      int n_nodes = 0);

}  // namespace affq
