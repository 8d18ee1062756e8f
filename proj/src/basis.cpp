#include "affq/basis.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

namespace affq {

void BasisSpec::validate() const {
  if (!(alpha > -1.0) || !std::isfinite(alpha)) throw DomainError("BasisSpec: alpha must be > -1");
  if (n_max < 1) throw DomainError("BasisSpec: n_max must be >= 1");
}

double basis_function(double alpha, int n, double x) {
  if (n < 0) throw DomainError("basis_function: n must be >= 0");
  if (!(x > 0.0)) return (x == 0.0 && alpha == 0.0) ? specfun::laguerre_normalized_all(n, alpha, 0.0)[n] : 0.0;
  const auto l = specfun::laguerre_normalized_all(n, alpha, x);
  return std::exp(0.5 * alpha * std::log(x) - 0.5 * x) * l[n];
}

std::vector<double> basis_values(const BasisSpec& basis, double x) {
  basis.validate();
  std::vector<double> out(basis.dim(), 0.0);
  if (!(x > 0.0)) return out;
  const auto l = specfun::laguerre_normalized_all(basis.n_max, basis.alpha, x);
  const double pre = std::exp(0.5 * basis.alpha * std::log(x) - 0.5 * x);
  for (int n = 0; n <= basis.n_max; ++n) out[n] = pre * l[n];
  return out;
}

std::vector<double> basis_derivatives(const BasisSpec& basis, double x) {
  basis.validate();
  std::vector<double> out(basis.dim(), 0.0);
  if (!(x > 0.0)) return out;
  // e_n' = (alpha/(2x) - 1/2) e_n - sqrt(n) x^{alpha/2} e^{-x/2} l^{(alpha+1)}_{n-1}
  const double a = basis.alpha;
  const auto l = specfun::laguerre_normalized_all(basis.n_max, a, x);
  const auto l1 = specfun::laguerre_normalized_all(basis.n_max, a + 1.0, x);
  const double pre = std::exp(0.5 * a * std::log(x) - 0.5 * x);
  for (int n = 0; n <= basis.n_max; ++n) {
    double v = (0.5 * a / x - 0.5) * l[n];
    if (n > 0) v -= std::sqrt(static_cast<double>(n)) * l1[n - 1];
    out[n] = pre * v;
  }
  return out;
}

namespace {

// Polynomial helpers on coefficient vectors (ascending powers).
using Poly = std::vector<double>;

double poly_eval(const Poly& c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

// sigma_0 = 1, sigma_{i+1} = (a - i) sigma_i - (x/2) sigma_i + x sigma_i', so that
// d^i (x^a e^{-x/2}) = x^{a-i} e^{-x/2} sigma_i(x).
std::vector<Poly> sigma_polys(double a, int k) {
  std::vector<Poly> s(k + 1);
  s[0] = {1.0};
  for (int i = 0; i < k; ++i) {
    const Poly& p = s[i];
    Poly next(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j] += (a - i) * p[j] + static_cast<double>(j) * p[j];
      next[j + 1] += -0.5 * p[j];
    }
    s[i + 1] = next;
  }
  return s;
}

double binom(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

}  // namespace

Eigen::MatrixXd xpow_deriv_matrix(const BasisSpec& basis, double gamma, int k) {
  basis.validate();
  if (k < 0) throw DomainError("xpow_deriv_matrix: k must be >= 0");
  const double a = basis.alpha;
  const double wexp = a + gamma - k;
  if (!(wexp > -1.0))
    throw DivergenceError("matrix of x^" + std::to_string(gamma) + " d^" + std::to_string(k) +
                          " diverges for alpha=" + std::to_string(a) + " (needs alpha + gamma - k > -1)");
  const int N = basis.n_max;
  const int nodes = N + (k + 1) / 2 + 3;
  const auto rule = quad::gauss_laguerre_rule(nodes, wexp);
  const auto sig = sigma_polys(0.5 * a, k);
  // A(i, m) = sqrt(w_i) l_m(x_i);  B(i, n) = sqrt(w_i) * [reduced polynomial of d^k e_n](x_i).
  Eigen::MatrixXd A(nodes, N + 1), B(nodes, N + 1);
  std::vector<double> sqrt_fact_ratio(N + 1);
  for (int i = 0; i < nodes; ++i) {
    const double x = rule->nodes[i];
    const double sw = std::sqrt(rule->weights[i]);
    const auto l0 = specfun::laguerre_normalized_all(N, a, x);
    for (int m = 0; m <= N; ++m) A(i, m) = sw * l0[m];
    B.row(i).setZero();
    for (int ii = 0; ii <= k; ++ii) {
      const int j = k - ii;  // derivative order falling on the polynomial
      const double coef = binom(k, ii) * poly_eval(sig[ii], x) * std::pow(x, j) * ((j % 2) ? -1.0 : 1.0);
      if (coef == 0.0) continue;
      const auto lj = specfun::laguerre_normalized_all(N, a + j, x);
      for (int n = j; n <= N; ++n) {
        // N_n L_{n-j}^{(a+j)} = sqrt(n!/(n-j)!) l^{(a+j)}_{n-j}
        const double r = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n - j + 1.0)));
        B(i, n) += sw * coef * r * lj[n - j];
      }
    }
  }
  return A.transpose() * B;
}

Eigen::MatrixXcd qp_monomial_matrix(const BasisSpec& basis, double gamma, int k) {
  const std::complex<double> phase = std::pow(std::complex<double>(0.0, -1.0), k);
  return phase * xpow_deriv_matrix(basis, gamma, k).cast<std::complex<double>>();
}

Eigen::MatrixXcd position_matrix(const BasisSpec& basis, double beta) { return qp_monomial_matrix(basis, beta, 0); }

Eigen::MatrixXcd momentum_matrix(const BasisSpec& basis, int k) { return qp_monomial_matrix(basis, 0.0, k); }

Eigen::MatrixXcd dilation_matrix(const BasisSpec& basis) {
  Eigen::MatrixXd m = xpow_deriv_matrix(basis, 1.0, 1);
  m.diagonal().array() += 0.5;
  return std::complex<double>(0.0, -1.0) * m.cast<std::complex<double>>();
}

Eigen::MatrixXd multiplication_matrix(const BasisSpec& basis, const std::function<double(double)>& v, int n_nodes) {
  basis.validate();
  const int N = basis.n_max;
  if (n_nodes <= 0) n_nodes = 2 * N + 60;
  const auto rule = quad::gauss_laguerre_rule(n_nodes, basis.alpha);
  Eigen::MatrixXd A(n_nodes, N + 1);
  Eigen::VectorXd d(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double x = rule->nodes[i];
    const auto l = specfun::laguerre_normalized_all(N, basis.alpha, x);
    for (int m = 0; m <= N; ++m) A(i, m) = l[m];
    d(i) = rule->weights[i] * v(x);
    if (!std::isfinite(d(i))) throw EvaluationError("multiplication_matrix: v is not finite at x=" + std::to_string(x));
  }
  return A.transpose() * d.asDiagonal() * A;
}

}  // namespace affq
