#include "affq/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <mutex>
#include <utility>

namespace affq::quad {

namespace {

struct Orthonormal {
  double ln;      // l_n(x) * 2^{-shift}
  double lnm1;    // l_{n-1}(x) * 2^{-shift}
  double log_sq;  // log sum_{k<n} l_k(x)^2
};

// Orthonormal Laguerre recurrence with rescaling to stay in range at large x.
Orthonormal orthonormal_laguerre(int n, double alpha, double x) {
  double prev = 0.0;
  double cur = std::exp(-0.5 * std::lgamma(alpha + 1.0));
  double sum_sq = 0.0;
  double log_scale = 0.0;  // all of prev, cur, sum_sq (sqrt) scaled by exp(-log_scale)
  for (int k = 0; k < n; ++k) {
    sum_sq += cur * cur;
    const double a = 2.0 * k + 1.0 + alpha - x;
    const double b = std::sqrt(k * (k + alpha));
    const double c = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    const double next = (a * cur - b * prev) / c;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      prev *= 1e-100;
      sum_sq *= 1e-200;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return {cur, prev, std::log(sum_sq) + 2.0 * log_scale};
}

std::shared_ptr<const LaguerreRule> build_rule(int n, double alpha) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(0, n - 1));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0 + alpha;
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  auto rule = std::make_shared<LaguerreRule>();
  rule->n = n;
  rule->alpha = alpha;
  rule->nodes.resize(n);
  rule->weights.resize(n);
  const double cn = std::sqrt(n * (n + alpha));
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    // Newton on l_n, using x l_n' = n l_n - sqrt(n(n+alpha)) l_{n-1}.
    for (int it = 0; it < 4; ++it) {
      const auto v = orthonormal_laguerre(n, alpha, x);
      const double deriv = (n * v.ln - cn * v.lnm1) / x;
      if (deriv == 0.0 || !std::isfinite(deriv)) break;
      const double dx = v.ln / deriv;
      if (!std::isfinite(dx)) break;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::abs(x)) break;
    }
    rule->nodes[i] = x;
    const auto v = orthonormal_laguerre(n, alpha, x);
    rule->weights[i] = std::exp(-v.log_sq);
  }
  return rule;
}

}  // namespace

std::shared_ptr<const LaguerreRule> gauss_laguerre_rule(int n, double alpha) {
  if (n < 1) throw DomainError("gauss_laguerre_rule: n must be >= 1");
  if (!(alpha > -1.0)) throw DomainError("gauss_laguerre_rule: alpha must be > -1");
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const LaguerreRule>> cache;
  const auto key = std::make_pair(n, alpha);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto rule = build_rule(n, alpha);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(rule)).first->second;
}

std::shared_ptr<const LaguerreRule> gauss_legendre_rule(int n) {
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be >= 1");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const LaguerreRule>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  // Golub-Welsch: Jacobi matrix with off-diagonal k / sqrt(4k^2 - 1).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off);
  auto rule = std::make_shared<LaguerreRule>();
  rule->n = n;
  for (int i = 0; i < n; ++i) {
    rule->nodes.push_back(es.eigenvalues()(i));
    rule->weights.push_back(2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(n, std::move(rule)).first->second;
}

Extrapolated wynn_epsilon(const std::vector<double>& partial_sums) {
  const std::size_t total = partial_sums.size();
  if (total == 0) return {0.0, kInf};
  if (total < 3) return {partial_sums.back(), total == 2 ? std::abs(partial_sums[1] - partial_sums[0]) : kInf};
  const std::size_t m = std::min<std::size_t>(total, 40);
  std::vector<double> prev(m + 1, 0.0);
  std::vector<double> cur(partial_sums.end() - static_cast<std::ptrdiff_t>(m), partial_sums.end());
  double best = cur.back();
  double best_err = std::abs(cur[m - 1] - cur[m - 2]);
  double last_even = best;
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<double> next(cur.size() - 1);
    bool broke = false;
    for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
      const double d = cur[j + 1] - cur[j];
      if (d == 0.0 || !std::isfinite(d)) {
        broke = true;
        break;
      }
      next[j] = prev[j + 1] + 1.0 / d;
    }
    if (broke) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) {
      const double est = cur.back();
      if (!std::isfinite(est)) break;
      const double err = cur.size() >= 2 ? std::abs(cur[cur.size() - 1] - cur[cur.size() - 2])
                                         : std::abs(est - last_even);
      if (err < best_err) {
        best = est;
        best_err = err;
      }
      last_even = est;
    }
    if (cur.size() < 2) break;
  }
  return {best, best_err};
}

Extrapolated richardson_to_zero(const std::vector<double>& h, const std::vector<double>& y) {
  if (h.size() != y.size() || h.empty()) throw DomainError("richardson_to_zero: size mismatch");
  // Neville tableau evaluated at 0; error is the last correction.
  std::vector<double> p = y;
  const std::size_t n = h.size();
  double last_correction = n > 1 ? std::abs(y[n - 1] - y[n - 2]) : kInf;
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      const double old = p[i];
      p[i] = (h[i - k] * p[i] - h[i] * p[i - 1]) / (h[i - k] - h[i]);
      if (i == n - 1) last_correction = std::abs(p[i] - old);
      if (i == k) break;
    }
  }
  return {p[n - 1], last_correction};
}

}  // namespace affq::quad
