#include "affq/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "affq/error.hpp"

namespace affq::specfun {

namespace {

void check_index(int n) {
  if (n < 0) throw DomainError("polynomial degree must be non-negative, got " + std::to_string(n));
}

void check_param(double v, const char* name) {
  if (!(v > -1.0) || !std::isfinite(v))
    throw DomainError(std::string("polynomial parameter ") + name + " must be > -1");
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

}  // namespace

double laguerre(int n, double alpha, double x) {
  check_index(n);
  check_param(alpha, "alpha");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> jacobi_all(int n_max, double a, double b, double x) {
  check_index(n_max);
  check_param(a, "a");
  check_param(b, "b");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  out[0] = 1.0;
  if (n_max == 0) return out;
  out[1] = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
  const double a2b2 = a * a - b * b;
  for (int n = 2; n <= n_max; ++n) {
    const double s = 2.0 * n + a + b;
    const double c1 = 2.0 * n * (n + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a2b2);
    const double c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
    out[n] = (c2 * out[n - 1] - c3 * out[n - 2]) / c1;
  }
  return out;
}

double jacobi(int n, double a, double b, double x) { return jacobi_all(n, a, b, x).back(); }

double hermite(int n, double x) {
  check_index(n);
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double orthopoly_eval(const PolyFamily& family, int n, double x) {
  if (!std::isfinite(x)) throw DomainError("orthopoly_eval: x must be finite");
  struct Visitor {
    int n;
    double x;
    double operator()(const Laguerre& f) const { return laguerre(n, f.alpha, x); }
    double operator()(const Jacobi& f) const { return jacobi(n, f.a, f.b, x); }
    double operator()(const Hermite&) const { return hermite(n, x); }
  };
  return std::visit(Visitor{n, x}, family);
}

std::vector<double> laguerre_normalized_all(int n_max, double alpha, double x) {
  check_index(n_max);
  check_param(alpha, "alpha");
  std::vector<double> l(static_cast<std::size_t>(n_max) + 1);
  l[0] = std::exp(-0.5 * std::lgamma(alpha + 1.0));
  if (n_max == 0) return l;
  l[1] = (1.0 + alpha - x) * l[0] / std::sqrt(1.0 + alpha);
  for (int k = 1; k < n_max; ++k) {
    l[k + 1] = ((2.0 * k + 1.0 + alpha - x) * l[k] - std::sqrt(k * (k + alpha)) * l[k - 1]) /
               std::sqrt((k + 1.0) * (k + 1.0 + alpha));
  }
  return l;
}

HermiteFunctionValue hermite_function(int k, double x) {
  check_index(k);
  const double p0 = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
  double prev = 0.0;  // psi_{-1}
  double cur = p0;
  for (int j = 0; j < k; ++j) {
    const double next = std::sqrt(2.0 / (j + 1.0)) * x * cur - std::sqrt(j / (j + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  // psi_k' = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}, equivalently -x psi_k + sqrt(2k) psi_{k-1}
  const double deriv = -x * cur + std::sqrt(2.0 * k) * prev;
  return {cur, deriv};
}

// ---------------------------------------------------------------------------
// Bessel functions

namespace {

// e^{-x} I_nu(x) by the ascending series; all terms positive.
double bessel_i_scaled_series(double nu, double x) {
  const double y = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 10000; ++k) {
    term *= y / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  const double log_pref = nu * std::log(0.5 * x) - x - std::lgamma(nu + 1.0);
  return std::exp(log_pref) * sum;
}

// Hankel asymptotic expansion, truncated at the smallest term.
double bessel_i_scaled_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) > std::abs(last)) break;
    sum += term;
    last = term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i_scaled(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel I: x must be > 0");
  if (!(nu >= 0.0)) throw DomainError("bessel I: order must be >= 0");
  if (x <= 25.0 + nu * nu) return bessel_i_scaled_series(nu, x);
  return bessel_i_scaled_asymptotic(nu, x);
}

double bessel_k0_scaled(double x) {
  if (!(x > 0.0)) throw DomainError("bessel K: x must be > 0");
  if (x <= 1.0) {
    // K0 = -(ln(x/2) + gamma) I0 + sum_{k>=1} (x^2/4)^k/(k!)^2 H_k
    const double y = 0.25 * x * x;
    double term = 1.0;
    double i0 = 1.0;
    double harmonic = 0.0;
    double tail = 0.0;
    for (int k = 1; k < 100; ++k) {
      term *= y / (static_cast<double>(k) * k);
      harmonic += 1.0 / k;
      i0 += term;
      tail += term * harmonic;
      if (term < 1e-18) break;
    }
    const double k0 = -(std::log(0.5 * x) + std::numbers::egamma) * i0 + tail;
    return std::exp(x) * k0;
  }
  // e^x K0(x) = int_0^inf exp(-x (cosh t - 1)) dt; the trapezoid rule converges geometrically
  // once h resolves the peak width 1/sqrt(x).
  const double h = std::min(0.125, 0.5 / std::sqrt(x));
  double sum = 0.5;
  for (int k = 1; k < 100000; ++k) {
    const double t = k * h;
    const double v = std::exp(-x * (std::cosh(t) - 1.0));
    sum += v;
    if (v < 1e-18 * sum) break;
  }
  return h * sum;
}

double bessel_i(double nu, double x) { return bessel_i_scaled(nu, x) * std::exp(x); }

double bessel_k0(double x) { return bessel_k0_scaled(x) * std::exp(-x); }

double bessel(BesselKind kind, double order, double x) {
  if (kind == BesselKind::I) return bessel_i(order, x);
  if (order != 0.0) throw DomainError("bessel K: only order 0 is supported");
  return bessel_k0(x);
}

// ---------------------------------------------------------------------------

double gamma_fn(double x) {
  if (is_nonpositive_integer(x)) throw PoleError("gamma: pole at " + std::to_string(x));
  return std::tgamma(x);
}

double log_gamma(double x) {
  if (is_nonpositive_integer(x)) throw PoleError("log_gamma: pole at " + std::to_string(x));
  return std::lgamma(x);
}

}  // namespace affq::specfun
