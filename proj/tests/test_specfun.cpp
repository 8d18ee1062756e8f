#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

using namespace affq;
using namespace affq::specfun;

namespace {

long double gen_binom(long double top, int k) {
  return std::exp(std::lgamma(top + 1.0L) - std::lgamma(top - k + 1.0L) - std::lgamma(k + 1.0L));
}

// Explicit finite sums in extended precision.
double laguerre_sum(int n, double alpha, double x) {
  long double s = 0.0L, xk = 1.0L, kfact = 1.0L;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      xk *= x;
      kfact *= k;
    }
    const long double term = gen_binom(n + alpha, n - k) * xk / kfact;
    s += (k % 2 ? -term : term);
  }
  return static_cast<double>(s);
}

double jacobi_sum(int n, double a, double b, double x) {
  long double s = 0.0L;
  for (int k = 0; k <= n; ++k)
    s += gen_binom(n + a, n - k) * gen_binom(n + b, k) * std::pow((x - 1.0L) / 2.0L, k) *
         std::pow((x + 1.0L) / 2.0L, n - k);
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("orthopoly examples") {
  CHECK(orthopoly_eval(Laguerre{0.0}, 0, 3.7) == 1.0);
  CHECK(orthopoly_eval(Laguerre{1.0}, 1, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(orthopoly_eval(Hermite{}, 1, 2.0) == 4.0);
  CHECK(orthopoly_eval(Jacobi{0.0, 1.7}, 0, -0.3) == 1.0);
  CHECK_THROWS_AS(orthopoly_eval(Laguerre{-1.0}, 2, 1.0), DomainError);
  CHECK_THROWS_AS(orthopoly_eval(Jacobi{-1.5, 0.0}, 2, 0.1), DomainError);
}

TEST_CASE("laguerre matches std::assoc_laguerre and explicit sums") {
  for (int n : {0, 1, 2, 5, 10, 40, 120, 200}) {
    for (unsigned m : {0u, 1u, 3u}) {
      for (double x : {0.1, 1.0, 7.5, 30.0, 95.0}) {
        const double ref = std::assoc_laguerre(n, m, x);
        const double v = laguerre(n, m, x);
        CHECK(v == doctest::Approx(ref).epsilon(1e-10).scale(std::abs(ref) + 1e-300));
      }
    }
  }
  for (int n : {1, 3, 8, 12}) {
    for (double alpha : {-0.5, 0.3, 2.7}) {
      for (double x : {0.2, 2.0, 9.0}) {
        CHECK(laguerre(n, alpha, x) == doctest::Approx(laguerre_sum(n, alpha, x)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("jacobi and hermite against explicit sums") {
  for (int n : {0, 1, 2, 4, 7, 10}) {
    for (double a : {0.0, 1.0, 3.5}) {
      for (double b : {0.5, 2.0}) {
        for (double x : {-0.9, -0.2, 0.4, 0.95}) {
          const double ref = jacobi_sum(n, a, b, x);
          CHECK(jacobi(n, a, b, x) == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
        }
      }
    }
  }
  const auto all = jacobi_all(6, 2.0, 1.0, 0.3);
  for (int n = 0; n <= 6; ++n) CHECK(all[n] == doctest::Approx(jacobi(n, 2.0, 1.0, 0.3)).epsilon(1e-14));
  for (int n = 0; n <= 30; ++n) {
    for (double x : {-3.0, 0.4, 2.2}) {
      const double ref = std::hermite(n, x);
      CHECK(hermite(n, x) == doctest::Approx(ref).epsilon(1e-12).scale(std::abs(ref)));
    }
  }
}

TEST_CASE("jacobi symmetry identity behind unitarity") {
  // P_m^{(n-m,a)}(X) = (m+a)! n! / ((n+a)! m!) ((X-1)/2)^{m-n} P_n^{(m-n,a)}(X), here with m >= n.
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> idx(0, 10);
  std::uniform_real_distribution<double> ux(-0.95, 0.95), ua(0.2, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    int m = idx(rng), n = idx(rng);
    if (m < n) std::swap(m, n);
    const double X = ux(rng), al = ua(rng);
    // P_m^{(n-m, al)} has a negative integer parameter; the explicit sum is its polynomial continuation.
    const double lhs = jacobi_sum(m, n - m, al, X);
    const double rhs = std::exp(std::lgamma(m + al + 1) + std::lgamma(n + 1.0) - std::lgamma(n + al + 1) -
                                std::lgamma(m + 1.0)) *
                       std::pow((X - 1.0) / 2.0, m - n) * jacobi(n, m - n, al, X);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("normalized laguerre basis is orthonormal under gauss-laguerre") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ua(0.05, 4.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = ua(rng);
    const int N = 20;
    const auto rule = quad::gauss_laguerre_rule(N + 2, alpha);
    for (int m = 0; m <= N; ++m) {
      for (int n = 0; n <= N; ++n) {
        double s = 0.0;
        for (int i = 0; i < rule->n; ++i) {
          const auto l = laguerre_normalized_all(N, alpha, rule->nodes[i]);
          s += rule->weights[i] * l[m] * l[n];
        }
        CHECK(s == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(0).scale(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("hermite functions") {
  for (int k = 0; k <= 12; ++k) {
    for (double x : {-2.0, 0.3, 1.7}) {
      const double ref = std::hermite(k, x) * std::exp(-x * x / 2) /
                         std::sqrt(std::pow(2.0, k) * std::tgamma(k + 1.0) * std::sqrt(std::numbers::pi));
      const auto v = hermite_function(k, x);
      CHECK(v.value == doctest::Approx(ref).epsilon(1e-12).scale(1e-3));
      const double h = 1e-5;
      const double fd = (hermite_function(k, x + h).value - hermite_function(k, x - h).value) / (2 * h);
      CHECK(v.derivative == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("bessel examples and std cross-check") {
  CHECK(bessel(BesselKind::I, 0.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(bessel(BesselKind::K, 0.0, 1.0) - 0.4210244382) <= 1e-9);
  CHECK(std::abs(bessel(BesselKind::I, 2.0, 1.0) - 0.1357476698) <= 1e-9);
  CHECK_THROWS_AS(bessel(BesselKind::I, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(bessel(BesselKind::K, 0.0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel(BesselKind::K, 1.0, 1.0), DomainError);
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.0, 7.5}) {
    for (double x : {1e-3, 0.1, 1.0, 5.0, 20.0, 26.0, 60.0, 200.0, 700.0}) {
      const double ref = std::cyl_bessel_i(nu, x);
      CHECK(bessel_i(nu, x) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(bessel_i_scaled(nu, x) == doctest::Approx(ref * std::exp(-x)).epsilon(1e-10));
    }
  }
  for (double x : {1e-6, 1e-3, 0.1, 0.9, 1.0, 1.1, 3.0, 10.0, 50.0, 300.0, 700.0}) {
    const double ref = std::cyl_bessel_k(0.0, x);
    CHECK(bessel_k0(x) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(bessel_k0_scaled(x) == doctest::Approx(ref * std::exp(x)).epsilon(1e-10));
  }
  CHECK(std::isfinite(bessel_i_scaled(2.0, 5000.0)));
}

TEST_CASE("bessel ODE residuals") {
  // x^2 y'' + x y' - (x^2 + nu^2) y = 0, with derivatives from the order-shift identities
  // I' = (I_{nu-1} + I_{nu+1})/2 and I'' = (I_{nu-2} + 2 I_nu + I_{nu+2})/4 (I_{-k} = I_k for integer k).
  for (double nu : {0.0, 1.0, 2.0, 2.5, 4.0}) {
    for (double x : {0.5, 2.0, 10.0, 30.0, 120.0}) {
      auto I = [&](double v) { return bessel_i_scaled(std::abs(v), x); };
      const double y = I(nu), y1 = 0.5 * (I(nu - 1) + I(nu + 1)), y2 = 0.25 * (I(nu - 2) + 2 * y + I(nu + 2));
      const double res = x * x * y2 + x * y1 - (x * x + nu * nu) * y;
      CHECK(std::abs(res) <= 1e-8 * (x * x + nu * nu) * std::abs(y));
    }
  }
  for (double x : {0.5, 2.0, 10.0}) {
    const double h = 1e-3 * x;
    auto f = [&](double s) { return bessel_k0(s); };
    const double y = f(x), y1 = (f(x + h) - f(x - h)) / (2 * h), y2 = (f(x + h) - 2 * y + f(x - h)) / (h * h);
    CHECK(std::abs(x * x * y2 + x * y1 - x * x * y) <= 1e-5 * x * x * std::abs(y));
  }
}

TEST_CASE("bessel K0 integral representation") {
  // K_0(x) = int_0^inf exp(-x cosh t) dt
  for (double x : {0.3, 1.0, 4.0}) {
    const auto r = quad::integrate_halfline([x](double t) { return std::exp(-x * std::cosh(t)); }, {});
    CHECK(bessel_k0(x) == doctest::Approx(r.value).epsilon(1e-10));
  }
}

TEST_CASE("gamma") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  CHECK(gamma_fn(-1.5) == doctest::Approx(4.0 * std::sqrt(std::numbers::pi) / 3.0).epsilon(1e-13));
  CHECK(log_gamma(200.0) == doctest::Approx(std::lgamma(200.0)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_fn(0.0), PoleError);
  CHECK_THROWS_AS(gamma_fn(-3.0), PoleError);
  CHECK_THROWS_AS(log_gamma(-2.0), PoleError);
  // Recurrence Gamma(x+1) = x Gamma(x) as a property.
  for (double x : {0.1, 1.3, 7.7, 55.5, 160.2}) CHECK(gamma_fn(x + 1) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
}
