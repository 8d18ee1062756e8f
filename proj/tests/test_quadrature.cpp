#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

using namespace affq;
using namespace affq::quad;
using C = std::complex<double>;

TEST_CASE("halfline examples") {
  const auto r = integrate_halfline([](double x) { return std::exp(-x); }, {});
  CHECK(std::abs(r.value - 1.0) <= 1e-12);
  const double alpha = 2.0;
  const auto g = integrate_halfline([&](double x) { return std::exp(-x) * std::pow(x, alpha - 1); }, {});
  CHECK(std::abs(g.value - 1.0) <= 1e-12);
}

TEST_CASE("bessel integral formula") {
  const double gam = 1.5, mu = 1.0, al = 2.0;
  const auto r = integrate_halfline(
      [&](double x) { return std::exp(-(gam - mu) * x) * specfun::bessel_i_scaled(al, mu * x) / x; }, {});
  const double closed = std::pow(gam / mu - std::sqrt(gam * gam / (mu * mu) - 1), al) / al;
  CHECK(std::abs(closed - 0.5 * std::pow(1.5 - std::sqrt(1.25), 2)) <= 1e-15);
  CHECK(std::abs(r.value - closed) <= 1e-8);
  CHECK(std::abs(r.value - 0.07294) <= 1e-5);
}

TEST_CASE("gauss-laguerre exactness") {
  for (double alpha : {0.0, 0.5, 2.0, 3.7}) {
    for (int n : {1, 3, 8, 20, 60}) {
      for (int deg = 0; deg <= 2 * n - 1; deg += std::max(1, (2 * n - 1) / 5)) {
        const auto r = integrate_halfline([&](double x) { return std::pow(x, deg); },
                                          {GaussLaguerre{n, alpha}, Domain{}});
        const double exact = std::exp(std::lgamma(deg + alpha + 1));
        CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
  const auto rule = gauss_laguerre_rule(150, 1.0);
  double wsum = 0.0;
  for (double w : rule->weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gauss_laguerre_rule(150, 1.0).get() == rule.get());
  CHECK_THROWS_AS(gauss_laguerre_rule(0, 1.0), DomainError);
}

TEST_CASE("adaptive and gauss-laguerre agree") {
  auto g = [](double x) { return std::cos(x) / (1 + x * x); };
  const auto gl = integrate_halfline(g, {GaussLaguerre{80, 0.5}, Domain{}});
  const auto ad = integrate_halfline([&](double x) { return std::sqrt(x) * std::exp(-x) * g(x); }, {});
  CHECK(std::abs(gl.value - ad.value) <= 1e-10 + gl.error + ad.error);
}

TEST_CASE("complex and finite domains") {
  const auto r = integrate_halfline([](double x) { return std::exp(C(-1.0, 1.0) * x); }, {});
  CHECK(std::abs(r.value - 1.0 / C(1.0, -1.0)) <= 1e-12);
  const auto s = integrate_halfline([](double x) { return std::sin(x); }, {Adaptive{}, Domain{0.0, std::numbers::pi}});
  CHECK(std::abs(s.value - 2.0) <= 1e-12);
  const auto t = integrate_interval([](double x) { return std::exp(-x * x); }, -kInf, kInf);
  CHECK(std::abs(t.value - std::sqrt(std::numbers::pi)) <= 1e-12);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(integrate_halfline([](double) { return std::nan(""); }, {}), EvaluationError);
  CHECK_THROWS_AS(integrate_halfline([](double x) { return 1.0 / x; }, {Adaptive{1e-9, 1e-12, 30}, Domain{0.0, 1.0}}),
                  AccuracyError);
  try {
    integrate_halfline([](double x) { return 1.0 / std::sqrt(x) + 1.0 / x; }, {Adaptive{1e-9, 1e-12, 20}, Domain{0.0, 1.0}});
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.best_estimate()));
  }
  CHECK_THROWS_AS(integrate_halfline([](double x) { return x; }, {Adaptive{}, Domain{2.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(integrate_halfline([](double x) { return x; }, {Adaptive{0.0, 1e-12}, Domain{0.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(integrate_halfline([](double x) { return x; }, {GaussLaguerre{0, 0.0}, Domain{}}), DomainError);
}

TEST_CASE("principal value") {
  const auto r = principal_value([](double p) { return std::exp(C(0, -p)) / p; }, 0.0, kInf, Oscillatory{1.0});
  CHECK(std::abs(r.value - C(0, -std::numbers::pi)) <= 1e-8);
  const auto z = principal_value([](double p) { return 1.0 / p; }, 0.0, 3.0, Adaptive{});
  CHECK(std::abs(z.value) <= 1e-12);
  // Shifted pole: PV int_{-1}^{3} 1/(x-1) dx = 0 and PV int_0^2 x/(x-1) dx = 2.
  const auto w = principal_value([](double x) { return x / (x - 1.0); }, 1.0, 1.0, Adaptive{});
  CHECK(std::abs(w.value - 2.0) <= 1e-9);
  // Unit-trace route for e^{-ip}: 1/2 + (i/2pi) * (-i pi) = 1.
  const C tr = 0.5 + C(0, 1) / (2 * std::numbers::pi) * r.value;
  CHECK(std::abs(tr - 1.0) <= 1e-8);
}

TEST_CASE("oscillatory") {
  const auto a = integrate_oscillatory([](double x) { return std::exp(-x * x); }, [](double) { return 0.0; }, {});
  CHECK(std::abs(a.value - std::sqrt(std::numbers::pi) / 2) <= 1e-12);
  const auto b = integrate_oscillatory([](double x) { return std::exp(-x); }, [](double x) { return x; }, {});
  CHECK(std::abs(b.value - 1.0 / C(1.0, -1.0)) <= 1e-10);
  // Slow algebraic decay needs the accelerated tail: int_0^inf e^{ix}/(1+x) dx.
  const auto c = integrate_oscillatory([](double x) { return 1.0 / (1.0 + x); }, [](double x) { return x; },
                                       {Oscillatory{1.0}, Domain{}});
  const double ci = 0.33740392290096813;  // Ci(1)
  const double si = 0.94608307036718301;   // Si(1)
  const C exact = C(-ci * std::cos(1.0) - (si - std::numbers::pi / 2) * std::sin(1.0),
                    ci * std::sin(1.0) + (std::numbers::pi / 2 - si) * std::cos(1.0));
  CHECK(std::abs(c.value - exact) <= 1e-8);
  // Finite domain with many half-periods: int_0^{50} cos(x^2) dx.
  const auto d = integrate_oscillatory([](double) { return 1.0; }, [](double x) { return x * x; },
                                       {Adaptive{}, Domain{0.0, 50.0}});
  const auto ref = integrate_halfline([](double x) { return std::cos(x * x); }, {Adaptive{1e-11, 1e-13, 100000}, Domain{0.0, 50.0}});
  CHECK(std::abs(d.value.real() - ref.value) <= 1e-8);
}

TEST_CASE("extrapolation helpers") {
  std::vector<double> sums;
  double s = 0.0;
  for (int k = 0; k < 20; ++k) {
    s += (k % 2 ? -1.0 : 1.0) / (k + 1);
    sums.push_back(s);
  }
  CHECK(std::abs(wynn_epsilon(sums).value - std::log(2.0)) <= 1e-10);
  const auto r = richardson_to_zero({0.1, 0.01, 0.001}, {1 + 0.1 + 0.01, 1 + 0.01 + 0.0001, 1 + 0.001 + 1e-6});
  CHECK(std::abs(r.value - 1.0) <= 1e-12);
}
