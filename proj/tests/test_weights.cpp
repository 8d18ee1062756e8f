#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"
#include "affq/weights.hpp"

using namespace affq;

namespace {

const double pi = std::numbers::pi;
const double sqrt2pi = std::sqrt(2.0 * pi);

Weight custom(std::function<cplx(double, double)> f) {
  Weight w;
  w.label = "custom";
  w.eval = std::move(f);
  return w;
}

// e_0^(alpha) as a callable, independent of the coefficient machinery.
WaveFunction e0_function(double alpha) {
  return WaveFunction(
      [alpha](double x) { return cplx(std::pow(x, 0.5 * alpha) * std::exp(-0.5 * x) / std::sqrt(std::tgamma(alpha + 1.0))); },
      DecayClass::Exponential, 1.0, "e0");
}

}  // namespace

TEST_CASE("symmetry condition") {
  const auto grid = symmetry_sample_grid(10, 10);
  CHECK(grid.size() == 100);
  CHECK(check_symmetry(custom([](double q, double) { return cplx(1.0 / std::sqrt(q)); }), grid, 1e-15).passed);

  const auto bad = check_symmetry(custom([](double q, double) { return cplx(q); }), {GroupElement(2.0, 0.3)}, 1e-10);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_residual == doctest::Approx(1.75).epsilon(1e-14));

  std::vector<Weight> ws{builtin(AwSpec{}),
                         builtin(DiagSpec{1.0, 0, 1.0}),
                         builtin(DiagSpec{2.5, 3, 0.7}),
                         builtin(ThermalSpec{1.0, 0.0}),
                         builtin(ThermalSpec{2.0, 0.5}),
                         builtin(ThermalSpec{0.7, 0.9}),
                         builtin(AcsSpec{basis_state(BasisSpec{2.0, 3}, 0)}),
                         builtin(AcsSpec{WaveFunction(BasisSpec{1.5, 4}, Eigen::Vector<cplx, 5>(0.3, 0.0, cplx(0.5, 0.2), 0.0, 0.6))})};
  for (const auto& w : ws) {
    const auto r = check_symmetry(w, grid, 1e-10);
    INFO(w.label << " residual " << r.max_residual);
    CHECK(r.passed);
  }
}

TEST_CASE("builtin weight values") {
  CHECK(std::abs(builtin(AwSpec{})(4.0, pi) - 0.5) <= 1e-15);
  for (double a : {0.5, 1.0, 3.0}) CHECK(std::abs(builtin(DiagSpec{a, 0, 1.0})(1.0, 0.0) - 1.0) <= 1e-13);

  // t = 0: projector onto e_0, 2^{alpha+1} q^{alpha/2} / (q + 1 + 2iqp)^{alpha+1} / (2 pi)
  for (double a : {1.0, 2.3})
    for (double q : {0.4, 1.0, 3.0})
      for (double p : {-1.2, 0.0, 2.0}) {
        const cplx lit = std::pow(2.0, a + 1.0) / (2.0 * pi) * std::pow(q, 0.5 * a) / std::pow(cplx(q + 1.0, 2.0 * q * p), a + 1.0);
        CHECK(std::abs(thermal_weight_closed_form(a, 0.0, q, p) - lit) <= 1e-14);
      }

  CHECK_THROWS_AS(builtin(ThermalSpec{1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(builtin(ThermalSpec{1.0, -0.1}), DomainError);
  CHECK_THROWS_AS(builtin(DiagSpec{1.0, 0, 0.0}), DomainError);
}

TEST_CASE("thermal closed form equals the partial sums") {
  for (double a : {0.5, 1.0, 2.7})
    for (double t : {0.2, 0.5, 0.8})
      for (double q : {0.3, 1.0, 2.5, 7.0})
        for (double p : {-3.0, -0.4, 0.0, 0.9, 4.0}) {
          const cplx closed = 2.0 * pi * thermal_weight_closed_form(a, t, q, p);
          const cplx series = thermal_weight_series(a, t, q, p, 300);
          CHECK(std::abs(closed - series) <= 1e-12);
        }
}

TEST_CASE("partial Fourier transforms") {
  const auto aw = partial_fourier(builtin(AwSpec{}), 2.25, -1.5);
  REQUIRE(aw.atoms.size() == 1);
  CHECK(aw.atoms[0].location == doctest::Approx(-1.5));
  CHECK(std::abs(aw.atoms[0].amplitude - sqrt2pi / 1.5) <= 1e-14);
  CHECK(std::abs(aw.smooth) == 0.0);

  // Registered smooth forms against direct p-integration of the weight.
  const std::vector<Weight> ws{builtin(AcsSpec{basis_state(BasisSpec{2.0, 3}, 0)}), builtin(DiagSpec{1.5, 1, 1.0}),
                               builtin(ThermalSpec{2.0, 0.4})};
  for (const auto& w : ws)
    for (double q : {0.5, 1.0, 2.0})
      for (double x : {-0.3, -1.7, -4.0}) {
        INFO(w.label << " q=" << q << " x=" << x);
        CHECK(std::abs(partial_fourier(w, q, x).smooth - partial_fourier_numeric(w, q, x)) <= 1e-7);
      }

  // At u = 1 the ACS transform is sqrt(2 pi) |psi(x)|^2.
  const auto psi = e0_function(2.0);
  const auto acs = builtin(AcsSpec{psi});
  for (double x : {0.2, 1.0, 3.0}) CHECK(std::abs(partial_fourier(acs, 1.0, -x).smooth - sqrt2pi * std::norm(psi(x))) <= 1e-14);
}

TEST_CASE("Omega and d_beta constants") {
  const auto aw = compute_constants(builtin(AwSpec{}), {0.0, 1.0, 2.5, -0.7});
  for (const auto& b : aw.d_beta) CHECK(std::abs(*b.value - sqrt2pi) <= 1e-14);
  CHECK(aw.c_M == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK((aw.omega_prime_1 / aw.omega_1).real() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK((aw.omega_second_1 / aw.omega_1).real() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(aw.omega(2.0) - sqrt2pi / 2.0) <= 1e-14);

  // e_0^(2): d_beta = sqrt(2 pi) Gamma(2 - beta) / Gamma(3); divergent at beta = 2.
  for (const auto& fid : {basis_state(BasisSpec{2.0, 3}, 0), e0_function(2.0)}) {
    const auto c = compute_constants(builtin(AcsSpec{fid}), {0.0, 1.0, 0.5, -1.0, 2.0});
    for (const auto& b : c.d_beta) {
      INFO("beta=" << b.beta);
      if (b.beta == 2.0) {
        CHECK_FALSE(b.value.has_value());
        CHECK_FALSE(b.divergence.empty());
        CHECK_THROWS_AS(c.d(2.0), DivergenceError);
      } else {
        REQUIRE(b.value.has_value());
        CHECK(std::abs(*b.value - sqrt2pi * std::tgamma(2.0 - b.beta) / 2.0) <= 1e-9);
      }
    }
    CHECK(c.c_M == doctest::Approx(pi).epsilon(1e-9));
  }
}

TEST_CASE("G_beta derivatives") {
  // aw: Omega_beta(u) = sqrt(2 pi) u^{-1-beta/2}, so G(y) = sqrt(2 pi) y^{beta/2}.
  const auto d = g_beta_derivatives(builtin(AwSpec{}), 1.0, 4);
  const double expect[] = {1.0, 0.5, -0.25, 0.375, -0.9375};
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(d[k] - sqrt2pi * expect[k]) <= 1e-5);
}

TEST_CASE("trace condition") {
  const auto aw = trace_condition(builtin(AwSpec{}));
  CHECK(std::abs(aw.fourier_route - 1.0) <= 1e-6);
  CHECK(std::abs(aw.principal_route - 1.0) <= 1e-6);
  const auto aw2 = trace_condition(scaled(builtin(AwSpec{}), 2.0));
  CHECK(std::abs(aw2.fourier_route - 2.0) <= 1e-6);
  CHECK(std::abs(aw2.principal_route - 2.0) <= 1e-6);
  for (const auto& fid : {basis_state(BasisSpec{2.0, 3}, 0), basis_state(BasisSpec{1.0, 3}, 2), e0_function(3.0)}) {
    const auto tc = trace_condition(builtin(AcsSpec{fid}));
    CHECK(std::abs(tc.fourier_route - 1.0) <= 1e-6);
    CHECK(std::abs(tc.principal_route - 1.0) <= 1e-6);
  }
  const auto th = trace_condition(builtin(ThermalSpec{2.0, 0.5}));
  CHECK(std::abs(th.fourier_route - 1.0) <= 1e-6);
  CHECK(std::abs(th.principal_route - 1.0) <= 1e-6);
}

TEST_CASE("thermal constant and Bessel identities") {
  for (double a : {1.0, 2.0, 3.0})
    for (double t : {0.2, 0.5, 0.8}) {
      const auto c = thermal_constant(a, t);
      INFO("alpha=" << a << " t=" << t);
      CHECK(c.closed == doctest::Approx(2.0 * pi / a).epsilon(1e-15));
      CHECK(std::abs(c.bessel_route - c.closed) <= 1e-6);
      CHECK(std::abs(c.series_route - c.closed) <= 1e-6);
    }
  for (double a : {0.5, 1.0, 2.5})
    for (double g : {1.5, 3.0})
      for (double m : {0.4, 1.2}) CHECK(std::abs(bessel_laplace_numeric(a, g, m) - bessel_laplace_closed(a, g, m)) <= 1e-8);

  for (double a : {0.5, 1.0, 2.0})
    for (double t : {0.1, 0.3, 0.5})
      for (double x : {0.2, 1.0, 3.5})
        for (double y : {0.5, 2.0}) {
          const double closed = laguerre_poisson_closed(a, t, x, y);
          CHECK(std::abs(laguerre_poisson_partial(a, t, x, y, 80) - closed) <= 1e-6 * std::abs(closed));
        }
}
