#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "affq/error.hpp"
#include "affq/halfosc.hpp"
#include "affq/quadrature.hpp"

using namespace affq;
using namespace affq::halfosc;

TEST_CASE("analytic eigenstates") {
  const auto s1 = eigenstate_analytic(1);
  CHECK(s1.energy == 1.5);
  // phi_1 = 2 pi^{-1/4} x e^{-x^2/2}.
  for (double x : {0.1, 0.7, 1.5, 3.0})
    CHECK(s1.phi(x).real() == doctest::Approx(2.0 * std::pow(std::numbers::pi, -0.25) * x * std::exp(-0.5 * x * x)).epsilon(1e-12));
  // int_0^inf x^2 e^{-x^2} = sqrt(pi)/4, so the norm of phi_1 is 4 pi^{-1/2} sqrt(pi)/4 = 1.
  const double n1 = quad::integrate_halfline([&](double x) { return std::norm(s1.phi(x)); },
                                             {quad::Adaptive{1e-12, 1e-15, 4000}, quad::Domain{0.0, quad::kInf}})
                        .value;
  CHECK(n1 == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 1; n <= 4; ++n) {
    const auto s = eigenstate_analytic(n);
    CHECK(s.energy == 2.0 * n - 0.5);
    CHECK(s.phi(0.0) == cplx{});
    // The textbook constant leaves a half-line norm^2 of 1/4.
    CHECK(s.printed_norm2 == doctest::Approx(0.25).epsilon(1e-12));
    for (int m = 1; m <= 4; ++m) {
      const auto t = eigenstate_analytic(m);
      const double ip = quad::integrate_halfline([&](double x) { return (s.phi(x) * t.phi(x)).real(); },
                                                 {quad::Adaptive{1e-12, 1e-13, 4000}, quad::Domain{0.0, quad::kInf}})
                            .value;
      CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(eigenstate_analytic(0), DomainError);
}

TEST_CASE("finite-difference Dirichlet spectrum") {
  const auto fd = eigensolve_fd(4, 12.0, 4000);
  REQUIRE(fd.levels.size() == 4);
  CHECK(fd.warnings.empty());
  for (int n = 1; n <= 4; ++n) {
    CHECK(std::abs(fd.levels[n - 1].energy - (2.0 * n - 0.5)) <= 1e-4);
    // The Richardson estimate tracks the true error.
    CHECK(fd.levels[n - 1].richardson_error == doctest::Approx(fd.levels[n - 1].energy - (2.0 * n - 0.5)).epsilon(0.05));
  }
  CHECK(fd_state_error(fd, 1) <= 1e-4);

  // Second order: doubling the resolution divides the error by about four.
  const auto coarse = eigensolve_fd(4, 12.0, 2000);
  for (int n = 1; n <= 4; ++n) {
    const double ratio = (coarse.levels[n - 1].energy - (2.0 * n - 0.5)) / (fd.levels[n - 1].energy - (2.0 * n - 0.5));
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.02));
  }
  // Too coarse a grid is flagged.
  CHECK_FALSE(eigensolve_fd(4, 12.0, 400).warnings.empty());
  CHECK_THROWS_AS(eigensolve_fd(0, 12.0, 400), DomainError);
}

TEST_CASE("Laguerre-basis spectrum converges") {
  double prev = 1e300;
  for (int n_max : {20, 40, 60}) {
    const auto e = laguerre_spectrum(BasisSpec{2.0, n_max}, 4);
    double err = 0.0;
    for (int n = 1; n <= 4; ++n) err = std::max(err, std::abs(e[n - 1] - (2.0 * n - 0.5)));
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(prev <= 1e-3);
  // Galerkin eigenvalues are upper bounds.
  const auto e = laguerre_spectrum(BasisSpec{2.0, 20}, 4);
  for (int n = 1; n <= 4; ++n) CHECK(e[n - 1] >= 2.0 * n - 0.5 - 1e-10);
  const auto h = hamiltonian_matrix(BasisSpec{2.0, 20});
  CHECK((h.entries - h.entries.adjoint()).norm() <= 1e-10 * h.entries.norm());
}

TEST_CASE("stationary densities") {
  const auto r = stationarity(1, {0.5, 2.0}, PhaseSpaceGrid::make(0.1, 5.0, 8, -4.0, 4.0, 7));
  CHECK(r.capture_defect <= 1e-6);
  CHECK(r.max_change <= 1e-8);
}

TEST_CASE("figure bundle") {
  const auto grid = PhaseSpaceGrid::make(0.05, 6.0, 30, -6.0, 6.0, 21);
  const auto b = figure_data(2, grid);
  CHECK(b.density.size() == grid.q_nodes.size());
  CHECK(b.wigner.imag_residual <= 1e-8);
  CHECK(*std::min_element(b.wigner.values.begin(), b.wigner.values.end()) < 0.0);
  CHECK(*std::min_element(b.acs_density.values.begin(), b.acs_density.values.end()) >= 0.0);
  CHECK(b.marginals.q_density_l1 <= 1e-5);
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < grid.q_nodes.size(); ++i) {
    const double h = grid.q_nodes[i + 1] - grid.q_nodes[i];
    l1 += 0.5 * h * (std::abs(b.reconstructed_density[i] - b.density[i]) + std::abs(b.reconstructed_density[i + 1] - b.density[i + 1]));
  }
  CHECK(l1 <= 1e-5);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double rho = (b.wavelet_re.values[k] * b.wavelet_re.values[k] + b.wavelet_im.values[k] * b.wavelet_im.values[k]) /
                       (2.0 * std::numbers::pi);
    CHECK(b.acs_density.values[k] == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK(b.acs_density.kind == QuasiKind::AcsDensity);
}
