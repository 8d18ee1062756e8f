#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "affq/basis.hpp"
#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/representation.hpp"

using namespace affq;

namespace {

// Oracle: <e_m | U(q,p) e_n> by direct quadrature of the integral form.
cplx element_by_quadrature(double alpha, int m, int n, const GroupElement& g) {
  return quad::integrate_halfline(
             [&](double x) {
               return basis_function(alpha, m, x) * cplx(std::cos(g.p() * x), std::sin(g.p() * x)) *
                      basis_function(alpha, n, x / g.q()) / std::sqrt(g.q());
             },
             {quad::Adaptive{1e-11, 1e-14, 8000}, quad::Domain{}})
      .value;
}

double pi = std::numbers::pi;

}  // namespace

TEST_CASE("basis orthonormality and matrices") {
  const BasisSpec b{2.5, 12};
  const Eigen::MatrixXd id = xpow_deriv_matrix(b, 0.0, 0);
  CHECK((id - Eigen::MatrixXd::Identity(13, 13)).norm() <= 1e-12);
  // Q is tridiagonal with known entries: <e_n|x e_n> = 2n + alpha + 1, <e_{n+1}|x e_n> = -sqrt((n+1)(n+1+alpha)).
  const Eigen::MatrixXd q = xpow_deriv_matrix(b, 1.0, 0);
  for (int n = 0; n < 12; ++n) {
    CHECK(q(n, n) == doctest::Approx(2 * n + 3.5).epsilon(1e-12));
    CHECK(q(n + 1, n) == doctest::Approx(-std::sqrt((n + 1) * (n + 3.5))).epsilon(1e-12));
  }
  // Derivative matrices against quadrature with basis_derivatives.
  const auto d1 = xpow_deriv_matrix(b, 0.0, 1);
  const auto d2 = xpow_deriv_matrix(b, 0.0, 2);
  const auto xinv = xpow_deriv_matrix(b, -1.0, 0);
  for (auto [m, n] : std::vector<std::pair<int, int>>{{0, 0}, {1, 3}, {4, 2}, {7, 7}, {11, 5}}) {
    auto r = quad::integrate_halfline(
        [&](double x) { return basis_values(b, x)[m] * basis_derivatives(b, x)[n]; }, {});
    CHECK(d1(m, n) == doctest::Approx(r.value).epsilon(1e-9).scale(1.0));
    // <e_m|e_n''> = -<e_m'|e_n'> (boundary terms vanish for alpha > 1)
    auto r2 = quad::integrate_halfline(
        [&](double x) { return -basis_derivatives(b, x)[m] * basis_derivatives(b, x)[n]; }, {});
    CHECK(d2(m, n) == doctest::Approx(r2.value).epsilon(1e-9).scale(1.0));
    auto r3 = quad::integrate_halfline(
        [&](double x) { return basis_values(b, x)[m] * basis_values(b, x)[n] / x; }, {});
    CHECK(xinv(m, n) == doctest::Approx(r3.value).epsilon(1e-9).scale(1.0));
  }
  // P and D are hermitian.
  const auto P = momentum_matrix(b);
  CHECK((P - P.adjoint()).norm() <= 1e-11);
  const auto D = dilation_matrix(b);
  CHECK((D - D.adjoint()).norm() <= 1e-10);
  CHECK_THROWS_AS(xpow_deriv_matrix(BasisSpec{0.5, 4}, -2.0, 0), DivergenceError);
  CHECK_THROWS_AS(BasisSpec({-1.0, 3}).validate(), DomainError);
  CHECK_THROWS_AS(BasisSpec({1.0, 0}).validate(), DomainError);
  // Multiplication matrix reproduces the exact power.
  const auto mq = multiplication_matrix(b, [](double x) { return x * x; });
  CHECK((mq - xpow_deriv_matrix(b, 2.0, 0)).norm() <= 1e-9);
}

TEST_CASE("matrix element examples") {
  for (double al : {0.5, 1.0, 2.0}) {
    const BasisSpec b{al, 5};
    CHECK(std::abs(matrix_element(b, 0, 0, identity()) - 1.0) <= 1e-15);
    const GroupElement g(1.6, 0.3);
    const cplx expect = std::pow(2.0, al + 1) * std::pow(g.q(), (al + 1) / 2) /
                        std::pow(cplx(g.q() + 1, -2 * g.q() * g.p()), al + 1);
    CHECK(std::abs(matrix_element(b, 0, 0, g) - expect) <= 1e-14);
  }
  CHECK(matrix_element(BasisSpec{1.0, 3}, 0, 0, GroupElement(2, 0)).real() == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("matrix elements agree with the integral form") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> idx(0, 9);
  std::uniform_real_distribution<double> uq(0.3, 3.0), up(-1.5, 1.5), ua(0.2, 3.0);
  for (int i = 0; i < 30; ++i) {
    const double al = ua(rng);
    const int m = idx(rng), n = idx(rng);
    const GroupElement g(uq(rng), up(rng));
    CHECK(std::abs(matrix_element(BasisSpec{al, 10}, m, n, g) - element_by_quadrature(al, m, n, g)) <= 1e-10);
  }
}

TEST_CASE("unitarity identity and matrix_u") {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> idx(0, 25);
  std::uniform_real_distribution<double> uq(0.1, 10.0), up(-3, 3);
  for (int i = 0; i < 50; ++i) {
    const BasisSpec b{1.0 + i % 3, 30};
    const int m = idx(rng), n = idx(rng);
    const GroupElement g(uq(rng), up(rng));
    CHECK(std::abs(matrix_element(b, m, n, inverse(g)) - std::conj(matrix_element(b, n, m, g))) <= 1e-10);
  }
  const BasisSpec b{2.0, 20};
  CHECK((matrix_u(b, identity()).entries - Eigen::MatrixXcd::Identity(21, 21)).norm() <= 1e-13);
  const auto u = matrix_u(b, GroupElement(1.8, 0.4));
  for (int c = 0; c < 21; ++c) CHECK(u.entries.col(c).norm() <= 1.0 + 1e-12);
  CHECK(u.truncation_estimate > 0.0);
  // U(g) U(g^{-1}) -> I as N grows.
  double prev = 1e9;
  for (int N : {10, 20, 40, 80}) {
    const BasisSpec bn{2.0, N};
    const GroupElement g(1.3, 0.2);
    const Eigen::MatrixXcd prod = matrix_u(bn, g).entries * matrix_u(bn, inverse(g)).entries;
    const int k = N / 2;  // compare the upper-left block, away from the truncation border
    const double res = (prod.topLeftCorner(k, k) - Eigen::MatrixXcd::Identity(k, k)).norm();
    CHECK(res < prev);
    prev = res;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("homomorphism error decreases with N") {
  // Leading 10 x 10 block: the border rows of a truncated product carry O(1) error by construction.
  const GroupElement g1(1.2, 0.25), g2(0.85, -0.2);
  double prev = 1e9;
  for (int N = 10; N <= 40; N += 5) {
    const BasisSpec b{2.0, N};
    const Eigen::MatrixXcd r = matrix_u(b, g1).entries * matrix_u(b, g2).entries - matrix_u(b, compose(g1, g2)).entries;
    const double res = r.topLeftCorner(10, 10).norm();
    CHECK((res < prev || res < 1e-13));
    prev = res;
  }
  CHECK(prev <= 1e-12);
}

TEST_CASE("trace") {
  const BasisSpec b0{0.0, 30};
  const auto r = trace_u(b0, GroupElement(4.0, 0.7));
  CHECK(std::abs(r.value - 2.0 / 3.0) <= 1e-4);
  CHECK(std::abs(trace_u(b0, GroupElement(2.0, 0.0)).value - std::sqrt(2.0)) <= 1e-4);
  for (double q : {0.5, 2.0, 4.0}) {
    const cplx a = trace_u(b0, GroupElement(q, 0.0)).value, c = trace_u(b0, GroupElement(q, 1.3)).value;
    CHECK(std::abs(a - c) <= 1e-4);
    CHECK(std::abs(a - std::sqrt(q) / std::abs(q - 1)) <= 1e-4);
  }
  // General basis parameter: Abel sum follows trace_u_closed_form.
  for (double al : {1.0, 2.0}) {
    for (double q : {0.5, 2.0, 4.0}) {
      for (double p : {-0.6, 0.9}) {
        const auto t = trace_u(BasisSpec{al, 30}, GroupElement(q, p));
        CHECK(std::abs(t.value - trace_u_closed_form(q, al)) <= 1e-4);
      }
    }
  }
  CHECK(trace_u_closed_form(2.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(trace_u(b0, GroupElement(1.0, 0.3)), DivergenceError);
  // Direct partial sums exist but are only a cross-check.
  const auto d = trace_u(BasisSpec{0.0, 400}, GroupElement(4.0, 0.0), Summation::Direct);
  CHECK(std::isfinite(d.value.real()));
}

TEST_CASE("wave functions, apply_u and acs") {
  const BasisSpec b{2.0, 6};
  const auto e0 = basis_state(b, 0);
  CHECK(e0.norm() == doctest::Approx(1.0));
  CHECK(std::abs(e0(1.5) - 1.5 * std::exp(-0.75) / std::sqrt(2.0)) <= 1e-14);
  WaveFunction psi([](double x) { return cplx(x * std::exp(-x), 0.3 * x * x * std::exp(-1.5 * x)); });
  const auto same = apply_u(identity(), psi);
  for (double x : {0.3, 1.0, 4.0}) CHECK(std::abs(same(x) - psi(x)) <= 1e-15);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uq(0.2, 5.0), up(-3, 3);
  for (int i = 0; i < 5; ++i) {
    const GroupElement g1(uq(rng), up(rng)), g2(uq(rng), up(rng));
    CHECK(apply_u(g1, psi).norm() == doctest::Approx(psi.norm()).epsilon(1e-8));
    const auto a = apply_u(g1, apply_u(g2, psi)), c = apply_u(compose(g1, g2), psi);
    for (double x : {0.1, 0.9, 3.3}) CHECK(std::abs(a(x) - c(x)) <= 1e-13);
  }
  // <e_m | U e_n> through apply_u and inner_product matches matrix_element.
  const GroupElement g(1.4, -0.6);
  const auto ue1 = apply_u(g, basis_state(b, 1));
  CHECK(std::abs(inner_product(basis_state(b, 3), ue1) - matrix_element(b, 3, 1, g)) <= 1e-9);
  // Duflo-Moore.
  const auto c1 = duflo_moore_apply(1.0, e0);
  CHECK(c1.norm() * c1.norm() == doctest::Approx(pi).epsilon(1e-9));
  const auto back = duflo_moore_apply(-1.0, c1);
  for (double x : {0.2, 2.0, 7.0}) CHECK(std::abs(back(x) - e0(x)) <= 1e-13);
  for (double x : {0.2, 2.0}) CHECK(std::abs(duflo_moore_apply(0.0, e0)(x) - e0(x)) == 0.0);
  CHECK_THROWS_AS(duflo_moore_apply(1.0, basis_state(BasisSpec{0.0, 3}, 0)), AdmissibilityError);
  CHECK(admissibility_constant(e0) == doctest::Approx(0.5).epsilon(1e-12));
  // ACS
  const auto acs = make_acs(g, e0);
  CHECK(acs.norm() == doctest::Approx(1.0).epsilon(1e-8));
  const auto at_id = make_acs(identity(), e0);
  CHECK(std::abs(at_id(1.0) - e0(1.0)) <= 1e-15);
  CHECK_THROWS_AS(make_acs(g, basis_state(BasisSpec{0.0, 3}, 1)), AdmissibilityError);
}

TEST_CASE("orthogonality relations") {
  // int conj(U_mn) U_m'n' dq dp = 2 pi delta_mm' <e_n | Q^{-1} e_n'>
  const BasisSpec b{2.0, 4};
  const Eigen::MatrixXd xinv = xpow_deriv_matrix(b, -1.0, 0);
  auto integral = [&](int m, int n, int m2, int n2) {
    auto inner = [&](double q) {
      return quad::integrate_interval(
                 [&](double p) {
                   const GroupElement g(q, p);
                   return std::conj(matrix_element(b, m, n, g)) * matrix_element(b, m2, n2, g);
                 },
                 -quad::kInf, quad::kInf, {1e-8, 1e-12})
          .value;
    };
    return quad::integrate_halfline(inner, {quad::Adaptive{1e-7, 1e-11}, quad::Domain{}}).value;
  };
  for (auto [m, n, m2, n2] : std::vector<std::array<int, 4>>{{0, 0, 0, 0}, {1, 0, 1, 2}, {0, 1, 1, 1}, {2, 1, 2, 1}}) {
    const cplx v = integral(m, n, m2, n2);
    const double expect = (m == m2) ? 2 * pi * xinv(n, n2) : 0.0;
    CHECK(std::abs(v - expect) <= 1e-4 * std::max(1.0, std::abs(expect)));
  }
}
