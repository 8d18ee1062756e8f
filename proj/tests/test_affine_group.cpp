#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "affq/affine_group.hpp"
#include "affq/error.hpp"
#include "affq/quadrature.hpp"

using namespace affq;

TEST_CASE("compose and inverse examples") {
  const GroupElement g0(3.0, 4.0);
  CHECK(compose(identity(), g0) == g0);
  CHECK(compose(GroupElement(2, 1), GroupElement(3, 4)) == GroupElement(6, 3));
  const GroupElement g(5.0, -2.0);
  const auto e = compose(g, inverse(g));
  CHECK(e.q() == doctest::Approx(1.0));
  CHECK(std::abs(e.p()) <= 1e-15);
  CHECK(inverse(identity()) == identity());
  CHECK(inverse(GroupElement(2, 3)) == GroupElement(0.5, -6));
  const GroupElement h(0.37, 1.9);
  CHECK(inverse(inverse(h)).q() == doctest::Approx(h.q()).epsilon(1e-15));
  CHECK(inverse(inverse(h)).p() == doctest::Approx(h.p()).epsilon(1e-15));
  CHECK_THROWS_AS(GroupElement(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(GroupElement(1.0, NAN), DomainError);
}

TEST_CASE("associativity") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uq(0.1, 10.0), up(-5, 5);
  for (int i = 0; i < 200; ++i) {
    const GroupElement a(uq(rng), up(rng)), b(uq(rng), up(rng)), c(uq(rng), up(rng));
    const auto l = compose(compose(a, b), c), r = compose(a, compose(b, c));
    CHECK(l.q() == doctest::Approx(r.q()).epsilon(1e-14));
    CHECK(l.p() == doctest::Approx(r.p()).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("left translation") {
  PhaseSpaceFn f = [](double q, double p) { return std::complex<double>(q * q + p, q * p); };
  const auto same = left_translate(identity(), f);
  CHECK(same(1.3, -0.2) == f(1.3, -0.2));
  const auto half = left_translate(GroupElement(2, 0), [](double q, double) { return std::complex<double>(q); });
  CHECK(half(5.0, 1.0).real() == doctest::Approx(2.5));
  // Acting with g0 g1 equals acting with g1 then g0.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uq(0.2, 4.0), up(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const GroupElement g0(uq(rng), up(rng)), g1(uq(rng), up(rng));
    const double q = uq(rng), p = up(rng);
    const auto lhs = left_translate(compose(g0, g1), f)(q, p);
    const auto rhs = left_translate(g0, left_translate(g1, f))(q, p);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("left invariance of dq dp") {
  // f(q,p) = exp(-(ln q)^2 - p^2): smooth and rapidly decaying on the half-plane.
  auto f = [](double q, double p) { return std::exp(-std::pow(std::log(q), 2) - p * p); };
  auto integral = [&](const GroupElement& g0) {
    return quad::integrate_halfline(
               [&](double q) {
                 return quad::integrate_interval(
                            [&](double p) {
                              const auto g = compose(g0, GroupElement(q, p));
                              return f(g.q(), g.p());
                            },
                            -quad::kInf, quad::kInf, {1e-11, 1e-14})
                     .value;
               },
               {quad::Adaptive{1e-10, 1e-13}, quad::Domain{0.0, quad::kInf}})
        .value;
  };
  const double base = integral(identity());
  for (const GroupElement g0 : {GroupElement(2.0, 0.5), GroupElement(0.4, -1.0)}) {
    CHECK(integral(g0) == doctest::Approx(base).epsilon(1e-8));
  }
}
