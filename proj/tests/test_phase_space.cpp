#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "affq/error.hpp"
#include "affq/phase_space.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

using namespace affq;

namespace {

// First odd Hermite function on the half-line, unit norm there.
WaveFunction half_osc_ground() {
  return WaveFunction([](double x) { return cplx(std::sqrt(2.0) * specfun::hermite_function(1, x).value); },
                      DecayClass::Gaussian, 1.0, "phi1")
      .with_real_flag(true);
}

WaveFunction e0(double alpha) { return basis_state(BasisSpec{alpha, 3}, 0); }

// (1/2 pi c_{-1}) int int |<q,p|phi>|^2 dq dp by nested adaptive quadrature.
double density_mass(const WaveFunction& phi, const WaveFunction& fid) {
  auto in = [&](double q) {
    if (!(q > 0.0)) return 0.0;
    auto f = [&](double p) { return acs_density(phi, fid, {q, p}); };
    return quad::integrate_interval(f, -quad::kInf, quad::kInf, quad::Adaptive{1e-9, 1e-13, 4000}).value;
  };
  return quad::integrate_halfline(in, {quad::Adaptive{1e-8, 1e-12, 4000}, quad::Domain{0.0, quad::kInf}}).value;
}

}  // namespace

TEST_CASE("grids validate their nodes") {
  const auto g = PhaseSpaceGrid::standard();
  CHECK(g.q_nodes.size() == 120);
  CHECK(g.p_nodes.size() == 160);
  CHECK(g.q_nodes.front() == doctest::Approx(0.05));
  CHECK(g.q_nodes.back() == doctest::Approx(8.0));
  CHECK(g.q_nodes[1] / g.q_nodes[0] == doctest::Approx(g.q_nodes[60] / g.q_nodes[59]));
  CHECK_THROWS_AS(PhaseSpaceGrid::make(0.0, 1.0, 4, -1.0, 1.0, 4), DomainError);
  PhaseSpaceGrid bad{{1.0, 0.5}, {0.0}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("affine Wigner function of the half-oscillator ground state") {
  const auto phi = half_osc_ground();
  const auto grid = PhaseSpaceGrid::make(0.1, 4.0, 12, -5.0, 5.0, 11);
  const auto w = wigner_aw(phi, grid);
  CHECK(w.kind == QuasiKind::WignerAw);
  CHECK(w.values.size() == grid.size());
  CHECK(w.imag_residual <= 1e-8);
  // Real phi: AW(q, -p) = AW(q, p).
  for (std::size_t i = 0; i < grid.q_nodes.size(); ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(w.at(i, j) - w.at(i, 10 - j)) <= 1e-9);
  // At p = 0 the integrand is |phi(q e^u)|-weighted and positive for this state.
  CHECK(w.at(3, 5) > 0.0);

  // Marginals at single nodes.
  for (double q : {0.3, 1.0, 2.2}) CHECK(std::abs(wigner_p_marginal(phi, q) - std::norm(phi(q))) <= 1e-7);
  for (double p : {0.0, 1.5}) {
    CHECK(std::abs(wigner_q_marginal(phi, p) - std::norm(momentum_wavefunction(phi, p))) <= 1e-7);
  }
}

TEST_CASE("Wigner marginals on a grid and total mass") {
  const auto phi = half_osc_ground();
  const auto rep = wigner_marginals(phi, PhaseSpaceGrid::make(0.05, 6.0, 40, -6.0, 6.0, 25));
  CHECK(rep.q_density_l1 <= 1e-5);
  CHECK(rep.p_density_l1 <= 1e-5);
  CHECK(rep.total_mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("momentum wavefunction has unit norm") {
  const auto phi = half_osc_ground();
  auto f = [&](double p) { return std::norm(momentum_wavefunction(phi, p)); };
  const double n = quad::integrate_interval(f, -quad::kInf, quad::kInf, quad::Adaptive{1e-8, 1e-12, 4000}).value;
  CHECK(n == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("wavelet transform: normalization, bound and unit mass") {
  const auto fid = e0(2.0);
  CHECK(std::abs(acs_symbol(fid, fid, {1.0, 0.0}) - 1.0) <= 1e-12);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lq(-2.0, 2.0), up(-5.0, 5.0);
  const auto phi = basis_state(BasisSpec{2.0, 5}, 3);
  for (int k = 0; k < 20; ++k) {
    const GroupElement g{std::exp(lq(rng)), up(rng)};
    CHECK(std::abs(acs_symbol(phi, fid, g)) <= 1.0 + 1e-12);
    CHECK(acs_density(phi, fid, g) >= 0.0);
  }
  CHECK(density_mass(phi, fid) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("wavelet transform: coefficient route matches quadrature route") {
  const auto fid = e0(1.0);
  const auto phi = half_osc_ground();
  const auto c = project(phi, BasisSpec{1.0, 60});
  const auto phi_c = WaveFunction(BasisSpec{1.0, 60}, c, "phi1 projected");
  // Cauchy-Schwarz: the routes differ by at most the norm of the dropped tail.
  const double tail = std::sqrt(std::max(0.0, 1.0 - c.squaredNorm()));
  CHECK(tail <= 1e-3);
  for (const GroupElement g : {GroupElement{0.7, 0.3}, GroupElement{1.8, -2.0}}) {
    CHECK(std::abs(acs_symbol(phi, fid, g) - acs_symbol(phi_c, fid, g)) <= tail + 1e-8);
  }
}

TEST_CASE("aw lower symbols: K0 convolution") {
  const auto aw = builtin(AwSpec{});
  const Observable p1{MomentumPower{1}, "p"};
  const Observable p2{MomentumPower{2}, "p^2"};
  for (const GroupElement g : {GroupElement{0.5, 1.3}, GroupElement{2.0, -0.7}, GroupElement{1.0, 0.0}}) {
    const double q = g.q(), p = g.p();
    CHECK(lower_symbol(aw, p1, g) == doctest::Approx(p).epsilon(1e-12));
    CHECK(aw_k0_convolution([](double, double s) { return s; }, q, p) == doctest::Approx(p).epsilon(1e-9));
    // No round trip: the K0 smoothing adds 1/(4 q^2) to p^2.
    const double p2c = lower_symbol(aw, p2, g);
    CHECK(p2c - p * p == doctest::Approx(0.25 / (q * q)).epsilon(1e-12));
    CHECK(aw_k0_convolution([](double, double s) { return s * s; }, q, p) == doctest::Approx(p2c).epsilon(1e-9));
    for (double beta : {-1.0, 0.5, 2.0}) {
      const Observable u{PositionFn::q_power(beta), "q^b"};
      CHECK(lower_symbol(aw, u, g) == std::pow(q, beta));
    }
  }
}

TEST_CASE("aw lower symbol of p^2 by the trace formula") {
  const auto aw = builtin(AwSpec{});
  const Observable p2{MomentumPower{2}, "p^2"};
  for (const GroupElement g : {GroupElement{0.5, 1.3}, GroupElement{2.0, -0.7}}) {
    CHECK(std::abs(lower_symbol_trace(aw, p2, g) - (g.p() * g.p() + 0.25 / (g.q() * g.q()))) <= 1e-6);
  }
}

TEST_CASE("ACS lower symbols: closed forms against the trace formula") {
  for (double alpha : {2.0, 3.0}) {
    const auto psi = e0(alpha);
    const auto acs = builtin(AcsSpec{psi});
    // c(psi) for e_0^(alpha) is 1/(2(alpha - 1)).
    CHECK(acs_p2_constant(psi) == doctest::Approx(0.5 / (alpha - 1.0)).epsilon(1e-10));
    const GroupElement g{0.7, 0.4};
    const Observable p1{MomentumPower{1}, "p"};
    const Observable p2{MomentumPower{2}, "p^2"};
    const Observable qp{Dilation{}, "qp"};
    const Observable q1{PositionFn::q_power(1.0), "q"};
    CHECK(lower_symbol(acs, p1, g) == doctest::Approx(0.4).epsilon(1e-10));
    for (const auto* o : {&p2, &qp, &q1}) {
      CHECK(lower_symbol(acs, *o, g) == doctest::Approx(lower_symbol_trace(acs, *o, g, 1e-8)).epsilon(1e-6));
    }
    // q -> c_0 c_{-3} / c_{-1} q from the gamma-function constants.
    auto c = [alpha](double gam) { return std::tgamma(alpha - 1.0 - gam) / std::tgamma(alpha + 1.0); };
    CHECK(lower_symbol(acs, q1, g) == doctest::Approx(c(0.0) * c(-3.0) / c(-1.0) * 0.7).epsilon(1e-10));
  }
}

TEST_CASE("trace kernel of a projector weight is the squared overlap") {
  const auto psi = e0(2.0);
  const auto acs = builtin(AcsSpec{psi});
  for (const GroupElement g : {GroupElement{1.0, 0.3}, GroupElement{0.6, -1.1}})
    CHECK(trace_kernel(acs, g) == doctest::Approx(std::norm(acs_symbol(psi, psi, g))).epsilon(1e-7));
}

TEST_CASE("unsupported lower symbols are rejected") {
  const auto w = builtin(ThermalSpec{2.0, 0.5});
  CHECK_THROWS_AS(lower_symbol(w, Observable{MomentumPower{2}, "p^2"}, {1.0, 0.0}), UnsupportedError);
}

TEST_CASE("evolution: initial time, stationary states and norm") {
  const BasisSpec b{2.0, 40};
  const Eigen::MatrixXcd h = 0.5 * (momentum_matrix(b, 2) + position_matrix(b, 2.0));
  const auto H = OperatorMatrix::make(b, h);
  const auto fid = e0(2.0);
  const auto grid = PhaseSpaceGrid::make(0.3, 3.0, 5, -2.0, 2.0, 5);

  const auto phi0 = basis_state(b, 1);
  const auto d = evolve_density(phi0, H, {0.0, 0.8}, fid, grid);
  const auto ref = acs_density_grid(phi0, fid, grid);
  for (std::size_t k = 0; k < ref.values.size(); ++k) CHECK(std::abs(d[0].values[k] - ref.values[k]) <= 1e-12);
  CHECK(evolve_state(phi0, H, 0.8).coefficients().norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(density_mass(evolve_state(phi0, H, 0.8), fid) == doctest::Approx(1.0).epsilon(1e-6));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const WaveFunction eig(b, es.eigenvectors().col(0), "ground");
  const auto s = evolve_density(eig, H, {0.0, 1.0, 5.0}, fid, grid);
  for (std::size_t k = 0; k < s[0].values.size(); ++k) {
    CHECK(std::abs(s[1].values[k] - s[0].values[k]) <= 1e-8);
    CHECK(std::abs(s[2].values[k] - s[0].values[k]) <= 1e-8);
  }
}

TEST_CASE("evolution rejects non-hermitian H and poorly captured states") {
  const BasisSpec b{2.0, 10};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(11, 11);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(evolve_state(basis_state(b, 0), OperatorMatrix::make(b, m), 1.0), ValidityError);
  const Eigen::MatrixXcd h = momentum_matrix(b, 2);
  CHECK_THROWS_AS(evolve_state(basis_state(BasisSpec{2.0, 40}, 30), OperatorMatrix::make(b, h), 1.0), ValidityError);
}

TEST_CASE("Fubini-Study constants") {
  const auto fs = fubini_study(e0(2.0));
  CHECK(fs.c_m3 == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fs.c_m4 == doctest::Approx(12.0).epsilon(1e-10));
  CHECK(fs.c_m4 - fs.c_m3 * fs.c_m3 == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fs.L == doctest::Approx(0.75).epsilon(1e-10));
  const auto [gpp, gqq] = fs.metric(2.0, 0.5);
  CHECK(gpp == doctest::Approx(24.0));
  CHECK(gqq == doctest::Approx(0.375));
  // The callable route agrees with the coefficient route.
  const auto f2 = fubini_study(WaveFunction([](double x) { return cplx(x * std::exp(-0.5 * x) / std::sqrt(2.0)); },
                                            DecayClass::Exponential, 1.0, "e0")
                                   .with_real_flag(true));
  CHECK(f2.L == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(f2.c_m3 == doctest::Approx(3.0).epsilon(1e-10));
}
