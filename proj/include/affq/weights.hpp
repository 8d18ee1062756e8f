#pragma once

// Weight functions varpi(q,p) on the half-plane and their partial Fourier transforms
// varpi_hat(q, x) = (1/sqrt(2 pi)) int e^{-ipx} varpi(q,p) dp, stored as a smooth part plus atoms.
//
// Convention: the quantizer is M(q,p) = int dq dp varpi(q,p) C^{-1} U(q,p) C^{-1} with
// C^{-1} = sqrt(Q / 2 pi). The projector onto psi then has varpi = conj(<psi|U(q,p)|psi>)/sqrt(q).

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "affq/affine_group.hpp"
#include "affq/representation.hpp"

namespace affq {

/// Dirac component amplitude(q) * delta(x - location(q)) of varpi_hat(q, .).
struct FourierAtom {
  std::function<double(double q)> location;
  std::function<cplx(double q)> amplitude;
};

struct FourierWeight {
  std::function<cplx(double q, double x)> smooth;  ///< empty when the transform is purely atomic
  std::vector<FourierAtom> atoms;
};

struct AwSpec {};
struct DiagSpec {
  double alpha = 1.0;
  int m = 0;
  double s = 1.0;
};
struct ThermalSpec {
  double alpha = 1.0;
  double t = 0.0;
};
struct AcsSpec {
  WaveFunction fiducial;
};
using WeightSpec = std::variant<std::monostate, AwSpec, DiagSpec, ThermalSpec, AcsSpec>;

struct Weight {
  std::string label;
  std::function<cplx(double q, double p)> eval;
  FourierWeight fourier;
  WeightSpec spec;  ///< builtin parameters; monostate for custom weights
  double scale = 1.0;  ///< overall factor applied to a builtin
  /// Optional closed form of Omega_beta(u); throws DivergenceError where it diverges.
  std::function<cplx(double beta, double u)> omega_beta_closed;
  /// Optional closed form of G_beta^{(k)}(1), G_beta(y) = Omega_beta(1/y)/y.
  std::function<cplx(double beta, int k)> g_beta_closed;
  /// Length beyond which the smooth transform varpi_hat(u, -x) is negligible for u near 1.
  double x_cutoff = 100.0;

  cplx operator()(double q, double p) const { return eval(q, p); }
};

Weight scaled(const Weight& w, double factor);

/// aw: e^{-i sqrt(q) p}/sqrt(q); diag: conj(U_mm(q, s p))/sqrt(q);
/// thermal: (1-t) sum t^n conj(U_nn(q,p))/sqrt(q) (closed form); acs: conj(<psi|U(q,p) psi>)/sqrt(q).
Weight builtin(const WeightSpec& spec);

/// The closed form of the thermal weight with its 1/(2 pi) prefactor, i.e. the weight in the
/// sqrt(Q) U sqrt(Q) convention. builtin(ThermalSpec) returns 2 pi times this.
cplx thermal_weight_closed_form(double alpha, double t, double q, double p);
/// (1-t) sum_{n<=n_terms} t^n conj(U_nn(q,p))/sqrt(q), the series the closed form sums.
cplx thermal_weight_series(double alpha, double t, double q, double p, int n_terms);

/// Laguerre Poisson kernel sum_{n<=n_terms} n!/Gamma(n+alpha+1) L_n(x) L_n(y) t^n.
double laguerre_poisson_partial(double alpha, double t, double x, double y, int n_terms);
/// Its Bessel closed form (xyt)^{-alpha/2}/(1-t) e^{-(x+y)t/(1-t)} I_alpha(2 sqrt(xyt)/(1-t)).
double laguerre_poisson_closed(double alpha, double t, double x, double y);

/// int_0^inf (dx/x) e^{-gamma x} I_alpha(mu x) = (1/alpha)(gamma/mu - sqrt(gamma^2/mu^2 - 1))^alpha, gamma > mu > 0.
double bessel_laplace_closed(double alpha, double gamma, double mu);
double bessel_laplace_numeric(double alpha, double gamma, double mu);

/// The resolution-of-identity constant of the thermal state, three ways.
struct ThermalConstant {
  double series_route;  ///< 2 pi (1-t) int (dx/x) sum_n t^n e_n(x)^2
  double bessel_route;  ///< 2 pi t^{-alpha/2} int (dx/x) e^{-x(1+t)/(1-t)} I_alpha(2 sqrt(t) x/(1-t))
  double closed;        ///< 2 pi / alpha
};
ThermalConstant thermal_constant(double alpha, double t);

struct SymmetryReport {
  double max_residual = 0.0;
  GroupElement worst{};
  bool passed = false;
};
/// max |varpi(q,p) - (1/q) conj(varpi(1/q, -qp))| over the samples.
SymmetryReport check_symmetry(const Weight& w, const std::vector<GroupElement>& samples, double tol);
std::vector<GroupElement> symmetry_sample_grid(int nq = 10, int np = 10);

struct AtomValue {
  double location;
  cplx amplitude;
};
struct PartialFourier {
  cplx smooth;  ///< value of the smooth part at (q, x)
  std::vector<AtomValue> atoms;
};
/// Closed-form smooth part where registered, otherwise (1/sqrt(2 pi)) int e^{-ipx} varpi(q,p) dp.
PartialFourier partial_fourier(const Weight& w, double q, double x);
/// Always by numeric p-integration of eval (cross-check of the registered forms).
cplx partial_fourier_numeric(const Weight& w, double q, double x);

struct BetaValue {
  double beta;
  std::optional<cplx> value;
  std::string divergence;  ///< empty when finite
};

struct WeightConstants {
  std::function<cplx(double u)> omega;
  std::function<cplx(double beta, double u)> omega_beta;
  std::vector<BetaValue> d_beta;
  std::vector<std::pair<double, cplx>> omega_on_grid;
  double c_M = 0.0;  ///< sqrt(2 pi) d_0
  cplx omega_1{}, omega_prime_1{}, omega_second_1{};

  /// d_beta for a requested beta; DivergenceError if it diverged.
  cplx d(double beta) const;
};

/// Omega_beta(u) = int_0^inf dx x^{-1-beta} varpi_hat(u, -x), atoms exactly, smooth part by quadrature.
/// Throws DivergenceError when the integral diverges at either end.
cplx omega_beta(const Weight& w, double beta, double u);

WeightConstants compute_constants(const Weight& w, const std::vector<double>& betas = {0.0, 1.0},
                                  const std::vector<double>& u_grid = {});

/// Derivatives G^{(k)}(1), k = 0..order, of G(y) = Omega_beta(1/y)/y.
std::vector<cplx> g_beta_derivatives(const Weight& w, double beta, int order);

struct TraceCondition {
  cplx fourier_route;    ///< (1/sqrt(2pi)) int_0^inf varpi_hat(1,-x) dx
  cplx principal_route;  ///< varpi(1,0)/2 + (i/2pi) PV int varpi(1,p)/p dp
  double discrepancy;
};
TraceCondition trace_condition(const Weight& w);

}  // namespace affq
