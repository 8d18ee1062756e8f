#pragma once

// The quantization map f -> A_f for the catalog of separable and monomial observables.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "affq/representation.hpp"
#include "affq/weights.hpp"

namespace affq {

/// u(q); power is set when u(q) = q^power, which selects the exact paths.
struct PositionFn {
  std::function<double(double)> u;
  std::optional<double> power;
  std::string label;

  static PositionFn q_power(double beta);
};
struct MomentumPower {
  int n = 1;
};
/// u(q) p^n.
struct SeparableObs {
  PositionFn u;
  int n = 0;
};
struct Dilation {};
struct Kinetic {};
struct MonomialTerm {
  double coeff = 1.0;
  double beta = 0.0;
  int n = 0;
};
/// sum coeff q^beta p^n.
struct MonomialSum {
  std::vector<MonomialTerm> terms;
};
using ObservableForm = std::variant<PositionFn, MomentumPower, SeparableObs, Dilation, Kinetic, MonomialSum>;

struct Observable {
  ObservableForm form;
  std::string text;

  /// The classical function f(q, p).
  double operator()(double q, double p) const;
  /// The observable as a monomial sum, if it is one (PositionFn only when it is a power).
  std::optional<MonomialSum> as_monomials() const;
};

/// coeff * Q^gamma P^k.
struct OperatorTerm {
  cplx coeff;
  double gamma;
  int k;
};

struct QuantizedOperator {
  std::string closed_form;
  std::vector<OperatorTerm> terms;             ///< differential-polynomial form, when available
  std::function<double(double)> multiplier;    ///< multiplication-operator form, when available
  std::function<cplx(double, double)> kernel;  ///< integral kernel, when assembled from one
  OperatorMatrix matrix;
  double series_tail = 0.0;  ///< bound on the dropped tail of a truncated series (thermal)
};

/// Matrix of sum coeff Q^gamma P^k in the basis.
Eigen::MatrixXcd assemble_terms(const BasisSpec& basis, const std::vector<OperatorTerm>& terms);
std::string describe_terms(const std::vector<OperatorTerm>& terms);

/// Multiplication by v(x) = (1/Omega(1)) int_0^inf (dq/q) varpi_hat(1,-q) u(x/q); for u = q^beta
/// this is (d_beta/d_0) Q^beta, assembled exactly.
QuantizedOperator quantize_position_fn(const Weight& w, const PositionFn& u, const BasisSpec& basis);

/// A_{q^beta p^n} = (1/Omega(1)) sum_k C(n,k) (-i)^{n-k} G_beta^{(n-k)}(1) Q^{beta-n+k} P^k.
QuantizedOperator quantize_monomial(const Weight& w, double beta, int n, const BasisSpec& basis);
QuantizedOperator quantize_p_power(const Weight& w, int n, const BasisSpec& basis);
/// (Omega_1/Omega) D + i[(3/2) Omega_1/Omega + Omega_1'/Omega] with D = (QP + PQ)/2.
QuantizedOperator quantize_dilation(const Weight& w, const BasisSpec& basis);

/// Distributional descriptor of v_hat(y) = (1/sqrt(2 pi)) int v(p) e^{-ipy} dp.
struct PolynomialV {
  std::vector<double> coeffs;  ///< v(p) = sum_k coeffs[k] p^k
};
struct SampledVHat {
  std::function<cplx(double y)> vhat;
};
using VDescriptor = std::variant<PolynomialV, SampledVHat>;

/// Kernel assembly grid: composite Gauss-Legendre panels on [0, x_max] per axis.
struct SeparableOptions {
  double x_max = 0.0;  ///< 0 picks 4N + 2 alpha + 40
  double panel = 0.5;
  int order = 8;
};
/// u(q) v(p). Polynomial v goes through the closed forms; sampled v_hat through the kernel
/// (1/c_M) v_hat(x'-x) (x/x') int (dq/q) varpi_hat(x/x', -q) u(x/q).
QuantizedOperator quantize_separable(const Weight& w, const PositionFn& u, const VDescriptor& v, const BasisSpec& basis,
                                     const SeparableOptions& options = {});

/// The differential-polynomial form sum coeff Q^gamma P^k of A_f for a monomial sum.
std::vector<OperatorTerm> quantized_terms(const Weight& w, const MonomialSum& f);

/// Dispatch on the observable form.
QuantizedOperator quantize(const Weight& w, const Observable& obs, const BasisSpec& basis);

struct CommutatorReport {
  double lambda;             ///< least-squares fit of [A_q, A_p] = i lambda I on the interior block
  double expected;           ///< d_1 / d_0
  double interior_residual;  ///< ||[A_q, A_p] - i lambda I|| on the interior block
  double border_residual;    ///< same on the full matrix (truncation artifact, reported only)
};
CommutatorReport commutator_check(const Weight& w, const BasisSpec& basis);

/// f o g0^{-1}: (q, p) -> f(q/q0, q0 (p - p0)), expanded for monomial sums.
Observable translate(const Observable& f, const GroupElement& g0);

struct CovarianceReport {
  double residual;             ///< ||[U(g0) A_f U(g0)^*]_N - A_{f o g0^{-1}}||_F on the leading block
  double truncation_estimate;  ///< change of the left side over the last inner-dimension step
  double bound;                ///< 2 * max(truncation_estimate, roundoff floor)
  bool passed;                 ///< residual <= bound
};
/// The products run over an inner basis grown from 2N in steps of N (up to max(180, 2N)) until the
/// leading (N+1) block is stable; the estimate is the last step's change.
CovarianceReport covariance_check(const Weight& w, const Observable& f, const GroupElement& g0, const BasisSpec& basis);

/// c_gamma = int |psi|^2 x^{-2-gamma} dx. DivergenceError names gamma when it diverges.
double acs_c_gamma(const WaveFunction& fiducial, double gamma);
/// K = int (psi')^2 x dx / c_{-1} for real psi: A_{p^2} = P^2 + K/Q^2 with the ACS weight.
double kinetic_constant(const WaveFunction& fiducial);

struct ThermalConstants {
  std::function<double(double gamma)> c;       ///< alpha (1-t) sum t^n c_{gamma;n}
  std::function<double(double gamma)> c_tail;  ///< t^{N+1}/(1-t) max_n alpha c_{gamma;n}
  double K;                                    ///< (1-t) sum t^n K_n
  double tail_bound;                           ///< t^{N+1}/(1-t) max_n |K_n|
};
ThermalConstants thermal_constants(double alpha, double t, int n_terms);

/// Quantization with the thermal state summed term by term over the ACS quantizers of e_n^(alpha):
/// p -> P, q^beta -> c_{beta-1}(t) Q^beta, qp -> c_0(t) D, p^2 -> P^2 + K(t)/Q^2.
QuantizedOperator thermal_quantize(double alpha, double t, const Observable& obs, int n_terms, const BasisSpec& basis);

}  // namespace affq
