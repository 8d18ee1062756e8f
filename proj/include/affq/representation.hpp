#pragma once

// The representation U(q,p) psi(x) = e^{ipx} psi(x/q) / sqrt(q) on L^2(R_+, dx).

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "affq/affine_group.hpp"
#include "affq/basis.hpp"

namespace affq {

using cplx = std::complex<double>;

/// How fast |psi(x)| decays at infinity; fixes the quadrature cutoff.
enum class DecayClass { Exponential, Gaussian, Algebraic };

/// A state either as Laguerre coefficients or as a callable.
class WaveFunction {
 public:
  using Fn = std::function<cplx(double)>;

  WaveFunction(const BasisSpec& basis, Eigen::VectorXcd coefficients, std::string label = {});
  /// scale is the length over which the decay acts, e.g. psi ~ e^{-x/scale} or e^{-(x/scale)^2}.
  explicit WaveFunction(Fn f, DecayClass decay = DecayClass::Exponential, double scale = 1.0, std::string label = {});

  cplx operator()(double x) const;
  bool is_coefficient_form() const { return coeffs_.has_value(); }
  const Eigen::VectorXcd& coefficients() const;
  const BasisSpec& basis() const;
  DecayClass decay() const { return decay_; }
  double scale() const { return scale_; }
  const std::string& label() const { return label_; }

  /// L^2 norm, computed once at construction.
  double norm() const { return norm_; }
  /// Point beyond which |psi|^2 is below ~1e-30 of its scale (inf for algebraic decay).
  double support_cutoff() const;
  WaveFunction normalized() const;
  /// True when psi is real-valued (coefficient form with real coefficients, or declared real).
  bool is_real() const { return real_; }
  WaveFunction with_real_flag(bool real) const;

 private:
  std::optional<Eigen::VectorXcd> coeffs_;
  BasisSpec basis_{};
  Fn fn_;
  DecayClass decay_ = DecayClass::Exponential;
  double scale_ = 1.0;
  double norm_ = 0.0;
  bool real_ = false;
  std::string label_;
};

/// e_n^(alpha) as a coefficient-form state.
WaveFunction basis_state(const BasisSpec& basis, int n);

/// psi'(x): exact in coefficient form, five-point differences otherwise.
cplx wave_derivative(const WaveFunction& psi, double x);

/// Coefficients <e_n | psi>, n = 0..N. Exact for a coefficient-form state in the same basis.
Eigen::VectorXcd project(const WaveFunction& psi, const BasisSpec& basis);

/// <phi | psi> by half-line quadrature (exact coefficient product when both share a basis).
cplx inner_product(const WaveFunction& phi, const WaveFunction& psi);

struct OperatorMatrix {
  BasisSpec basis;
  Eigen::MatrixXcd entries;
  double truncation_estimate = 0.0;  ///< Frobenius norm of the border row/column
  std::optional<bool> hermitian;

  static OperatorMatrix make(const BasisSpec& basis, Eigen::MatrixXcd entries);
  /// Frobenius norm of the last row and column.
  static double border_norm(const Eigen::MatrixXcd& m);
};

WaveFunction apply_u(const GroupElement& g, const WaveFunction& psi);

/// U_mn(q,p) = <e_m | U(q,p) e_n> by the closed Jacobi-polynomial form.
cplx matrix_element(const BasisSpec& basis, int m, int n, const GroupElement& g);
OperatorMatrix matrix_u(const BasisSpec& basis, const GroupElement& g);

enum class Summation { Direct, Abel };

struct TraceResult {
  cplx value;
  double error_estimate;
  std::vector<cplx> abel_samples;  ///< sum_m t^m U_mm for each t in the grid
};

/// sum_m U_mm(q,p); Abel summation extrapolates t -> 1 from the t grid with Richardson in 1-t.
/// An empty grid means {0.9, 0.99, 0.999}, with 1-t shrunk when (q,p) puts a branch point of
/// the generating function close to t = 1.
TraceResult trace_u(const BasisSpec& basis, const GroupElement& g, Summation summation = Summation::Abel,
                    const std::vector<double>& t_grid = {});

/// Closed form of the Abel-summed trace in the basis with parameter alpha:
/// q^{(1-alpha)/2}/|q-1| for q > 1, q^{(1+alpha)/2}/|q-1| for q < 1. At alpha = 0 both are sqrt(q)/|q-1|.
double trace_u_closed_form(double q, double alpha);

/// x -> (2 pi / x)^{power/2} psi(x). AdmissibilityError when the result has infinite norm.
WaveFunction duflo_moore_apply(double power, const WaveFunction& psi);

/// c_{-1} = int |psi|^2 / x dx, the admissibility integral. AdmissibilityError if infinite.
double admissibility_constant(const WaveFunction& fiducial);

/// |q,p> = U(q,p) |psi>.
WaveFunction make_acs(const GroupElement& g, const WaveFunction& fiducial);

}  // namespace affq
