#pragma once

#include <variant>
#include <vector>

namespace affq::specfun {

struct Laguerre {
  double alpha = 0.0;
};
struct Jacobi {
  double a = 0.0;
  double b = 0.0;
};
struct Hermite {};

using PolyFamily = std::variant<Laguerre, Jacobi, Hermite>;

/// L_n^(alpha)(x), P_n^(a,b)(x) or the physicists' H_n(x), all by forward three-term recurrence.
/// Throws DomainError for alpha <= -1 or a, b <= -1.
double orthopoly_eval(const PolyFamily& family, int n, double x);

double laguerre(int n, double alpha, double x);
double jacobi(int n, double a, double b, double x);
double hermite(int n, double x);

/// P_0 .. P_{n_max} of the Jacobi family at x.
std::vector<double> jacobi_all(int n_max, double a, double b, double x);

/// Orthonormal Laguerre polynomials l_k = sqrt(k!/Gamma(k+alpha+1)) L_k^(alpha), k = 0..n_max,
/// orthonormal with respect to x^alpha e^-x on (0, inf).
std::vector<double> laguerre_normalized_all(int n_max, double alpha, double x);

/// Normalized Hermite function psi_k(x) = H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi)) and its derivative.
struct HermiteFunctionValue {
  double value;
  double derivative;
};
HermiteFunctionValue hermite_function(int k, double x);

enum class BesselKind { I, K };

/// e^{-x} I_nu(x) for nu >= 0, x > 0.
double bessel_i_scaled(double nu, double x);
/// e^{x} K_0(x) for x > 0.
double bessel_k0_scaled(double x);

double bessel_i(double nu, double x);
double bessel_k0(double x);

/// Unscaled dispatcher. Only order 0 is supported for K.
double bessel(BesselKind kind, double order, double x);

/// Gamma(x); PoleError at non-positive integers.
double gamma_fn(double x);
/// log|Gamma(x)|; PoleError at non-positive integers.
double log_gamma(double x);

}  // namespace affq::specfun
