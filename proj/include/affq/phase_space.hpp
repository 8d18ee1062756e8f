#pragma once

// Phase-space portraits of states and operators: the affine Wigner quasi-distribution, ACS
// symbols and densities, lower symbols, time-evolved densities and the Fubini-Study metric.

#include <functional>
#include <string>
#include <vector>

#include "affq/quantize.hpp"
#include "affq/representation.hpp"
#include "affq/weights.hpp"

namespace affq {

struct PhaseSpaceGrid {
  std::vector<double> q_nodes;  ///< strictly increasing, > 0
  std::vector<double> p_nodes;  ///< strictly increasing

  void validate() const;
  std::size_t size() const { return q_nodes.size() * p_nodes.size(); }
  /// Geometric q nodes in [qmin, qmax] and uniform p nodes in [pmin, pmax].
  static PhaseSpaceGrid make(double qmin, double qmax, int nq, double pmin, double pmax, int np);
  /// q in [0.05, 8] (120 geometric nodes), p in [-8, 8] (160 uniform nodes).
  static PhaseSpaceGrid standard();
};

enum class QuasiKind { WignerAw, AcsDensity, AcsSymbol, LowerSymbol };
std::string to_string(QuasiKind kind);

/// Values are row-major over the grid: index i * np + j for (q_i, p_j).
struct QuasiDistribution {
  PhaseSpaceGrid grid;
  QuasiKind kind = QuasiKind::WignerAw;
  std::vector<double> values;
  std::vector<cplx> complex_values;  ///< filled for AcsSymbol only
  double imag_residual = 0.0;        ///< max |Im| discarded (WignerAw)
  std::string label;

  double at(std::size_t i, std::size_t j) const { return values[i * grid.p_nodes.size() + j]; }
};

struct WignerValue {
  double value;
  double imag_residual;
};

/// AW(q,p) = 2 int dx conj(phi(x)) e^{ip(x - q^2/x)} (q/x) phi(q^2/x), computed after x = q e^u
/// as 2q int du conj(phi(q e^u)) phi(q e^{-u}) e^{2iqp sinh u}.
WignerValue wigner_value(const WaveFunction& phi, double q, double p, double rel_tol = 1e-10);
QuasiDistribution wigner_aw(const WaveFunction& phi, const PhaseSpaceGrid& grid, double rel_tol = 1e-10);

/// phi_hat(p) = (1/sqrt(2 pi)) int_0^inf phi(x) e^{-ipx} dx (phi extended by zero to x < 0).
cplx momentum_wavefunction(const WaveFunction& phi, double p);
/// (1/2 pi) int AW(q,p) dp over the whole line.
double wigner_p_marginal(const WaveFunction& phi, double q);
/// (1/2 pi) int_0^inf AW(q,p) dq.
double wigner_q_marginal(const WaveFunction& phi, double p);

struct MarginalReport {
  double q_density_l1;   ///< sum_i w_i |p-marginal(q_i) - |phi(q_i)|^2| (trapezoid weights in q)
  double p_density_l1;   ///< sum_j w_j |q-marginal(p_j) - |phi_hat(p_j)|^2| (trapezoid weights in p)
  double total_mass;     ///< (1/2 pi) int int AW dq dp
  std::vector<double> p_marginal;  ///< on grid.q_nodes
  std::vector<double> q_marginal;  ///< on grid.p_nodes
};
MarginalReport wigner_marginals(const WaveFunction& phi, const PhaseSpaceGrid& grid);

/// W_phi(q,p) = <q,p|phi> = int e^{-ipx} conj(psi(x/q)) phi(x) dx / sqrt(q).
cplx acs_symbol(const WaveFunction& phi, const WaveFunction& fiducial, const GroupElement& g);
/// rho_phi = |W_phi|^2 / (2 pi c_{-1}).
double acs_density(const WaveFunction& phi, const WaveFunction& fiducial, const GroupElement& g);
QuasiDistribution acs_symbol_grid(const WaveFunction& phi, const WaveFunction& fiducial, const PhaseSpaceGrid& grid);
QuasiDistribution acs_density_grid(const WaveFunction& phi, const WaveFunction& fiducial, const PhaseSpaceGrid& grid);

/// Lower symbol f_check(q,p) = Tr(A_f M(q,p)) by closed forms:
/// aw: the K_0 convolution (2q/pi) K_0(2q|s|) *_p f, exact moments for polynomial p-dependence;
/// ACS: q^beta -> c_{beta-1} c_{-beta-2}/c_{-1} q^beta, p -> p, p^2 -> p^2 + c(psi)/q^2,
/// qp -> c_0 c_{-3}/c_{-1} qp, and sums of these.
double lower_symbol(const Weight& w, const Observable& obs, const GroupElement& g);
/// (2q/pi) int K_0(2q|s|) f(q, p + s) ds by quadrature.
double aw_k0_convolution(const std::function<double(double, double)>& f, double q, double p);
/// c(psi) = int (psi')^2 dx + (c_0/c_{-1}) int (psi')^2 x dx for real psi.
double acs_p2_constant(const WaveFunction& fiducial);

/// Tr(M(q,p) M) by the double x,y integral of the partial Fourier transforms (smooth weights).
double trace_kernel(const Weight& w, const GroupElement& g);
/// f_check(q,p) = int dq' dp' / c_M f(q q', p'/q + p) Tr(M(q',p') M) evaluated numerically.
/// Single-atom weights (aw) resolve both delta constraints by root finding and integrate the
/// remaining x and p' integrals; projector weights use Tr(M(g')M) = |<psi|U(g')psi>|^2.
double lower_symbol_trace(const Weight& w, const Observable& obs, const GroupElement& g, double tol = 1e-7);

/// rho(q,p,t) = |<q,p| e^{-iHt} |phi0>|^2 / (2 pi c_{-1}) with e^{-iHt} from the eigendecomposition
/// of the truncated matrix. ValidityError when H is not hermitian to hermitian_tol (relative),
/// or when phi0 is not captured by the basis to capture_tol (norm defect).
struct EvolutionOptions {
  double hermitian_tol = 1e-10;
  double capture_tol = 1e-6;
};
std::vector<QuasiDistribution> evolve_density(const WaveFunction& phi0, const OperatorMatrix& H,
                                              const std::vector<double>& times, const WaveFunction& fiducial,
                                              const PhaseSpaceGrid& grid, const EvolutionOptions& options = {});
/// The evolved state e^{-iHt} phi0 in the basis of H.
WaveFunction evolve_state(const WaveFunction& phi0, const OperatorMatrix& H, double t,
                          const EvolutionOptions& options = {});

struct FubiniStudy {
  double c_m3;  ///< int psi^2 x dx
  double c_m4;  ///< int psi^2 x^2 dx
  double L;     ///< int x^2 (psi')^2 dx - 1/4
  /// ds^2 = g_pp dp^2 + g_qq dq^2 with g_pp = 2 (c_{-4} - c_{-3}^2) q^2, g_qq = 2 L / q^2.
  std::function<std::pair<double, double>(double q, double p)> metric;
};
FubiniStudy fubini_study(const WaveFunction& fiducial);

}  // namespace affq
