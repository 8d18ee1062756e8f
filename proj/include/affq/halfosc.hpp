#pragma once

// The half-harmonic oscillator H = (P^2 + Q^2)/2 on the half-line with a Dirichlet condition at 0.

#include <string>
#include <vector>

#include "affq/phase_space.hpp"

namespace affq::halfosc {

struct HalfOscState {
  int n = 1;
  double energy = 0.0;         ///< 2n - 1/2
  double printed_norm2 = 0.0;  ///< half-line norm^2 of the textbook-normalized odd Hermite function
  WaveFunction phi;            ///< unit norm on (0, inf)
};

/// phi_n proportional to H_{2n-1}(x) e^{-x^2/2}, renormalized by quadrature to unit half-line norm.
HalfOscState eigenstate_analytic(int n);

struct FdLevel {
  double energy = 0.0;
  double richardson_error = 0.0;  ///< (E_h - E_{2h}) / 3
  std::vector<double> values;     ///< on FdResult::x, normalized with sum h v^2 = 1, positive near 0
};
struct FdResult {
  double h = 0.0;
  std::vector<double> x;  ///< interior nodes i h, i = 1 .. n_points - 1
  std::vector<FdLevel> levels;
  std::vector<std::string> warnings;
};

/// Lowest eigenpairs of -1/2 d^2/dx^2 + x^2/2 with phi(0) = phi(x_max) = 0 by second-order central
/// differences on n_points intervals. Energies come from a symmetric tridiagonal eigensolve, vectors
/// from inverse iteration. A warning is recorded when a Richardson estimate exceeds warn_tol.
FdResult eigensolve_fd(int n_levels, double x_max = 12.0, int n_points = 4000, double warn_tol = 1e-4);

/// L^2 grid distance between a finite-difference vector and phi_n after fixing the sign.
double fd_state_error(const FdResult& fd, int n);

/// The matrix of the aw quantization of (p^2/s^2 + s^2 q^2)/2 in the Laguerre basis. By covariance under
/// the dilation (s, 0) this is (P^2 + Q^2)/2 in the dilated basis e_k(x/s)/sqrt(s).
OperatorMatrix hamiltonian_matrix(const BasisSpec& basis, double dilation = 0.25);
/// Lowest n_levels eigenvalues of hamiltonian_matrix.
std::vector<double> laguerre_spectrum(const BasisSpec& basis, int n_levels, double dilation = 0.25);

struct StationarityReport {
  double max_change = 0.0;  ///< max over times and nodes of |rho(t) - rho(0)|
  double capture_defect = 0.0;
};
/// Evolves phi_n under hamiltonian_matrix and compares ACS densities (fiducial e_0^(1)) on the grid.
/// The state is carried in the dilated frame; rho(q,p) of U(s,0) chi equals rho_chi(q/s, s p).
StationarityReport stationarity(int n, const std::vector<double>& times, const PhaseSpaceGrid& grid,
                                const BasisSpec& basis = {2.0, 60}, double dilation = 0.25);

struct FigureBundle {
  int n = 1;
  PhaseSpaceGrid grid;
  std::vector<double> density;  ///< |phi_n(q)|^2 on grid.q_nodes
  QuasiDistribution wigner;
  QuasiDistribution wavelet_re;
  QuasiDistribution wavelet_im;
  QuasiDistribution acs_density;            ///< |W|^2 / (2 pi c_{-1}), fiducial e_0^(1)
  std::vector<double> reconstructed_density;  ///< p-marginal of the Wigner function on grid.q_nodes
  std::vector<double> momentum_density;       ///< q-marginal on grid.p_nodes
  MarginalReport marginals;
};
FigureBundle figure_data(int n, const PhaseSpaceGrid& grid = PhaseSpaceGrid::standard());

/// The fiducial of the figures: e_0^(1) = sqrt(x) e^{-x/2}, with c_{-1} = 1.
WaveFunction figure_fiducial();

}  // namespace affq::halfosc
