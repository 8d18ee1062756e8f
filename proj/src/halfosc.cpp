#include "affq/halfosc.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/quantize.hpp"
#include "affq/specfun.hpp"

namespace affq::halfosc {

namespace {

constexpr double kPi = std::numbers::pi;

// Solves the tridiagonal system (diag - shift, off) v = b in place (Thomas algorithm).
void tridiagonal_solve(const Eigen::VectorXd& diag, double off, double shift, Eigen::VectorXd& b) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd c(n);
  double d = diag(0) - shift;
  c(0) = off / d;
  b(0) /= d;
  for (Eigen::Index i = 1; i < n; ++i) {
    d = diag(i) - shift - off * c(i - 1);
    c(i) = off / d;
    b(i) = (b(i) - off * b(i - 1)) / d;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) b(i) -= c(i) * b(i + 1);
}

struct FdSystem {
  double h;
  Eigen::VectorXd diag;
  double off;
};

FdSystem fd_system(double x_max, int n_points) {
  FdSystem s{x_max / n_points, Eigen::VectorXd(n_points - 1), 0.0};
  s.off = -0.5 / (s.h * s.h);
  for (int i = 1; i < n_points; ++i) {
    const double x = i * s.h;
    s.diag(i - 1) = 1.0 / (s.h * s.h) + 0.5 * x * x;
  }
  return s;
}

Eigen::VectorXd fd_energies(const FdSystem& s, int n_levels) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  const Eigen::VectorXd sub = Eigen::VectorXd::Constant(s.diag.size() - 1, s.off);
  es.computeFromTridiagonal(s.diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw AccuracyError("eigensolve_fd: tridiagonal eigensolve failed", 0.0, 0.0);
  return es.eigenvalues().head(n_levels);
}

}  // namespace

HalfOscState eigenstate_analytic(int n) {
  if (n < 1) throw DomainError("eigenstate_analytic: n must be >= 1");
  const int k = 2 * n - 1;
  const quad::QuadSpec spec{quad::Adaptive{1e-13, 1e-15, 8000}, quad::Domain{0.0, quad::kInf}};
  // Textbook constant pi^{-1/4} / (2^n sqrt((2n-1)!)) in front of H_{2n-1}(x) e^{-x^2/2}.
  const double printed = std::pow(kPi, -0.25) / (std::pow(2.0, n) * std::sqrt(std::tgamma(2.0 * n)));
  const double printed_norm2 = quad::integrate_halfline(
                                   [&](double x) {
                                     const double v = printed * specfun::hermite(k, x) * std::exp(-0.5 * x * x);
                                     return v * v;
                                   },
                                   spec)
                                   .value;
  // The stable Hermite function has the same shape; renormalize it on the half-line.
  const double half_norm2 =
      quad::integrate_halfline([k](double x) { return std::pow(specfun::hermite_function(k, x).value, 2); }, spec).value;
  const double c = 1.0 / std::sqrt(half_norm2);
  auto phi = WaveFunction([k, c](double x) { return cplx(c * specfun::hermite_function(k, x).value); },
                          DecayClass::Gaussian, 1.0, "phi" + std::to_string(n))
                 .with_real_flag(true);
  return {n, 2.0 * n - 0.5, printed_norm2, phi};
}

FdResult eigensolve_fd(int n_levels, double x_max, int n_points, double warn_tol) {
  if (n_levels < 1) throw DomainError("eigensolve_fd: n_levels must be >= 1");
  if (!(x_max > 0.0)) throw DomainError("eigensolve_fd: x_max must be > 0");
  if (n_points < 4 * n_levels + 4) throw DomainError("eigensolve_fd: n_points too small for the requested levels");
  const auto fine = fd_system(x_max, n_points);
  const auto coarse = fd_system(x_max, n_points / 2);
  const Eigen::VectorXd e = fd_energies(fine, n_levels);
  const Eigen::VectorXd e2 = fd_energies(coarse, n_levels);

  FdResult out;
  out.h = fine.h;
  for (int i = 1; i < n_points; ++i) out.x.push_back(i * fine.h);
  const Eigen::Index m = fine.diag.size();
  for (int l = 0; l < n_levels; ++l) {
    FdLevel lev;
    lev.energy = e(l);
    lev.richardson_error = (e(l) - e2(l)) / 3.0;
    // Inverse iteration with a shift just below the eigenvalue.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    const double shift = e(l) - 1e-9 * std::max(1.0, std::abs(e(l)));
    for (int it = 0; it < 4; ++it) {
      tridiagonal_solve(fine.diag, fine.off, shift, v);
      v /= v.norm();
    }
    v /= std::sqrt(fine.h) * v.norm();
    if (v(0) < 0.0) v = -v;
    lev.values.assign(v.data(), v.data() + m);
    if (std::abs(lev.richardson_error) > warn_tol)
      out.warnings.push_back("level " + std::to_string(l + 1) + ": Richardson error estimate " +
                             std::to_string(lev.richardson_error) + " exceeds " + std::to_string(warn_tol));
    out.levels.push_back(std::move(lev));
  }
  return out;
}

double fd_state_error(const FdResult& fd, int n) {
  if (n < 1 || n > static_cast<int>(fd.levels.size())) throw DomainError("fd_state_error: level out of range");
  const auto phi = eigenstate_analytic(n).phi;
  const auto& v = fd.levels[n - 1].values;
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * phi(fd.x[i]).real();
  const double sign = dot < 0.0 ? -1.0 : 1.0;
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) err += std::pow(v[i] - sign * phi(fd.x[i]).real(), 2);
  return std::sqrt(fd.h * err);
}

OperatorMatrix hamiltonian_matrix(const BasisSpec& basis, double dilation) {
  if (!(dilation > 0.0)) throw DomainError("hamiltonian_matrix: dilation must be > 0");
  const double s2 = dilation * dilation;
  const Observable h{MonomialSum{{{0.5 / s2, 0.0, 2}, {0.5 * s2, 2.0, 0}}}, "(p^2/s^2 + s^2 q^2)/2"};
  return quantize(builtin(AwSpec{}), h, basis).matrix;
}

std::vector<double> laguerre_spectrum(const BasisSpec& basis, int n_levels, double dilation) {
  const auto m = hamiltonian_matrix(basis, dilation).entries;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const int k = std::min<int>(n_levels, static_cast<int>(ev.size()));
  return {ev.data(), ev.data() + k};
}

WaveFunction figure_fiducial() { return basis_state(BasisSpec{1.0, 3}, 0); }

StationarityReport stationarity(int n, const std::vector<double>& times, const PhaseSpaceGrid& grid,
                                const BasisSpec& basis, double dilation) {
  grid.validate();
  const auto phi = eigenstate_analytic(n).phi;
  const double s = dilation;
  // chi = U(s,0)^* phi, so that U(s,0) chi = phi.
  auto chi = WaveFunction([phi, s](double x) { return std::sqrt(s) * phi(s * x); }, DecayClass::Gaussian, 1.0 / s,
                          "chi" + std::to_string(n))
                 .with_real_flag(true);
  const auto H = hamiltonian_matrix(basis, s);
  StationarityReport rep;
  const Eigen::VectorXcd c = project(chi, basis);
  rep.capture_defect = std::abs(1.0 - c.squaredNorm() / (chi.norm() * chi.norm()));
  PhaseSpaceGrid frame = grid;
  for (auto& q : frame.q_nodes) q /= s;
  for (auto& p : frame.p_nodes) p *= s;
  std::vector<double> all{0.0};
  all.insert(all.end(), times.begin(), times.end());
  const auto d = evolve_density(chi, H, all, figure_fiducial(), frame);
  for (std::size_t t = 1; t < d.size(); ++t)
    for (std::size_t k = 0; k < d[0].values.size(); ++k)
      rep.max_change = std::max(rep.max_change, std::abs(d[t].values[k] - d[0].values[k]));
  return rep;
}

FigureBundle figure_data(int n, const PhaseSpaceGrid& grid) {
  grid.validate();
  const auto phi = eigenstate_analytic(n).phi;
  const auto fid = figure_fiducial();
  FigureBundle b;
  b.n = n;
  b.grid = grid;
  for (double q : grid.q_nodes) b.density.push_back(std::norm(phi(q)));
  b.wigner = wigner_aw(phi, grid);
  b.wigner.label = phi.label();
  const auto sym = acs_symbol_grid(phi, fid, grid);
  b.wavelet_re = sym;
  b.wavelet_im = sym;
  b.wavelet_re.label = phi.label() + " Re W";
  b.wavelet_im.label = phi.label() + " Im W";
  const double cm1 = admissibility_constant(fid);
  b.acs_density = sym;
  b.acs_density.kind = QuasiKind::AcsDensity;
  b.acs_density.label = phi.label() + " rho";
  b.acs_density.complex_values.clear();
  for (std::size_t k = 0; k < sym.complex_values.size(); ++k) {
    b.wavelet_re.values[k] = sym.complex_values[k].real();
    b.wavelet_im.values[k] = sym.complex_values[k].imag();
    b.acs_density.values[k] = std::norm(sym.complex_values[k]) / (2.0 * kPi * cm1);
  }
  b.marginals = wigner_marginals(phi, grid);
  b.reconstructed_density = b.marginals.p_marginal;
  b.momentum_density = b.marginals.q_marginal;
  return b;
}

}  // namespace affq::halfosc
