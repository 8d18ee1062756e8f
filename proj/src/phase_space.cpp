#include "affq/phase_space.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <mutex>
#include <thread>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

namespace affq {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// Runs body(i) for i in [0, n) on the available hardware threads; results are written by index.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Trapezoid weights on sorted nodes.
std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

// f(q,p) = sum_k a_k(q) p^k for the catalog observables.
struct PTerm {
  std::function<double(double)> a;
  std::optional<double> power;  ///< a(q) = coeff q^power when set
  double coeff = 1.0;
  int n = 0;
};

std::vector<PTerm> p_polynomial(const Observable& obs) {
  return std::visit(
      [&](const auto& f) -> std::vector<PTerm> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PositionFn>) return {{f.u, f.power, 1.0, 0}};
        else if constexpr (std::is_same_v<T, MomentumPower>) return {{[](double) { return 1.0; }, 0.0, 1.0, f.n}};
        else if constexpr (std::is_same_v<T, SeparableObs>) return {{f.u.u, f.u.power, 1.0, f.n}};
        else if constexpr (std::is_same_v<T, Dilation>) return {{[](double q) { return q; }, 1.0, 1.0, 1}};
        else if constexpr (std::is_same_v<T, Kinetic>) return {{[](double) { return 1.0; }, 0.0, 1.0, 2}};
        else {
          std::vector<PTerm> out;
          for (const auto& t : f.terms) {
            const double c = t.coeff, b = t.beta;
            out.push_back({[c, b](double q) { return c * std::pow(q, b); }, b, c, t.n});
          }
          return out;
        }
      },
      obs.form);
}

// Moments (2q/pi) int K_0(2q|s|) s^j ds = Gamma((j+1)/2)^2 / (pi q^j) for even j, zero for odd j.
double k0_moment(int j, double q) {
  if (j % 2 == 1) return 0.0;
  if (j == 0) return 1.0;
  const double g = std::tgamma(0.5 * (j + 1));
  return g * g / (kPi * std::pow(q, j));
}

// <psi | y^gamma (-i d/dy)^j | psi> for j <= 2 (callables) or any j (coefficient form).
cplx fiducial_moment(const WaveFunction& psi, double gamma, int j) {
  if (psi.is_coefficient_form()) {
    const auto& c = psi.coefficients();
    return (c.adjoint() * qp_monomial_matrix(psi.basis(), gamma, j) * c)(0, 0);
  }
  if (j == 0) return acs_c_gamma(psi, -2.0 - gamma);
  const double cut = psi.support_cutoff();
  const quad::QuadSpec spec{quad::Adaptive{1e-11, 1e-14, 8000}, quad::Domain{0.0, cut}};
  if (j == 1) {
    auto f = [&](double x) { return std::conj(psi(x)) * std::pow(x, gamma) * wave_derivative(psi, x); };
    return -kI * quad::integrate_halfline(f, spec).value;
  }
  if (j == 2) {
    // -int conj(psi) y^g psi'' = int |psi'|^2 y^g + g int conj(psi) y^{g-1} psi'
    auto f = [&](double x) {
      const cplx d = wave_derivative(psi, x);
      return std::norm(d) * std::pow(x, gamma) + gamma * std::conj(psi(x)) * std::pow(x, gamma - 1.0) * d;
    };
    return quad::integrate_halfline(f, spec).value;
  }
  throw UnsupportedError("lower_symbol: momentum powers above 2 need a coefficient-form fiducial");
}

const WaveFunction& acs_fiducial(const Weight& w) {
  const auto* a = std::get_if<AcsSpec>(&w.spec);
  if (!a) throw UnsupportedError("expected an ACS weight");
  return a->fiducial;
}

// |<psi | U(g) psi>|^2, through the closed matrix elements in coefficient form.
double overlap_squared(const WaveFunction& psi, const GroupElement& g) {
  if (psi.is_coefficient_form()) {
    const auto& b = psi.basis();
    const auto& c = psi.coefficients();
    cplx s{};
    for (int m = 0; m < b.dim(); ++m) {
      if (c(m) == cplx{}) continue;
      for (int n = 0; n < b.dim(); ++n)
        if (c(n) != cplx{}) s += std::conj(c(m)) * matrix_element(b, m, n, g) * c(n);
    }
    return std::norm(s);
  }
  return std::norm(acs_symbol(psi, psi, g));
}

}  // namespace

void PhaseSpaceGrid::validate() const {
  if (q_nodes.empty() || p_nodes.empty()) throw DomainError("PhaseSpaceGrid: empty node list");
  for (std::size_t i = 0; i < q_nodes.size(); ++i) {
    if (!(q_nodes[i] > 0.0) || !std::isfinite(q_nodes[i])) throw DomainError("PhaseSpaceGrid: q nodes must be finite and > 0");
    if (i > 0 && !(q_nodes[i] > q_nodes[i - 1])) throw DomainError("PhaseSpaceGrid: q nodes must increase strictly");
  }
  for (std::size_t j = 0; j < p_nodes.size(); ++j) {
    if (!std::isfinite(p_nodes[j])) throw DomainError("PhaseSpaceGrid: p nodes must be finite");
    if (j > 0 && !(p_nodes[j] > p_nodes[j - 1])) throw DomainError("PhaseSpaceGrid: p nodes must increase strictly");
  }
}

PhaseSpaceGrid PhaseSpaceGrid::make(double qmin, double qmax, int nq, double pmin, double pmax, int np) {
  if (nq < 1 || np < 1) throw DomainError("PhaseSpaceGrid: need at least one node per axis");
  if (!(qmin > 0.0) || !(qmax >= qmin) || !(pmax >= pmin)) throw DomainError("PhaseSpaceGrid: invalid ranges");
  if ((nq > 1 && qmax == qmin) || (np > 1 && pmax == pmin)) throw DomainError("PhaseSpaceGrid: degenerate range");
  PhaseSpaceGrid g;
  for (int i = 0; i < nq; ++i)
    g.q_nodes.push_back(nq == 1 ? qmin : qmin * std::pow(qmax / qmin, static_cast<double>(i) / (nq - 1)));
  for (int j = 0; j < np; ++j) g.p_nodes.push_back(np == 1 ? pmin : pmin + (pmax - pmin) * j / (np - 1));
  if (nq > 1) g.q_nodes.back() = qmax;
  if (np > 1) g.p_nodes.back() = pmax;
  g.validate();
  return g;
}

PhaseSpaceGrid PhaseSpaceGrid::standard() { return make(0.05, 8.0, 120, -8.0, 8.0, 160); }

std::string to_string(QuasiKind kind) {
  switch (kind) {
    case QuasiKind::WignerAw: return "wigner_aw";
    case QuasiKind::AcsDensity: return "acs_density";
    case QuasiKind::AcsSymbol: return "acs_symbol";
    case QuasiKind::LowerSymbol: return "lower_symbol";
  }
  return "unknown";
}

WignerValue wigner_value(const WaveFunction& phi, double q, double p, double rel_tol) {
  if (!(q > 0.0)) throw DomainError("wigner_value: q must be > 0");
  const double cut = phi.support_cutoff();
  if (!std::isfinite(cut)) throw UnsupportedError("wigner_value: states with algebraic decay are not supported");
  if (q >= cut) return {0.0, 0.0};
  const double U = std::log(cut / q);
  auto env = [&](double u) { return std::conj(phi(q * std::exp(u))) * phi(q * std::exp(-u)); };
  auto phase = [&](double u) { return 2.0 * q * p * std::sinh(u); };
  const double scale = std::max(phi.norm() * phi.norm(), 1e-300);
  const quad::QuadSpec spec{quad::Adaptive{rel_tol, 1e-4 * rel_tol * scale, 4000}, quad::Domain{-U, U}};
  try {
    const cplx v = 2.0 * q * quad::integrate_oscillatory(env, phase, spec).value;
    return {v.real(), std::abs(v.imag())};
  } catch (const AccuracyError& e) {
    throw AccuracyError("wigner_value at (q=" + std::to_string(q) + ", p=" + std::to_string(p) + "): " + e.what(),
                        e.best_estimate(), e.error_estimate());
  }
}

QuasiDistribution wigner_aw(const WaveFunction& phi, const PhaseSpaceGrid& grid, double rel_tol) {
  grid.validate();
  QuasiDistribution out{grid, QuasiKind::WignerAw, std::vector<double>(grid.size()), {}, 0.0, phi.label()};
  std::vector<double> resid(grid.size());
  const std::size_t np = grid.p_nodes.size();
  parallel_for(grid.size(), [&](std::size_t k) {
    const auto v = wigner_value(phi, grid.q_nodes[k / np], grid.p_nodes[k % np], rel_tol);
    out.values[k] = v.value;
    resid[k] = v.imag_residual;
  });
  out.imag_residual = *std::max_element(resid.begin(), resid.end());
  return out;
}

cplx momentum_wavefunction(const WaveFunction& phi, double p) {
  const double cut = phi.support_cutoff();
  if (!std::isfinite(cut)) throw UnsupportedError("momentum_wavefunction: states with algebraic decay are not supported");
  const double scale = std::max(phi.norm(), 1e-300);
  const quad::QuadSpec spec{quad::Adaptive{1e-11, 1e-15 * scale, 4000}, quad::Domain{0.0, cut}};
  const auto r = quad::integrate_oscillatory([&](double x) { return phi(x); }, [p](double x) { return -p * x; }, spec);
  return r.value / std::sqrt(2.0 * kPi);
}

double wigner_p_marginal(const WaveFunction& phi, double q) {
  // AW(q, .) decays like e^{-2q|p|} (analytic in p), so |p| <= 9/q + 16 leaves ~e^{-18} relative.
  const double P = 9.0 / q + 16.0;
  // Real phi gives AW(q,-p) = AW(q,p).
  auto f = [&](double p) {
    const double a = wigner_value(phi, q, p, 1e-6).value;
    return phi.is_real() ? 2.0 * a : a + wigner_value(phi, q, -p, 1e-6).value;
  };
  const double scale = std::max(phi.norm() * phi.norm(), 1e-300);
  const auto r = quad::integrate_interval(f, 0.0, P, quad::Adaptive{1e-6, 1e-10 * scale, 4000});
  return r.value / (2.0 * kPi);
}

double wigner_q_marginal(const WaveFunction& phi, double p) {
  const double cut = phi.support_cutoff();
  auto f = [&](double q) { return q > 0.0 ? wigner_value(phi, q, p, 1e-6).value : 0.0; };
  const double scale = std::max(phi.norm() * phi.norm(), 1e-300);
  const auto r = quad::integrate_interval(f, 0.0, cut, quad::Adaptive{1e-6, 1e-10 * scale, 4000});
  return r.value / (2.0 * kPi);
}

MarginalReport wigner_marginals(const WaveFunction& phi, const PhaseSpaceGrid& grid) {
  grid.validate();
  MarginalReport rep{};
  const auto& qs = grid.q_nodes;
  const auto& ps = grid.p_nodes;
  rep.p_marginal.resize(qs.size());
  rep.q_marginal.resize(ps.size());
  parallel_for(qs.size(), [&](std::size_t i) { rep.p_marginal[i] = wigner_p_marginal(phi, qs[i]); });
  parallel_for(ps.size(), [&](std::size_t j) { rep.q_marginal[j] = wigner_q_marginal(phi, ps[j]); });
  const auto wq = trapezoid_weights(qs);
  const auto wp = trapezoid_weights(ps);
  rep.q_density_l1 = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) rep.q_density_l1 += wq[i] * std::abs(rep.p_marginal[i] - std::norm(phi(qs[i])));
  rep.p_density_l1 = 0.0;
  for (std::size_t j = 0; j < ps.size(); ++j)
    rep.p_density_l1 += wp[j] * std::abs(rep.q_marginal[j] - std::norm(momentum_wavefunction(phi, ps[j])));
  // The p-marginal is smooth in q, so a fixed composite Gauss-Legendre rule on [0, cutoff] suffices.
  const double cut = phi.support_cutoff();
  const auto gl = quad::gauss_legendre_rule(16);
  const int panels = 4;
  std::vector<double> nodes, weights;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < gl->n; ++i) {
      nodes.push_back(cut / panels * (k + 0.5 * (gl->nodes[i] + 1.0)));
      weights.push_back(0.5 * cut / panels * gl->weights[i]);
    }
  std::vector<double> vals(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { vals[i] = wigner_p_marginal(phi, nodes[i]); });
  rep.total_mass = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) rep.total_mass += weights[i] * vals[i];
  return rep;
}

cplx acs_symbol(const WaveFunction& phi, const WaveFunction& fiducial, const GroupElement& g) {
  const double q = g.q(), p = g.p();
  if (phi.is_coefficient_form() && fiducial.is_coefficient_form() && phi.basis().alpha == fiducial.basis().alpha) {
    // <U psi | phi> = sum_n conj((U psi)_n) phi_n, a finite sum.
    const BasisSpec b{phi.basis().alpha, std::max(phi.basis().n_max, fiducial.basis().n_max)};
    const auto& a = phi.coefficients();
    const auto& c = fiducial.coefficients();
    cplx s{};
    for (int n = 0; n < phi.basis().dim(); ++n) {
      if (a(n) == cplx{}) continue;
      cplx un{};
      for (int m = 0; m < fiducial.basis().dim(); ++m)
        if (c(m) != cplx{}) un += matrix_element(b, n, m, g) * c(m);
      s += std::conj(un) * a(n);
    }
    return s;
  }
  const double cut = std::min(phi.support_cutoff(), q * fiducial.support_cutoff());
  if (!std::isfinite(cut)) throw UnsupportedError("acs_symbol: states with algebraic decay are not supported");
  const double sq = std::sqrt(q);
  const double scale = std::max(phi.norm() * fiducial.norm(), 1e-300);
  const quad::QuadSpec spec{quad::Adaptive{1e-10, 1e-14 * scale, 4000}, quad::Domain{0.0, cut}};
  try {
    return quad::integrate_oscillatory([&](double x) { return std::conj(fiducial(x / q)) * phi(x) / sq; },
                                       [p](double x) { return -p * x; }, spec)
        .value;
  } catch (const AccuracyError& e) {
    throw AccuracyError("acs_symbol at (q=" + std::to_string(q) + ", p=" + std::to_string(p) + "): " + e.what(),
                        e.best_estimate(), e.error_estimate());
  }
}

double acs_density(const WaveFunction& phi, const WaveFunction& fiducial, const GroupElement& g) {
  return std::norm(acs_symbol(phi, fiducial, g)) / (2.0 * kPi * admissibility_constant(fiducial));
}

QuasiDistribution acs_symbol_grid(const WaveFunction& phi, const WaveFunction& fiducial, const PhaseSpaceGrid& grid) {
  grid.validate();
  QuasiDistribution out{grid, QuasiKind::AcsSymbol, std::vector<double>(grid.size()),
                        std::vector<cplx>(grid.size()), 0.0, phi.label()};
  const std::size_t np = grid.p_nodes.size();
  parallel_for(grid.size(), [&](std::size_t k) {
    out.complex_values[k] = acs_symbol(phi, fiducial, {grid.q_nodes[k / np], grid.p_nodes[k % np]});
    out.values[k] = std::abs(out.complex_values[k]);
  });
  return out;
}

QuasiDistribution acs_density_grid(const WaveFunction& phi, const WaveFunction& fiducial, const PhaseSpaceGrid& grid) {
  auto sym = acs_symbol_grid(phi, fiducial, grid);
  const double norm = 1.0 / (2.0 * kPi * admissibility_constant(fiducial));
  QuasiDistribution out{grid, QuasiKind::AcsDensity, std::vector<double>(grid.size()), {}, 0.0, phi.label()};
  for (std::size_t k = 0; k < grid.size(); ++k) out.values[k] = std::norm(sym.complex_values[k]) * norm;
  return out;
}

double aw_k0_convolution(const std::function<double(double, double)>& f, double q, double p) {
  if (!(q > 0.0)) throw DomainError("aw_k0_convolution: q must be > 0");
  // s = r / (2q): (1/pi) int K_0(|r|) f(q, p + r/(2q)) dr, the log singularity at r = 0 left to bisection.
  auto g = [&](double r) {
    const double k = specfun::bessel_k0(r);
    return k == 0.0 ? 0.0 : k * (f(q, p + r / (2.0 * q)) + f(q, p - r / (2.0 * q)));
  };
  const auto res = quad::integrate_halfline(g, {quad::Adaptive{1e-12, 1e-14, 8000}, quad::Domain{0.0, quad::kInf}});
  return res.value / kPi;
}

double acs_p2_constant(const WaveFunction& fiducial) {
  if (!fiducial.is_real()) throw UnsupportedError("acs_p2_constant: the fiducial must be real");
  const double kin = fiducial_moment(fiducial, 0.0, 2).real();
  return kin + kinetic_constant(fiducial) * acs_c_gamma(fiducial, 0.0);
}

double lower_symbol(const Weight& w, const Observable& obs, const GroupElement& g) {
  const double q = g.q(), p = g.p();
  const auto terms = p_polynomial(obs);
  if (std::holds_alternative<AwSpec>(w.spec)) {
    // The K_0 kernel has unit mass, so p-independent parts pass through unchanged.
    double s = 0.0;
    for (const auto& t : terms) {
      double poly = 0.0;
      for (int j = 0; j <= t.n; ++j) poly += binom(t.n, j) * std::pow(p, t.n - j) * k0_moment(j, q);
      s += t.a(q) * poly;
    }
    return w.scale * s;
  }
  if (std::holds_alternative<AcsSpec>(w.spec)) {
    const auto& psi = acs_fiducial(w);
    MonomialSum ms;
    for (const auto& t : terms) {
      if (!t.power) throw UnsupportedError("lower_symbol: ACS closed forms need u(q) = q^beta");
      ms.terms.push_back({t.coeff, *t.power, t.n});
    }
    // <q,p| Q^gamma P^k |q,p> = sum_j C(k,j) p^{k-j} q^{gamma-j} <psi| y^gamma (-i d)^j |psi>.
    cplx s{};
    for (const auto& op : quantized_terms(w, ms))
      for (int j = 0; j <= op.k; ++j) {
        cplx mu;
        try {
          mu = fiducial_moment(psi, op.gamma, j);
        } catch (const DivergenceError& e) {
          throw DivergenceError(std::string("lower_symbol: ") + e.what());
        }
        s += op.coeff * binom(op.k, j) * std::pow(p, op.k - j) * std::pow(q, op.gamma - j) * mu;
      }
    return s.real();
  }
  throw UnsupportedError("lower_symbol: closed forms exist for the aw and ACS weights; use lower_symbol_trace");
}

double trace_kernel(const Weight& w, const GroupElement& g) {
  const double q = g.q(), p = g.p();
  if (!w.fourier.atoms.empty()) throw UnsupportedError("trace_kernel: the weight transform has atoms");
  auto inner = [&](double x) {
    auto f = [&](double y) -> cplx {
      if (y <= 0.0) return {};
      const cplx a = partial_fourier(w, x / y, -x / q).smooth;
      if (a == cplx{}) return {};
      return cplx(std::cos(p * (x - y)), std::sin(p * (x - y))) * a * partial_fourier(w, y / x, -y).smooth;
    };
    return quad::integrate_halfline(f, {quad::Adaptive{1e-9, 1e-13, 4000}, quad::Domain{0.0, quad::kInf}}).value;
  };
  auto outer = [&](double x) { return x > 0.0 ? inner(x) : cplx{}; };
  const cplx v = quad::integrate_halfline(outer, {quad::Adaptive{1e-8, 1e-12, 4000}, quad::Domain{0.0, quad::kInf}}).value;
  return (v / (2.0 * kPi * q)).real();
}

double lower_symbol_trace(const Weight& w, const Observable& obs, const GroupElement& g, double tol) {
  const double q = g.q(), p = g.p();
  const quad::Adaptive outer_tol{tol, 1e-3 * tol, 4000};
  if (w.fourier.atoms.size() == 1 && !w.fourier.smooth) {
    const auto& atom = w.fourier.atoms[0];
    const double cM = compute_constants(w, {0.0}).c_M;
    // delta(-y - l(y/x)) in y: root of r(y) = 1 + l(y/x)/y, bracketed on a geometric scan outward
    // from y = 1/x in both directions.
    auto y_root = [&](double x) -> std::optional<std::pair<double, double>> {
      auto r = [&](double y) { return 1.0 + atom.location(y / x) / y; };
      auto solve = [&](double lo, double hi, double rl, double rh) {
        boost::uintmax_t it = 100;
        const auto br =
            boost::math::tools::toms748_solve(r, lo, hi, rl, rh, boost::math::tools::eps_tolerance<double>(50), it);
        const double y = 0.5 * (br.first + br.second);
        const double h = 1e-6 * y;
        const double dh = 1.0 + (atom.location((y + h) / x) - atom.location((y - h) / x)) / (2.0 * h);
        return std::pair{y, std::abs(dh)};
      };
      const double s = 1.0 / x;
      if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
      double up = s, rup = r(up), dn = s, rdn = rup;
      if (rup == 0.0) return solve(s * (1 - 1e-12), s * (1 + 1e-12), r(s * (1 - 1e-12)), r(s * (1 + 1e-12)));
      bool up_ok = true, dn_ok = true;
      for (int k = 0; k < 150 && (up_ok || dn_ok); ++k) {
        if (up_ok) {
          const double u2 = up * 1.6, ru2 = r(u2);
          up_ok = std::isfinite(u2) && std::isfinite(ru2);
          if (up_ok && (rup <= 0.0) != (ru2 <= 0.0)) return solve(up, u2, rup, ru2);
          up = u2;
          rup = ru2;
        }
        if (dn_ok) {
          const double d2 = dn / 1.6, rd2 = r(d2);
          dn_ok = d2 > 0.0 && std::isfinite(rd2);
          if (dn_ok && (rdn <= 0.0) != (rd2 <= 0.0)) return solve(d2, dn, rd2, rdn);
          dn = d2;
          rdn = rd2;
        }
      }
      return std::nullopt;
    };
    // For each x: the q'-delta fixes q' = -x / l(x/y*), with Jacobian q'^2 / x. Integrated in v = ln x,
    // split at v = 0, over half-periods of the carrier e^{ip'(x - y*)}.
    auto inner = [&](double pp) {
      auto envelope = [&](double v) -> cplx {
        const double x = std::exp(v);
        if (!(x > 0.0) || !std::isfinite(x)) return {};
        const auto yr = y_root(x);
        if (!yr) return {};
        const double y = yr->first;
        const double loc = atom.location(x / y);
        if (!(loc < 0.0)) return {};
        const double qs = -x / loc;
        const cplx amp = atom.amplitude(x / y) * atom.amplitude(y / x);
        return amp * (qs * qs / x) / (yr->second * 2.0 * kPi * qs) * obs(q * qs, pp / q + p) * x;
      };
      auto phase = [&](double v) {
        const double x = std::exp(v);
        const auto yr = y_root(x);
        return yr ? pp * (x - yr->first) : 0.0;
      };
      const quad::QuadSpec spec{quad::Oscillatory{1.0, 1e-9, 1e-12, 4000, 4000}, quad::Domain{0.0, quad::kInf}};
      return quad::integrate_oscillatory(envelope, phase, spec).value +
             quad::integrate_oscillatory([&](double v) { return envelope(-v); }, [&](double v) { return phase(-v); }, spec)
                 .value;
    };
    // The x-integral decays like e^{-2|p'|}; beyond p' = 30 it is below roundoff for polynomial f,
    // while the carrier cancellation there would never reach the absolute tolerance.
    // Below p' = 1e-14 the carrier never completes a period before x overflows; the logarithmic
    // singularity there contributes O(1e-12).
    auto outer = [&](double pp) { return pp > 1e-14 ? (inner(pp) + inner(-pp)).real() : 0.0; };
    return quad::integrate_interval(outer, 0.0, 30.0, outer_tol).value / cM;
  }
  if (!w.fourier.atoms.empty()) throw UnsupportedError("lower_symbol_trace: mixed or multi-atom transforms");
  std::function<double(double, double)> kernel;
  double cM;
  if (std::holds_alternative<AcsSpec>(w.spec)) {
    const auto& psi = acs_fiducial(w);
    kernel = [&psi](double qq, double pp) { return overlap_squared(psi, {qq, pp}); };
    cM = 2.0 * kPi * admissibility_constant(psi);
  } else {
    kernel = [&w](double qq, double pp) { return trace_kernel(w, {qq, pp}); };
    cM = compute_constants(w, {0.0}).c_M;
  }
  auto in = [&](double qq) {
    if (!(qq > 0.0)) return 0.0;
    auto f = [&](double pp) { return obs(q * qq, pp / q + p) * kernel(qq, pp); };
    return quad::integrate_interval(f, -quad::kInf, quad::kInf, outer_tol).value;
  };
  return quad::integrate_halfline(in, {outer_tol, quad::Domain{0.0, quad::kInf}}).value / cM;
}

WaveFunction evolve_state(const WaveFunction& phi0, const OperatorMatrix& H, double t, const EvolutionOptions& options) {
  const auto& m = H.entries;
  const double herm = (m - m.adjoint()).norm();
  if (herm > options.hermitian_tol * std::max(1.0, m.norm()))
    throw ValidityError("evolve: H is not hermitian (||H - H^*|| = " + std::to_string(herm) + ")");
  const Eigen::VectorXcd c0 = project(phi0, H.basis);
  const double defect = std::abs(1.0 - c0.squaredNorm() / (phi0.norm() * phi0.norm()));
  if (defect > options.capture_tol)
    throw ValidityError("evolve: the basis misses a fraction " + std::to_string(defect) + " of the initial state");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  const Eigen::MatrixXcd& V = es.eigenvectors();
  Eigen::VectorXcd phase(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) phase(k) = std::exp(-kI * es.eigenvalues()(k) * t);
  const Eigen::VectorXcd ct = V * phase.asDiagonal() * (V.adjoint() * c0);
  return WaveFunction(H.basis, ct, phi0.label());
}

std::vector<QuasiDistribution> evolve_density(const WaveFunction& phi0, const OperatorMatrix& H,
                                              const std::vector<double>& times, const WaveFunction& fiducial,
                                              const PhaseSpaceGrid& grid, const EvolutionOptions& options) {
  std::vector<QuasiDistribution> out;
  for (double t : times) {
    auto d = acs_density_grid(evolve_state(phi0, H, t, options), fiducial, grid);
    d.label = phi0.label() + " t=" + std::to_string(t);
    out.push_back(std::move(d));
  }
  return out;
}

FubiniStudy fubini_study(const WaveFunction& fiducial) {
  FubiniStudy fs{};
  fs.c_m3 = acs_c_gamma(fiducial, -3.0);
  fs.c_m4 = acs_c_gamma(fiducial, -4.0);
  double x2d2;
  if (fiducial.is_coefficient_form()) {
    // int x^2 |psi'|^2 = -<psi| 2x psi' + x^2 psi''>, boundary terms vanishing.
    const auto& b = fiducial.basis();
    const Eigen::MatrixXcd m = -(2.0 * xpow_deriv_matrix(b, 1.0, 1) + xpow_deriv_matrix(b, 2.0, 2)).cast<cplx>();
    const auto& c = fiducial.coefficients();
    x2d2 = (c.adjoint() * m * c)(0, 0).real();
  } else {
    const double cut = fiducial.support_cutoff();
    x2d2 = quad::integrate_halfline([&](double x) { return x * x * std::norm(wave_derivative(fiducial, x)); },
                                    {quad::Adaptive{1e-11, 1e-14, 8000}, quad::Domain{0.0, cut}})
               .value;
  }
  fs.L = x2d2 - 0.25;
  const double gp = 2.0 * (fs.c_m4 - fs.c_m3 * fs.c_m3), gq = 2.0 * fs.L;
  fs.metric = [gp, gq](double q, double) { return std::pair{gp * q * q, gq / (q * q)}; };
  return fs;
}

}  // namespace affq
