#include "affq/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

namespace affq {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// Local power-law exponent of |f| between a and b (both on the same side of the singular point).
double local_exponent(const std::function<cplx(double)>& f, double a, double b) {
  const double fa = std::abs(f(a)), fb = std::abs(f(b));
  if (fa == 0.0 && fb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (fa == 0.0) return 1e9;
  if (fb == 0.0) return -1e9;
  return std::log(fb / fa) / std::log(b / a);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Omega_beta(u) for a coefficient-form fiducial, exact by Gauss-Laguerre after x = y / kappa.
cplx acs_omega_beta_exact(const WaveFunction& psi, double beta, double u) {
  const BasisSpec& b = psi.basis();
  const double a = b.alpha;
  if (!(a - beta > 0.0))
    throw DivergenceError("Omega_beta diverges at x -> 0 for beta=" + fmt(beta) + " with alpha=" + fmt(a));
  const auto& c = psi.coefficients();
  int top = 0;
  for (int n = 0; n < c.size(); ++n)
    if (std::abs(c(n)) > 0.0) top = n;
  const double kappa = 0.5 * (1.0 + 1.0 / u);
  const auto rule = quad::gauss_laguerre_rule(top + 3, a - 1.0 - beta);
  const BasisSpec bt{a, std::max(top, 1)};
  cplx s{};
  for (int i = 0; i < rule->n; ++i) {
    const double x = rule->nodes[i] / kappa;
    const auto l1 = specfun::laguerre_normalized_all(bt.n_max, a, x);
    const auto l2 = specfun::laguerre_normalized_all(bt.n_max, a, x / u);
    cplx p1{}, p2{};
    for (int n = 0; n <= top; ++n) {
      p1 += c(n) * l1[n];
      p2 += c(n) * l2[n];
    }
    s += rule->weights[i] * p1 * std::conj(p2);
  }
  // x^{alpha-1-beta} dx = kappa^{-(alpha-beta)} y^{alpha-1-beta} dy; (x/u)^{alpha/2} gives u^{-alpha/2}.
  return kSqrt2Pi / u * std::pow(u, -0.5 * a) * std::pow(kappa, -(a - beta)) * s;
}

cplx acs_eval(const WaveFunction& psi, double q, double p) {
  const GroupElement g(q, p);
  if (psi.is_coefficient_form()) {
    const auto& c = psi.coefficients();
    const BasisSpec& b = psi.basis();
    std::vector<int> nz;
    for (int n = 0; n < c.size(); ++n)
      if (std::abs(c(n)) > 0.0) nz.push_back(n);
    cplx s{};
    for (int m : nz)
      for (int n : nz) s += c(m) * std::conj(c(n)) * std::conj(matrix_element(b, m, n, g));
    return s / std::sqrt(q);
  }
  return std::conj(inner_product(psi, apply_u(g, psi))) / std::sqrt(q);
}

}  // namespace

Weight scaled(const Weight& w, double factor) {
  Weight out = w;
  out.label = fmt(factor) + "*" + w.label;
  out.scale = w.scale * factor;
  auto ev = w.eval;
  out.eval = [ev, factor](double q, double p) { return factor * ev(q, p); };
  if (w.fourier.smooth) {
    auto sm = w.fourier.smooth;
    out.fourier.smooth = [sm, factor](double q, double x) { return factor * sm(q, x); };
  }
  for (auto& atom : out.fourier.atoms) {
    auto amp = atom.amplitude;
    atom.amplitude = [amp, factor](double q) { return factor * amp(q); };
  }
  if (w.omega_beta_closed) {
    auto ob = w.omega_beta_closed;
    out.omega_beta_closed = [ob, factor](double b, double u) { return factor * ob(b, u); };
  }
  if (w.g_beta_closed) {
    auto gb = w.g_beta_closed;
    out.g_beta_closed = [gb, factor](double b, int k) { return factor * gb(b, k); };
  }
  return out;
}

cplx thermal_weight_closed_form(double alpha, double t, double q, double p) {
  if (!(alpha > 0.0)) throw DomainError("thermal weight: alpha must be > 0");
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("thermal weight: t must lie in [0, 1)");
  if (!(q > 0.0)) throw DomainError("thermal weight: q must be > 0");
  // (1-t)/(2 pi) 2^{2 alpha + 1} q^{alpha/2} / (R (Z+ + t conj(Z+) + R)^alpha),
  // R = (Z+^2 - 2 Y t |Z+|^2 + t^2 conj(Z+)^2)^{1/2} = Z+ r, with r = 1 at t = 0.
  const cplx zp(q + 1.0, 2.0 * q * p), zm(q - 1.0, 2.0 * q * p);
  const double Y = std::clamp(1.0 - 2.0 * std::norm(zm) / std::norm(zp), -1.0, 1.0);
  const double phi = std::acos(Y);
  const cplx z = t * std::conj(zp) / zp;
  // 1 - 2 Y z + z^2 = (1 - z e^{i phi})(1 - z e^{-i phi}); each factor has positive real part for |z| < 1.
  const cplx r = std::sqrt(1.0 - z * std::polar(1.0, phi)) * std::sqrt(1.0 - z * std::polar(1.0, -phi));
  const cplx zp_pow = std::exp(-(alpha + 1.0) * std::log(zp));  // Z+^{-(alpha+1)}, principal
  return (1.0 - t) / (2.0 * kPi) * std::pow(2.0, 2.0 * alpha + 1.0) * std::pow(q, 0.5 * alpha) * zp_pow / r *
         std::pow(1.0 + z + r, -alpha);
}

cplx thermal_weight_series(double alpha, double t, double q, double p, int n_terms) {
  const BasisSpec b{alpha, std::max(1, n_terms)};
  cplx s{};
  double tn = 1.0;
  for (int n = 0; n <= n_terms; ++n) {
    s += tn * std::conj(matrix_element(b, n, n, GroupElement(q, p)));
    tn *= t;
  }
  return (1.0 - t) * s / std::sqrt(q);
}

double laguerre_poisson_partial(double alpha, double t, double x, double y, int n_terms) {
  if (n_terms < 0) throw DomainError("laguerre_poisson_partial: n_terms must be >= 0");
  const auto lx = specfun::laguerre_normalized_all(n_terms, alpha, x);
  const auto ly = specfun::laguerre_normalized_all(n_terms, alpha, y);
  double s = 0.0, tn = 1.0;
  for (int n = 0; n <= n_terms; ++n, tn *= t) s += tn * lx[n] * ly[n];
  return s;
}

double laguerre_poisson_closed(double alpha, double t, double x, double y) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("laguerre_poisson_closed: t must lie in (0, 1)");
  if (!(x > 0.0 && y > 0.0)) throw DomainError("laguerre_poisson_closed: x, y must be > 0");
  const double z = 2.0 * std::sqrt(x * y * t) / (1.0 - t);
  return std::pow(x * y * t, -0.5 * alpha) / (1.0 - t) * std::exp(z - (x + y) * t / (1.0 - t)) *
         specfun::bessel_i_scaled(alpha, z);
}

double bessel_laplace_closed(double alpha, double gamma, double mu) {
  if (!(alpha > 0.0)) throw DomainError("bessel_laplace: alpha must be > 0");
  if (!(mu > 0.0 && gamma > mu)) throw DomainError("bessel_laplace: need gamma > mu > 0");
  const double r = gamma / mu;
  // r - sqrt(r^2 - 1) written as 1/(r + sqrt(r^2 - 1)) to avoid cancellation.
  return std::pow(1.0 / (r + std::sqrt(r * r - 1.0)), alpha) / alpha;
}

double bessel_laplace_numeric(double alpha, double gamma, double mu) {
  if (!(alpha > 0.0)) throw DomainError("bessel_laplace: alpha must be > 0");
  if (!(mu > 0.0 && gamma > mu)) throw DomainError("bessel_laplace: need gamma > mu > 0");
  auto f = [&](double x) -> double {
    if (x <= 0.0) return 0.0;
    return std::exp((mu - gamma) * x) * specfun::bessel_i_scaled(alpha, mu * x) / x;
  };
  // The integrand is ~ x^{alpha-1} at 0; x = y^{1/alpha} on (0, 1] makes it smooth.
  auto g = [&](double y) -> double {
    if (y <= 0.0) return 0.0;
    const double m = 1.0 / alpha, x = std::pow(y, m);
    return f(x) * m * std::pow(y, m - 1.0);
  };
  const quad::Adaptive tol{1e-13, 1e-16, 8000};
  const double scale = 1.0 / (gamma - mu);
  const double head = quad::integrate_halfline(g, {tol, quad::Domain{0.0, 1.0}}).value;
  return head + quad::integrate_halfline(f, {tol, quad::Domain{1.0, 1.0 + 80.0 * scale}}).value;
}

ThermalConstant thermal_constant(double alpha, double t) {
  if (!(alpha > 0.0)) throw DomainError("thermal_constant: alpha must be > 0");
  if (!(t > 0.0 && t < 1.0)) throw DomainError("thermal_constant: t must lie in (0, 1)");
  ThermalConstant c{};
  c.closed = 2.0 * kPi / alpha;
  const double gamma = (1.0 + t) / (1.0 - t), mu = 2.0 * std::sqrt(t) / (1.0 - t);
  c.bessel_route = 2.0 * kPi * std::pow(t, -0.5 * alpha) * bessel_laplace_numeric(alpha, gamma, mu);
  // sum_n t^n e_n(x)^2 decays like e^{-(gamma - mu) x}; keep terms down to t^n ~ 1e-18.
  const int n_terms = static_cast<int>(std::ceil(std::log(1e-18) / std::log(t)));
  const BasisSpec b{alpha, n_terms};
  auto f = [&](double x) -> double {
    if (x <= 0.0) return 0.0;
    const auto e = basis_values(b, x);
    double s = 0.0, tn = 1.0;
    for (double v : e) {
      s += tn * v * v;
      tn *= t;
    }
    return s / x;
  };
  auto g = [&](double y) -> double {
    if (y <= 0.0) return 0.0;
    const double m = 1.0 / alpha, x = std::pow(y, m);
    return f(x) * m * std::pow(y, m - 1.0);
  };
  const quad::Adaptive tol{1e-12, 1e-16, 8000};
  const double cut = 1.0 + 80.0 / (gamma - mu);
  c.series_route = 2.0 * kPi * (1.0 - t) *
                   (quad::integrate_halfline(g, {tol, quad::Domain{0.0, 1.0}}).value +
                    quad::integrate_halfline(f, {tol, quad::Domain{1.0, cut}}).value);
  return c;
}

Weight builtin(const WeightSpec& spec) {
  Weight w;
  w.spec = spec;
  if (std::holds_alternative<std::monostate>(spec)) throw ConfigError("builtin: no weight kind given");
  if (std::holds_alternative<AwSpec>(spec)) {
    w.label = "aw";
    w.eval = [](double q, double p) {
      const double s = std::sqrt(q);
      return cplx(std::cos(s * p), -std::sin(s * p)) / s;
    };
    w.fourier.atoms.push_back({[](double q) { return -std::sqrt(q); }, [](double q) { return cplx(kSqrt2Pi / std::sqrt(q)); }});
    w.omega_beta_closed = [](double beta, double u) { return cplx(kSqrt2Pi * std::pow(u, -1.0 - 0.5 * beta)); };
    // G_beta(y) = sqrt(2 pi) y^{beta/2}: derivatives are falling factorials of beta/2.
    w.g_beta_closed = [](double beta, int k) {
      double f = kSqrt2Pi;
      for (int j = 0; j < k; ++j) f *= 0.5 * beta - j;
      return cplx(f);
    };
    w.x_cutoff = 10.0;
    return w;
  }
  if (const auto* d = std::get_if<DiagSpec>(&spec)) {
    if (!(d->alpha > 0.0)) throw DomainError("diag weight: alpha must be > 0");
    if (d->m < 0) throw DomainError("diag weight: m must be >= 0");
    if (!(d->s > 0.0)) throw DomainError("diag weight: s must be > 0");
    const DiagSpec ds = *d;
    const BasisSpec b{ds.alpha, std::max(1, ds.m)};
    w.label = "diag(" + fmt(ds.alpha) + "," + std::to_string(ds.m) + "," + fmt(ds.s) + ")";
    w.eval = [b, ds](double q, double p) {
      return std::conj(matrix_element(b, ds.m, ds.m, GroupElement(q, ds.s * p))) / std::sqrt(q);
    };
    w.fourier.smooth = [ds](double q, double x) -> cplx {
      if (!(x < 0.0)) return 0.0;
      return kSqrt2Pi / (ds.s * q) * basis_function(ds.alpha, ds.m, -x / ds.s) *
             basis_function(ds.alpha, ds.m, -x / (ds.s * q));
    };
    w.x_cutoff = ds.s * (4.0 * ds.m + 2.0 * ds.alpha + 90.0);
    return w;
  }
  if (const auto* th = std::get_if<ThermalSpec>(&spec)) {
    if (!(th->alpha > 0.0)) throw DomainError("thermal weight: alpha must be > 0");
    if (!(th->t >= 0.0 && th->t < 1.0)) throw DomainError("thermal weight: t must lie in [0, 1)");
    const double al = th->alpha, t = th->t;
    w.label = "thermal(" + fmt(al) + "," + fmt(t) + ")";
    w.eval = [al, t](double q, double p) { return 2.0 * kPi * thermal_weight_closed_form(al, t, q, p); };
    w.fourier.smooth = [al, t](double u, double x) -> cplx {
      if (!(x < 0.0)) return 0.0;
      const double y = -x;
      if (t == 0.0)
        return kSqrt2Pi / u * basis_function(al, 0, y) * basis_function(al, 0, y / u);
      // sqrt(2pi)/u * t^{-alpha/2} exp(-(y + y/u)(1+t)/(2(1-t))) I_alpha(2 sqrt(t) y/(sqrt(u)(1-t)))
      const double z = 2.0 * std::sqrt(t) * y / (std::sqrt(u) * (1.0 - t));
      const double ex = -(y + y / u) * (1.0 + t) / (2.0 * (1.0 - t)) + z;
      return kSqrt2Pi / u * std::pow(t, -0.5 * al) * std::exp(ex) * specfun::bessel_i_scaled(al, z);
    };
    const double st = std::sqrt(t);
    w.x_cutoff = (2.0 * al + 90.0) * (1.0 + st) / (1.0 - st);
    return w;
  }
  const auto& acs = std::get<AcsSpec>(spec);
  const WaveFunction psi = acs.fiducial;
  admissibility_constant(psi);
  w.label = "acs(" + (psi.label().empty() ? std::string("psi") : psi.label()) + ")";
  w.eval = [psi](double q, double p) { return acs_eval(psi, q, p); };
  w.fourier.smooth = [psi](double q, double x) -> cplx {
    if (!(x < 0.0)) return 0.0;
    return kSqrt2Pi / q * psi(-x) * std::conj(psi(-x / q));
  };
  if (psi.is_coefficient_form())
    w.omega_beta_closed = [psi](double beta, double u) { return acs_omega_beta_exact(psi, beta, u); };
  w.x_cutoff = std::isfinite(psi.support_cutoff()) ? psi.support_cutoff() : 1e4;
  return w;
}

SymmetryReport check_symmetry(const Weight& w, const std::vector<GroupElement>& samples, double tol) {
  SymmetryReport r;
  for (const auto& g : samples) {
    const auto gi = inverse(g);
    const double res = std::abs(w(g.q(), g.p()) - std::conj(w(gi.q(), gi.p())) / g.q());
    if (res > r.max_residual || samples.size() == 1) {
      r.max_residual = std::max(r.max_residual, res);
      r.worst = g;
    }
  }
  r.passed = r.max_residual <= tol;
  return r;
}

std::vector<GroupElement> symmetry_sample_grid(int nq, int np) {
  std::vector<GroupElement> out;
  for (int i = 0; i < nq; ++i) {
    const double q = 0.2 * std::pow(25.0, nq > 1 ? static_cast<double>(i) / (nq - 1) : 0.5);
    for (int j = 0; j < np; ++j) out.emplace_back(q, -3.0 + 6.0 * (np > 1 ? static_cast<double>(j) / (np - 1) : 0.5));
  }
  return out;
}

cplx partial_fourier_numeric(const Weight& w, double q, double x) {
  const quad::QuadSpec spec{quad::Oscillatory{std::max(std::abs(x), 1e-3), 1e-10, 1e-13}, quad::Domain{}};
  auto f_pos = [&](double p) { return w(q, p); };
  auto f_neg = [&](double p) { return w(q, -p); };
  cplx total;
  if (x == 0.0) {
    total = quad::integrate_interval([&](double p) { return w(q, p); }, -quad::kInf, quad::kInf, {1e-10, 1e-13}).value;
  } else {
    total = quad::integrate_oscillatory(f_pos, [x](double p) { return -p * x; }, spec).value +
            quad::integrate_oscillatory(f_neg, [x](double p) { return p * x; }, spec).value;
  }
  return total / kSqrt2Pi;
}

PartialFourier partial_fourier(const Weight& w, double q, double x) {
  if (!(q > 0.0)) throw DomainError("partial_fourier: q must be > 0");
  PartialFourier out{};
  out.smooth = w.fourier.smooth ? w.fourier.smooth(q, x)
                                : (w.fourier.atoms.empty() ? partial_fourier_numeric(w, q, x) : cplx{});
  for (const auto& a : w.fourier.atoms) out.atoms.push_back({a.location(q), a.amplitude(q)});
  return out;
}

cplx omega_beta(const Weight& w, double beta, double u) {
  if (!(u > 0.0)) throw DomainError("omega_beta: u must be > 0");
  if (w.omega_beta_closed) return w.omega_beta_closed(beta, u);
  cplx total{};
  for (const auto& a : w.fourier.atoms) {
    const double loc = a.location(u);
    if (loc < 0.0) total += a.amplitude(u) * std::pow(-loc, -1.0 - beta);
  }
  if (!w.fourier.smooth) return total;
  auto sm = [&](double x) { return w.fourier.smooth(u, -x); };
  const double s0 = local_exponent(sm, 1e-8, 1e-6);
  if (std::isfinite(s0) && !(s0 - beta > 1e-3))
    throw DivergenceError("Omega_beta diverges at x -> 0 for beta=" + fmt(beta) + " (local exponent " +
                          fmt(s0 - 1.0 - beta) + ")");
  const double cut = w.x_cutoff * std::max(1.0, u);
  const double sinf = local_exponent(sm, cut, 2.0 * cut);
  if (std::isfinite(sinf) && !(sinf - beta < -1e-3) && std::abs(sm(cut)) > 1e-200)
    throw DivergenceError("Omega_beta diverges at x -> inf for beta=" + fmt(beta));
  auto f = [&](double x) { return std::pow(x, -1.0 - beta) * sm(x); };
  // On (0, 1] use x = y^m to remove the algebraic endpoint singularity.
  const double m = (std::isfinite(s0) && s0 - beta < 1.0) ? 1.0 / (s0 - beta) : 1.0;
  auto g = [&](double y) -> cplx {
    if (y <= 0.0) return 0.0;
    const double x = std::pow(y, m);
    return f(x) * m * std::pow(y, m - 1.0);
  };
  const quad::Adaptive tol{1e-11, 1e-14, 8000};
  total += quad::integrate_halfline(g, {tol, quad::Domain{0.0, 1.0}}).value;
  if (cut > 1.0) total += quad::integrate_halfline(f, {tol, quad::Domain{1.0, cut}}).value;
  return total;
}

cplx WeightConstants::d(double beta) const {
  for (const auto& b : d_beta) {
    if (b.beta == beta) {
      if (!b.value) throw DivergenceError(b.divergence);
      return *b.value;
    }
  }
  if (omega_beta) return omega_beta(beta, 1.0);
  throw ConfigError("d_beta: beta=" + fmt(beta) + " was not requested");
}

WeightConstants compute_constants(const Weight& w, const std::vector<double>& betas, const std::vector<double>& u_grid) {
  WeightConstants c;
  c.omega = [w](double u) { return omega_beta(w, 0.0, u); };
  c.omega_beta = [w](double beta, double u) { return omega_beta(w, beta, u); };
  std::vector<double> all = betas;
  if (std::find(all.begin(), all.end(), 0.0) == all.end()) all.insert(all.begin(), 0.0);
  for (double b : all) {
    BetaValue v{b, std::nullopt, {}};
    try {
      v.value = omega_beta(w, b, 1.0);
      if (!std::isfinite(v.value->real()) || !std::isfinite(v.value->imag())) {
        v.value.reset();
        v.divergence = "d_beta is not finite for beta=" + fmt(b);
      }
    } catch (const DivergenceError& e) {
      v.divergence = e.what();
    }
    c.d_beta.push_back(v);
  }
  const cplx d0 = c.d(0.0);
  c.c_M = kSqrt2Pi * d0.real();
  for (double u : u_grid) c.omega_on_grid.emplace_back(u, c.omega(u));
  const double h = 1e-3;
  const cplx fm2 = c.omega(1 - 2 * h), fm1 = c.omega(1 - h), f0 = d0, fp1 = c.omega(1 + h), fp2 = c.omega(1 + 2 * h);
  c.omega_1 = f0;
  c.omega_prime_1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  c.omega_second_1 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
  return c;
}

std::vector<cplx> g_beta_derivatives(const Weight& w, double beta, int order) {
  if (order < 0) throw DomainError("g_beta_derivatives: order must be >= 0");
  auto G = [&](double y) { return omega_beta(w, beta, 1.0 / y) / y; };
  std::vector<cplx> out(order + 1);
  if (w.g_beta_closed) {
    for (int k = 0; k <= order; ++k) out[k] = w.g_beta_closed(beta, k);
    return out;
  }
  out[0] = G(1.0);
  if (order == 0) return out;
  if (order <= 2) {
    const double h = 1e-3;
    const cplx fm2 = G(1 - 2 * h), fm1 = G(1 - h), fp1 = G(1 + h), fp2 = G(1 + 2 * h);
    out[1] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    if (order >= 2) out[2] = (-fm2 + 16.0 * fm1 - 30.0 * out[0] + 16.0 * fp1 - fp2) / (12.0 * h * h);
    return out;
  }
  // Chebyshev interpolant on [1 - r, 1 + r], differentiated term by term.
  const int deg = 20;
  const double r = 0.25;
  std::vector<cplx> fv(deg + 1), coef(deg + 1);
  for (int j = 0; j <= deg; ++j) fv[j] = G(1.0 + r * std::cos(kPi * (j + 0.5) / (deg + 1)));
  for (int k = 0; k <= deg; ++k) {
    cplx s{};
    for (int j = 0; j <= deg; ++j) s += fv[j] * std::cos(kPi * k * (j + 0.5) / (deg + 1));
    coef[k] = s * (2.0 / (deg + 1));
  }
  coef[0] *= 0.5;
  std::vector<cplx> cur = coef;
  for (int d = 1; d <= order; ++d) {
    // c'_{k-1} = c'_{k+1} + 2 k c_k, with the constant term halved.
    const int n = static_cast<int>(cur.size()) - 1;
    std::vector<cplx> dd(n + 2, cplx{});
    for (int k = n - 1; k >= 0; --k) dd[k] = dd[k + 2] + 2.0 * (k + 1.0) * cur[k + 1];
    dd[0] *= 0.5;
    dd.resize(std::max(n, 1));
    cur = dd;
    // T_k(0) = cos(k pi / 2); each derivative in y brings a factor 1/r.
    cplx v{};
    for (std::size_t k = 0; k < cur.size(); k += 2) v += cur[k] * ((k / 2) % 2 ? -1.0 : 1.0);
    out[d] = v / std::pow(r, d);
  }
  return out;
}

TraceCondition trace_condition(const Weight& w) {
  TraceCondition tc{};
  tc.fourier_route = omega_beta(w, -1.0, 1.0) / kSqrt2Pi;
  cplx pv;
  if (!w.fourier.atoms.empty()) {
    pv = quad::principal_value([&](double p) { return w(1.0, p) / p; }, 0.0, quad::kInf,
                               quad::Oscillatory{1.0, 1e-10, 1e-12})
             .value;
  } else {
    // Smooth transforms make varpi(1, p) decay algebraically without oscillation, and evaluating it
    // may itself be a quadrature that cannot resolve huge |p|: integrate to P, then add the tail
    // int_P^inf g(p)/p dp of g(p) = varpi(1,p) - varpi(1,-p) from a power-law fit g ~ p^{-s}.
    const double P = 200.0;
    pv = quad::principal_value([&](double p) { return w(1.0, p) / p; }, 0.0, P, quad::Adaptive{1e-10, 1e-13, 8000})
             .value;
    auto g = [&](double p) { return w(1.0, p) - w(1.0, -p); };
    const cplx g1 = g(P), g2 = g(2.0 * P);
    if (std::abs(g1) > 1e-300 && std::abs(g2) > 1e-300) {
      const cplx s = -std::log(g2 / g1) / std::log(2.0);
      if (!(s.real() > 0.0)) throw DivergenceError("trace_condition: varpi(1, p)/p is not integrable at |p| -> inf");
      pv += g1 / s;
    }
  }
  tc.principal_route = 0.5 * w(1.0, 0.0) + cplx(0.0, 1.0) / (2.0 * kPi) * pv;
  tc.discrepancy = std::abs(tc.fourier_route - tc.principal_route);
  return tc;
}

}  // namespace affq
