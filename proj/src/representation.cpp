#include "affq/representation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

namespace affq {

namespace {

struct NormCache {
  std::once_flag flag;
  double value = 0.0;
};

// Local power-law exponent s of |psi(x)|^2 ~ x^s at the origin.
double origin_exponent(const WaveFunction& psi) {
  const double x1 = 1e-7, x2 = 1e-5;
  const double a1 = std::norm(psi(x1)), a2 = std::norm(psi(x2));
  if (a1 == 0.0 && a2 == 0.0) return 1e9;
  if (a1 == 0.0) return 1e9;
  return std::log(a2 / a1) / std::log(x2 / x1);
}

double integrate_density(const std::function<double(double)>& f, double cutoff) {
  const quad::QuadSpec spec{quad::Adaptive{1e-10, 1e-14, 4000}, quad::Domain{0.0, cutoff}};
  return quad::integrate_halfline(f, spec).value;
}

}  // namespace

WaveFunction::WaveFunction(const BasisSpec& basis, Eigen::VectorXcd coefficients, std::string label)
    : coeffs_(std::move(coefficients)), basis_(basis), label_(std::move(label)) {
  basis_.validate();
  if (coeffs_->size() != basis_.dim())
    throw DomainError("WaveFunction: coefficient vector length must be n_max + 1");
  if (!coeffs_->allFinite()) throw DomainError("WaveFunction: non-finite coefficients");
  norm_ = coeffs_->norm();
  real_ = coeffs_->imag().cwiseAbs().maxCoeff() == 0.0;
}

WaveFunction::WaveFunction(Fn f, DecayClass decay, double scale, std::string label)
    : fn_(std::move(f)), decay_(decay), scale_(scale), label_(std::move(label)) {
  if (!fn_) throw DomainError("WaveFunction: empty callable");
  if (!(scale > 0.0)) throw DomainError("WaveFunction: scale must be > 0");
  const double cut = support_cutoff();
  norm_ = std::sqrt(integrate_density([this](double x) { return std::norm(fn_(x)); }, cut));
  if (!std::isfinite(norm_)) throw DomainError("WaveFunction: norm is not finite");
}

cplx WaveFunction::operator()(double x) const {
  if (!(x > 0.0)) return (coeffs_ && x == 0.0 && basis_.alpha == 0.0) ? (*coeffs_)(0) * 0.0 : cplx{};
  if (coeffs_) {
    const auto e = basis_values(basis_, x);
    cplx s{};
    for (int n = 0; n < basis_.dim(); ++n) s += (*coeffs_)(n) * e[n];
    return s;
  }
  return fn_(x);
}

const Eigen::VectorXcd& WaveFunction::coefficients() const {
  if (!coeffs_) throw DomainError("WaveFunction: not in coefficient form");
  return *coeffs_;
}

const BasisSpec& WaveFunction::basis() const {
  if (!coeffs_) throw DomainError("WaveFunction: not in coefficient form");
  return basis_;
}

double WaveFunction::support_cutoff() const {
  if (coeffs_) {
    int top = 0;
    for (int n = 0; n < basis_.dim(); ++n)
      if (std::abs((*coeffs_)(n)) > 0.0) top = n;
    return 4.0 * top + 2.0 * std::max(0.0, basis_.alpha) + 90.0;
  }
  switch (decay_) {
    case DecayClass::Exponential: return 40.0 * scale_;
    case DecayClass::Gaussian: return 9.0 * scale_;
    case DecayClass::Algebraic: return quad::kInf;
  }
  return quad::kInf;
}

WaveFunction WaveFunction::normalized() const {
  if (norm_ == 0.0) throw DomainError("WaveFunction: cannot normalize the zero vector");
  if (coeffs_) return WaveFunction(basis_, *coeffs_ / norm_, label_);
  const double n = norm_;
  auto f = fn_;
  WaveFunction out([f, n](double x) { return f(x) / n; }, decay_, scale_, label_);
  out.real_ = real_;
  return out;
}

WaveFunction WaveFunction::with_real_flag(bool real) const {
  WaveFunction out = *this;
  out.real_ = real;
  return out;
}

WaveFunction basis_state(const BasisSpec& basis, int n) {
  basis.validate();
  if (n < 0 || n > basis.n_max) throw DomainError("basis_state: index out of range");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.dim());
  c(n) = 1.0;
  return WaveFunction(basis, c, "e_" + std::to_string(n));
}

cplx wave_derivative(const WaveFunction& psi, double x) {
  if (psi.is_coefficient_form()) {
    const auto d = basis_derivatives(psi.basis(), x);
    cplx s{};
    for (int n = 0; n < psi.basis().dim(); ++n) s += psi.coefficients()(n) * d[n];
    return s;
  }
  // Step proportional to x near the origin so the stencil stays inside the half-line.
  const double h = 1e-3 * std::min(1.0, x);
  return (psi(x - 2 * h) - 8.0 * psi(x - h) + 8.0 * psi(x + h) - psi(x + 2 * h)) / (12.0 * h);
}

Eigen::VectorXcd project(const WaveFunction& psi, const BasisSpec& basis) {
  basis.validate();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.dim());
  if (psi.is_coefficient_form() && psi.basis().alpha == basis.alpha) {
    const int d = std::min(basis.dim(), psi.basis().dim());
    c.head(d) = psi.coefficients().head(d);
    return c;
  }
  // Composite Gauss-Legendre in s = sqrt(x), which smooths the x^{alpha/2} behaviour at the origin.
  const double smax = std::sqrt(psi.support_cutoff());
  const auto gl = quad::gauss_legendre_rule(20);
  const int panels = static_cast<int>(std::ceil(smax / 0.1));
  const double h = smax / panels;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < gl->n; ++i) {
      const double sn = h * (k + 0.5 * (gl->nodes[i] + 1.0));
      const double x = sn * sn;
      const cplx v = psi(x) * (h * gl->weights[i] * sn);
      if (v == cplx{}) continue;
      const auto e = basis_values(basis, x);
      for (int n = 0; n < basis.dim(); ++n) c(n) += e[n] * v;
    }
  return c;
}

cplx inner_product(const WaveFunction& phi, const WaveFunction& psi) {
  if (phi.is_coefficient_form() && psi.is_coefficient_form() && phi.basis().alpha == psi.basis().alpha) {
    const int d = std::min(phi.basis().dim(), psi.basis().dim());
    return phi.coefficients().head(d).dot(psi.coefficients().head(d));
  }
  const double cut = std::min(phi.support_cutoff(), psi.support_cutoff());
  // Cancellation limits the attainable absolute accuracy to roundoff on the scale |phi| |psi|.
  const double floor = 1e-13 * std::max(phi.norm() * psi.norm(), 1e-300);
  const quad::QuadSpec spec{quad::Adaptive{1e-10, floor, 4000}, quad::Domain{0.0, cut}};
  return quad::integrate_halfline([&](double x) { return std::conj(phi(x)) * psi(x); }, spec).value;
}

OperatorMatrix OperatorMatrix::make(const BasisSpec& basis, Eigen::MatrixXcd entries) {
  basis.validate();
  if (entries.rows() != basis.dim() || entries.cols() != basis.dim())
    throw DomainError("OperatorMatrix: entries must be (n_max+1) x (n_max+1)");
  if (!entries.allFinite()) throw EvaluationError("OperatorMatrix: non-finite entries");
  OperatorMatrix m{basis, std::move(entries), 0.0, std::nullopt};
  m.truncation_estimate = border_norm(m.entries);
  return m;
}

double OperatorMatrix::border_norm(const Eigen::MatrixXcd& m) {
  const auto n = m.rows() - 1;
  return std::sqrt(m.row(n).squaredNorm() + m.col(n).squaredNorm() - std::norm(m(n, n)));
}

WaveFunction apply_u(const GroupElement& g, const WaveFunction& psi) {
  const double q = g.q(), p = g.p();
  const double s = 1.0 / std::sqrt(q);
  auto f = [psi, q, p, s](double x) { return cplx(std::cos(p * x), std::sin(p * x)) * psi(x / q) * s; };
  double scale = psi.scale() * q;
  DecayClass decay = psi.decay();
  if (psi.is_coefficient_form()) {
    decay = DecayClass::Exponential;
    scale = q * psi.support_cutoff() / 40.0;
  }
  return WaveFunction(f, decay, scale, psi.label()).with_real_flag(psi.is_real() && p == 0.0);
}

cplx matrix_element(const BasisSpec& basis, int m, int n, const GroupElement& g) {
  basis.validate();
  if (m < 0 || n < 0) throw DomainError("matrix_element: indices must be >= 0");
  const double a = basis.alpha;
  const double q = g.q(), p = g.p();
  const cplx zp(q + 1.0, 2.0 * q * p), zm(q - 1.0, 2.0 * q * p);
  const cplx zpb = std::conj(zp), zmb = std::conj(zm);
  const double Y = 1.0 - 2.0 * std::norm(zm) / std::norm(zp);
  const cplx base = std::exp((a + 1.0) * (std::log(2.0) + 0.5 * std::log(q)) - (a + 1.0) * std::log(zpb));
  const cplx rot = zp / zpb;  // unit modulus
  auto ipow = [](cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
  };
  if (m <= n) {
    const double lf = 0.5 * (std::lgamma(n + a + 1.0) + std::lgamma(m + 1.0) - std::lgamma(m + a + 1.0) -
                             std::lgamma(n + 1.0));
    return base * std::exp(lf) * ipow(zmb / zpb, n - m) * ipow(rot, m) * specfun::jacobi(m, n - m, a, Y);
  }
  const double lf = 0.5 * (std::lgamma(m + a + 1.0) + std::lgamma(n + 1.0) - std::lgamma(n + a + 1.0) -
                           std::lgamma(m + 1.0));
  return base * std::exp(lf) * ipow(-zm / zpb, m - n) * ipow(rot, n) * specfun::jacobi(n, m - n, a, Y);
}

OperatorMatrix matrix_u(const BasisSpec& basis, const GroupElement& g) {
  basis.validate();
  Eigen::MatrixXcd u(basis.dim(), basis.dim());
  for (int n = 0; n < basis.dim(); ++n)
    for (int m = 0; m < basis.dim(); ++m) u(m, n) = matrix_element(basis, m, n, g);
  return OperatorMatrix::make(basis, std::move(u));
}

namespace {

// sum_{m=0}^{M} t^m U_mm with U_mm = C rot^m P_m^{(0,alpha)}(Y); M chosen so t^M < 1e-17.
cplx abel_partial(double alpha, const GroupElement& g, double t) {
  const double q = g.q(), p = g.p();
  const cplx zp(q + 1.0, 2.0 * q * p), zm(q - 1.0, 2.0 * q * p);
  const cplx zpb = std::conj(zp);
  const double Y = 1.0 - 2.0 * std::norm(zm) / std::norm(zp);
  const cplx base = std::exp((alpha + 1.0) * (std::log(2.0) + 0.5 * std::log(q)) - (alpha + 1.0) * std::log(zpb));
  const double theta = 2.0 * std::arg(zp);
  const int M = static_cast<int>(std::ceil(std::log(1e-17) / std::log(t))) + 1;
  const auto P = specfun::jacobi_all(M, 0.0, alpha, Y);
  cplx s{};
  double tm = 1.0;
  for (int m = 0; m <= M; ++m) {
    s += tm * P[m] * cplx(std::cos(m * theta), std::sin(m * theta));
    tm *= t;
  }
  return base * s;
}

}  // namespace

TraceResult trace_u(const BasisSpec& basis, const GroupElement& g, Summation summation,
                    const std::vector<double>& t_grid) {
  basis.validate();
  if (g.q() == 1.0) throw DivergenceError("trace_u: the trace has a pole at q = 1");
  TraceResult out{};
  if (summation == Summation::Direct) {
    cplx s{}, half{};
    for (int m = 0; m <= basis.n_max; ++m) {
      s += matrix_element(basis, m, m, g);
      if (m == basis.n_max / 2) half = s;
    }
    out.value = s;
    out.error_estimate = std::abs(s - half);
    return out;
  }
  std::vector<double> grid = t_grid;
  if (grid.empty()) {
    // S(t) = sum t^m U_mm is analytic in t up to the circle through the branch points of the
    // Jacobi generating function; keep 1 - t well inside that distance.
    const double q = g.q(), p = g.p();
    const cplx zp(q + 1.0, 2.0 * q * p), zm(q - 1.0, 2.0 * q * p);
    const double Y = 1.0 - 2.0 * std::norm(zm) / std::norm(zp);
    const double theta = 2.0 * std::arg(zp);
    const double phi = std::acos(std::clamp(Y, -1.0, 1.0));
    const double gap = std::min(std::abs(cplx(std::polar(1.0, theta)) - std::polar(1.0, phi)),
                                std::abs(cplx(std::polar(1.0, theta)) - std::polar(1.0, -phi)));
    const double h0 = std::min(0.1, gap / 8.0);
    grid = {1.0 - h0, 1.0 - 0.1 * h0, 1.0 - 0.01 * h0};
  }
  if (grid.size() < 2) throw DomainError("trace_u: Abel summation needs at least two t values");
  std::vector<double> h, re, im;
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("trace_u: t values must lie in (0,1)");
    const cplx v = abel_partial(basis.alpha, g, t);
    out.abel_samples.push_back(v);
    h.push_back(1.0 - t);
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  const auto r = quad::richardson_to_zero(h, re);
  const auto i = quad::richardson_to_zero(h, im);
  out.value = {r.value, i.value};
  out.error_estimate = std::hypot(r.error, i.error);
  return out;
}

double trace_u_closed_form(double q, double alpha) {
  if (!(q > 0.0)) throw DomainError("trace_u_closed_form: q must be > 0");
  if (q == 1.0) throw DivergenceError("trace_u_closed_form: pole at q = 1");
  const double e = q > 1.0 ? 0.5 * (1.0 - alpha) : 0.5 * (1.0 + alpha);
  return std::pow(q, e) / std::abs(q - 1.0);
}

namespace {

double weighted_norm_sq(const WaveFunction& psi, double power, const char* what) {
  // |psi|^2 x^{-power} must be integrable at 0.
  const double s = origin_exponent(psi);
  if (!(s - power > -1.0 + 1e-6))
    throw AdmissibilityError(std::string(what) + ": |psi|^2 x^{" + std::to_string(-power) +
                             "} is not integrable at 0 (local exponent " + std::to_string(s - power) + ")");
  try {
    return integrate_density([&](double x) { return std::norm(psi(x)) * std::pow(x, -power); }, psi.support_cutoff());
  } catch (const AccuracyError&) {
    throw AdmissibilityError(std::string(what) + ": weighted norm does not converge");
  }
}

}  // namespace

WaveFunction duflo_moore_apply(double power, const WaveFunction& psi) {
  if (power == 0.0) return psi;
  const double nsq = std::pow(2.0 * std::numbers::pi, power) * weighted_norm_sq(psi, power, "duflo_moore_apply");
  if (!std::isfinite(nsq)) throw AdmissibilityError("duflo_moore_apply: infinite norm");
  auto f = [psi, power](double x) { return std::pow(2.0 * std::numbers::pi / x, 0.5 * power) * psi(x); };
  double scale = psi.scale();
  DecayClass decay = psi.decay();
  if (psi.is_coefficient_form()) {
    decay = DecayClass::Exponential;
    scale = psi.support_cutoff() / 40.0;
  }
  return WaveFunction(f, decay, scale, psi.label()).with_real_flag(psi.is_real());
}

double admissibility_constant(const WaveFunction& fiducial) {
  if (fiducial.is_coefficient_form()) {
    const auto& b = fiducial.basis();
    if (!(b.alpha > 0.0)) throw AdmissibilityError("admissibility: c_{-1} diverges for alpha <= 0");
    const Eigen::MatrixXd m = xpow_deriv_matrix(b, -1.0, 0);
    const auto& c = fiducial.coefficients();
    return (c.adjoint() * m.cast<cplx>() * c)(0, 0).real();
  }
  return weighted_norm_sq(fiducial, 1.0, "admissibility");
}

WaveFunction make_acs(const GroupElement& g, const WaveFunction& fiducial) {
  admissibility_constant(fiducial);
  return apply_u(g, fiducial);
}

}  // namespace affq
