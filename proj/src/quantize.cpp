#include "affq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "affq/error.hpp"
#include "affq/quadrature.hpp"
#include "affq/specfun.hpp"

namespace affq {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);
const cplx kI(0.0, 1.0);

// Coefficients below this (relative to the leading 1) come from finite-difference noise in
// G_beta derivatives whose exact value is zero; keeping them would demand needless basis regularity.
constexpr double kCoeffFloor = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double binom(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// int_lo^hi f(x) dx for f ~ x^{s} near 0 (s > -1): x = y^{1/(s+1)} on (0, 1] removes the singularity.
template <class F>
auto integrate_from_zero(F&& f, double s, double cut, const quad::Adaptive& tol) {
  using R = decltype(f(1.0));
  const double m = s < 0.0 ? 1.0 / (s + 1.0) : 1.0;
  auto g = [&](double y) -> R {
    if (y <= 0.0) return R{};
    const double x = std::pow(y, m);
    return f(x) * (m * std::pow(y, m - 1.0));
  };
  R total = quad::integrate_halfline(g, {tol, quad::Domain{0.0, 1.0}}).value;
  if (cut > 1.0) total += quad::integrate_halfline(f, {tol, quad::Domain{1.0, cut}}).value;
  return total;
}

double local_exponent(const std::function<double(double)>& f, double a, double b) {
  const double fa = std::abs(f(a)), fb = std::abs(f(b));
  if (fa == 0.0 || fb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log(fb / fa) / std::log(b / a);
}

// Phi(r, x) = int_0^inf (dq/q) varpi_hat(r, -q) u(x/q), atoms exactly.
cplx position_convolution(const Weight& w, double r, double x, const std::function<double(double)>& u) {
  cplx total{};
  for (const auto& a : w.fourier.atoms) {
    const double loc = a.location(r);
    if (loc < 0.0) total += a.amplitude(r) / (-loc) * u(x / (-loc));
  }
  if (!w.fourier.smooth) return total;
  auto f = [&](double q) -> cplx {
    if (q <= 0.0) return 0.0;
    return w.fourier.smooth(r, -q) * u(x / q) / q;
  };
  const double cut = w.x_cutoff * std::max(1.0, r);
  const double s0 = local_exponent([&](double q) { return std::abs(f(q)); }, 1e-8, 1e-6);
  const double s = std::isfinite(s0) ? s0 : 0.0;
  if (!(s > -1.0)) throw DivergenceError("position quantization: convolution diverges at q -> 0");
  return total + integrate_from_zero(f, s, cut, quad::Adaptive{1e-11, 1e-14, 8000});
}

cplx omega_at_one(const Weight& w) { return omega_beta(w, 0.0, 1.0); }

QuantizedOperator from_terms(const BasisSpec& basis, std::vector<OperatorTerm> terms) {
  QuantizedOperator op;
  op.terms = std::move(terms);
  op.closed_form = describe_terms(op.terms);
  op.matrix = OperatorMatrix::make(basis, assemble_terms(basis, op.terms));
  return op;
}

void append_terms(std::vector<OperatorTerm>& into, const std::vector<OperatorTerm>& add, cplx factor) {
  for (const auto& t : add) {
    auto it = std::find_if(into.begin(), into.end(), [&](const OperatorTerm& o) { return o.gamma == t.gamma && o.k == t.k; });
    if (it != into.end()) it->coeff += factor * t.coeff;
    else into.push_back({factor * t.coeff, t.gamma, t.k});
  }
}

std::vector<OperatorTerm> monomial_terms(const Weight& w, double beta, int n) {
  if (n < 0) throw DomainError("quantize: momentum power must be >= 0");
  const cplx om = omega_at_one(w);
  if (std::abs(om) == 0.0) throw ConfigError("quantize: Omega(1) vanishes; the weight has no trace");
  std::vector<cplx> g;
  try {
    g = g_beta_derivatives(w, beta, n);
  } catch (const DivergenceError& e) {
    throw DivergenceError("quantize q^" + fmt(beta) + " p^" + std::to_string(n) + ": " + e.what());
  }
  std::vector<OperatorTerm> terms;
  for (int k = n; k >= 0; --k) {
    const int j = n - k;
    const cplx c = binom(n, k) * std::pow(-kI, j) * g[j] / om;
    if (std::abs(c) <= kCoeffFloor) continue;
    terms.push_back({c, beta - j, k});
  }
  return terms;
}

}  // namespace

PositionFn PositionFn::q_power(double beta) {
  return {[beta](double q) { return std::pow(q, beta); }, beta, "q^" + fmt(beta)};
}

double Observable::operator()(double q, double p) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PositionFn>) return f.u(q);
        else if constexpr (std::is_same_v<T, MomentumPower>) return std::pow(p, f.n);
        else if constexpr (std::is_same_v<T, SeparableObs>) return f.u.u(q) * std::pow(p, f.n);
        else if constexpr (std::is_same_v<T, Dilation>) return q * p;
        else if constexpr (std::is_same_v<T, Kinetic>) return p * p;
        else {
          double s = 0.0;
          for (const auto& t : f.terms) s += t.coeff * std::pow(q, t.beta) * std::pow(p, t.n);
          return s;
        }
      },
      form);
}

std::optional<MonomialSum> Observable::as_monomials() const {
  return std::visit(
      [&](const auto& f) -> std::optional<MonomialSum> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PositionFn>) {
          if (!f.power) return std::nullopt;
          return MonomialSum{{{1.0, *f.power, 0}}};
        } else if constexpr (std::is_same_v<T, MomentumPower>) {
          return MonomialSum{{{1.0, 0.0, f.n}}};
        } else if constexpr (std::is_same_v<T, SeparableObs>) {
          if (!f.u.power) return std::nullopt;
          return MonomialSum{{{1.0, *f.u.power, f.n}}};
        } else if constexpr (std::is_same_v<T, Dilation>) {
          return MonomialSum{{{1.0, 1.0, 1}}};
        } else if constexpr (std::is_same_v<T, Kinetic>) {
          return MonomialSum{{{1.0, 0.0, 2}}};
        } else {
          return f;
        }
      },
      form);
}

Eigen::MatrixXcd assemble_terms(const BasisSpec& basis, const std::vector<OperatorTerm>& terms) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  for (const auto& t : terms) {
    if (t.coeff == cplx{}) continue;
    if (t.gamma == 0.0 && t.k == 0) m.diagonal().array() += t.coeff;
    else m += t.coeff * qp_monomial_matrix(basis, t.gamma, t.k);
  }
  return m;
}

std::string describe_terms(const std::vector<OperatorTerm>& terms) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const auto& t : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << t.coeff.real() << (t.coeff.imag() < 0 ? "-" : "+") << std::abs(t.coeff.imag()) << "i)";
    if (t.gamma != 0.0) os << " Q^" << t.gamma;
    if (t.k != 0) os << " P^" << t.k;
  }
  return os.str();
}

QuantizedOperator quantize_position_fn(const Weight& w, const PositionFn& u, const BasisSpec& basis) {
  basis.validate();
  if (u.power) {
    auto op = quantize_monomial(w, *u.power, 0, basis);
    const double c = op.terms.empty() ? 0.0 : op.terms[0].coeff.real();
    const double b = *u.power;
    op.multiplier = [c, b](double x) { return c * std::pow(x, b); };
    return op;
  }
  if (!u.u) throw ConfigError("quantize_position_fn: u is empty");
  const cplx d0 = omega_at_one(w);
  QuantizedOperator op;
  const Weight wc = w;
  const auto uf = u.u;
  op.multiplier = [wc, uf, d0](double x) { return (position_convolution(wc, 1.0, x, uf) / d0).real(); };
  op.closed_form = "multiplication by v(x) = (1/Omega(1)) int (dq/q) varpi_hat(1,-q) u(x/q), u = " +
                   (u.label.empty() ? std::string("u") : u.label);
  op.matrix = OperatorMatrix::make(basis, multiplication_matrix(basis, op.multiplier).cast<cplx>());
  op.matrix.hermitian = true;
  return op;
}

QuantizedOperator quantize_monomial(const Weight& w, double beta, int n, const BasisSpec& basis) {
  basis.validate();
  return from_terms(basis, monomial_terms(w, beta, n));
}

QuantizedOperator quantize_p_power(const Weight& w, int n, const BasisSpec& basis) {
  return quantize_monomial(w, 0.0, n, basis);
}

QuantizedOperator quantize_dilation(const Weight& w, const BasisSpec& basis) {
  auto op = quantize_monomial(w, 1.0, 1, basis);
  // a QP + b = a D + (b + i a/2)
  cplx a{}, b{};
  for (const auto& t : op.terms) {
    if (t.k == 1) a = t.coeff;
    else b = t.coeff;
  }
  const cplx shift = b + 0.5 * kI * a;
  std::ostringstream os;
  os.precision(10);
  os << "(" << a.real() << ") D + i (" << shift.imag() << ")";
  if (std::abs(shift.real()) > 0.0) os << " + (" << shift.real() << ")";
  op.closed_form = os.str();
  return op;
}

QuantizedOperator quantize_separable(const Weight& w, const PositionFn& u, const VDescriptor& v, const BasisSpec& basis,
                                     const SeparableOptions& options) {
  basis.validate();
  if (const auto* poly = std::get_if<PolynomialV>(&v)) {
    std::vector<OperatorTerm> terms;
    int top = -1;
    for (std::size_t k = 0; k < poly->coeffs.size(); ++k)
      if (poly->coeffs[k] != 0.0) top = static_cast<int>(k);
    if (top <= 0) {
      auto op = quantize_position_fn(w, u, basis);
      const double c0 = top == 0 ? poly->coeffs[0] : 0.0;
      op.matrix = OperatorMatrix::make(basis, c0 * op.matrix.entries);
      auto m = op.multiplier;
      op.multiplier = [m, c0](double x) { return c0 * m(x); };
      return op;
    }
    if (!u.power)
      throw UnsupportedError("quantize_separable: polynomial v needs u(q) = q^beta (got " +
                             (u.label.empty() ? std::string("a general u") : u.label) + ")");
    for (int k = 0; k <= top; ++k)
      if (poly->coeffs[k] != 0.0) append_terms(terms, monomial_terms(w, *u.power, k), poly->coeffs[k]);
    return from_terms(basis, terms);
  }
  const auto& vs = std::get<SampledVHat>(v);
  if (!vs.vhat || !u.u) throw ConfigError("quantize_separable: empty u or v_hat");
  const double cM = kSqrt2Pi * omega_at_one(w).real();
  const Weight wc = w;
  const auto uf = u.u;
  const auto vh = vs.vhat;
  QuantizedOperator op;
  op.kernel = [wc, uf, vh, cM](double x, double xp) -> cplx {
    if (!(x > 0.0 && xp > 0.0)) return 0.0;
    const double r = x / xp;
    return vh(xp - x) * r * position_convolution(wc, r, x, uf) / cM;
  };
  const int N = basis.n_max;
  const double x_max = options.x_max > 0.0 ? options.x_max : 4.0 * N + 2.0 * basis.alpha + 40.0;
  if (!(options.panel > 0.0) || options.order < 1) throw ConfigError("quantize_separable: bad kernel grid");
  const auto gl = quad::gauss_legendre_rule(options.order);
  const int panels = static_cast<int>(std::ceil(x_max / options.panel));
  const double h = x_max / panels;
  std::vector<double> xs, ws;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < gl->n; ++i) {
      xs.push_back(h * (k + 0.5 * (gl->nodes[i] + 1.0)));
      ws.push_back(0.5 * h * gl->weights[i]);
    }
  const int nodes = static_cast<int>(xs.size());
  Eigen::MatrixXcd A(nodes, N + 1);
  for (int i = 0; i < nodes; ++i) {
    const auto e = basis_values(basis, xs[i]);
    for (int m = 0; m <= N; ++m) A(i, m) = ws[i] * e[m];
  }
  Eigen::MatrixXcd K(nodes, nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) K(i, j) = op.kernel(xs[i], xs[j]);
  op.matrix = OperatorMatrix::make(basis, A.transpose() * K * A);
  op.closed_form = "integral operator with kernel (1/c_M) v_hat(x'-x) (x/x') int (dq/q) varpi_hat(x/x',-q) u(x/q)";
  return op;
}

std::vector<OperatorTerm> quantized_terms(const Weight& w, const MonomialSum& f) {
  std::vector<OperatorTerm> terms;
  for (const auto& t : f.terms) append_terms(terms, monomial_terms(w, t.beta, t.n), t.coeff);
  return terms;
}

QuantizedOperator quantize(const Weight& w, const Observable& obs, const BasisSpec& basis) {
  if (const auto* pf = std::get_if<PositionFn>(&obs.form)) return quantize_position_fn(w, *pf, basis);
  if (const auto* sep = std::get_if<SeparableObs>(&obs.form)) {
    if (!sep->u.power) {
      if (sep->n == 0) return quantize_position_fn(w, sep->u, basis);
      throw UnsupportedError("quantize: u(q) p^n with n > 0 needs u(q) = q^beta");
    }
  }
  if (std::holds_alternative<Dilation>(obs.form)) return quantize_dilation(w, basis);
  const auto ms = obs.as_monomials();
  if (!ms) throw UnsupportedError("quantize: observable is outside the supported catalog");
  std::vector<OperatorTerm> terms;
  for (const auto& t : ms->terms) {
    if (t.n < 0) throw DomainError("quantize: momentum power must be >= 0");
    append_terms(terms, monomial_terms(w, t.beta, t.n), t.coeff);
  }
  return from_terms(basis, terms);
}

CommutatorReport commutator_check(const Weight& w, const BasisSpec& basis) {
  basis.validate();
  if (basis.n_max < 3) throw DomainError("commutator_check: n_max must be >= 3");
  const auto aq = quantize_monomial(w, 1.0, 0, basis).matrix.entries;
  const auto ap = quantize_monomial(w, 0.0, 1, basis).matrix.entries;
  const Eigen::MatrixXcd c = aq * ap - ap * aq;
  // Q is tridiagonal, so the products are exact on the leading N x N block (indices 0..N-1).
  const int n = basis.n_max - 1;
  const Eigen::MatrixXcd ci = c.topLeftCorner(n, n);
  CommutatorReport r{};
  r.lambda = ci.diagonal().imag().mean();
  r.interior_residual = (ci - kI * r.lambda * Eigen::MatrixXcd::Identity(n, n)).norm();
  r.border_residual = (c - kI * r.lambda * Eigen::MatrixXcd::Identity(c.rows(), c.cols())).norm();
  r.expected = (omega_beta(w, 1.0, 1.0) / omega_at_one(w)).real();
  return r;
}

Observable translate(const Observable& f, const GroupElement& g0) {
  const auto ms = f.as_monomials();
  if (!ms) throw UnsupportedError("translate: only monomial observables are supported");
  const double q0 = g0.q(), p0 = g0.p();
  MonomialSum out;
  for (const auto& t : ms->terms) {
    // (q/q0)^beta (q0 (p - p0))^n = q0^{n-beta} q^beta sum_k C(n,k) (-p0)^{n-k} p^k
    const double scale = t.coeff * std::pow(q0, t.n - t.beta);
    for (int k = 0; k <= t.n; ++k) {
      const double c = scale * binom(t.n, k) * std::pow(-p0, t.n - k);
      if (c != 0.0) out.terms.push_back({c, t.beta, k});
    }
  }
  return {out, f.text.empty() ? std::string() : f.text + " o g0^-1"};
}

CovarianceReport covariance_check(const Weight& w, const Observable& f, const GroupElement& g0, const BasisSpec& basis) {
  basis.validate();
  const int N = basis.n_max;
  auto conjugated = [&](int inner) {
    const BasisSpec bi{basis.alpha, inner};
    const Eigen::MatrixXcd u = matrix_u(bi, g0).entries;
    const Eigen::MatrixXcd a = quantize(w, f, bi).matrix.entries;
    return Eigen::MatrixXcd((u * a * u.adjoint()).topLeftCorner(N + 1, N + 1));
  };
  const Eigen::MatrixXcd rhs = quantize(w, translate(f, g0), basis).matrix.entries;
  const double floor = 1e-11 * std::max(1.0, rhs.norm());
  // The rows of U(g0) decay only geometrically in the column index, so the inner dimension grows
  // in steps of N until the leading block stops changing.
  Eigen::MatrixXcd lhs = conjugated(2 * N);
  double tau = std::numeric_limits<double>::infinity();
  for (int k = 3; k <= 6 && !(tau <= floor); ++k) {
    const Eigen::MatrixXcd next = conjugated(std::min(k * N, std::max(180, 2 * N)));
    tau = (next - lhs).norm();
    lhs = next;
    if (k * N >= std::max(180, 2 * N)) break;
  }
  CovarianceReport r{};
  r.residual = (lhs - rhs).norm();
  r.truncation_estimate = tau;
  r.bound = 2.0 * std::max(r.truncation_estimate, floor);
  r.passed = r.residual <= r.bound;
  return r;
}

double acs_c_gamma(const WaveFunction& fiducial, double gamma) {
  if (fiducial.is_coefficient_form()) {
    const BasisSpec& b = fiducial.basis();
    Eigen::MatrixXd m;
    try {
      m = xpow_deriv_matrix(b, -2.0 - gamma, 0);
    } catch (const DivergenceError&) {
      throw DivergenceError("c_gamma diverges for gamma=" + fmt(gamma) + " (basis alpha=" + fmt(b.alpha) + ")");
    }
    const auto& c = fiducial.coefficients();
    return (c.adjoint() * m.cast<cplx>() * c)(0, 0).real();
  }
  auto f = [&](double x) -> double {
    if (x <= 0.0) return 0.0;
    return std::norm(fiducial(x)) * std::pow(x, -2.0 - gamma);
  };
  const double s0 = local_exponent(f, 1e-8, 1e-6);
  if (std::isfinite(s0) && !(s0 > -1.0 + 1e-3))
    throw DivergenceError("c_gamma diverges at x -> 0 for gamma=" + fmt(gamma) + " (local exponent " + fmt(s0) + ")");
  if (fiducial.decay() == DecayClass::Algebraic) {
    const double sinf = local_exponent(f, 1e3, 1e4);
    if (std::isfinite(sinf) && !(sinf < -1.0 - 1e-3))
      throw DivergenceError("c_gamma diverges at x -> inf for gamma=" + fmt(gamma));
  }
  return integrate_from_zero(f, std::isfinite(s0) ? s0 : 0.0, quad::kInf, quad::Adaptive{1e-13, 1e-300, 8000});
}

double kinetic_constant(const WaveFunction& fiducial) {
  if (!fiducial.is_real()) throw UnsupportedError("kinetic_constant: the fiducial must be real");
  const double cm1 = acs_c_gamma(fiducial, -1.0);
  if (fiducial.is_coefficient_form()) {
    // int (psi')^2 x dx = -<psi|psi'> - <psi|x psi''>, the boundary term vanishing for alpha > 0.
    const BasisSpec& b = fiducial.basis();
    if (!(b.alpha > 0.0)) throw DomainError("kinetic_constant: basis alpha must be > 0");
    const Eigen::MatrixXd m = -(xpow_deriv_matrix(b, 0.0, 1) + xpow_deriv_matrix(b, 1.0, 2));
    const Eigen::VectorXd c = fiducial.coefficients().real();
    return c.dot(m * c) / cm1;
  }
  // Five-point derivative with a step proportional to x near the origin.
  auto dpsi = [&](double x) {
    const double h = 1e-3 * std::min(1.0, x);
    return (fiducial(x - 2 * h).real() - 8.0 * fiducial(x - h).real() + 8.0 * fiducial(x + h).real() -
            fiducial(x + 2 * h).real()) /
           (12.0 * h);
  };
  auto f = [&](double x) -> double {
    if (x <= 0.0) return 0.0;
    const double d = dpsi(x);
    return d * d * x;
  };
  const double s0 = local_exponent(f, 1e-7, 1e-5);
  return integrate_from_zero(f, std::isfinite(s0) ? s0 : 0.0, quad::kInf, quad::Adaptive{1e-11, 1e-300, 8000}) / cm1;
}

ThermalConstants thermal_constants(double alpha, double t, int n_terms) {
  if (!(alpha > 0.0)) throw DomainError("thermal constants: alpha must be > 0");
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("thermal constants: t must lie in [0, 1)");
  if (n_terms < 1 || n_terms > 150) throw DomainError("thermal constants: n_terms must lie in [1, 150]");
  const BasisSpec b{alpha, n_terms};
  ThermalConstants tc{};
  // c_{-1;n} = 1/alpha for every n, which is why the per-term normalization is a global alpha.
  const Eigen::VectorXd kn = -(xpow_deriv_matrix(b, 0.0, 1) + xpow_deriv_matrix(b, 1.0, 2)).diagonal() * alpha;
  double s = 0.0, tn = 1.0, biggest = 0.0;
  for (int n = 0; n <= n_terms; ++n, tn *= t) {
    s += tn * kn(n);
    biggest = std::max(biggest, std::abs(kn(n)));
  }
  tc.K = (1.0 - t) * s;
  tc.tail_bound = std::pow(t, n_terms + 1) / (1.0 - t) * biggest;
  auto diag = [alpha, b](double gamma) -> Eigen::VectorXd {
    try {
      return xpow_deriv_matrix(b, -2.0 - gamma, 0).diagonal() * alpha;
    } catch (const DivergenceError&) {
      throw DivergenceError("thermal constant c_gamma diverges for (gamma, alpha) = (" + fmt(gamma) + ", " + fmt(alpha) +
                            ")");
    }
  };
  tc.c = [diag, t, n_terms](double gamma) {
    const Eigen::VectorXd cg = diag(gamma);
    double acc = 0.0, p = 1.0;
    for (int n = 0; n <= n_terms; ++n, p *= t) acc += p * cg(n);
    return (1.0 - t) * acc;
  };
  tc.c_tail = [diag, t, n_terms](double gamma) {
    return std::pow(t, n_terms + 1) / (1.0 - t) * diag(gamma).cwiseAbs().maxCoeff();
  };
  return tc;
}

QuantizedOperator thermal_quantize(double alpha, double t, const Observable& obs, int n_terms, const BasisSpec& basis) {
  basis.validate();
  const auto tc = thermal_constants(alpha, t, n_terms);
  const auto ms = obs.as_monomials();
  if (!ms) throw UnsupportedError("thermal_quantize: observable is outside the supported catalog");
  std::vector<OperatorTerm> terms;
  double tail = 0.0;
  for (const auto& m : ms->terms) {
    std::vector<OperatorTerm> part;
    if (m.n == 0) {
      const double c = tc.c(m.beta - 1.0);
      part = {{c, m.beta, 0}};
      tail = std::max(tail, std::abs(m.coeff) * tc.c_tail(m.beta - 1.0));
    } else if (m.n == 1 && m.beta == 0.0) {
      part = {{1.0, 0.0, 1}};
    } else if (m.n == 1 && m.beta == 1.0) {
      const double c = tc.c(0.0);
      part = {{c, 1.0, 1}, {-0.5 * kI * c, 0.0, 0}};  // c D = c (QP - i/2)
      tail = std::max(tail, std::abs(m.coeff) * tc.c_tail(0.0));
    } else if (m.n == 2 && m.beta == 0.0) {
      part = {{1.0, 0.0, 2}, {tc.K, -2.0, 0}};
      tail = std::max(tail, std::abs(m.coeff) * tc.tail_bound);
    } else {
      throw UnsupportedError("thermal_quantize: q^" + fmt(m.beta) + " p^" + std::to_string(m.n) +
                             " is outside {q^beta, p, qp, p^2}");
    }
    append_terms(terms, part, m.coeff);
  }
  auto op = from_terms(basis, terms);
  op.series_tail = tail;
  return op;
}

}  // namespace affq
