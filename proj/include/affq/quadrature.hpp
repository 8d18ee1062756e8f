#pragma once

// Half-line, principal-value and oscillatory integration.
//
// Every public entry point accepts callables returning either double or
// std::complex<double>. Infinite upper limits are mapped with x = lo + t/(1-t)
// before adaptive Gauss-Kronrod (7/15) bisection.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <queue>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "affq/error.hpp"

namespace affq::quad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct GaussLaguerre {
  int n_nodes = 64;
  double alpha = 0.0;  ///< weight x^alpha e^{-x} absorbed by the rule
};

struct Adaptive {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdiv = 4000;
};

/// Adaptive quadrature over half-periods of a carrier with angular frequency freq_hint,
/// with Wynn-epsilon acceleration of the partial sums on infinite domains.
struct Oscillatory {
  double freq_hint = 1.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdiv = 4000;
  int max_periods = 2000;
};

using Scheme = std::variant<GaussLaguerre, Adaptive, Oscillatory>;

struct Domain {
  double lo = 0.0;
  double hi = kInf;
};

struct QuadSpec {
  Scheme scheme = Adaptive{};
  Domain domain{};
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Immutable Gauss-Laguerre node table for the weight x^alpha e^{-x}.
struct LaguerreRule {
  int n = 0;
  double alpha = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached, thread-safe; the returned table is never mutated.
std::shared_ptr<const LaguerreRule> gauss_laguerre_rule(int n, double alpha);

/// Gauss-Legendre nodes and weights on [-1, 1] (reuses LaguerreRule's layout, alpha unused).
std::shared_ptr<const LaguerreRule> gauss_legendre_rule(int n);

/// Wynn epsilon extrapolation of a sequence of partial sums; returns the best estimate and
/// the difference between the two most recent diagonal entries as an error proxy.
struct Extrapolated {
  double value;
  double error;
};
Extrapolated wynn_epsilon(const std::vector<double>& partial_sums);

/// Polynomial (Neville) extrapolation of samples y(h_i) to h = 0.
Extrapolated richardson_to_zero(const std::vector<double>& h, const std::vector<double>& y);

namespace detail {

template <class T>
inline double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
inline bool finite_value(const T& v) {
  if constexpr (std::is_same_v<T, std::complex<double>>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

template <class F>
using result_t = std::decay_t<std::invoke_result_t<F, double>>;

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Gauss-Kronrod 7/15 on [a, b] with the QUADPACK error heuristic.
template <class F, class T = result_t<F>>
Segment<T> gk15(F& f, double a, double b, int& evals) {
  static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T resk = fc * wgk[7];
  T resg = fc * wg[3];
  double resabs = std::abs(wgk[7]) * magnitude(fc);
  T fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    const T s = fv1[j] + fv2[j];
    resk += wgk[j] * s;
    resabs += wgk[j] * (magnitude(fv1[j]) + magnitude(fv2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * s;
  }
  evals += 15;
  const T mean = resk * 0.5;
  double resasc = wgk[7] * magnitude(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (magnitude(fv1[j] - mean) + magnitude(fv2[j] - mean));
  const double ah = std::abs(h);
  resk *= h;
  resg *= h;
  resabs *= ah;
  resasc *= ah;
  double err = magnitude(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!finite_value(resk)) throw EvaluationError("integrand is not finite on [" + std::to_string(a) + ", " +
                                                 std::to_string(b) + "]");
  return {a, b, resk, err};
}

// Adaptive bisection on a finite interval.
template <class F, class T = result_t<F>>
QuadResult<T> adaptive_finite(F& f, double a, double b, double rel_tol, double abs_tol, int max_subdiv) {
  QuadResult<T> out;
  if (a == b) return out;
  std::priority_queue<Segment<T>> heap;
  auto first = gk15(f, a, b, out.evaluations);
  T total = first.value;
  double total_err = first.error;
  heap.push(first);
  int subdiv = 0;
  while (total_err > std::max(abs_tol, rel_tol * magnitude(total))) {
    if (subdiv >= max_subdiv) {
      out.converged = false;
      break;
    }
    const Segment<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted at machine resolution
      out.converged = false;
      heap.push(worst);
      break;
    }
    auto left = gk15(f, worst.a, mid, out.evaluations);
    auto right = gk15(f, mid, worst.b, out.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdiv;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  T sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  if (err <= std::max(abs_tol, rel_tol * magnitude(sum))) out.converged = true;
  return out;
}

// Adaptive on [lo, hi] with hi possibly +inf (x = lo + t/(1-t)) and lo possibly -inf.
template <class F, class T = result_t<F>>
QuadResult<T> adaptive_any(F&& f, double lo, double hi, double rel_tol, double abs_tol, int max_subdiv) {
  if (std::isfinite(lo) && std::isfinite(hi)) return adaptive_finite(f, lo, hi, rel_tol, abs_tol, max_subdiv);
  if (std::isfinite(lo) && hi == kInf) {
    auto g = [&](double t) -> T {
      const double s = 1.0 - t;
      const double x = lo + t / s;
      const T v = f(x);
      if (magnitude(v) == 0.0) return T{};
      return v / (s * s);
    };
    return adaptive_finite(g, 0.0, 1.0, rel_tol, abs_tol, max_subdiv);
  }
  if (lo == -kInf && std::isfinite(hi)) {
    auto g = [&](double t) -> T {
      const double s = 1.0 - t;
      const double x = hi - t / s;
      const T v = f(x);
      if (magnitude(v) == 0.0) return T{};
      return v / (s * s);
    };
    return adaptive_finite(g, 0.0, 1.0, rel_tol, abs_tol, max_subdiv);
  }
  if (lo == -kInf && hi == kInf) {
    auto g = [&](double t) -> T {
      const double s = 1.0 - t * t;
      const double x = t / s;
      const T v = f(x);
      if (magnitude(v) == 0.0) return T{};
      return v * ((1.0 + t * t) / (s * s));
    };
    return adaptive_finite(g, -1.0, 1.0, rel_tol, abs_tol, max_subdiv);
  }
  throw DomainError("quadrature: invalid domain");
}

struct ComplexExtrapolated {
  std::complex<double> value;
  double error;
};

inline ComplexExtrapolated wynn_complex(const std::vector<std::complex<double>>& sums) {
  std::vector<double> re(sums.size()), im(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    re[i] = sums[i].real();
    im[i] = sums[i].imag();
  }
  const auto r = wynn_epsilon(re);
  const auto i = wynn_epsilon(im);
  return {{r.value, i.value}, std::hypot(r.error, i.error)};
}

// Sum of piece integrals over consecutive intervals [x_k, x_{k+1}) produced by next_break,
// accelerated with Wynn epsilon. Stops when the accelerated estimate stabilises.
template <class F, class Next, class T = result_t<F>>
QuadResult<T> accelerated_pieces(F& f, double start, Next&& next_break, double rel_tol, double abs_tol,
                                 int max_subdiv, int max_pieces) {
  QuadResult<T> out;
  std::vector<T> partial;
  T running{};
  double a = start;
  double piece_err = 0.0;
  T prev_est{};
  double prev_diff = kInf;
  int stable = 0;
  for (int k = 0; k < max_pieces; ++k) {
    const double b = next_break(a, k);
    auto piece = adaptive_finite(f, a, b, rel_tol, 0.1 * abs_tol, max_subdiv);
    out.evaluations += piece.evaluations;
    piece_err += piece.error;
    running += piece.value;
    partial.push_back(running);
    a = b;
    if (partial.size() < 4) continue;
    T est;
    double ext_err;
    if constexpr (std::is_same_v<T, std::complex<double>>) {
      const auto e = wynn_complex(partial);
      est = e.value;
      ext_err = e.error;
    } else {
      const auto e = wynn_epsilon(partial);
      est = e.value;
      ext_err = e.error;
    }
    const double diff = magnitude(est - prev_est);
    const double tol = std::max(abs_tol, rel_tol * magnitude(est));
    prev_est = est;
    out.value = est;
    out.error = std::max(diff, std::min(ext_err, prev_diff)) + piece_err;
    prev_diff = diff;
    if (diff <= tol && k >= 8) {
      if (++stable >= 3) {
        out.converged = true;
        return out;
      }
    } else {
      stable = 0;
    }
  }
  out.converged = false;
  return out;
}

template <class F>
void require_converged(const QuadResult<F>& r, const char* where) {
  if (!r.converged) {
    double best;
    if constexpr (std::is_same_v<F, std::complex<double>>) best = r.value.real();
    else best = r.value;
    throw AccuracyError(std::string(where) + ": tolerance not reached (error estimate " +
                            std::to_string(r.error) + ")",
                        best, r.error);
  }
}

}  // namespace detail

/// Integrates f over spec.domain. For GaussLaguerre, f is the factor g in x^alpha e^{-x} g(x)
/// on (0, inf); the error estimate is the difference to a rule with 3n/4 nodes.
template <class F>
auto integrate_halfline(F&& f, const QuadSpec& spec) -> QuadResult<detail::result_t<F>> {
  using T = detail::result_t<F>;
  const double lo = spec.domain.lo;
  const double hi = spec.domain.hi;
  if (!(lo < hi)) throw DomainError("quadrature: requires lo < hi");
  if (!(lo >= 0.0)) throw DomainError("quadrature: requires lo >= 0");
  if (const auto* gl = std::get_if<GaussLaguerre>(&spec.scheme)) {
    if (gl->n_nodes < 1) throw DomainError("gauss_laguerre: n_nodes must be >= 1");
    if (lo != 0.0 || hi != kInf) throw DomainError("gauss_laguerre: domain must be (0, inf)");
    auto sum_rule = [&](int n) {
      const auto rule = gauss_laguerre_rule(n, gl->alpha);
      T s{};
      for (int i = 0; i < n; ++i) s += rule->weights[i] * f(rule->nodes[i]);
      return s;
    };
    QuadResult<T> out;
    out.value = sum_rule(gl->n_nodes);
    out.evaluations = gl->n_nodes;
    if (gl->n_nodes > 4) {
      const int coarse = std::max(1, gl->n_nodes * 3 / 4);
      out.error = detail::magnitude(out.value - sum_rule(coarse));
      out.evaluations += coarse;
    }
    if (!detail::finite_value(out.value)) throw EvaluationError("gauss_laguerre: integrand is not finite");
    return out;
  }
  if (const auto* ad = std::get_if<Adaptive>(&spec.scheme)) {
    if (!(ad->rel_tol > 0.0) || !(ad->abs_tol > 0.0)) throw DomainError("adaptive: tolerances must be > 0");
    auto r = detail::adaptive_any(f, lo, hi, ad->rel_tol, ad->abs_tol, ad->max_subdiv);
    detail::require_converged(r, "integrate_halfline");
    return r;
  }
  const auto& os = std::get<Oscillatory>(spec.scheme);
  if (!(os.freq_hint > 0.0)) throw DomainError("oscillatory: freq_hint must be > 0");
  if (std::isfinite(hi)) {
    auto r = detail::adaptive_finite(f, lo, hi, os.rel_tol, os.abs_tol, os.max_subdiv);
    detail::require_converged(r, "integrate_halfline");
    return r;
  }
  const double half = std::numbers::pi / os.freq_hint;
  auto r = detail::accelerated_pieces(
      f, lo, [half](double a, int) { return a + half; }, os.rel_tol, os.abs_tol, os.max_subdiv, os.max_periods);
  detail::require_converged(r, "integrate_halfline(oscillatory)");
  return r;
}

/// Adaptive quadrature on an arbitrary interval; either end may be infinite.
template <class F>
auto integrate_interval(F&& f, double lo, double hi, const Adaptive& tol = {}) -> QuadResult<detail::result_t<F>> {
  if (!(lo < hi)) throw DomainError("quadrature: requires lo < hi");
  auto r = detail::adaptive_any(f, lo, hi, tol.rel_tol, tol.abs_tol, tol.max_subdiv);
  detail::require_converged(r, "integrate_interval");
  return r;
}

/// Cauchy principal value of f over [s - half_width, s + half_width] (half_width may be inf)
/// with a simple pole at s: symmetric excision of [s - eps, s + eps] for eps in {1e-2, 1e-3, 1e-4},
/// Richardson-extrapolated to eps = 0. The scheme selects how each excised integral is computed.
template <class F>
auto principal_value(F&& f, double singularity, double half_width, const Scheme& scheme)
    -> QuadResult<detail::result_t<F>> {
  using T = detail::result_t<F>;
  if (!(half_width > 0.0)) throw DomainError("principal_value: half_width must be > 0");
  auto sym = [&](double u) -> T { return f(singularity + u) + f(singularity - u); };
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  std::vector<T> values;
  QuadResult<T> out;
  for (double e : eps) {
    QuadSpec spec{scheme, Domain{e, half_width}};
    if (std::holds_alternative<GaussLaguerre>(scheme)) throw DomainError("principal_value: unsupported scheme");
    auto r = integrate_halfline(sym, spec);
    values.push_back(r.value);
    out.evaluations += r.evaluations;
    out.error = std::max(out.error, r.error);
  }
  auto extrap = [&](auto component) {
    std::vector<double> y;
    for (const auto& v : values) y.push_back(component(v));
    return richardson_to_zero(eps, y);
  };
  if constexpr (std::is_same_v<T, std::complex<double>>) {
    const auto re = extrap([](const T& v) { return v.real(); });
    const auto im = extrap([](const T& v) { return v.imag(); });
    out.value = {re.value, im.value};
    out.error += std::hypot(re.error, im.error);
  } else {
    const auto r = extrap([](double v) { return v; });
    out.value = r.value;
    out.error += r.error;
  }
  double tol = 1e-6;
  if (const auto* a = std::get_if<Adaptive>(&scheme)) tol = std::max(a->abs_tol, a->rel_tol * detail::magnitude(out.value));
  if (const auto* o = std::get_if<Oscillatory>(&scheme)) tol = std::max(o->abs_tol, o->rel_tol * detail::magnitude(out.value));
  if (out.error > 1e3 * tol) {
    out.converged = false;
    detail::require_converged(out, "principal_value");
  }
  return out;
}

/// int envelope(x) exp(i phase(x)) dx over spec.domain, for a phase monotone on the domain.
/// The domain is cut where the phase advances by pi; on infinite domains the piece sums are
/// Wynn-accelerated.
template <class Env, class Phase>
QuadResult<std::complex<double>> integrate_oscillatory(Env&& envelope, Phase&& phase, const QuadSpec& spec) {
  using C = std::complex<double>;
  double rel_tol = 1e-9, abs_tol = 1e-12;
  int max_subdiv = 4000, max_pieces = 2000;
  if (const auto* a = std::get_if<Adaptive>(&spec.scheme)) {
    rel_tol = a->rel_tol;
    abs_tol = a->abs_tol;
    max_subdiv = a->max_subdiv;
  } else if (const auto* o = std::get_if<Oscillatory>(&spec.scheme)) {
    rel_tol = o->rel_tol;
    abs_tol = o->abs_tol;
    max_subdiv = o->max_subdiv;
    max_pieces = o->max_periods;
  } else {
    throw DomainError("integrate_oscillatory: GaussLaguerre scheme is not supported");
  }
  const double lo = spec.domain.lo;
  const double hi = spec.domain.hi;
  if (!(lo < hi)) throw DomainError("integrate_oscillatory: requires lo < hi");
  auto f = [&](double x) -> C {
    const C e = C(envelope(x));
    if (e == C{}) return C{};
    const double ph = phase(x);
    return e * C(std::cos(ph), std::sin(ph));
  };
  const double p0 = phase(lo);
  // Locate x > a with |phase(x) - phase(a)| = pi, by doubling then bisection.
  auto next_break = [&](double a, int) {
    const double pa = phase(a);
    double step = std::max(1e-3, 1e-3 * std::abs(a));
    double b = a + step;
    int guard = 0;
    while (std::abs(phase(b) - pa) < std::numbers::pi && guard < 200) {
      step *= 2.0;
      b = a + step;
      ++guard;
      if (std::isfinite(hi) && b >= hi) return hi;
    }
    double l = a, r = b;
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (l + r);
      if (std::abs(phase(m) - pa) < std::numbers::pi) l = m;
      else r = m;
      if (r - l <= 1e-14 * std::max(1.0, std::abs(r))) break;
    }
    return std::isfinite(hi) ? std::min(r, hi) : r;
  };
  if (std::isfinite(hi)) {
    const double total_phase = std::abs(phase(hi) - p0);
    if (total_phase < 4.0 * std::numbers::pi) {
      auto r = detail::adaptive_finite(f, lo, hi, rel_tol, abs_tol, max_subdiv);
      detail::require_converged(r, "integrate_oscillatory");
      return r;
    }
    QuadResult<C> out;
    double a = lo;
    int pieces = 0;
    while (a < hi) {
      const double b = next_break(a, pieces);
      auto r = detail::adaptive_finite(f, a, b, rel_tol, abs_tol / std::max(1.0, total_phase), max_subdiv);
      out.value += r.value;
      out.error += r.error;
      out.evaluations += r.evaluations;
      out.converged = out.converged && r.converged;
      a = b;
      if (++pieces > 100000) throw AccuracyError("integrate_oscillatory: too many phase pieces", out.value.real(), out.error);
    }
    detail::require_converged(out, "integrate_oscillatory");
    return out;
  }
  // Flat phase on an infinite domain: plain adaptive.
  if (std::abs(phase(lo + 1e3) - p0) < 1e-12 && std::abs(phase(lo + 1.0) - p0) < 1e-12) {
    auto r = detail::adaptive_any(f, lo, hi, rel_tol, abs_tol, max_subdiv);
    detail::require_converged(r, "integrate_oscillatory");
    return r;
  }
  auto r = detail::accelerated_pieces(f, lo, next_break, rel_tol, abs_tol, max_subdiv, max_pieces);
  detail::require_converged(r, "integrate_oscillatory");
  return r;
}

}  // namespace affq::quad
