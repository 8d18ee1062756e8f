#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "affq/error.hpp"

namespace affq {

/// Point (q, p) of the half-plane, q > 0, viewed as an element of the affine group.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(double q, double p) : q_(q), p_(p) {
    if (!(q > 0.0) || !std::isfinite(q) || !std::isfinite(p))
      throw DomainError("GroupElement: need q > 0 and finite p (got q=" + std::to_string(q) +
                        ", p=" + std::to_string(p) + ")");
  }
  double q() const { return q_; }
  double p() const { return p_; }
  bool operator==(const GroupElement&) const = default;

 private:
  double q_ = 1.0;
  double p_ = 0.0;
};

inline GroupElement identity() { return {1.0, 0.0}; }

/// (q, p)(q0, p0) = (q q0, p0/q + p)
inline GroupElement compose(const GroupElement& g, const GroupElement& g0) {
  return {g.q() * g0.q(), g0.p() / g.q() + g.p()};
}

/// (q, p)^{-1} = (1/q, -q p)
inline GroupElement inverse(const GroupElement& g) { return {1.0 / g.q(), -g.q() * g.p()}; }

using PhaseSpaceFn = std::function<std::complex<double>(double q, double p)>;

/// (q, p) -> f(q/q0, q0 (p - p0)), i.e. f(g0^{-1} g).
inline PhaseSpaceFn left_translate(const GroupElement& g0, PhaseSpaceFn f) {
  const double q0 = g0.q(), p0 = g0.p();
  return [q0, p0, f = std::move(f)](double q, double p) { return f(q / q0, q0 * (p - p0)); };
}

}  // namespace affq
