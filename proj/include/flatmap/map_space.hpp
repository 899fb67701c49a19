#pragma once

// The circle-map family with a flat interval, in X, S and Y coordinates.
//
// X coordinates are canonical. A map lives on [x1, 1] with x1 identified with 1:
//
//   [x1, 0)   (1 - x2) q_s(phi(1 - x/x1)) + x2
//   [0, x3]   x1 * phil((x3 - x)/x3)^l1
//   (x3, x4)  0
//   [x4, 1]   x2 * phir((x - x4)/(1 - x4))^l2
//
// The exponent l1 governs the left end of the flat interval and l2 the right
// end (and the q_s factor). Renormalization swaps them.

#include "flatmap/diffeo.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flatmap {

template <class Scalar>
struct MapX {
  Scalar x1, x2, x3, x4;
  Scalar s;
  Scalar l1 = 1, l2 = 1;
  Diffeo<Scalar> phi, phil, phir;
};

/// S coordinates. `s` is carried alongside S5 because S5 = s^(l2-1) loses it when l2 = 1.
template <class Scalar>
struct MapS {
  Scalar S1, S2, S3, S4, S5;
  std::optional<Scalar> s;
  Scalar l1 = 1, l2 = 1;
  Diffeo<Scalar> phi, phil, phir;
};

template <class Scalar>
struct MapY {
  Scalar y1, y2, y3, y4, y5;
  std::optional<Scalar> s;
  Scalar l1 = 1, l2 = 1;
  Diffeo<Scalar> phi, phil, phir;
};

/// q_s(x) = (((1-s)x + s)^l - s^l) / (1 - s^l).
template <class Scalar>
Scalar qs_eval(const Scalar& s, const Scalar& l, const Scalar& x) {
  if (!(s > 0 && s < 1)) throw DomainError("qs_eval: s must lie in (0,1)");
  check_unit_interval(x, "qs_eval");
  return Diffeo<Scalar>::qs(s, l)(x);
}

/// Closed-form inverse of q_s, accurate relative to y near 0.
template <class Scalar>
Scalar qs_inverse(const Scalar& s, const Scalar& l, const Scalar& y) {
  using std::exp;
  using std::log;
  using std::pow;
  check_unit_interval(y, "qs_inverse");
  if (y <= 0) return Scalar(0);
  if (y >= 1) return Scalar(1);
  if (l == 1 || s == 1) return y;
  if (s == 0) return pow(y, 1 / l);
  const Scalar sl = pow(s, l);
  const Scalar norm = -math::expm1(l * log(s));
  // u = s (1 + y norm / s^l)^(1/l); x = (u - s)/(1 - s)
  return s * math::expm1(math::log1p(y * norm / sl) / l) / (1 - s);
}

template <class Scalar>
Scalar eval_map(const MapX<Scalar>& f, const Scalar& x) {
  using std::pow;
  const Scalar slack = 64 * math::epsilon<Scalar>();
  if (!(x >= f.x1 - slack && x <= 1 + slack)) throw DomainError("eval_map: argument outside [x1, 1]");
  if (x < 0) {
    const auto q = Diffeo<Scalar>::qs(f.s, f.l2);
    return (1 - f.x2) * q(f.phi(1 - x / f.x1)) + f.x2;
  }
  if (x <= f.x3) return f.x1 * pow(f.phil((f.x3 - x) / f.x3), f.l1);
  if (x < f.x4) return Scalar(0);
  return f.x2 * pow(f.phir((x - f.x4) / (1 - f.x4)), f.l2);
}

/// Flat-interval asymmetry x3/x4.
template <class Scalar>
Scalar alpha(const MapX<Scalar>& f) {
  return f.x3 / f.x4;
}

/// The same ratio written in S coordinates.
template <class Scalar>
Scalar alpha(const MapS<Scalar>& f) {
  return f.S2 * f.S3 / (1 - f.S2 + (1 - f.S1) * f.S2 * f.S3);
}

template <class Scalar>
MapS<Scalar> x_to_s(const MapX<Scalar>& f) {
  using std::pow;
  MapS<Scalar> g;
  g.S1 = (f.x3 - f.x2) / f.x3;
  g.S2 = (1 - f.x4) / (1 - f.x2);
  g.S3 = f.x3 / (1 - f.x4);
  g.S4 = f.x2 / (-f.x1);
  g.S5 = pow(f.s, f.l2 - 1);
  g.s = f.s;
  g.l1 = f.l1;
  g.l2 = f.l2;
  g.phi = f.phi;
  g.phil = f.phil;
  g.phir = f.phir;
  return g;
}

/// Recovers s from S5, or from the stored value when l2 = 1.
template <class Scalar>
Scalar s_parameter(const MapS<Scalar>& g) {
  using std::pow;
  if (g.l2 > 1) return pow(g.S5, 1 / (g.l2 - 1));
  if (!g.s) throw DomainError("s_to_x: l2 = 1 makes S5 = 1, so s cannot be recovered from it");
  return *g.s;
}

template <class Scalar>
MapX<Scalar> s_to_x(const MapS<Scalar>& g) {
  MapX<Scalar> f;
  const Scalar t = g.S3 * (1 - g.S1) * g.S2;
  const Scalar den = 1 + t;
  f.x1 = -t / (den * g.S4);
  f.x2 = t / den;
  f.x3 = g.S3 * g.S2 / den;
  f.x4 = 1 - g.S2 / den;
  f.s = s_parameter(g);
  f.l1 = g.l1;
  f.l2 = g.l2;
  f.phi = g.phi;
  f.phil = g.phil;
  f.phir = g.phir;
  return f;
}

template <class Scalar>
MapY<Scalar> s_to_y(const MapS<Scalar>& g) {
  using std::log;
  if (!(g.S2 > 0 && g.S3 > 0 && g.S4 > 0 && g.S5 > 0)) throw DomainError("s_to_y: S2..S5 must be positive");
  MapY<Scalar> y;
  y.y1 = g.S1;
  y.y2 = log(g.S2);
  y.y3 = log(g.S3);
  y.y4 = log(g.S4);
  y.y5 = log(g.S5);
  y.s = g.s;
  y.l1 = g.l1;
  y.l2 = g.l2;
  y.phi = g.phi;
  y.phil = g.phil;
  y.phir = g.phir;
  return y;
}

template <class Scalar>
MapS<Scalar> y_to_s(const MapY<Scalar>& y) {
  using std::exp;
  MapS<Scalar> g;
  g.S1 = y.y1;
  g.S2 = exp(y.y2);
  g.S3 = exp(y.y3);
  g.S4 = exp(y.y4);
  g.S5 = exp(y.y5);
  g.s = y.s;
  g.l1 = y.l1;
  g.l2 = y.l2;
  g.phi = y.phi;
  g.phil = y.phil;
  g.phir = y.phir;
  return g;
}

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the X simplex and the circle identification f(x1) = f(1) = x2. Never throws.
template <class Scalar>
ValidationReport validate(const MapX<Scalar>& f) {
  using std::abs;
  ValidationReport r;
  auto need = [&](bool cond, const char* what) {
    if (!cond) r.violations.emplace_back(what);
  };
  need(f.x1 < 0, "x1 < 0");
  need(0 < f.x3, "0 < x3");
  need(f.x3 < f.x4, "x3 < x4");
  need(f.x4 < 1, "x4 < 1");
  need(0 < f.x2, "0 < x2");
  need(f.x2 < 1, "x2 < 1");
  need(0 < f.s, "0 < s");
  need(f.s < 1, "s < 1");
  need(f.l1 >= 1, "l1 >= 1");
  need(f.l2 >= 1, "l2 >= 1");
  if (!r.ok()) return r;
  const Scalar tol = 1024 * math::epsilon<Scalar>();
  try {
    need(abs(eval_map(f, f.x1) - f.x2) <= tol, "f(x1) = x2");
    need(abs(eval_map(f, Scalar(1)) - f.x2) <= tol, "f(1) = x2");
  } catch (const std::exception& e) {
    r.violations.emplace_back(std::string("evaluation failed: ") + e.what());
  }
  return r;
}

}  // namespace flatmap
