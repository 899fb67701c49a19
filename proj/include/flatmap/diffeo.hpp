#pragma once

// Orientation-preserving diffeomorphisms of [0,1] as immutable expression DAGs.
//
// A Diffeo is a handle to a shared, immutable node. Renormalization builds new
// diffeomorphisms by zooming and composing older ones, so subtrees are shared
// rather than copied and evaluation walks the DAG with the exact chain rule.

#include "flatmap/real.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace flatmap {

/// Raised when a derivative vanishes or blows up at the requested point.
class SingularDerivative : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Value and first two derivatives at a point.
template <class Scalar>
struct Jet {
  Scalar value;
  Scalar d1;
  Scalar d2;
};

enum class DiffeoKind { Identity, Primitive, Qs, Zoom, Compose, Reflect };

template <class Scalar>
class Diffeo {
 public:
  /// Jet evaluator for a named primitive. `order` is 0, 1 or 2; entries above
  /// the requested order may be left unset.
  using JetFn = std::function<Jet<Scalar>(const Scalar& x, int order)>;

  Diffeo() : Diffeo(identity()) {}

  static Diffeo identity() {
    auto node = std::make_shared<Node>();
    node->kind = DiffeoKind::Identity;
    return Diffeo(std::move(node));
  }

  /// A user-supplied primitive. `jet` must describe a C^2 increasing map fixing 0 and 1.
  static Diffeo primitive(std::string name, std::vector<Scalar> params, JetFn jet) {
    auto node = std::make_shared<Node>();
    node->kind = DiffeoKind::Primitive;
    node->name = std::move(name);
    node->params = std::move(params);
    node->jet = std::move(jet);
    return Diffeo(std::move(node));
  }

  /// e_a(x) = (exp(a x) - 1) / (exp(a) - 1); a = 0 is the identity.
  static Diffeo exp_family(const Scalar& a) {
    JetFn fn = [a](const Scalar& x, int order) {
      using std::exp;
      if (a == 0) return Jet<Scalar>{x, Scalar(1), Scalar(0)};
      const Scalar denom = math::expm1(a);
      Jet<Scalar> j{math::expm1(a * x) / denom, Scalar(0), Scalar(0)};
      if (order >= 1) {
        const Scalar e = exp(a * x);
        j.d1 = a * e / denom;
        if (order >= 2) j.d2 = a * a * e / denom;
      }
      return j;
    };
    return primitive("exp", {a}, std::move(fn));
  }

  /// q_s(x) = (((1-s)x + s)^l - s^l) / (1 - s^l), the diffeomorphic part of x^l.
  /// s = 0 gives x^l (not a diffeomorphism at 0); s = 1 is the identity limit.
  static Diffeo qs(const Scalar& s, const Scalar& exponent) {
    if (!(s >= 0 && s <= 1)) throw DomainError("qs: s must lie in [0,1]");
    if (!(exponent >= 1)) throw DomainError("qs: exponent must be >= 1");
    auto node = std::make_shared<Node>();
    node->kind = DiffeoKind::Qs;
    node->s = s;
    node->exponent = exponent;
    if (s > 0 && s < 1) {
      using std::log;
      node->norm = -math::expm1(exponent * log(s));
    } else {
      node->norm = 1;
    }
    node->one_minus_s = 1 - s;
    using std::floor;
    using std::pow;
    if (exponent == floor(exponent) && exponent <= 32) {
      const int k = static_cast<int>(math::to_double(exponent));
      node->int_exp = k;
      node->s_pows.resize(k);
      node->sum_s = 0;
      Scalar p = 1;
      for (int m = 0; m < k; ++m) {
        node->s_pows[m] = p;
        node->sum_s += p;
        p *= s;
      }
      node->c1 = Scalar(k) / node->sum_s;
      node->c2 = Scalar(k) * Scalar(k - 1) * node->one_minus_s / node->sum_s;
    } else {
      node->s_l = s > 0 ? Scalar(pow(s, exponent)) : Scalar(0);
      node->c1 = exponent * node->one_minus_s / node->norm;
      node->c2 = exponent * (exponent - 1) * node->one_minus_s * node->one_minus_s / node->norm;
    }
    return Diffeo(std::move(node));
  }

  DiffeoKind kind() const { return node_->kind; }
  int depth() const { return node_->depth; }

  /// Evaluates with up to `order` derivatives. Arguments are clamped to [0,1].
  Jet<Scalar> jet(const Scalar& x, int order = 2) const { return eval_node(*node_, clamp01(x), order); }

  Scalar operator()(const Scalar& x) const { return jet(x, 0).value; }

  // Structure accessors, mainly for serialization and tests.
  const std::string& name() const { return node_->name; }
  const std::vector<Scalar>& params() const { return node_->params; }
  const Scalar& s() const { return node_->s; }
  const Scalar& exponent() const { return node_->exponent; }
  const Scalar& zoom_a() const { return node_->a; }
  const Scalar& zoom_b() const { return node_->b; }
  Diffeo child() const { return Diffeo(node_->first); }
  Diffeo outer() const { return Diffeo(node_->first); }
  Diffeo inner() const { return Diffeo(node_->second); }

  friend Diffeo zoom_node(const Diffeo& d, const Scalar& a, const Scalar& b) {
    auto node = std::make_shared<Node>();
    node->kind = DiffeoKind::Zoom;
    node->a = a;
    node->b = b;
    node->first = d.node_;
    node->depth = d.depth() + 1;
    node->lo_value = eval_node(*d.node_, a, 0).value;
    node->range = eval_node(*d.node_, b, 0).value - node->lo_value;
    if (!(node->range > 0)) throw DomainError("zoom: image of the interval is degenerate");
    node->width = b - a;
    node->scale1 = node->width / node->range;
    node->scale2 = node->scale1 * node->width;
    return Diffeo(std::move(node));
  }

  friend Diffeo compose_node(const Diffeo& outer, const Diffeo& inner) {
    auto node = std::make_shared<Node>();
    node->kind = DiffeoKind::Compose;
    node->first = outer.node_;
    node->second = inner.node_;
    node->depth = 1 + std::max(outer.depth(), inner.depth());
    return Diffeo(std::move(node));
  }

  friend Diffeo reflect_node(const Diffeo& d) {
    auto node = std::make_shared<Node>();
    node->kind = DiffeoKind::Reflect;
    node->first = d.node_;
    node->depth = d.depth() + 1;
    return Diffeo(std::move(node));
  }

 private:
  struct Node {
    DiffeoKind kind = DiffeoKind::Identity;
    int depth = 0;
    // Primitive
    std::string name;
    std::vector<Scalar> params;
    JetFn jet;
    // Qs
    Scalar s = 0;
    Scalar exponent = 1;
    Scalar norm = 1;
    Scalar one_minus_s = 1;
    Scalar s_l = 0;
    Scalar c1 = 0, c2 = 0;  // derivative prefactors
    int int_exp = 0;        // > 0 when the exponent is a small integer
    std::vector<Scalar> s_pows;
    Scalar sum_s = 1;
    // Zoom: child((b-a)x + a) normalized by the cached endpoint images.
    Scalar a = 0;
    Scalar b = 1;
    Scalar lo_value = 0;
    Scalar range = 1;
    Scalar width = 1;
    Scalar scale1 = 1, scale2 = 1;
    std::shared_ptr<const Node> first;   // zoom/reflect child, compose outer
    std::shared_ptr<const Node> second;  // compose inner
  };

  explicit Diffeo(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Scalar clamp01(const Scalar& x) {
    if (x < 0) return Scalar(0);
    if (x > 1) return Scalar(1);
    return x;
  }

  // Integer exponent k: (u^k - s^k) / (1 - s^k) = x * h(u) / h(1) with
  // h(u) = sum_i u^i s^(k-1-i); no transcendental calls and no cancellation.
  static void eval_qs_int(const Node& n, const Scalar& x, int order, Jet<Scalar>& j) {
    const int k = n.int_exp;
    Scalar u = x;
    u *= n.one_minus_s;
    u += n.s;
    Scalar h = 1, upow = 1, prev = 1;  // upow ends as u^(k-1), prev as u^(k-2)
    for (int m = 1; m < k; ++m) {
      h *= u;
      h += n.s_pows[m];
      prev = upow;
      upow *= u;
    }
    j.value = x;
    j.value *= h;
    j.value /= n.sum_s;
    if (order >= 1) {
      if (u == 0) throw SingularDerivative("qs: derivative vanishes at 0 when s = 0");
      j.d1 = upow;
      j.d1 *= n.c1;
      if (order >= 2) {
        j.d2 = prev;
        j.d2 *= n.c2;
      }
    }
  }

  static void eval_qs(const Node& n, const Scalar& x, int order, Jet<Scalar>& j) {
    using std::log;
    using std::pow;
    const Scalar& s = n.s;
    const Scalar& l = n.exponent;
    if (l == 1 || s == 1) {
      j.value = x;
      j.d1 = 1;
      j.d2 = 0;
      return;
    }
    if (n.int_exp > 0) return eval_qs_int(n, x, order, j);
    const Scalar u = (1 - s) * x + s;
    if (s == 0) {
      j.value = pow(x, l);
    } else {
      // s^l * ((u/s)^l - 1), written to keep relative accuracy for small x.
      j.value = n.s_l * math::expm1(l * math::log1p((1 - s) * x / s)) / n.norm;
    }
    if (order >= 1) {
      if (u == 0) throw SingularDerivative("qs: derivative vanishes at 0 when s = 0");
      j.d1 = n.c1 * pow(u, l - 1);
      if (order >= 2) j.d2 = n.c2 * pow(u, l - 2);
    }
  }

  static void negate(Scalar& v) {
    if constexpr (std::is_same_v<Scalar, Real>) {
      mpfr_neg(v.backend().data(), v.backend().data(), MPFR_RNDN);
    } else {
      v = -v;
    }
  }

  static void clamp_in_place(Scalar& x) {
    if (x < 0) x = 0;
    if (x > 1) x = 1;
  }

  static Jet<Scalar> eval_node(const Node& n, const Scalar& x, int order) {
    Jet<Scalar> j;
    eval_into(n, x, order, j);
    return j;
  }

  // Writes into `j`, reusing its storage down the DAG.
  static void eval_into(const Node& n, const Scalar& x, int order, Jet<Scalar>& j) {
    switch (n.kind) {
      case DiffeoKind::Identity:
        j.value = x;
        j.d1 = 1;
        j.d2 = 0;
        return;
      case DiffeoKind::Primitive:
        j = n.jet(x, order);
        return;
      case DiffeoKind::Qs:
        eval_qs(n, x, order, j);
        return;
      case DiffeoKind::Zoom: {
        Scalar t = x;
        t *= n.width;
        t += n.a;
        clamp_in_place(t);
        eval_into(*n.first, t, order, j);
        if (x == 0) {
          j.value = 0;
        } else if (x == 1) {
          j.value = 1;
        } else {
          j.value -= n.lo_value;
          j.value /= n.range;
        }
        if (order >= 1) j.d1 *= n.scale1;
        if (order >= 2) j.d2 *= n.scale2;
        return;
      }
      case DiffeoKind::Compose: {
        eval_into(*n.second, x, order, j);
        Scalar arg;
        std::swap(arg, j.value);
        clamp_in_place(arg);
        if (order == 0) {
          eval_into(*n.first, arg, 0, j);
          return;
        }
        Scalar g1, g2;
        std::swap(g1, j.d1);
        if (order >= 2) std::swap(g2, j.d2);
        eval_into(*n.first, arg, order, j);
        if (order >= 2) {
          j.d2 *= g1;
          j.d2 *= g1;
          g2 *= j.d1;
          j.d2 += g2;
        }
        j.d1 *= g1;
        return;
      }
      case DiffeoKind::Reflect: {
        Scalar t = 1;
        t -= x;
        eval_into(*n.first, t, order, j);
        j.value -= 1;
        negate(j.value);
        if (order >= 2) negate(j.d2);
        return;
      }
    }
    throw std::logic_error("unreachable");
  }

  std::shared_ptr<const Node> node_;
};

template <class Scalar>
void check_unit_interval(const Scalar& x, const char* what) {
  const Scalar slack = 64 * math::epsilon<Scalar>();
  if (!(x >= -slack && x <= 1 + slack)) throw DomainError(std::string(what) + ": argument outside [0,1]");
}

template <class Scalar>
Scalar eval(const Diffeo<Scalar>& d, const Scalar& x) {
  check_unit_interval(x, "eval");
  return d(x);
}

/// Exact chain-rule derivative; throws SingularDerivative if it is not positive.
template <class Scalar>
Scalar deriv(const Diffeo<Scalar>& d, const Scalar& x) {
  check_unit_interval(x, "deriv");
  Scalar v = d.jet(x, 1).d1;
  if (!(v > 0) || !math::is_finite(v)) throw SingularDerivative("deriv: derivative is not positive and finite");
  return v;
}

template <class Scalar>
Scalar second_deriv(const Diffeo<Scalar>& d, const Scalar& x) {
  check_unit_interval(x, "second_deriv");
  return d.jet(x, 2).d2;
}

/// Z_[a,b] d (x) = (d((b-a)x + a) - d(a)) / (d(b) - d(a)).
template <class Scalar>
Diffeo<Scalar> zoom(const Diffeo<Scalar>& d, const Scalar& a, const Scalar& b) {
  using std::abs;
  if (!(a >= 0 && b <= 1 && a < b)) throw DomainError("zoom: need 0 <= a < b <= 1");
  const Scalar scale = std::max(abs(a), abs(b));
  if (b - a <= 8 * math::epsilon<Scalar>() * scale) throw DomainError("zoom: interval is degenerate at working precision");
  return zoom_node(d, a, b);
}

/// x -> outer(inner(x)).
template <class Scalar>
Diffeo<Scalar> compose(const Diffeo<Scalar>& outer, const Diffeo<Scalar>& inner) {
  return compose_node(outer, inner);
}

/// x -> 1 - d(1 - x), the conjugate of d by the flip of [0,1].
template <class Scalar>
Diffeo<Scalar> reflect(const Diffeo<Scalar>& d) {
  return reflect_node(d);
}

/// Solves d(x) = y with a bracketed Newton iteration.
///
/// The bracket [lo, hi] is maintained from the sign of d(x) - y, so the method
/// cannot leave the monotone branch; Newton steps that land outside it or fail
/// to halve the step are replaced by a bisection step (geometric once the
/// bracket spans several octaves, so small roots are reached quickly).
template <class Scalar>
Scalar invert(const Diffeo<Scalar>& d, const Scalar& y, const PrecisionPolicy& policy = {}) {
  using std::abs;
  using std::sqrt;
  check_unit_interval(y, "invert");
  if (y <= 0) return Scalar(0);
  if (y >= 1) return Scalar(1);
  const Scalar tol = policy.tolerance<Scalar>();
  Scalar lo = 0, hi = 1;
  Scalar f_hi = 1;
  Scalar x = y;
  Scalar prev_step = 1;
  for (int it = 0; it < policy.max_iterations; ++it) {
    const Jet<Scalar> j = d.jet(x, 1);
    const Scalar r = j.value - y;
    if (abs(r) <= tol * y) return x;
    if (r < 0) {
      lo = x;
    } else {
      hi = x;
      f_hi = j.value;
    }
    if (hi - lo <= 4 * math::epsilon<Scalar>() * hi) return x;
    Scalar next = x;
    bool newton_ok = false;
    if (j.d1 > 0) {
      next = x - r / j.d1;
      const Scalar step = abs(next - x);
      newton_ok = next > lo && next < hi && step <= prev_step / 2;
      if (newton_ok) prev_step = step;
    }
    if (!newton_ok) {
      if (lo == 0) {
        // The chord through the origin gives a point inside the bracket.
        next = hi * y / f_hi;
        if (!(next > lo && next < hi)) next = hi / 2;
        if (next > hi / 2) next = hi / 2;
      } else if (hi > 4 * lo) {
        next = sqrt(lo * hi);
      } else {
        next = (lo + hi) / 2;
      }
      prev_step = hi - lo;
    }
    x = next;
  }
  throw PrecisionExhausted("invert: no convergence within the iteration budget");
}

/// Sampled distortion sup log(Dd(x)/Dd(y)) over an m-point uniform grid of [lo, hi].
template <class Scalar>
Scalar distortion(const Diffeo<Scalar>& d, const Scalar& lo, const Scalar& hi, int m = 64) {
  using std::log;
  if (m < 2) throw DomainError("distortion: grid size must be >= 2");
  if (!(lo >= 0 && hi <= 1 && lo <= hi)) throw DomainError("distortion: interval must lie in [0,1]");
  Scalar dmin = 0, dmax = 0;
  for (int i = 0; i < m; ++i) {
    const Scalar x = lo + (hi - lo) * i / (m - 1);
    const Scalar v = deriv(d, x);
    if (i == 0 || v < dmin) dmin = v;
    if (i == 0 || v > dmax) dmax = v;
  }
  return log(dmax / dmin);
}

template <class Scalar>
Scalar distortion(const Diffeo<Scalar>& d, int m = 64) {
  return distortion(d, Scalar(0), Scalar(1), m);
}

/// Sampled |d|_{C^2} = max|d| + max|d'| + max|d''| on the dyadic grid of
/// mesh 2^-k, k the smallest with 2^k >= m - 1. Grids are nested, so the
/// estimate is nondecreasing in m.
template <class Scalar>
Scalar c2_norm_estimate(const Diffeo<Scalar>& d, int m = 257) {
  using std::abs;
  if (m < 3) throw DomainError("c2_norm_estimate: grid size must be >= 3");
  int cells = 1;
  while (cells < m - 1) cells *= 2;
  Scalar v0 = 0, v1 = 0, v2 = 0;
  for (int i = 0; i <= cells; ++i) {
    const Jet<Scalar> j = d.jet(Scalar(i) / cells, 2);
    v0 = std::max(v0, Scalar(abs(j.value)));
    v1 = std::max(v1, Scalar(abs(j.d1)));
    v2 = std::max(v2, Scalar(abs(j.d2)));
  }
  return v0 + v1 + v2;
}

}  // namespace flatmap
