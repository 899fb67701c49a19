#pragma once

// The renormalization operator (first return to [x1, x2], rescaled by x/x1),
// the iteration driver and the Fibonacci tuner.

#include "flatmap/map_space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flatmap {

class NotRenormalizable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class BracketNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Scalar>
bool is_renormalizable(const MapX<Scalar>& f) {
  return 0 < f.x2 && f.x2 < f.x3;
}

/// R f in X coordinates. The returned map has its exponents swapped.
template <class Scalar>
MapX<Scalar> renorm_x(const MapX<Scalar>& f, const PrecisionPolicy& policy = {}) {
  using std::pow;
  if (!is_renormalizable(f)) throw NotRenormalizable("renorm_x: need 0 < x2 < x3");
  const Scalar S1 = (f.x3 - f.x2) / f.x3;
  const auto q = Diffeo<Scalar>::qs(f.s, f.l2);
  const auto g = compose(q, f.phi);
  // g^-1 = phi^-1 o q^-1, with q^-1 in closed form
  auto g_inv = [&](const Scalar& y) { return invert(f.phi, qs_inverse(f.s, f.l2, y), policy); };
  const Scalar c3 = g_inv((f.x4 - f.x2) / (1 - f.x2));  // 1 - new x3
  const Scalar c4 = g_inv((f.x3 - f.x2) / (1 - f.x2));  // 1 - new x4

  MapX<Scalar> r;
  r.x1 = f.x2 / f.x1;
  r.s = f.phil(S1);
  r.x2 = pow(r.s, f.l1);
  r.x3 = 1 - c3;
  r.x4 = 1 - c4;
  r.l1 = f.l2;
  r.l2 = f.l1;
  r.phi = zoom(f.phil, S1, Scalar(1));
  r.phil = compose(f.phir, zoom(g, c3, Scalar(1)));
  // Right of the new flat interval the orbit runs through [0, 1 - new x4] of the
  // old left branch in reverse order, hence the flip.
  r.phir = compose(zoom(f.phil, Scalar(0), S1), reflect(zoom(g, Scalar(0), c4)));
  return r;
}

/// R f in S coordinates, computed from the S data alone.
template <class Scalar>
MapS<Scalar> renorm_s(const MapS<Scalar>& f, const PrecisionPolicy& policy = {}) {
  using std::pow;
  if (!(f.S1 > 0 && f.S1 < 1)) throw NotRenormalizable("renorm_s: need 0 < S1 < 1");
  const Scalar s = s_parameter(f);
  const auto q = Diffeo<Scalar>::qs(s, f.l2);
  const Scalar qa = qs_inverse(s, f.l2, Scalar(1 - f.S2));
  const Scalar qb = qs_inverse(s, f.l2, Scalar(f.S1 * f.S2 * f.S3));
  const Scalar A = invert(f.phi, qa, policy);
  const Scalar B = invert(f.phi, qb, policy);
  const Scalar st = f.phil(f.S1);
  const Scalar P = pow(st, f.l1);

  MapS<Scalar> r;
  r.S1 = 1 - P / (1 - A);
  r.S2 = B / (1 - P);
  r.S3 = (1 - A) / B;
  r.S4 = P / f.S4;
  r.S5 = pow(st, f.l1 - 1);
  r.s = st;
  r.l1 = f.l2;
  r.l2 = f.l1;
  r.phi = zoom(f.phil, f.S1, Scalar(1));
  r.phil = compose(f.phir, compose(zoom(q, qa, Scalar(1)), zoom(f.phi, A, Scalar(1))));
  r.phir = compose(zoom(f.phil, Scalar(0), f.S1), reflect(compose(zoom(q, Scalar(0), qb), zoom(f.phi, Scalar(0), B))));
  return r;
}

template <class Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;

/// w = (log S2, log S3, log S4, log S5).
template <class Scalar>
Vec4<Scalar> w_vector(const MapS<Scalar>& g) {
  const MapY<Scalar> y = s_to_y(g);
  Vec4<Scalar> w;
  w << y.y2, y.y3, y.y4, y.y5;
  return w;
}

template <class Scalar>
struct TraceLevel {
  int n = 0;
  MapX<Scalar> map;
  Scalar S[5];
  Scalar s;
  Vec4<Scalar> w;
  Scalar alpha;
  Scalar dist_phi = 0, dist_phil = 0, dist_phir = 0;
  int dag_depth = 0;
  bool renormalizable = true;
};

enum class FailureSide { Undershoot, Overshoot };

inline const char* to_string(FailureSide side) { return side == FailureSide::Undershoot ? "undershoot" : "overshoot"; }

template <class Scalar>
struct RenormFailure {
  int level = 0;
  FailureSide side = FailureSide::Overshoot;
  TraceLevel<Scalar> summary;  // the first non-renormalizable map
};

template <class Scalar>
struct RenormTrace {
  std::vector<TraceLevel<Scalar>> levels;  // renormalizable levels only
  std::optional<RenormFailure<Scalar>> failure;
  bool precision_exhausted = false;
  std::string note;
  PrecisionPolicy policy;
  int requested_depth = 0;

  int depth() const { return static_cast<int>(levels.size()); }
  Scalar l1() const { return levels.empty() ? Scalar(0) : levels.front().map.l1; }
  Scalar l2() const { return levels.empty() ? Scalar(0) : levels.front().map.l2; }
};

struct IterateOptions {
  bool measure_distortion = true;
  int distortion_grid = 64;
};

template <class Scalar>
TraceLevel<Scalar> summarize_level(const MapX<Scalar>& f, int n, const IterateOptions& opt) {
  TraceLevel<Scalar> t;
  t.n = n;
  t.map = f;
  const MapS<Scalar> g = x_to_s(f);
  t.S[0] = g.S1;
  t.S[1] = g.S2;
  t.S[2] = g.S3;
  t.S[3] = g.S4;
  t.S[4] = g.S5;
  t.s = f.s;
  t.w = w_vector(g);
  t.alpha = alpha(f);
  if (opt.measure_distortion) {
    t.dist_phi = distortion(f.phi, opt.distortion_grid);
    t.dist_phil = distortion(f.phil, opt.distortion_grid);
    t.dist_phir = distortion(f.phir, opt.distortion_grid);
  }
  t.dag_depth = std::max({f.phi.depth(), f.phil.depth(), f.phir.depth()});
  t.renormalizable = is_renormalizable(f);
  return t;
}

/// Records levels 0 .. n_max-1 of R^n f, stopping at the first map that is
/// not renormalizable or that the working precision can no longer resolve.
template <class Scalar>
RenormTrace<Scalar> iterate(const MapX<Scalar>& f0, int n_max, const PrecisionPolicy& policy = {},
                            const IterateOptions& opt = {}) {
  if (n_max < 0) throw DomainError("iterate: depth must be >= 0");
  RenormTrace<Scalar> trace;
  trace.policy = policy;
  trace.requested_depth = n_max;
  MapX<Scalar> f = f0;
  for (int n = 0; n < n_max; ++n) {
    try {
      if (!is_renormalizable(f)) {
        RenormFailure<Scalar> fail;
        fail.level = n;
        fail.side = f.x2 <= 0 ? FailureSide::Undershoot : FailureSide::Overshoot;
        try {
          fail.summary = summarize_level(f, n, IterateOptions{false, 0});
        } catch (const std::exception&) {
          fail.summary.n = n;
          fail.summary.map = f;
          fail.summary.renormalizable = false;
        }
        trace.failure = fail;
        break;
      }
      TraceLevel<Scalar> t = summarize_level(f, n, opt);
      for (const auto& v : t.S) {
        if (!math::is_finite(v)) throw PrecisionExhausted("non-finite S coordinate");
      }
      for (int i = 0; i < 4; ++i) {
        if (!math::is_finite(t.w(i))) throw PrecisionExhausted("non-finite w entry");
      }
      if (!(t.alpha > 0 && t.alpha < 1)) throw PrecisionExhausted("alpha left (0,1)");
      trace.levels.push_back(std::move(t));
      if (n + 1 < n_max) f = renorm_x(f, policy);
    } catch (const PrecisionExhausted& e) {
      trace.precision_exhausted = true;
      trace.note = std::string("level ") + std::to_string(n) + ": " + e.what();
      break;
    } catch (const std::domain_error& e) {
      trace.precision_exhausted = true;
      trace.note = std::string("level ") + std::to_string(n) + ": " + e.what();
      break;
    }
  }
  return trace;
}

/// Level at which renormalization first fails within `target` levels, and how.
struct FailureProbe {
  int level = -1;  // -1: reached the target depth
  FailureSide side = FailureSide::Overshoot;
  bool precision_exhausted = false;
};

template <class Scalar>
FailureProbe probe_failure(const MapX<Scalar>& f0, int target, const PrecisionPolicy& policy) {
  FailureProbe p;
  MapX<Scalar> f = f0;
  for (int n = 0; n < target; ++n) {
    if (!is_renormalizable(f)) {
      p.level = n;
      p.side = f.x2 <= 0 ? FailureSide::Undershoot : FailureSide::Overshoot;
      return p;
    }
    if (n + 1 == target) break;
    try {
      f = renorm_x(f, policy);
    } catch (const std::domain_error&) {
      p.level = n + 1;
      p.precision_exhausted = true;
      return p;
    } catch (const PrecisionExhausted&) {
      p.level = n + 1;
      p.precision_exhausted = true;
      return p;
    }
  }
  return p;
}

/// Which side of the Fibonacci parameter a failure lies on.
///
/// Past level 0 the only way to fail is x2 >= x3, so the failure mode alone
/// cannot separate the two sides. The level parity does: each renormalization
/// reverses orientation, so overshooting at level k corresponds to undershooting
/// at level k - 1 in the original parameter.
inline int failure_parity(const FailureProbe& p) {
  return (p.level + (p.side == FailureSide::Undershoot ? 1 : 0)) % 2;
}

enum class TuningParameter { X1, X2, X3, X4, S };

inline TuningParameter parse_tuning_parameter(const std::string& name) {
  if (name == "x1") return TuningParameter::X1;
  if (name == "x2") return TuningParameter::X2;
  if (name == "x3") return TuningParameter::X3;
  if (name == "x4") return TuningParameter::X4;
  if (name == "s") return TuningParameter::S;
  throw DomainError("unknown tuning parameter '" + name + "'");
}

template <class Scalar>
MapX<Scalar> with_parameter(MapX<Scalar> f, TuningParameter p, const Scalar& value) {
  switch (p) {
    case TuningParameter::X1: f.x1 = value; break;
    case TuningParameter::X2: f.x2 = value; break;
    case TuningParameter::X3: f.x3 = value; break;
    case TuningParameter::X4: f.x4 = value; break;
    case TuningParameter::S: f.s = value; break;
  }
  return f;
}

/// Scans `samples` evenly spaced parameter values in [lo, hi] for two
/// neighbours whose failures lie on opposite sides; returns that sub-bracket.
template <class Scalar>
std::pair<Scalar, Scalar> find_bracket(const MapX<Scalar>& tmpl, TuningParameter param, const Scalar& lo,
                                       const Scalar& hi, int target, const PrecisionPolicy& policy = {},
                                       int samples = 64) {
  if (!(lo < hi) || samples < 2) throw DomainError("find_bracket: need lo < hi and at least 2 samples");
  int prev_parity = -1;  // -1: no usable previous sample
  Scalar prev = lo;
  for (int i = 0; i < samples; ++i) {
    const Scalar t = lo + (hi - lo) * i / (samples - 1);
    const FailureProbe p = probe_failure(with_parameter(tmpl, param, t), target, policy);
    if (p.precision_exhausted) {
      prev_parity = -1;
      continue;
    }
    if (p.level < 0) return {t, t};
    const int parity = failure_parity(p);
    if (prev_parity >= 0 && prev_parity != parity) return {prev, t};
    prev_parity = parity;
    prev = t;
  }
  throw BracketNotFound("find_bracket: no sign change of the failure side in the scanned range");
}

template <class Scalar>
struct TuningResult {
  MapX<Scalar> map;
  Scalar parameter;
  Scalar lo, hi;
  int bisections = 0;
};

/// Bisects one scalar field of `tmpl` inside [lo, hi] until the map survives
/// `target` renormalizations (plus `margin` extra levels for robustness).
template <class Scalar>
TuningResult<Scalar> tune_to_fibonacci(const MapX<Scalar>& tmpl, TuningParameter param, Scalar lo, Scalar hi,
                                       int target, const PrecisionPolicy& policy = {}, int margin = 2) {
  using std::abs;
  if (target < 0) throw DomainError("tune: target depth must be >= 0");
  TuningResult<Scalar> res;
  if (target == 0) {
    if (!is_renormalizable(tmpl)) throw BracketNotFound("tune: template is not renormalizable");
    res.map = tmpl;
    res.lo = res.hi = res.parameter = Scalar(0);
    return res;
  }
  if (!(lo < hi)) throw DomainError("tune: bracket must satisfy lo < hi");
  const int want = target + margin;
  FailureProbe plo = probe_failure(with_parameter(tmpl, param, lo), want, policy);
  FailureProbe phi = probe_failure(with_parameter(tmpl, param, hi), want, policy);
  auto done = [&](const FailureProbe& p) { return p.level < 0; };
  if (done(plo) || done(phi)) {
    res.parameter = done(plo) ? lo : hi;
    res.map = with_parameter(tmpl, param, res.parameter);
    res.lo = lo;
    res.hi = hi;
    return res;
  }
  if (plo.precision_exhausted || phi.precision_exhausted || failure_parity(plo) == failure_parity(phi)) {
    throw BracketNotFound("tune: bracket ends fail on the same side");
  }
  const int lo_parity = failure_parity(plo);
  const Scalar tol = 256 * math::epsilon<Scalar>();
  for (int it = 0; it < policy.max_iterations; ++it) {
    const Scalar mid = (lo + hi) / 2;
    const MapX<Scalar> f = with_parameter(tmpl, param, mid);
    FailureProbe pm = probe_failure(f, want, policy);
    if (done(pm)) {
      res.map = f;
      res.parameter = mid;
      res.lo = lo;
      res.hi = hi;
      res.bisections = it + 1;
      return res;
    }
    if (pm.precision_exhausted) break;
    if (failure_parity(pm) == lo_parity) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= tol * std::max(abs(lo), abs(hi))) break;
  }
  throw PrecisionExhausted("tune: bracket collapsed before reaching depth " + std::to_string(want) +
                           "; more mantissa bits are needed");
}

/// Tunes x2 of `tmpl`, renormalizes `level` times and restarts from the
/// scalars found there, keeping the template's diffeomorphisms. A crude
/// starting guess can sit in a long transient; a few rounds skip it.
template <class Scalar>
MapX<Scalar> refine_template(MapX<Scalar> tmpl, int target, int level, int rounds,
                             const PrecisionPolicy& policy = {}, int samples = 200) {
  if (level < 1 || level >= target) throw DomainError("refine_template: need 1 <= level < target");
  if (level % 2 != 0 && tmpl.l1 != tmpl.l2) throw DomainError("refine_template: level must be even for unequal exponents");
  const Scalar eps = Scalar(1e-6);
  for (int r = 0; r < rounds; ++r) {
    const auto br = find_bracket(tmpl, TuningParameter::X2, Scalar(tmpl.x3 * eps), Scalar(tmpl.x3 * (1 - eps)),
                                 target, policy, samples);
    MapX<Scalar> f = br.first == br.second
                         ? with_parameter(tmpl, TuningParameter::X2, br.first)
                         : tune_to_fibonacci(tmpl, TuningParameter::X2, br.first, br.second, target, policy, 0).map;
    for (int k = 0; k < level; ++k) f = renorm_x(f, policy);
    tmpl.x1 = f.x1;
    tmpl.x2 = f.x2;
    tmpl.x3 = f.x3;
    tmpl.x4 = f.x4;
    tmpl.s = f.s;
  }
  return tmpl;
}

}  // namespace flatmap
