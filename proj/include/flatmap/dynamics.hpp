#pragma once

// Direct iteration of the circle map: return times, first-return maps,
// dynamical points and the gap structure of the non-wandering set. Nothing
// here uses the renormalization formulas, so it serves as an independent check.

#include "flatmap/fit.hpp"
#include "flatmap/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace flatmap {

class IterationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// q(0) = q(1) = 1, q(2) = 2, q(n) = q(n-1) + q(n-2).
inline std::uint64_t fibonacci(int n) {
  if (n < 0) throw DomainError("fibonacci: index must be >= 0");
  if (n > 90) throw DomainError("fibonacci: index too large for 64 bits");
  std::uint64_t a = 1, b = 1;
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t c = a + b;
    a = b;
    b = c;
  }
  return a;
}

/// Unique preimage of y != 0 under f (0 has the whole flat interval as preimage).
template <class Scalar>
Scalar inverse_map(const MapX<Scalar>& f, const Scalar& y, const PrecisionPolicy& policy = {}) {
  using std::pow;
  if (y >= f.x2 && y <= 1) {
    const Scalar t = invert(f.phi, qs_inverse(f.s, f.l2, Scalar((y - f.x2) / (1 - f.x2))), policy);
    return f.x1 * (1 - t);
  }
  if (y >= f.x1 && y < 0) {
    const Scalar t = invert(f.phil, Scalar(pow(y / f.x1, 1 / f.l1)), policy);
    return f.x3 * (1 - t);
  }
  if (y > 0 && y < f.x2) {
    const Scalar t = invert(f.phir, Scalar(pow(y / f.x2, 1 / f.l2)), policy);
    return f.x4 + (1 - f.x4) * t;
  }
  throw DomainError("inverse_map: 0 has no unique preimage");
}

template <class Scalar>
struct Return {
  Scalar point;
  int time = 0;
};

/// Iterates f from x until the orbit lands in [lo, hi] again.
template <class Scalar>
Return<Scalar> first_return_to(const MapX<Scalar>& f, const Scalar& x, const Scalar& lo, const Scalar& hi,
                               int budget) {
  Scalar y = x;
  for (int t = 1; t <= budget; ++t) {
    y = eval_map(f, y);
    if (y >= lo && y <= hi) return {y, t};
  }
  throw IterationBudgetExceeded("first_return: no return within " + std::to_string(budget) + " steps");
}

/// First return to [x1, x2].
template <class Scalar>
Return<Scalar> first_return(const MapX<Scalar>& f, const Scalar& x, int budget = 1000) {
  if (!(x >= f.x1 && x <= f.x2)) throw DomainError("first_return: x must lie in [x1, x2]");
  return first_return_to(f, x, f.x1, f.x2, budget);
}

/// Rf(u) computed directly: h(first return of f at h^-1(u)), h(x) = x / x1.
template <class Scalar>
Scalar direct_renormalization(const MapX<Scalar>& f, const Scalar& u, int budget = 1000) {
  return first_return(f, Scalar(f.x1 * u), budget).point / f.x1;
}

template <class Scalar>
struct VerifyReport {
  double max_err = 0;
  int samples = 0;
  bool pass = true;
};

/// Compares a candidate Rf against the direct first-return construction at m
/// interior points of [x1(Rf), 1].
template <class Scalar>
VerifyReport<Scalar> verify_renorm(const MapX<Scalar>& f, const MapX<Scalar>& rf, int m, double tol) {
  using std::abs;
  VerifyReport<Scalar> r;
  r.samples = m;
  if (m <= 0) return r;
  const Scalar lo = f.x2 / f.x1;
  Scalar worst = 0;
  for (int i = 0; i < m; ++i) {
    const Scalar u = lo + (1 - lo) * (Scalar(i) + Scalar(0.5)) / m;
    const Scalar direct = direct_renormalization(f, u);
    const Scalar model = eval_map(rf, u);
    worst = std::max(worst, Scalar(abs(direct - model)));
  }
  r.max_err = math::to_double(worst);
  r.pass = worst <= tol;
  return r;
}

template <class Scalar>
VerifyReport<Scalar> verify_renorm(const MapX<Scalar>& f, int m, double tol, const PrecisionPolicy& policy = {}) {
  if (!is_renormalizable(f)) throw NotRenormalizable("verify_renorm: map is not renormalizable");
  return verify_renorm(f, renorm_x(f, policy), m, tol);
}

/// Level-n dynamical points in original coordinates, all from direct iteration.
template <class Scalar>
struct DynamicalPoints {
  std::vector<Scalar> x1, x2, x3, x4;  // index n
};

/// x1(n) = f^q(n+1)(0), x2(n) = f^q(n+2)(0); x3(n), x4(n) are the
/// (q(n+1) - 1)-fold preimages of the flat-interval ends, taken in the order
/// that keeps x3(n) the end nearer to 0 (each renormalization flips orientation).
template <class Scalar>
DynamicalPoints<Scalar> dynamical_points(const MapX<Scalar>& f, int depth, const PrecisionPolicy& policy = {}) {
  DynamicalPoints<Scalar> d;
  if (depth <= 0) return d;
  const std::uint64_t last = fibonacci(depth + 1);
  std::vector<Scalar> orbit(last + 1);
  orbit[0] = 0;
  for (std::uint64_t i = 1; i <= last; ++i) orbit[i] = eval_map(f, orbit[i - 1]);
  Scalar a = f.x3, b = f.x4;  // backward orbits
  std::uint64_t steps = 0;
  for (int n = 0; n < depth; ++n) {
    d.x1.push_back(orbit[fibonacci(n + 1)]);
    d.x2.push_back(orbit[fibonacci(n + 2)]);
    const std::uint64_t need = fibonacci(n + 1) - 1;
    while (steps < need) {
      a = inverse_map(f, a, policy);
      b = inverse_map(f, b, policy);
      ++steps;
    }
    if (n % 2 == 0) {
      d.x3.push_back(a);
      d.x4.push_back(b);
    } else {
      d.x3.push_back(b);
      d.x4.push_back(a);
    }
  }
  return d;
}

template <class Scalar>
struct ReturnTimeCheck {
  int level = 0;
  int samples = 0;
  int mismatches = 0;
  std::set<int> observed;
  std::uint64_t expected_negative = 0, expected_positive = 0;
};

/// Checks that the first return of f to the level-n interval happens at
/// Fibonacci times: q(n) on the part carrying the negative branch of R^n f and
/// q(n+1) on the rest.
template <class Scalar>
ReturnTimeCheck<Scalar> check_return_times(const MapX<Scalar>& f, const RenormTrace<Scalar>& trace, int n, int m) {
  if (n < 0 || n >= trace.depth()) throw DomainError("check_return_times: level not in trace");
  ReturnTimeCheck<Scalar> c;
  c.level = n;
  c.samples = m;
  c.expected_negative = fibonacci(n);
  c.expected_positive = fibonacci(n + 1);
  Scalar P = 1;
  for (int k = 0; k < n; ++k) P *= trace.levels[k].map.x1;
  const Scalar xn1 = trace.levels[n].map.x1;
  const Scalar a = P * xn1, b = P;
  const Scalar lo = std::min(a, b), hi = std::max(a, b);
  const int budget = static_cast<int>(10 * fibonacci(n + 2));
  // half the samples on each branch; the negative one can be very short
  const int neg = m / 2;
  for (int i = 0; i < m; ++i) {
    const Scalar u = i < neg ? Scalar(xn1 * (1 - (Scalar(i) + Scalar(0.5)) / neg))
                             : Scalar((Scalar(i - neg) + Scalar(0.5)) / (m - neg));  // level-n coordinate
    const Return<Scalar> r = first_return_to(f, Scalar(P * u), lo, hi, budget);
    c.observed.insert(r.time);
    const std::uint64_t want = u < 0 ? c.expected_negative : c.expected_positive;
    if (static_cast<std::uint64_t>(r.time) != want) ++c.mismatches;
  }
  return c;
}

struct GapDecayReport {
  bool sufficient = false;
  bool pass = false;
  std::vector<double> log_gap;  // log |[0, x2(n)]| for n = 0 .. depth-1
  LinearFit fit;                // log gap against n
  LinearFit loglog;             // log |log gap| against n
  std::string note;
};

/// Least-squares decay rate of |[0, x2(n)]|, from the forward orbit of 0.
template <class Scalar>
GapDecayReport gap_decay_check(const MapX<Scalar>& f, int depth, double min_r2 = 0.8) {
  using std::abs;
  using std::log;
  GapDecayReport r;
  if (depth < 3) {
    r.note = "insufficient data: need at least 3 levels";
    return r;
  }
  const DynamicalPoints<Scalar> d = dynamical_points(f, depth);
  std::vector<double> n, ll;
  for (int k = 0; k < depth; ++k) {
    const Scalar g = abs(d.x2[k]);
    if (!(g > 0)) {
      r.note = "orbit of 0 collapsed at level " + std::to_string(k);
      return r;
    }
    const Scalar lg = log(g);
    r.log_gap.push_back(math::to_double(lg));
    n.push_back(k);
    if (lg < 0) ll.push_back(math::to_double(log(abs(lg))));
  }
  r.sufficient = true;
  r.fit = fit_line(n, r.log_gap);
  if (ll.size() == n.size()) r.loglog = fit_line(n, ll);
  r.pass = r.fit.slope < 0 && r.fit.r2 >= min_r2;
  return r;
}

struct ScaleCount {
  double exponent = 0;  // scale = circle length * 2^-exponent
  double scale = 0;
  std::uint64_t box_count = 0;
  double local_slope = 0;  // against the previous scale
};

struct DimensionEstimate {
  int depth = 0;
  double estimate = 0;  // regression slope of log count against log(1/scale)
  double r2 = 0;
  int gaps = 0;
  double largest_piece = 0;  // longest remaining interval, relative to the circle
  std::vector<ScaleCount> counts;
};

/// Gaps f^-i(U) for i < q(depth+1) as sorted [a, b] pairs on [x1, 1].
template <class Scalar>
std::vector<std::pair<Scalar, Scalar>> preimage_gaps(const MapX<Scalar>& f, int depth,
                                                     const PrecisionPolicy& policy = {}) {
  std::vector<std::pair<Scalar, Scalar>> gaps;
  const std::uint64_t count = fibonacci(depth + 1);
  Scalar a = f.x3, b = f.x4;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (i > 0) {
      a = inverse_map(f, a, policy);
      b = inverse_map(f, b, policy);
    }
    gaps.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps;
}

/// Box-counting estimate for the complement of the depth-level gaps on the
/// circle of length L = 1 - x1. `scale_count` scales are spaced geometrically
/// from L/2 down to the finer of L 2^-scale_count and the longest piece left,
/// so deeper coverings are probed at the scale of their own pieces.
template <class Scalar>
DimensionEstimate box_dimension(const MapX<Scalar>& f, int depth, int scale_count,
                                const PrecisionPolicy& policy = {}) {
  using std::floor;
  using std::log2;
  using std::pow;
  if (depth < 0) throw DomainError("box_dimension: depth must be >= 0");
  if (scale_count < 2 || scale_count > 60) throw DomainError("box_dimension: scale count must lie in [2, 60]");
  const auto gaps = preimage_gaps(f, depth, policy);
  const Scalar L = 1 - f.x1;
  std::vector<std::pair<Scalar, Scalar>> pieces;  // in t = (x - x1) / L
  Scalar cursor = 0;
  for (const auto& g : gaps) {
    const Scalar a = (g.first - f.x1) / L, b = (g.second - f.x1) / L;
    if (a > cursor) pieces.emplace_back(cursor, a);
    cursor = std::max(cursor, b);
  }
  if (cursor < 1) pieces.emplace_back(cursor, Scalar(1));
  DimensionEstimate est;
  est.depth = depth;
  est.gaps = static_cast<int>(gaps.size());
  Scalar largest = 0;
  for (const auto& p : pieces) largest = std::max(largest, Scalar(p.second - p.first));
  est.largest_piece = math::to_double(largest);
  double finest = scale_count;
  if (largest > 0) finest = std::max(finest, math::to_double(Scalar(-log2(largest))));
  if (!(finest < 0.9 * math::to_double(Scalar(-log2(math::epsilon<Scalar>()))))) {
    throw PrecisionExhausted("box_dimension: pieces are below the working precision");
  }
  std::vector<double> xs, ys;
  for (int i = 0; i < scale_count; ++i) {
    const double e = 1 + (finest - 1) * i / (scale_count - 1);
    const Scalar cells = pow(Scalar(2), Scalar(e));
    std::uint64_t count = 0;
    Scalar last = -1;
    for (const auto& p : pieces) {
      Scalar k0 = floor(p.first * cells), k1 = floor(p.second * cells);
      if (k1 >= cells) k1 = cells - 1;
      if (k0 <= last) k0 = last + 1;
      if (k1 >= k0) count += static_cast<std::uint64_t>(math::to_double(Scalar(k1 - k0 + 1)));
      last = std::max(last, k1);
    }
    ScaleCount sc;
    sc.exponent = e;
    sc.scale = math::to_double(L) * std::exp2(-e);
    sc.box_count = count;
    if (!est.counts.empty()) {
      sc.local_slope = (std::log(double(count)) - std::log(double(est.counts.back().box_count))) /
                       ((e - est.counts.back().exponent) * std::log(2.0));
    }
    est.counts.push_back(sc);
    xs.push_back(e * std::log(2.0));
    ys.push_back(std::log(double(count)));
  }
  const LinearFit fit = fit_line(xs, ys);
  est.estimate = fit.slope;
  est.r2 = fit.r2;
  return est;
}

}  // namespace flatmap
