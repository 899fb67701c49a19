#pragma once

// Linearized renormalization of w = (log S2, log S3, log S4, log S5):
// the one-step matrices, their even/odd products, the closed-form spectrum,
// the curve lambda_u = 1 and the eigenbasis decomposition of a trace.

#include "flatmap/fit.hpp"
#include "flatmap/renorm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace flatmap {

template <class Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

/// One renormalization step of w for a map whose left exponent is l.
template <class Scalar>
Mat4<Scalar> step_matrix(const Scalar& l) {
  Mat4<Scalar> m;
  m << 1 + 1 / l, 1, 0, -1,
       -1 / l, -1, 0, 1,
       1, 0, -1, 0,
       1 - 1 / l, 0, 0, 0;
  return m;
}

template <class Scalar>
struct LMatrices {
  Mat4<Scalar> L1, L2, L_even, L_odd;
};

/// L1, L2 and the closed-form two-step matrices (L_even = L1 L2, L_odd = L2 L1).
template <class Scalar>
LMatrices<Scalar> build_matrices(const Scalar& l1, const Scalar& l2) {
  if (!(l1 >= 1 && l2 >= 1)) throw DomainError("build_matrices: exponents must be >= 1");
  auto two_step = [](const Scalar& a, const Scalar& b) {
    // a is the exponent of the first displayed factor
    Mat4<Scalar> m;
    const Scalar ia = 1 / a, ib = 1 / b, iab = 1 / (a * b);
    m << ia + ib + iab, ia, 0, -ia,
         1 - ia - iab, 1 - ia, 0, ia - 1,
         ib, 1, 1, -1,
         1 - ia - iab + ib, 1 - ia, 0, ia - 1;
    return m;
  };
  LMatrices<Scalar> m;
  m.L1 = step_matrix(l1);
  m.L2 = step_matrix(l2);
  m.L_even = two_step(l1, l2);
  m.L_odd = two_step(l2, l1);
  return m;
}

template <class Scalar>
Scalar discriminant(const Scalar& l1, const Scalar& l2) {
  return l1 * l1 + l2 * l2 + 2 * l1 + 2 * l2 - 2 * l1 * l2 + 1;
}

template <class Scalar>
Scalar lambda_u(const Scalar& l1, const Scalar& l2) {
  using std::sqrt;
  return (1 + l1 + l2 + sqrt(discriminant(l1, l2))) / (2 * l1 * l2);
}

/// Written as the product over lambda_u to avoid cancellation.
template <class Scalar>
Scalar lambda_s(const Scalar& l1, const Scalar& l2) {
  return 1 / (l1 * l2 * lambda_u(l1, l2));
}

/// det(M - x I) up to sign convention: x (x - 1) (l1 l2 x^2 - (1 + l1 + l2) x + 1) / (l1 l2).
template <class Scalar>
Scalar characteristic_polynomial(const Mat4<Scalar>& m, const Scalar& x) {
  return (m - x * Mat4<Scalar>::Identity()).determinant();
}

enum class Quadrant { QMinus, Gamma, QPlus };

inline const char* to_string(Quadrant q) {
  switch (q) {
    case Quadrant::QMinus: return "Q-";
    case Quadrant::Gamma: return "Gamma";
    case Quadrant::QPlus: return "Q+";
  }
  return "?";
}

template <class Scalar>
Quadrant classify_quadrant(const Scalar& l1, const Scalar& l2, const Scalar& tol) {
  if (!(l1 >= 1 && l2 >= 1)) throw DomainError("classify_quadrant: exponents must be >= 1");
  const Scalar d = lambda_u(l1, l2) - 1;
  if (d > tol) return Quadrant::QMinus;
  if (d < -tol) return Quadrant::QPlus;
  return Quadrant::Gamma;
}

/// Which two-step product models w(2n+2) against w(2n).
enum class EvenModel {
  StepProduct,  // L2 L1: one L1 step from an even level, then one L2 step
  Displayed     // the closed-form L_even (= L1 L2)
};

inline const char* to_string(EvenModel m) { return m == EvenModel::StepProduct ? "L2*L1" : "L_even"; }

template <class Scalar>
struct SpectralData {
  Scalar l1, l2;
  LMatrices<Scalar> mats;
  EvenModel model = EvenModel::StepProduct;
  Mat4<Scalar> even;  // matrix whose eigenbasis is reported
  Mat4<Scalar> odd;   // the partner product for odd levels
  Scalar lambda_u, lambda_s;
  Vec4<Scalar> E_u, E_s, E_1, E_0;           // eigenvectors of `even`
  Vec4<Scalar> F_u, F_s, F_1, F_0;           // eigenvectors of `odd`, aligned with L1 E
  Quadrant quadrant = Quadrant::QMinus;
  Scalar gamma_distance;  // lambda_u - 1
  bool degenerate_unit = false;  // lambda_u coincides with 1

  Mat4<Scalar> even_basis() const {
    Mat4<Scalar> b;
    b << E_u, E_s, E_1, E_0;
    return b;
  }
  Mat4<Scalar> odd_basis() const {
    Mat4<Scalar> b;
    b << F_u, F_s, F_1, F_0;
    return b;
  }
};

namespace detail {

template <class Scalar>
Scalar eigen_threshold() {
  using std::pow;
  return pow(math::epsilon<Scalar>(), Scalar(0.6));
}

/// Unit null vector of (m - lambda I) by full-pivot elimination. `exclude`
/// (if given) is projected out so a double eigenvalue yields a second vector.
template <class Scalar>
Vec4<Scalar> null_vector(const Mat4<Scalar>& m, const Scalar& lambda, const Vec4<Scalar>* exclude = nullptr) {
  Mat4<Scalar> a = m - lambda * Mat4<Scalar>::Identity();
  Eigen::FullPivLU<Mat4<Scalar>> lu(a);
  lu.setThreshold(eigen_threshold<Scalar>());
  Eigen::Matrix<Scalar, 4, Eigen::Dynamic> k = lu.kernel();
  if (k.cols() == 0 || k.norm() == 0) {
    // Closed-form lambda is slightly off the exact root: take the weakest direction.
    Eigen::JacobiSVD<Mat4<Scalar>> svd(a, Eigen::ComputeFullV);
    Vec4<Scalar> v = svd.matrixV().col(3);
    return v / v.norm();
  }
  Vec4<Scalar> v = k.col(0);
  if (exclude != nullptr && k.cols() > 1) {
    // choose the kernel direction most orthogonal to `exclude`
    Scalar best = -1;
    for (int c = 0; c < k.cols(); ++c) {
      Vec4<Scalar> cand = k.col(c);
      cand -= exclude->dot(cand) * *exclude;
      const Scalar nn = cand.norm();
      if (nn > best) {
        best = nn;
        v = cand;
      }
    }
  }
  return v / v.norm();
}

template <class Scalar>
void orient(Vec4<Scalar>& v, const Vec4<Scalar>& reference) {
  if (v.dot(reference) < 0) v = -v;
}

}  // namespace detail

/// Closed-form spectrum with eigenvectors of the chosen even-step matrix.
///
/// E_u is unit length with e2 + e3 > 0 (first two components of w). E_1 is
/// (0,0,1,0). Odd-level vectors are eigenvectors of the partner product with
/// the sign of L1 E (or L2 E for the displayed model).
template <class Scalar>
SpectralData<Scalar> eigen(const Scalar& l1, const Scalar& l2, EvenModel model = EvenModel::StepProduct) {
  using std::abs;
  if (!(l1 >= 1 && l2 >= 1)) throw DomainError("eigen: exponents must be >= 1");
  if (!(discriminant(l1, l2) > 0)) throw std::logic_error("eigen: discriminant must be positive");
  SpectralData<Scalar> d;
  d.l1 = l1;
  d.l2 = l2;
  d.model = model;
  d.mats = build_matrices(l1, l2);
  const Mat4<Scalar> step_out = model == EvenModel::StepProduct ? d.mats.L1 : d.mats.L2;
  if (model == EvenModel::StepProduct) {
    d.even = d.mats.L2 * d.mats.L1;
    d.odd = d.mats.L1 * d.mats.L2;
  } else {
    d.even = d.mats.L_even;
    d.odd = d.mats.L_odd;
  }
  d.lambda_u = lambda_u(l1, l2);
  d.lambda_s = lambda_s(l1, l2);
  d.gamma_distance = d.lambda_u - 1;
  const Scalar tol = detail::eigen_threshold<Scalar>();
  d.quadrant = classify_quadrant(l1, l2, tol);
  d.degenerate_unit = abs(d.gamma_distance) <= tol;

  auto basis = [&](const Mat4<Scalar>& m, Vec4<Scalar>& eu, Vec4<Scalar>& es, Vec4<Scalar>& e1, Vec4<Scalar>& e0) {
    e1 = detail::null_vector(m, Scalar(1));
    if (abs(e1(2)) > 0) detail::orient(e1, Vec4<Scalar>(Vec4<Scalar>::Unit(2)));
    e0 = detail::null_vector(m, Scalar(0));
    es = detail::null_vector(m, d.lambda_s);
    eu = d.degenerate_unit ? detail::null_vector(m, d.lambda_u, &e1) : detail::null_vector(m, d.lambda_u);
  };
  basis(d.even, d.E_u, d.E_s, d.E_1, d.E_0);
  if (d.E_u(0) + d.E_u(1) < 0) d.E_u = -d.E_u;
  // fix the remaining signs deterministically
  auto sign_by_largest = [](Vec4<Scalar>& v) {
    Eigen::Index i;
    v.cwiseAbs().maxCoeff(&i);
    if (v(i) < 0) v = -v;
  };
  sign_by_largest(d.E_s);
  sign_by_largest(d.E_0);

  basis(d.odd, d.F_u, d.F_s, d.F_1, d.F_0);
  auto align = [&](Vec4<Scalar>& f, const Vec4<Scalar>& e) {
    const Vec4<Scalar> t = step_out * e;
    if (t.norm() > tol) detail::orient(f, t);
  };
  align(d.F_u, d.E_u);
  align(d.F_s, d.E_s);
  align(d.F_1, d.E_1);
  align(d.F_0, d.E_0);
  return d;
}

struct GammaPoint {
  double l1;
  std::optional<double> l2;  // empty: lambda_u > 1 along the whole line
};

/// l2 with lambda_u(l1, l2) = 1, by bisection. lambda_u decreases in l2 and
/// exceeds 1 at l2 = 1, so a root exists iff lambda_u drops below 1 somewhere.
template <class Scalar>
std::optional<Scalar> gamma_root(const Scalar& l1, const Scalar& tol = Scalar(1e-13), double l2_cap = 1e12) {
  if (!(l1 >= 1)) throw DomainError("gamma_curve: exponents must be >= 1");
  Scalar lo = 1, hi = 2;
  while (lambda_u(l1, hi) >= 1) {
    lo = hi;
    hi *= 2;
    if (hi > l2_cap) return std::nullopt;
  }
  while (hi - lo > tol * std::max(Scalar(1), hi)) {
    const Scalar mid = (lo + hi) / 2;
    if (lambda_u(l1, mid) >= 1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

template <class Scalar>
std::vector<std::pair<Scalar, std::optional<Scalar>>> gamma_curve(const std::vector<Scalar>& grid,
                                                                   const Scalar& tol = Scalar(1e-13)) {
  std::vector<std::pair<Scalar, std::optional<Scalar>>> out;
  out.reserve(grid.size());
  for (const auto& l1 : grid) out.emplace_back(l1, gamma_root(l1, tol));
  return out;
}

class IllConditionedBasis : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinates of one w vector in a basis.
template <class Scalar>
struct Coordinates {
  int level = 0;
  Scalar u, s, one, zero;
  Scalar direction_cosine;  // |cos| of the angle between w and the u-direction
  Scalar norm;
};

template <class Scalar>
Scalar condition_number(const Mat4<Scalar>& b) {
  Eigen::JacobiSVD<Mat4<Scalar>> svd(b);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(3);
}

template <class Scalar>
Coordinates<Scalar> coordinates(const Mat4<Scalar>& basis, const Vec4<Scalar>& w, int level) {
  using std::abs;
  Eigen::FullPivLU<Mat4<Scalar>> lu(basis);
  const Vec4<Scalar> c = lu.solve(w);
  Coordinates<Scalar> r;
  r.level = level;
  r.u = c(0);
  r.s = c(1);
  r.one = c(2);
  r.zero = c(3);
  r.norm = w.norm();
  const Vec4<Scalar> e = basis.col(0);
  r.direction_cosine = r.norm > 0 ? Scalar(abs(w.dot(e)) / (r.norm * e.norm())) : Scalar(0);
  return r;
}

template <class Scalar>
struct Decomposition {
  std::vector<Coordinates<Scalar>> even;  // levels 0, 2, 4, ...
  std::vector<Coordinates<Scalar>> odd;   // levels 1, 3, 5, ...
  std::vector<Scalar> growth;             // C_u(k+1) / C_u(k) over even levels
  Scalar basis_condition;
};

/// Writes w(2n) in the even eigenbasis and w(2n+1) in the odd one.
template <class Scalar>
Decomposition<Scalar> decompose(const RenormTrace<Scalar>& trace, const SpectralData<Scalar>& spec,
                                double max_condition = 1e12) {
  Decomposition<Scalar> d;
  const Mat4<Scalar> be = spec.even_basis();
  const Mat4<Scalar> bo = spec.odd_basis();
  d.basis_condition = std::max(condition_number(be), condition_number(bo));
  if (!(d.basis_condition < max_condition)) throw IllConditionedBasis("decompose: eigenbasis is ill-conditioned");
  for (const auto& lvl : trace.levels) {
    if (lvl.n % 2 == 0) {
      d.even.push_back(coordinates(be, lvl.w, lvl.n));
    } else {
      d.odd.push_back(coordinates(bo, lvl.w, lvl.n));
    }
  }
  for (size_t k = 1; k < d.even.size(); ++k) d.growth.push_back(d.even[k].u / d.even[k - 1].u);
  return d;
}

/// Residual spread of w(2n+2) - M w(2n) for a candidate even-step matrix.
template <class Scalar>
Scalar model_residual_spread(const RenormTrace<Scalar>& trace, const Mat4<Scalar>& m) {
  std::vector<Vec4<Scalar>> res;
  for (size_t i = 0; i + 2 < trace.levels.size(); i += 2) {
    res.push_back(trace.levels[i + 2].w - m * trace.levels[i].w);
  }
  if (res.size() < 2) return Scalar(0);
  Vec4<Scalar> mean = Vec4<Scalar>::Zero();
  for (const auto& r : res) mean += r;
  mean /= Scalar(res.size());
  Scalar spread = 0;
  for (const auto& r : res) spread = std::max(spread, Scalar((r - mean).norm()));
  return spread;
}

template <class Scalar>
struct ModelSelection {
  EvenModel model = EvenModel::StepProduct;
  Scalar spread_step_product = 0;
  Scalar spread_displayed = 0;
};

/// Picks the two-step product whose residuals against the trace vary least.
/// Ties (including traces too short to tell) keep the step product.
template <class Scalar>
ModelSelection<Scalar> select_even_model(const RenormTrace<Scalar>& trace, const Scalar& l1, const Scalar& l2) {
  const auto m = build_matrices(l1, l2);
  ModelSelection<Scalar> sel;
  sel.spread_step_product = model_residual_spread(trace, Mat4<Scalar>(m.L2 * m.L1));
  sel.spread_displayed = model_residual_spread(trace, m.L_even);
  sel.model = sel.spread_displayed < sel.spread_step_product ? EvenModel::Displayed : EvenModel::StepProduct;
  return sel;
}

template <class Scalar>
struct GuEstimate {
  Scalar value;
  Scalar error;
  int levels_used = 0;
};

/// Limit of C_u(k) / lambda_u^k by geometric-tail extrapolation of the last differences.
template <class Scalar>
GuEstimate<Scalar> estimate_Gu(const std::vector<Scalar>& cu, const Scalar& lambda_u) {
  using std::abs;
  using std::pow;
  if (!(lambda_u > 1)) throw DomainError("estimate_Gu: needs lambda_u > 1");
  if (cu.size() < 4) throw DomainError("estimate_Gu: needs at least 4 even levels");
  std::vector<Scalar> c(cu.size());
  for (size_t k = 0; k < cu.size(); ++k) c[k] = cu[k] / pow(lambda_u, Scalar(static_cast<double>(k)));
  const size_t N = c.size() - 1;
  const Scalar d1 = c[N] - c[N - 1];
  const Scalar d0 = c[N - 1] - c[N - 2];
  // ratio of successive corrections; fall back to the slowest subdominant rate 1/lambda_u
  Scalar r = 1 / lambda_u;
  if (d0 != 0) {
    const Scalar cand = d1 / d0;
    if (abs(cand) < 1) r = cand;
  }
  GuEstimate<Scalar> g;
  const Scalar tail = d1 * r / (1 - r);
  g.value = c[N] + tail;
  g.error = abs(tail) + abs(d1) * math::epsilon<Scalar>();
  // if the ratio estimate is erratic, widen the bar by the last correction
  if (d0 != 0 && abs(d1 / d0) >= 1) g.error += abs(d1);
  g.levels_used = static_cast<int>(cu.size());
  return g;
}

enum class Verdict { Bounded, Degenerate, Undetermined };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "Bounded";
    case Verdict::Degenerate: return "Degenerate";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

struct HorizonPolicy {
  double threshold = 50;  // K
  int growth_levels = 3;  // k
  double band = 0.25;     // ratio band around lambda_u
  int min_even_levels = 3;
};

template <class Scalar>
struct GeometryReport {
  SpectralData<Scalar> spectral;
  ModelSelection<Scalar> selection;
  Decomposition<Scalar> decomposition;
  std::optional<GuEstimate<Scalar>> Gu;
  Verdict verdict = Verdict::Undetermined;
  double max_w_norm = 0;
  double final_cosine_even = 0;
  double final_cosine_odd = 0;
  LinearFit loglog_alpha;  // log|log alpha(2n)| against n
  LinearFit w_linear;      // |w(2n)| against n, for lambda_u = 1
  std::optional<double> boundary_G;  // fitted G in w(2n) ~ -G n E_u on the curve
};

template <class Scalar>
Verdict classify_geometry(const Decomposition<Scalar>& dec, const SpectralData<Scalar>& spec,
                          const HorizonPolicy& h = {}) {
  using std::abs;
  const int n = static_cast<int>(dec.even.size());
  if (n < h.min_even_levels) return Verdict::Undetermined;
  const double lu = math::to_double(spec.lambda_u);
  bool large = abs(math::to_double(dec.even.back().u)) > h.threshold;
  bool growing = lu >= 1 && n > h.growth_levels;
  if (growing) {
    for (int k = n - h.growth_levels; k < n; ++k) {
      const double prev = math::to_double(dec.even[k - 1].u);
      const double cur = math::to_double(dec.even[k].u);
      const double ratio = cur / prev;
      if (!(abs(cur) > abs(prev)) || !(abs(ratio - lu) <= h.band * lu)) growing = false;
    }
  }
  if (large && growing) return Verdict::Degenerate;
  double peak = 0;
  for (const auto& c : dec.even) peak = std::max(peak, std::abs(math::to_double(c.u)));
  if (peak <= h.threshold) return Verdict::Bounded;
  return Verdict::Undetermined;
}

/// Full pipeline: choose the even model, decompose, estimate G_u, classify.
template <class Scalar>
GeometryReport<Scalar> analyze(const RenormTrace<Scalar>& trace, const HorizonPolicy& h = {}) {
  using std::abs;
  using std::log;
  if (trace.levels.empty()) throw DomainError("analyze: empty trace");
  GeometryReport<Scalar> r;
  const Scalar l1 = trace.l1(), l2 = trace.l2();
  r.selection = select_even_model(trace, l1, l2);
  r.spectral = eigen(l1, l2, r.selection.model);
  r.decomposition = decompose(trace, r.spectral);
  const auto& dec = r.decomposition;
  for (const auto& lvl : trace.levels) r.max_w_norm = std::max(r.max_w_norm, math::to_double(lvl.w.norm()));
  if (!dec.even.empty()) r.final_cosine_even = math::to_double(dec.even.back().direction_cosine);
  if (!dec.odd.empty()) r.final_cosine_odd = math::to_double(dec.odd.back().direction_cosine);
  if (r.spectral.lambda_u > 1 && dec.even.size() >= 4) {
    std::vector<Scalar> cu;
    for (const auto& c : dec.even) cu.push_back(c.u);
    r.Gu = estimate_Gu(cu, r.spectral.lambda_u);
  }
  std::vector<double> ks, ll, wn;
  for (const auto& lvl : trace.levels) {
    if (lvl.n % 2 != 0) continue;
    ks.push_back(lvl.n / 2);
    ll.push_back(math::to_double(log(abs(log(lvl.alpha)))));
    wn.push_back(math::to_double(lvl.w.norm()));
  }
  r.loglog_alpha = fit_line(ks, ll);
  if (r.spectral.degenerate_unit) {
    r.w_linear = fit_line(ks, wn);
    r.boundary_G = r.w_linear.slope;
  }
  r.verdict = classify_geometry(dec, r.spectral, h);
  if (r.verdict == Verdict::Degenerate && !(r.spectral.lambda_u >= 1)) r.verdict = Verdict::Undetermined;
  return r;
}

}  // namespace flatmap
