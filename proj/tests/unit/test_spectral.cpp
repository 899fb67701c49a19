#include "support.hpp"

#include <random>

using namespace flatmap;
using flatmap::test::near;
using flatmap::test::R;

namespace {

using M = Mat4<Real>;
using V = Vec4<Real>;

Real max_abs(const M& m) { return m.cwiseAbs().maxCoeff(); }

/// A trace whose even levels carry the given w vectors (odd levels skipped).
RenormTrace<Real> synthetic_trace(const std::vector<V>& even_w, double l1, double l2) {
  RenormTrace<Real> tr;
  for (size_t k = 0; k < even_w.size(); ++k) {
    TraceLevel<Real> t;
    t.n = static_cast<int>(2 * k);
    t.map = test::simple_map(l1, l2);
    t.w = even_w[k];
    t.alpha = R("0.5");
    tr.levels.push_back(t);
  }
  return tr;
}

}  // namespace

TEST_CASE("build_matrices: displayed entries") {
  const auto m = build_matrices(Real(1), Real(3));
  CHECK(m.L1(0, 0) == 2);
  CHECK(m.L1(0, 1) == 1);
  CHECK(m.L1(0, 2) == 0);
  CHECK(m.L1(0, 3) == -1);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(1, 5);
  for (int i = 0; i < 20; ++i) {
    const auto mm = build_matrices(Real(u(rng)), Real(u(rng)));
    CHECK(mm.L_even(0, 2) == 0);
    CHECK(mm.L_odd(0, 2) == 0);
  }
  CHECK_THROWS_AS(build_matrices(R("0.5"), R("2")), DomainError);
}

TEST_CASE("build_matrices: the closed-form products are L1 L2 and L2 L1") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(1, 5);
  for (int i = 0; i < 100; ++i) {
    const Real a = u(rng), b = u(rng);
    const auto m = build_matrices(a, b);
    CHECK(max_abs(m.L1 * m.L2 - m.L_even) <= Real(1e-30));
    CHECK(max_abs(m.L2 * m.L1 - m.L_odd) <= Real(1e-30));
    // the step-recursion product is the partner, not the displayed one
    if (abs(a - b) > Real(0.1)) CHECK(max_abs(m.L2 * m.L1 - m.L_even) > Real(1e-3));
  }
}

TEST_CASE("eigen: closed-form eigenvalues") {
  const Real sqrt5 = sqrt(Real(5));
  const auto a = eigen(Real(1), Real(1));
  CHECK(near(a.lambda_u, Real((3 + sqrt5) / 2), 1e-70));
  CHECK(near(a.lambda_s, Real((3 - sqrt5) / 2), 1e-70));
  const auto b = eigen(Real(2), Real(2));
  CHECK(b.lambda_u == 1);
  CHECK(near(b.lambda_s, R("0.25"), 1e-70));
  CHECK(b.quadrant == Quadrant::Gamma);
  CHECK(b.degenerate_unit);
  const auto c = eigen(Real(1), Real(2));
  CHECK(near(c.lambda_u, Real(1 + sqrt(Real(2)) / 2), 1e-70));
  CHECK(c.quadrant == Quadrant::QMinus);
  CHECK(doctest::Approx(math::to_double(eigen(Real(3), Real(3)).lambda_u)).epsilon(1e-6) == 0.589197);
  CHECK(eigen(Real(3), Real(3)).quadrant == Quadrant::QPlus);
  const auto d = eigen(R("1.5"), R("1.5"));
  CHECK(near(d.lambda_u, Real((4 + sqrt(Real(7))) / R("4.5")), 1e-70));
  CHECK(d.quadrant == Quadrant::QMinus);
}

TEST_CASE("eigen: invariants on random exponents") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(1, 5);
  for (int i = 0; i < 50; ++i) {
    const Real l1 = u(rng), l2 = u(rng);
    for (const EvenModel model : {EvenModel::StepProduct, EvenModel::Displayed}) {
      const auto d = eigen(l1, l2, model);
      CHECK(d.lambda_s > 0);
      CHECK(d.lambda_s < 1);
      CHECK(d.lambda_u > 0);
      CHECK(near(Real(d.lambda_u * d.lambda_s), Real(1 / (l1 * l2)), 1e-30));
      CHECK(near(Real(d.lambda_u + d.lambda_s), Real((1 + l1 + l2) / (l1 * l2)), 1e-30));
      CHECK(near(d.even.trace(), Real(1 + d.lambda_u + d.lambda_s), 1e-30));
      CHECK(near(d.even.trace(), Real(1 + 1 / l1 + 1 / l2 + 1 / (l1 * l2)), 1e-30));
      CHECK(abs(d.even.determinant()) <= Real(1e-30));
      // eigenpairs of both products
      const std::pair<V, Real> pairs[] = {{d.E_u, d.lambda_u}, {d.E_s, d.lambda_s}, {d.E_1, Real(1)}, {d.E_0, Real(0)}};
      for (const auto& [e, lam] : pairs) {
        CHECK((d.even * e - lam * e).norm() <= Real(1e-25));
        CHECK(near(e.norm(), Real(1), 1e-60));
      }
      const std::pair<V, Real> odd_pairs[] = {{d.F_u, d.lambda_u}, {d.F_s, d.lambda_s}, {d.F_1, Real(1)}, {d.F_0, Real(0)}};
      for (const auto& [e, lam] : odd_pairs) CHECK((d.odd * e - lam * e).norm() <= Real(1e-25));
      // sign convention and fixed vectors
      CHECK(d.E_u(0) + d.E_u(1) > 0);
      CHECK((d.E_1 - V(V::Unit(2))).norm() <= Real(1e-60));
      for (int k = 0; k < 4; ++k) CHECK(abs(d.E_u(k)) > Real(1e-10));
      // restriction to span{E_u, E_s} has determinant lambda_u lambda_s
      Eigen::Matrix<Real, 4, 2> b;
      b << d.E_u, d.E_s;
      const Eigen::Matrix<Real, 2, 2> g = b.transpose() * b;
      const Eigen::Matrix<Real, 2, 2> h = b.transpose() * d.even * b;
      CHECK(near(Real((g.inverse() * h).determinant()), Real(1 / (l1 * l2)), 1e-25));
      for (const Real& root : {Real(0), Real(1), d.lambda_s, d.lambda_u}) {
        CHECK(abs(characteristic_polynomial(d.even, root)) <= Real(1e-30));
      }
    }
  }
  CHECK_THROWS_AS(eigen(R("0.9"), R("2")), DomainError);
}

TEST_CASE("eigen: odd vectors follow the step out of the even level") {
  const auto d = eigen(Real(1), Real(2));
  const V t = d.mats.L1 * d.E_u;
  CHECK(abs(t.dot(d.F_u) / t.norm() - 1) <= Real(1e-30));
}

TEST_CASE("quadrants and the curve lambda_u = 1") {
  CHECK(classify_quadrant(Real(2), Real(2), Real(1e-12)) == Quadrant::Gamma);
  CHECK(classify_quadrant(Real(3), Real(3), Real(1e-12)) == Quadrant::QPlus);
  CHECK(classify_quadrant(R("1.5"), R("1.5"), Real(1e-12)) == Quadrant::QMinus);
  for (double a = 1; a <= 5; a += 0.25) {
    for (double b = 1; b <= 5; b += 0.25) {
      CHECK(classify_quadrant(Real(a), Real(b), Real(1e-12)) == classify_quadrant(Real(b), Real(a), Real(1e-12)));
    }
  }
  const auto r2 = gamma_root(Real(2), Real(1e-40));
  REQUIRE(r2.has_value());
  CHECK(near(*r2, Real(2), 1e-35));
  CHECK_FALSE(gamma_root(Real(1)).has_value());
  for (const double a : {1.5, 2.5, 3.0, 4.0}) {
    const auto r = gamma_root(Real(a), Real(1e-40));
    REQUIRE(r.has_value());
    CHECK(near(lambda_u(Real(a), *r), Real(1), 1e-35));
    const auto back = gamma_root(*r, Real(1e-40));
    REQUIRE(back.has_value());
    CHECK(near(*back, Real(a), 1e-30));
  }
  const auto curve = gamma_curve(std::vector<Real>{Real(1), Real(2), Real(3)});
  REQUIRE(curve.size() == 3);
  CHECK_FALSE(curve[0].second.has_value());
  CHECK(curve[1].second.has_value());
}

TEST_CASE("decompose: exact coordinates of basis combinations") {
  const auto spec = eigen(Real(1), Real(2));
  const auto tr = synthetic_trace({spec.E_1, V(2 * spec.E_u + 3 * spec.E_0), V(spec.E_u - spec.E_s)}, 1, 2);
  const auto dec = decompose(tr, spec);
  REQUIRE(dec.even.size() == 3);
  CHECK(dec.odd.empty());
  CHECK(abs(dec.even[0].u) <= Real(1e-60));
  CHECK(abs(dec.even[0].s) <= Real(1e-60));
  CHECK(near(dec.even[0].one, Real(1), 1e-60));
  CHECK(abs(dec.even[0].zero) <= Real(1e-60));
  CHECK(near(dec.even[1].u, Real(2), 1e-60));
  CHECK(abs(dec.even[1].s) <= Real(1e-60));
  CHECK(abs(dec.even[1].one) <= Real(1e-60));
  CHECK(near(dec.even[1].zero, Real(3), 1e-60));
  CHECK(near(dec.even[2].s, Real(-1), 1e-60));
  REQUIRE(dec.growth.size() == 2);
  CHECK(near(dec.growth[1], R("0.5"), 1e-60));
  CHECK(dec.basis_condition < 1e12);
}

TEST_CASE("estimate_Gu on synthetic sequences") {
  const Real lu = lambda_u(Real(1), Real(2));
  std::vector<Real> exact, shifted;
  for (int k = 0; k < 8; ++k) {
    exact.push_back(R("-3.5") * pow(lu, k));
    shifted.push_back(R("-3.5") * pow(lu, k) + 1);
  }
  const auto a = estimate_Gu(exact, lu);
  CHECK(near(a.value, R("-3.5"), 1e-60));
  CHECK(a.error <= Real(1e-60));
  const auto b = estimate_Gu(shifted, lu);
  CHECK(abs(b.value - R("-3.5")) <= b.error + Real(1e-60));
  CHECK(abs(b.value - R("-3.5")) <= Real(1e-50));
  CHECK_THROWS_AS(estimate_Gu(exact, Real(1)), DomainError);
  CHECK_THROWS_AS(estimate_Gu(std::vector<Real>(exact.begin(), exact.begin() + 3), lu), DomainError);
}

TEST_CASE("classify_geometry") {
  const auto spec = eigen(Real(1), Real(2));
  SUBCASE("depth one is undetermined") {
    const auto tr = synthetic_trace({V(spec.E_u)}, 1, 2);
    CHECK(classify_geometry(decompose(tr, spec), spec) == Verdict::Undetermined);
  }
  SUBCASE("growth at lambda_u past the threshold is degenerate") {
    std::vector<V> ws;
    for (int k = 0; k < 10; ++k) ws.push_back(V(-pow(spec.lambda_u, k) * 2 * spec.E_u + spec.E_s));
    const auto tr = synthetic_trace(ws, 1, 2);
    const auto dec = decompose(tr, spec);
    CHECK(classify_geometry(dec, spec) == Verdict::Degenerate);
    HorizonPolicy strict;
    strict.threshold = 1e6;
    // never exceeds the raised threshold within the horizon
    CHECK(classify_geometry(dec, spec, strict) == Verdict::Bounded);
  }
  SUBCASE("oscillation under the threshold is bounded") {
    std::vector<V> ws;
    for (int k = 0; k < 10; ++k) ws.push_back(V((k % 2 ? 3 : -3) * spec.E_u + spec.E_1));
    CHECK(classify_geometry(decompose(synthetic_trace(ws, 1, 2), spec), spec) == Verdict::Bounded);
  }
}

TEST_CASE("analyze: a degenerate trace in Q+ is never reported degenerate") {
  const auto spec = eigen(Real(3), Real(3));
  std::vector<V> ws;
  for (int k = 0; k < 10; ++k) ws.push_back(V(-pow(R("0.589"), k) * 100 * spec.E_u));
  const auto rep = analyze(synthetic_trace(ws, 3, 3));
  CHECK(rep.verdict != Verdict::Degenerate);
  CHECK_FALSE(rep.Gu.has_value());
}

TEST_CASE("spectral data on doubles") {
  const auto d = eigen(2.0, 3.0);
  CHECK((d.even * d.E_u - d.lambda_u * d.E_u).norm() < 1e-12);
  CHECK(doctest::Approx(d.lambda_u * d.lambda_s) == 1.0 / 6);
}
