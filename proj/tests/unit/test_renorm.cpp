#include "support.hpp"

#include <random>

using namespace flatmap;
using flatmap::test::near;
using flatmap::test::R;

namespace {

MapX<Real> random_renormalizable(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  MapX<Real> f;
  f.x1 = -u(rng);
  f.x3 = 0.1 + 0.5 * u(rng);
  f.x4 = f.x3 + (1 - f.x3) * (0.1 + 0.8 * u(rng));
  f.x2 = f.x3 * (0.05 + 0.9 * u(rng));
  f.s = u(rng);
  f.l1 = 1 + 3 * u(rng);
  f.l2 = 1.2 + 3 * u(rng);
  f.phi = Diffeo<Real>::exp_family(Real(3 * u(rng) - 1.5));
  f.phil = Diffeo<Real>::exp_family(Real(3 * u(rng) - 1.5));
  f.phir = Diffeo<Real>::exp_family(Real(3 * u(rng) - 1.5));
  return f;
}

const char* kTuned22 = "0.209316267482757568359375";

}  // namespace

TEST_CASE("is_renormalizable") {
  MapX<Real> f = test::simple_map(2, 2, -0.3, 0.3, 0.5, 0.7);
  CHECK(is_renormalizable(f));
  f.x2 = R("0.5");
  CHECK_FALSE(is_renormalizable(f));
  f.x2 = R("-0.1");
  CHECK_FALSE(is_renormalizable(f));
}

TEST_CASE("renorm_x: sign and order of the new points, exponent swap") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const MapX<Real> f = random_renormalizable(rng);
    const MapX<Real> r = renorm_x(f);
    CHECK(r.x1 < 0);
    CHECK(r.x3 < r.x4);
    CHECK(r.x4 < 1);
    CHECK(r.x3 > 0);
    CHECK(r.l1 == f.l2);
    CHECK(r.l2 == f.l1);
    CHECK(near(r.x1, Real(f.x2 / f.x1), 1e-70));
  }
  CHECK_THROWS_AS(renorm_x(test::simple_map(2, 2, -0.3, 0.45, 0.4, 0.6)), NotRenormalizable);
}

TEST_CASE("renorm_x agrees with the first-return construction") {
  const PrecisionPolicy p;
  SUBCASE("tuned identity-chart map") {
    MapX<Real> f = test::simple_map(2, 2);
    f.x2 = R(kTuned22);
    const auto rep = verify_renorm(f, 100, 1e-20, p);
    CHECK(rep.pass);
    CHECK(rep.max_err < 1e-60);
  }
  SUBCASE("random charts and exponents") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10; ++i) {
      const MapX<Real> f = random_renormalizable(rng);
      const auto rep = verify_renorm(f, 40, 1e-20, p);
      CHECK(rep.pass);
      CHECK(rep.max_err < 1e-50);
    }
  }
  SUBCASE("a perturbed flat interval is detected") {
    MapX<Real> f = test::simple_map(2, 2);
    f.x2 = R(kTuned22);
    MapX<Real> rf = renorm_x(f, p);
    rf.x3 += R("1e-5");
    CHECK_FALSE(verify_renorm(f, rf, 100, 1e-20).pass);
    CHECK(verify_renorm(f, rf, 0, 1e-20).pass);
  }
}

TEST_CASE("renorm_s commutes with the change of chart") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const MapX<Real> f = random_renormalizable(rng);
    const MapS<Real> a = renorm_s(x_to_s(f));
    const MapS<Real> b = x_to_s(renorm_x(f));
    CHECK(abs(a.S1 - b.S1) <= Real(1e-20));
    CHECK(abs(a.S2 - b.S2) <= Real(1e-20));
    CHECK(abs(a.S3 - b.S3) <= Real(1e-20) * b.S3);
    CHECK(abs(a.S4 - b.S4) <= Real(1e-20) * b.S4);
    CHECK(abs(a.S5 - b.S5) <= Real(1e-20));
    CHECK(a.S4 > 0);
    // S5 follows the swapped exponent
    REQUIRE(a.s.has_value());
    CHECK(near(a.S5, Real(pow(*a.s, a.l2 - 1)), 1e-60));
    // the diffeomorphisms agree pointwise too
    for (int k = 1; k < 8; ++k) {
      const Real x = Real(k) / 8;
      CHECK(near(a.phil(x), b.phil(x), 1e-60));
      CHECK(near(a.phir(x), b.phir(x), 1e-60));
      CHECK(near(a.phi(x), b.phi(x), 1e-60));
    }
  }
}

TEST_CASE("iterate") {
  const PrecisionPolicy p;
  SUBCASE("non-renormalizable input gives an empty trace with a failure") {
    const auto tr = iterate(test::simple_map(2, 2, -0.3, 0.5, 0.4, 0.6), 5, p);
    CHECK(tr.depth() == 0);
    REQUIRE(tr.failure.has_value());
    CHECK(tr.failure->level == 0);
    CHECK(tr.failure->side == FailureSide::Overshoot);
  }
  SUBCASE("tuned map reaches the requested depth with finite records") {
    MapX<Real> f = test::simple_map(2, 2);
    f.x2 = R(kTuned22);
    const auto tr = iterate(f, 10, p);
    CHECK(tr.depth() == 10);
    CHECK_FALSE(tr.failure.has_value());
    CHECK_FALSE(tr.precision_exhausted);
    for (const auto& t : tr.levels) {
      CHECK(t.alpha > 0);
      CHECK(t.alpha < 1);
      CHECK(t.renormalizable);
      CHECK(t.dag_depth >= 0);
      for (int i = 0; i < 4; ++i) CHECK(math::is_finite(t.w(i)));
    }
    // level-dependent quantities stay within fixed bands over the run
    for (const auto& t : tr.levels) {
      const MapS<Real> g = x_to_s(t.map);
      const Real a = g.S1 * g.S2 * g.S3 / t.alpha;
      const Real b = t.map.l2 * pow(g.S1, t.map.l1) / g.S2;
      CHECK(a > Real(0.05));
      CHECK(a < Real(5));
      CHECK(b > Real(0.05));
      CHECK(b < Real(50));
    }
  }
  SUBCASE("depth zero") {
    CHECK(iterate(test::simple_map(2, 2), 0, p).depth() == 0);
    CHECK_THROWS_AS(iterate(test::simple_map(2, 2), -1, p), DomainError);
  }
}

TEST_CASE("failure parity") {
  FailureProbe a{3, FailureSide::Overshoot, false};
  FailureProbe b{2, FailureSide::Undershoot, false};
  FailureProbe c{4, FailureSide::Overshoot, false};
  CHECK(failure_parity(a) == failure_parity(b));
  CHECK(failure_parity(a) != failure_parity(c));
}

TEST_CASE("tune_to_fibonacci") {
  const PrecisionPolicy p;
  const MapX<Real> tmpl = test::simple_map(2, 2);
  SUBCASE("depth zero returns the template") {
    const auto r = tune_to_fibonacci(tmpl, TuningParameter::X2, R("0.01"), R("0.3"), 0, p);
    CHECK(r.map.x2 == tmpl.x2);
  }
  SUBCASE("depth one from opposite failure sides") {
    const auto r = tune_to_fibonacci(tmpl, TuningParameter::X2, R("1e-6"), R("0.399"), 1, p, 0);
    CHECK(is_renormalizable(r.map));
  }
  SUBCASE("regression value at depth 8") {
    const auto r = tune_to_fibonacci(tmpl, TuningParameter::X2, R("1e-6"), R("0.399"), 8, p);
    CHECK(near(r.parameter, R(kTuned22), 1e-60));
    CHECK(r.bisections == 18);
    CHECK(iterate(r.map, 10, p).depth() == 10);
  }
  SUBCASE("same-side bracket is rejected") {
    CHECK_THROWS_AS(tune_to_fibonacci(tmpl, TuningParameter::X2, R("0.398"), R("0.399"), 6, p), BracketNotFound);
    CHECK_THROWS_AS(find_bracket(tmpl, TuningParameter::X2, R("0.398"), R("0.399"), 6, p, 8), BracketNotFound);
  }
  SUBCASE("double precision runs out") {
    const MapX<double> d = test::simple_map<double>(2, 2);
    CHECK_THROWS_AS(tune_to_fibonacci(d, TuningParameter::X2, 1e-6, 0.399, 40, p), PrecisionExhausted);
  }
  SUBCASE("other parameters") {
    CHECK(parse_tuning_parameter("x3") == TuningParameter::X3);
    CHECK_THROWS_AS(parse_tuning_parameter("x9"), DomainError);
    CHECK(with_parameter(tmpl, TuningParameter::S, R("0.25")).s == R("0.25"));
  }
}

TEST_CASE("refine_template") {
  const PrecisionPolicy p;
  MapX<Real> tmpl = test::simple_map(3, 3);
  CHECK_THROWS_AS(refine_template(tmpl, 6, 6, 1, p), DomainError);
  CHECK_THROWS_AS(refine_template(test::simple_map(1, 2), 6, 3, 1, p), DomainError);
  const MapX<Real> r = refine_template(tmpl, 8, 6, 1, p);
  CHECK(validate(with_parameter(r, TuningParameter::X2, Real(r.x3 / 2))).ok());
  CHECK(r.l1 == 3);
  CHECK(r.phil.kind() == DiffeoKind::Identity);
}
