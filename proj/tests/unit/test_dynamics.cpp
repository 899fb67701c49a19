#include "support.hpp"

using namespace flatmap;
using flatmap::test::near;
using flatmap::test::R;

namespace {

const MapX<Real>& tuned22() {
  static const MapX<Real> f = [] {
    MapX<Real> g = test::simple_map(2, 2);
    g.x2 = R("0.209316267482757568359375");
    return g;
  }();
  return f;
}

}  // namespace

TEST_CASE("fibonacci") {
  CHECK(fibonacci(0) == 1);
  CHECK(fibonacci(1) == 1);
  CHECK(fibonacci(2) == 2);
  CHECK(fibonacci(5) == 8);
  CHECK(fibonacci(12) == 233);
  for (int n = 2; n < 40; ++n) CHECK(fibonacci(n) == fibonacci(n - 1) + fibonacci(n - 2));
  CHECK_THROWS_AS(fibonacci(-1), DomainError);
  CHECK_THROWS_AS(fibonacci(91), DomainError);
}

TEST_CASE("inverse_map undoes eval_map off the flat interval") {
  const MapX<Real>& f = tuned22();
  for (int i = 1; i < 40; ++i) {
    const Real x = f.x1 + (1 - f.x1) * Real(i) / 40;
    if (x > f.x3 && x < f.x4) continue;
    const Real y = eval_map(f, x);
    if (y == 0) continue;
    CHECK(near(inverse_map(f, y), x, 1e-60));
  }
  CHECK_THROWS_AS(inverse_map(f, Real(0)), DomainError);
}

TEST_CASE("first_return") {
  const MapX<Real>& f = tuned22();
  SUBCASE("at most two return times on the renormalization interval") {
    std::set<int> times;
    for (int i = 0; i < 100; ++i) {
      const Real x = f.x1 + (f.x2 - f.x1) * (Real(i) + Real(0.5)) / 100;
      times.insert(first_return(f, x).time);
    }
    CHECK(times.size() <= 2);
    for (const int t : times) CHECK((t == 1 || t == 2));
  }
  SUBCASE("an orbit through the flat interval returns through 0") {
    Real y = (f.x3 + f.x4) / 2;
    int steps = 0;
    do {
      y = inverse_map(f, y);
      ++steps;
    } while (!(y >= f.x1 && y <= f.x2) && steps < 50);
    REQUIRE(steps < 50);
    const Return<Real> r = first_return(f, y);
    CHECK(r.point == 0);
    CHECK(r.time == steps + 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(first_return(f, R("0.5")), DomainError);
    CHECK_THROWS_AS(first_return(f, R("-0.1"), 0), IterationBudgetExceeded);
  }
}

TEST_CASE("direct renormalization matches renorm_x") {
  const MapX<Real>& f = tuned22();
  const MapX<Real> rf = renorm_x(f);
  for (int i = 1; i < 20; ++i) {
    const Real u = rf.x1 + (1 - rf.x1) * Real(i) / 20;
    CHECK(near(direct_renormalization(f, u), eval_map(rf, u), 1e-60));
  }
}

TEST_CASE("dynamical points agree with the renormalized coordinates") {
  const PrecisionPolicy p;
  const MapX<Real>& f = tuned22();
  const int depth = 7;
  const auto tr = iterate(f, depth, p);
  REQUIRE(tr.depth() == depth);
  const auto d = dynamical_points(f, depth, p);
  REQUIRE(d.x1.size() == static_cast<size_t>(depth));
  Real P = 1;  // product of the x1 scalings down to level n
  for (int n = 0; n < depth; ++n) {
    const MapX<Real>& g = tr.levels[n].map;
    CHECK(near(d.x1[n], Real(P * g.x1), 1e-50));
    CHECK(near(d.x2[n], Real(P * g.x2), 1e-50));
    CHECK(near(d.x3[n], Real(P * g.x3), 1e-50));
    CHECK(near(d.x4[n], Real(P * g.x4), 1e-50));
    // alpha from the trace against |[0, x3]| / |[0, x4]| by direct iteration
    CHECK(abs(tr.levels[n].alpha - abs(d.x3[n]) / abs(d.x4[n])) <= Real(1e-15));
    P *= g.x1;
  }
  CHECK(dynamical_points(f, 0, p).x1.empty());
}

TEST_CASE("gap sizes relative to the flat-interval preimages stay bounded") {
  const PrecisionPolicy p;
  const MapX<Real>& f = tuned22();
  const int depth = 8;
  const auto d = dynamical_points(f, depth, p);
  for (int n = 2; n + 1 < depth; ++n) {
    const Real flat = abs(d.x4[n] - d.x3[n]);
    const Real a = std::max(abs(d.x3[n]), abs(d.x3[n - 2] - d.x4[n]));
    CHECK(a / flat < Real(100));
    CHECK(abs(d.x2[n]) / abs(d.x4[n + 1] - d.x3[n + 1]) < Real(100));
  }
}

TEST_CASE("return times follow the Fibonacci numbers") {
  const PrecisionPolicy p;
  const MapX<Real>& f = tuned22();
  const auto tr = iterate(f, 9, p);
  REQUIRE(tr.depth() == 9);
  for (int n = 0; n < 9; ++n) {
    const auto c = check_return_times(f, tr, n, 20);
    CHECK(c.mismatches == 0);
    CHECK(c.observed.count(static_cast<int>(fibonacci(n))) == 1);
    CHECK(c.observed.count(static_cast<int>(fibonacci(n + 1))) == 1);
  }
  CHECK_THROWS_AS(check_return_times(f, tr, 9, 10), DomainError);
}

TEST_CASE("gap_decay_check") {
  const MapX<Real>& f = tuned22();
  const auto short_run = gap_decay_check(f, 1);
  CHECK_FALSE(short_run.sufficient);
  CHECK_FALSE(short_run.pass);
  CHECK(short_run.note.find("insufficient") != std::string::npos);
  const auto r = gap_decay_check(f, 9);
  CHECK(r.sufficient);
  CHECK(r.pass);
  CHECK(r.fit.slope < 0);
  CHECK(r.log_gap.size() == 9);
}

TEST_CASE("box_dimension") {
  const PrecisionPolicy p;
  const MapX<Real>& f = tuned22();
  SUBCASE("depth zero is the circle minus one interval") {
    const auto e = box_dimension(f, 0, 12, p);
    CHECK(e.gaps == 1);
    CHECK(e.estimate == doctest::Approx(1).epsilon(0.05));
    CHECK(e.counts.size() == 12);
  }
  SUBCASE("deeper coverings are thinner") {
    const auto a = box_dimension(f, 3, 16, p);
    const auto b = box_dimension(f, 6, 16, p);
    CHECK(b.gaps == static_cast<int>(fibonacci(7)));
    CHECK(b.largest_piece < a.largest_piece);
    CHECK(b.estimate > 0);
    CHECK(b.estimate < 1);
    for (size_t i = 1; i < b.counts.size(); ++i) CHECK(b.counts[i].box_count >= b.counts[i - 1].box_count);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(box_dimension(f, -1, 8, p), DomainError);
    CHECK_THROWS_AS(box_dimension(f, 2, 1, p), DomainError);
  }
}

TEST_CASE("oracle on doubles") {
  MapX<double> f = test::simple_map<double>(2, 2);
  f.x2 = 0.20931626748275757;
  CHECK(verify_renorm(f, 50, 1e-12).pass);
}
