#pragma once

#include "flatmap/dynamics.hpp"
#include "flatmap/spectral.hpp"

#include <doctest.h>

#include <string>

namespace flatmap::test {

inline Real R(const char* text) { return Real(text); }

template <class T>
bool near(const T& a, const T& b, double tol) {
  using std::abs;
  return abs(a - b) <= T(tol);
}

/// Sets the working precision for one scope and restores the default after.
class Bits {
 public:
  explicit Bits(unsigned bits) : saved_(working_precision_bits()) {
    PrecisionPolicy p;
    p.mantissa_bits = bits;
    p.apply();
  }
  ~Bits() { set_working_precision(saved_); }
  Bits(const Bits&) = delete;
  Bits& operator=(const Bits&) = delete;

 private:
  unsigned saved_;
};

template <class Scalar = Real>
MapX<Scalar> simple_map(double l1, double l2, double x1 = -0.3, double x2 = 0.1, double x3 = 0.4, double x4 = 0.6,
                        double s = 0.5) {
  MapX<Scalar> f;
  f.x1 = x1;
  f.x2 = x2;
  f.x3 = x3;
  f.x4 = x4;
  f.s = s;
  f.l1 = l1;
  f.l2 = l2;
  return f;
}

/// The small worked example (-0.2, 0.3, 0.5, 0.7), s = 0.5.
template <class Scalar = Real>
MapX<Scalar> worked_example(double l1 = 2, double l2 = 2) {
  MapX<Scalar> f;
  f.x1 = math::from_decimal<Scalar>("-0.2");
  f.x2 = math::from_decimal<Scalar>("0.3");
  f.x3 = math::from_decimal<Scalar>("0.5");
  f.x4 = math::from_decimal<Scalar>("0.7");
  f.s = math::from_decimal<Scalar>("0.5");
  f.l1 = l1;
  f.l2 = l2;
  return f;
}

/// x2 tuned by bisection over (x3 1e-6, x3 (1 - 1e-6)) after a coarse scan.
template <class Scalar = Real>
MapX<Scalar> tuned(const MapX<Scalar>& tmpl, int depth, const PrecisionPolicy& policy, int margin = 2) {
  const Scalar lo = tmpl.x3 * Scalar(1e-6), hi = tmpl.x3 * (1 - Scalar(1e-6));
  const auto br = find_bracket(tmpl, TuningParameter::X2, lo, hi, depth + margin, policy, 200);
  if (br.first == br.second) return with_parameter(tmpl, TuningParameter::X2, br.first);
  return tune_to_fibonacci(tmpl, TuningParameter::X2, br.first, br.second, depth, policy, margin).map;
}

}  // namespace flatmap::test
