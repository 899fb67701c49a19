#pragma once

// Extended-precision scalar and the numeric helpers shared by every module.
//
// All numeric code is templated on the scalar type. `Real` (MPFR with a
// runtime-selected mantissa) is the production scalar; `double` instantiations
// are used for fast checks where the exponent range is not an issue.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace flatmap {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

/// Raised when a computation needs more mantissa bits than it was given.
class PrecisionExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for arguments outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sets the mantissa width of newly created `Real` values (process wide).
/// Must be called before worker threads are started.
inline void set_working_precision(unsigned bits) {
  if (bits < 64) throw DomainError("mantissa bits must be >= 64");
  // Boost counts precision in decimal digits; round up so we never get fewer bits.
  const auto digits10 = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
  Real::default_precision(digits10);
}

inline unsigned working_precision_bits() {
  return static_cast<unsigned>(mpfr_get_prec(Real(1).backend().data()));
}

struct PrecisionPolicy {
  unsigned mantissa_bits = 256;
  int max_iterations = 2000;

  /// Relative tolerance for inverse solves: 2^-(mantissa-16).
  template <class Scalar>
  Scalar tolerance() const {
    if constexpr (std::is_same_v<Scalar, double>) {
      return 1e-14;
    } else {
      using std::ldexp;
      return ldexp(Scalar(1), -static_cast<int>(mantissa_bits) + 16);
    }
  }

  void validate() const {
    if (mantissa_bits < 64) throw DomainError("PrecisionPolicy: mantissa bits must be >= 64");
    if (max_iterations <= 0) throw DomainError("PrecisionPolicy: max_iterations must be positive");
  }

  /// Installs this policy's precision as the working precision.
  void apply() const {
    validate();
    set_working_precision(mantissa_bits);
  }
};

namespace math {

template <class Scalar>
Scalar expm1(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Real>) {
    Real r;
    mpfr_expm1(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
  } else {
    return std::expm1(x);
  }
}

template <class Scalar>
Scalar log1p(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Real>) {
    Real r;
    mpfr_log1p(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
  } else {
    return std::log1p(x);
  }
}

template <class Scalar>
bool is_finite(const Scalar& x) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(x);
}

/// 2^k in the scalar type.
template <class Scalar>
Scalar pow2(int k) {
  using std::ldexp;
  return ldexp(Scalar(1), k);
}

/// Machine epsilon of the working precision.
template <class Scalar>
Scalar epsilon() {
  if constexpr (std::is_same_v<Scalar, Real>) {
    return pow2<Real>(-static_cast<int>(working_precision_bits()) + 1);
  } else {
    return std::numeric_limits<Scalar>::epsilon();
  }
}

template <class Scalar>
Scalar from_decimal(const std::string& text) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::stod(text);
  } else {
    return Scalar(text);
  }
}

template <class Scalar>
double to_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

/// Scientific notation with `digits` significant digits.
template <class Scalar>
std::string to_scientific(const Scalar& x, int digits) {
  if constexpr (std::is_same_v<Scalar, double>) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return buf;
  } else {
    return x.str(digits, std::ios_base::scientific);
  }
}

}  // namespace math
}  // namespace flatmap
