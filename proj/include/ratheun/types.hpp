#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ratheun {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A grid point collides with another one (|alpha q^k| = 1 or poles too close).
class degenerate_grid_error : public error { public: using error::error; };

/// Evaluation requested too close to a pole or a shift fixed point.
class pole_proximity_error : public error { public: using error::error; };

/// A linear solve could not be completed after resampling.
class singular_system_error : public error { public: using error::error; };

/// A closed-form denominator factor vanishes for these parameters.
class degenerate_parameter_error : public error { public: using error::error; };

/// A recurrence denominator vanishes (resonant parameters); never perturbed silently.
class resonance_error : public error { public: using error::error; };

/// A documented invariant of a domain type does not hold.
class invariant_error : public error { public: using error::error; };

/// An infinite-product truncation tail could not be brought under tolerance.
class truncation_error : public error { public: using error::error; };

/// Runtime precision/tolerance bundle shared by every module.
///
/// working_precision counts significant decimal digits of the scalar type the
/// caller instantiates the library with; the tolerances are relative bounds.
struct PrecisionContext {
  int working_precision = 16;
  double fit_tolerance = 1e-9;
  double equality_tolerance = 1e-8;

  void validate() const {
    if (working_precision < 15)
      throw invariant_error("PrecisionContext: working_precision must be >= 15");
    if (!(fit_tolerance > 0.0 && fit_tolerance < 1.0))
      throw invariant_error("PrecisionContext: fit_tolerance out of (0,1)");
    if (equality_tolerance < fit_tolerance)
      throw invariant_error("PrecisionContext: equality_tolerance < fit_tolerance");
  }

  /// Context for a given digit count. Tolerances keep ~7 digits of headroom,
  /// matching the binary64 defaults (16 digits -> 1e-9 / 1e-8).
  static PrecisionContext with_digits(int digits) {
    PrecisionContext ctx;
    ctx.working_precision = digits;
    int exp10 = digits - 7;
    if (exp10 < 4) exp10 = 4;
    ctx.fit_tolerance = std::pow(10.0, -exp10);
    ctx.equality_tolerance = 10.0 * ctx.fit_tolerance;
    ctx.validate();
    return ctx;
  }

  /// Trapezoid point count for contour quadratures, scaled so the geometric
  /// truncation stays below the working precision.
  int quadrature_points() const {
    int m = static_cast<int>(std::ceil(1.5 * working_precision)) + 8;
    m = ((m + 7) / 8) * 8;
    return std::max(32, m);
  }

  /// Tail target for infinite q-Pochhammer products (1e-20 at binary64,
  /// tightened in step with the working precision).
  double product_tail() const {
    return working_precision <= 16 ? 1e-20
                                   : std::pow(10.0, -(working_precision + 6));
  }
};

template <class C>
struct complex_traits {
  using real_type = typename C::value_type;
  static C make(double re, double im = 0.0) {
    return C(real_type(re), real_type(im));
  }
};

template <class C>
using real_t = typename complex_traits<C>::real_type;

/// |z| as a double, for tolerance comparisons independent of the scalar type.
template <class C>
double abs_d(const C& z) {
  using std::abs;
  return static_cast<double>(abs(z));
}

template <class C>
C x_of(const C& z) {
  return z + C(1) / z;
}

/// z^n for integer n (repeated squaring; n may be negative).
template <class C>
C pow_int(C z, long n) {
  if (n < 0) { z = C(1) / z; n = -n; }
  C r(1);
  while (n > 0) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

/// |a-b| / max(|a|,|b|,floor)
template <class C>
double rel_diff(const C& a, const C& b, double floor_scale = 1e-300) {
  double s = std::max({abs_d(a), abs_d(b), floor_scale});
  return abs_d(C(a - b)) / s;
}

}  // namespace ratheun
