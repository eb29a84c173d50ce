#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace coulosc {

/// Arbitrary-precision real used by the AIM engine and the exact-condition solvers.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

/// Working precision for a computation: mantissa width and the root/convergence
/// tolerance in energy units.
struct PrecisionCtx {
  unsigned mantissa_bits = 256;
  double tol = 1e-20;

  void validate() const {
    if (mantissa_bits < 64) {
      throw std::invalid_argument("mantissa_bits must be >= 64, got " +
                                  std::to_string(mantissa_bits));
    }
    if (!(tol > 0.0) || !std::isfinite(tol)) {
      throw std::invalid_argument("tol must be a positive finite number");
    }
    // tol must sit above the unit round-off of the requested mantissa.
    if (std::log2(tol) < -static_cast<double>(mantissa_bits) + 8.0) {
      throw std::invalid_argument("tol " + std::to_string(tol) +
                                  " is not representable at " +
                                  std::to_string(mantissa_bits) + " bits");
    }
  }

  [[nodiscard]] unsigned digits10() const {
    return static_cast<unsigned>(std::ceil(mantissa_bits * 0.30102999566398120)) + 1;
  }
};

/// Installs a default Real precision for the lifetime of the guard.
///
/// The mpfr backend keeps one process-wide default, so concurrent solves must
/// agree on the precision they request; the guard only writes when the value
/// actually changes.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(const PrecisionCtx& ctx) : ScopedPrecision(ctx.digits10()) {}
  explicit ScopedPrecision(unsigned digits10) : previous_(Real::default_precision()) {
    if (previous_ != digits10) Real::default_precision(digits10);
  }
  ~ScopedPrecision() {
    if (Real::default_precision() != previous_) Real::default_precision(previous_);
  }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned previous_;
};

/// Parse a decimal literal at the current precision (no double round trip).
inline Real real_from_string(const std::string& text) { return Real(text); }

/// Copy of x carried at the current default precision. A Real keeps the
/// precision it was created with, and operations such as 2 * x or sqrt(x) run
/// at that precision, so caller-supplied values are normalised on entry.
inline Real at_working_precision(const Real& x) { return Real(x, Real::default_precision()); }

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

}  // namespace coulosc
