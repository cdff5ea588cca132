#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace heatlab {

enum class Sign : std::int8_t { negative = -1, zero = 0, positive = 1 };

/// Thrown when a log-domain value is converted to a double that cannot hold it.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A real number stored as (sign, ln|x|).
///
/// Values such as e^{i^3} spike heights or e^{-r^2/t} kernel factors are far
/// outside double range; keeping the natural log of the magnitude lets them
/// be multiplied, summed and compared without overflow or underflow.
///
/// Sums whose magnitude falls below 1e-10 of the larger operand are returned
/// as zero with a sticky `cancelled()` flag. The flag propagates through all
/// arithmetic so reports can surface it.
class LogScalar {
 public:
  /// Relative size below which an opposite-sign sum is treated as cancelled.
  static constexpr double kCancellationThreshold = 1e-10;

  constexpr LogScalar() = default;

  static LogScalar zero() { return {}; }
  static LogScalar one() { return from_log(0.0); }
  static LogScalar from_real(double x);
  /// Builds sign * exp(ln_abs). A `-inf` magnitude yields zero.
  static LogScalar from_log(double ln_abs, Sign sign = Sign::positive);

  Sign sign() const { return sign_; }
  /// ln|x|; `-inf` for zero.
  double log_abs() const;
  bool is_zero() const { return sign_ == Sign::zero; }
  bool is_positive() const { return sign_ == Sign::positive; }
  bool is_negative() const { return sign_ == Sign::negative; }
  bool cancelled() const { return cancelled_; }

  /// Converts to double. Throws OverflowError if |x| exceeds DBL_MAX;
  /// underflow returns a signed zero or subnormal.
  double to_real() const;

  LogScalar abs() const;
  LogScalar pow(double exponent) const;
  LogScalar with_flag(bool cancelled) const;

  LogScalar operator-() const;
  friend LogScalar operator+(LogScalar a, LogScalar b);
  friend LogScalar operator-(LogScalar a, LogScalar b) { return a + (-b); }
  friend LogScalar operator*(LogScalar a, LogScalar b);
  friend LogScalar operator/(LogScalar a, LogScalar b);
  LogScalar& operator+=(LogScalar b) { return *this = *this + b; }
  LogScalar& operator*=(LogScalar b) { return *this = *this * b; }

  /// Total order consistent with the real line; the cancellation flag is ignored.
  friend std::strong_ordering cmp(const LogScalar& a, const LogScalar& b);
  friend std::weak_ordering operator<=>(const LogScalar& a, const LogScalar& b) {
    return cmp(a, b);
  }
  friend bool operator==(const LogScalar& a, const LogScalar& b) {
    return cmp(a, b) == std::strong_ordering::equal;
  }

  /// "+", "-" or "0".
  std::string sign_string() const;
  std::string to_string() const;

 private:
  Sign sign_ = Sign::zero;
  double ln_ = 0.0;
  bool cancelled_ = false;
};

/// Sum of nonnegative terms. Throws std::domain_error on a negative term.
LogScalar logsumexp_accumulate(std::span<const LogScalar> terms);
LogScalar logsumexp_accumulate(std::initializer_list<LogScalar> terms);

/// Streaming accumulator over ln-magnitudes of nonnegative terms.
class LogAccumulator {
 public:
  void add_log(double ln_term);
  void add(const LogScalar& term);
  LogScalar total() const;
  double log_total() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
  bool cancelled_ = false;
};

}  // namespace heatlab
