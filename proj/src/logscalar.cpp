#include "heatlab/logscalar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Sign flip(Sign s) {
  switch (s) {
    case Sign::negative: return Sign::positive;
    case Sign::positive: return Sign::negative;
    default: return Sign::zero;
  }
}

Sign multiply(Sign a, Sign b) {
  return static_cast<Sign>(static_cast<int>(a) * static_cast<int>(b));
}

}  // namespace

LogScalar LogScalar::from_real(double x) {
  if (std::isnan(x)) throw std::domain_error("LogScalar::from_real: NaN");
  LogScalar r;
  if (x == 0.0) return r;
  r.sign_ = x > 0 ? Sign::positive : Sign::negative;
  r.ln_ = std::log(std::fabs(x));
  return r;
}

LogScalar LogScalar::from_log(double ln_abs, Sign sign) {
  if (std::isnan(ln_abs)) throw std::domain_error("LogScalar::from_log: NaN");
  if (ln_abs == kInf) throw OverflowError("LogScalar::from_log: infinite magnitude");
  LogScalar r;
  if (sign == Sign::zero || ln_abs == -kInf) return r;
  r.sign_ = sign;
  r.ln_ = ln_abs;
  return r;
}

double LogScalar::log_abs() const { return is_zero() ? -kInf : ln_; }

double LogScalar::to_real() const {
  if (is_zero()) return 0.0;
  if (ln_ > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("LogScalar::to_real: magnitude e^" + std::to_string(ln_) +
                        " exceeds double range");
  }
  const double m = std::exp(ln_);
  return sign_ == Sign::negative ? -m : m;
}

LogScalar LogScalar::abs() const {
  LogScalar r = *this;
  if (r.sign_ == Sign::negative) r.sign_ = Sign::positive;
  return r;
}

LogScalar LogScalar::with_flag(bool cancelled) const {
  LogScalar r = *this;
  r.cancelled_ = r.cancelled_ || cancelled;
  return r;
}

LogScalar LogScalar::pow(double e) const {
  if (std::isnan(e)) throw std::domain_error("LogScalar::pow: NaN exponent");
  LogScalar r;
  r.cancelled_ = cancelled_;
  if (is_zero()) {
    if (e > 0) return r;
    if (e == 0) return one().with_flag(cancelled_);
    throw std::domain_error("LogScalar::pow: zero raised to a negative power");
  }
  if (sign_ == Sign::negative) {
    if (e < 0 || std::floor(e) != e) {
      throw std::domain_error("LogScalar::pow: negative base requires a nonnegative integer exponent");
    }
    const bool odd = std::fmod(e, 2.0) != 0.0;
    r.sign_ = odd ? Sign::negative : Sign::positive;
  } else {
    r.sign_ = Sign::positive;
  }
  r.ln_ = ln_ * e;
  if (e == 0) r.ln_ = 0.0;
  return r;
}

LogScalar LogScalar::operator-() const {
  LogScalar r = *this;
  r.sign_ = flip(sign_);
  return r;
}

LogScalar operator+(LogScalar a, LogScalar b) {
  const bool flag = a.cancelled_ || b.cancelled_;
  if (a.is_zero()) return b.with_flag(flag);
  if (b.is_zero()) return a.with_flag(flag);
  const LogScalar& big = a.ln_ >= b.ln_ ? a : b;
  const LogScalar& small = a.ln_ >= b.ln_ ? b : a;
  const double d = small.ln_ - big.ln_;  // <= 0
  LogScalar r;
  r.cancelled_ = flag;
  if (a.sign_ == b.sign_) {
    r.sign_ = a.sign_;
    r.ln_ = big.ln_ + std::log1p(std::exp(d));
    return r;
  }
  const double rel = -std::expm1(d);  // |a+b| / max(|a|,|b|)
  if (rel < LogScalar::kCancellationThreshold) {
    r.cancelled_ = true;
    return r;
  }
  r.sign_ = big.sign_;
  r.ln_ = big.ln_ + std::log(rel);
  return r;
}

LogScalar operator*(LogScalar a, LogScalar b) {
  LogScalar r;
  r.cancelled_ = a.cancelled_ || b.cancelled_;
  if (a.is_zero() || b.is_zero()) return r;
  r.sign_ = multiply(a.sign_, b.sign_);
  r.ln_ = a.ln_ + b.ln_;
  return r;
}

LogScalar operator/(LogScalar a, LogScalar b) {
  if (b.is_zero()) throw std::domain_error("LogScalar: division by zero");
  LogScalar r;
  r.cancelled_ = a.cancelled_ || b.cancelled_;
  if (a.is_zero()) return r;
  r.sign_ = multiply(a.sign_, b.sign_);
  r.ln_ = a.ln_ - b.ln_;
  return r;
}

std::strong_ordering cmp(const LogScalar& a, const LogScalar& b) {
  const int sa = static_cast<int>(a.sign_);
  const int sb = static_cast<int>(b.sign_);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  if (a.ln_ == b.ln_) return std::strong_ordering::equal;
  const bool less_mag = a.ln_ < b.ln_;
  if (sa > 0) return less_mag ? std::strong_ordering::less : std::strong_ordering::greater;
  return less_mag ? std::strong_ordering::greater : std::strong_ordering::less;
}

std::string LogScalar::sign_string() const {
  switch (sign_) {
    case Sign::negative: return "-";
    case Sign::positive: return "+";
    default: return "0";
  }
}

std::string LogScalar::to_string() const {
  if (is_zero()) return cancelled_ ? "(0 cancelled)" : "(0)";
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%s, %.15g)", sign_string().c_str(), ln_);
  return buf;
}

void LogAccumulator::add_log(double l) {
  if (l == -kInf) return;
  if (std::isnan(l)) throw std::domain_error("LogAccumulator: NaN term");
  if (l > max_) {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - l) + 1.0;
    max_ = l;
  } else {
    scaled_sum_ += std::exp(l - max_);
  }
}

void LogAccumulator::add(const LogScalar& term) {
  if (term.is_negative()) {
    throw std::domain_error("logsumexp_accumulate: negative term " + term.to_string());
  }
  cancelled_ = cancelled_ || term.cancelled();
  add_log(term.log_abs());
}

double LogAccumulator::log_total() const {
  if (scaled_sum_ == 0.0) return -kInf;
  return max_ + std::log(scaled_sum_);
}

LogScalar LogAccumulator::total() const {
  return LogScalar::from_log(log_total()).with_flag(cancelled_);
}

LogScalar logsumexp_accumulate(std::span<const LogScalar> terms) {
  // Two passes: the shift is the exact maximum, so every scaled term is <= 1.
  double max = -kInf;
  bool flag = false;
  for (const auto& t : terms) {
    if (t.is_negative()) {
      throw std::domain_error("logsumexp_accumulate: negative term " + t.to_string());
    }
    flag = flag || t.cancelled();
    max = std::max(max, t.log_abs());
  }
  if (max == -kInf) return LogScalar::zero().with_flag(flag);
  double sum = 0.0;
  for (const auto& t : terms) sum += std::exp(t.log_abs() - max);
  return LogScalar::from_log(max + std::log(sum)).with_flag(flag);
}

LogScalar logsumexp_accumulate(std::initializer_list<LogScalar> terms) {
  return logsumexp_accumulate(std::span<const LogScalar>(terms.begin(), terms.size()));
}

}  // namespace heatlab
