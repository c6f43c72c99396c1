#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <string>

#include "codom/errors.hpp"

namespace codom {

/// Integer extended with -inf / +inf sentinels, used for interval bounds and
/// DBM entries. Finite arithmetic is overflow-checked; -inf + +inf is an
/// error, never silently evaluated.
class ExtInt {
 public:
  constexpr ExtInt() : v_(0) {}
  constexpr explicit ExtInt(std::int64_t v) : v_(v) {
    assert(v != kNegSent && v != kPosSent && "sentinel values are reserved");
  }

  static constexpr ExtInt neg_inf() { return ExtInt(kNegSent, Raw{}); }
  static constexpr ExtInt pos_inf() { return ExtInt(kPosSent, Raw{}); }

  constexpr bool is_finite() const { return v_ != kNegSent && v_ != kPosSent; }
  constexpr bool is_pos_inf() const { return v_ == kPosSent; }
  constexpr bool is_neg_inf() const { return v_ == kNegSent; }

  /// Finite value; caller must check is_finite() first.
  constexpr std::int64_t value() const {
    assert(is_finite());
    return v_;
  }

  friend constexpr auto operator<=>(ExtInt a, ExtInt b) { return a.v_ <=> b.v_; }
  friend constexpr bool operator==(ExtInt a, ExtInt b) { return a.v_ == b.v_; }

  ExtInt operator-() const {
    if (is_pos_inf()) return neg_inf();
    if (is_neg_inf()) return pos_inf();
    return ExtInt(-v_);
  }

  friend ExtInt operator+(ExtInt a, ExtInt b) {
    if (a.is_finite() && b.is_finite()) {
      std::int64_t r;
      if (__builtin_add_overflow(a.v_, b.v_, &r) || r == kNegSent || r == kPosSent)
        throw OverflowError("extint add overflow");
      return ExtInt(r);
    }
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      throw OverflowError("-inf + +inf is undefined");
    return (a.is_pos_inf() || b.is_pos_inf()) ? pos_inf() : neg_inf();
  }

  friend ExtInt operator-(ExtInt a, ExtInt b) { return a + (-b); }

  /// Interval-hull multiplication rule: 0 * inf = 0.
  friend ExtInt operator*(ExtInt a, ExtInt b) {
    if (a == ExtInt(0) || b == ExtInt(0)) return ExtInt(0);
    if (!a.is_finite() || !b.is_finite()) {
      const bool neg = (a < ExtInt(0)) != (b < ExtInt(0));
      return neg ? neg_inf() : pos_inf();
    }
    std::int64_t r;
    if (__builtin_mul_overflow(a.v_, b.v_, &r) || r == kNegSent || r == kPosSent)
      throw OverflowError("extint mul overflow");
    return ExtInt(r);
  }

  /// Floor division by a finite nonzero divisor; infinities keep their sign.
  ExtInt div_floor(std::int64_t d) const {
    assert(d != 0);
    if (!is_finite()) return d > 0 ? *this : -*this;
    std::int64_t q = v_ / d;
    if ((v_ % d != 0) && ((v_ < 0) != (d < 0))) --q;
    return ExtInt(q);
  }

  ExtInt div_ceil(std::int64_t d) const {
    assert(d != 0);
    if (!is_finite()) return d > 0 ? *this : -*this;
    std::int64_t q = v_ / d;
    if ((v_ % d != 0) && ((v_ < 0) == (d < 0))) ++q;
    return ExtInt(q);
  }

  std::string str() const {
    if (is_pos_inf()) return "+inf";
    if (is_neg_inf()) return "-inf";
    return std::to_string(v_);
  }

 private:
  struct Raw {};
  constexpr ExtInt(std::int64_t v, Raw) : v_(v) {}
  static constexpr std::int64_t kNegSent = INT64_MIN;
  static constexpr std::int64_t kPosSent = INT64_MAX;
  std::int64_t v_;
};

inline ExtInt min(ExtInt a, ExtInt b) { return a < b ? a : b; }
inline ExtInt max(ExtInt a, ExtInt b) { return a < b ? b : a; }

}  // namespace codom
