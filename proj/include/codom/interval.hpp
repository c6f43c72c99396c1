#pragma once

#include <cstdint>
#include <string>

#include "codom/extint.hpp"

namespace codom {

enum class ArithOp { Add, Sub, Mul };
enum class Side { Left, Right };

/// Integer interval [lo..hi]. The lattice is ordered by reverse inclusion:
/// a <= b iff a contains b, so bottom is the full line and the join is set
/// intersection. The empty interval has the single canonical form
/// [+inf..-inf].
class Interval {
 public:
  /// Bottom element [-inf..+inf].
  constexpr Interval() : lo_(ExtInt::neg_inf()), hi_(ExtInt::pos_inf()) {}

  Interval(ExtInt lo, ExtInt hi) : lo_(lo), hi_(hi) {
    if (lo_ > hi_ || lo_.is_pos_inf() || hi_.is_neg_inf()) *this = empty();
  }
  Interval(std::int64_t lo, std::int64_t hi) : Interval(ExtInt(lo), ExtInt(hi)) {}

  static Interval full() { return Interval(); }
  static Interval empty() {
    Interval r;
    r.lo_ = ExtInt::pos_inf();
    r.hi_ = ExtInt::neg_inf();
    return r;
  }
  static Interval singleton(std::int64_t v) { return Interval(v, v); }
  static Interval at_least(ExtInt l) { return Interval(l, ExtInt::pos_inf()); }
  static Interval at_most(ExtInt u) { return Interval(ExtInt::neg_inf(), u); }

  ExtInt lo() const { return lo_; }
  ExtInt hi() const { return hi_; }

  bool is_empty() const { return lo_ > hi_; }
  bool is_full() const { return lo_.is_neg_inf() && hi_.is_pos_inf(); }
  bool is_singleton() const { return lo_ == hi_ && lo_.is_finite(); }

  bool contains(std::int64_t v) const {
    return !is_empty() && lo_ <= ExtInt(v) && ExtInt(v) <= hi_;
  }

  /// hi - lo; only meaningful on non-empty intervals.
  ExtInt width() const { return hi_ - lo_; }

  friend bool operator==(const Interval& a, const Interval& b) = default;

  std::string str() const {
    if (is_empty()) return "{}";
    return "[" + lo_.str() + ".." + hi_.str() + "]";
  }

 private:
  ExtInt lo_, hi_;
};

/// Domain-order join, i.e. set intersection.
inline Interval join(Interval a, Interval b) {
  return Interval(max(a.lo(), b.lo()), min(a.hi(), b.hi()));
}

/// a <= b iff gamma(a) contains gamma(b).
inline bool leq(Interval a, Interval b) {
  if (b.is_empty()) return true;
  if (a.is_empty()) return false;
  return a.lo() <= b.lo() && b.hi() <= a.hi();
}

/// Smallest interval containing {x op y | x in a, y in b}; a, b non-empty.
inline Interval interval_arith(ArithOp op, const Interval& a, const Interval& b) {
  switch (op) {
    case ArithOp::Add: return Interval(a.lo() + b.lo(), a.hi() + b.hi());
    case ArithOp::Sub: return Interval(a.lo() - b.hi(), a.hi() - b.lo());
    case ArithOp::Mul: {
      const ExtInt c[4] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(),
                           a.hi() * b.hi()};
      ExtInt lo = c[0], hi = c[0];
      for (int i = 1; i < 4; ++i) {
        lo = min(lo, c[i]);
        hi = max(hi, c[i]);
      }
      return Interval(lo, hi);
    }
  }
  return Interval::full();
}

inline Interval interval_neg(const Interval& a) {
  if (a.is_empty()) return a;
  return Interval(-a.hi(), -a.lo());
}

namespace detail {
// Hull bound of the exact rational r/k, rounded outward per `upper`.
// k is a nonzero (possibly infinite) bound of the known factor.
inline ExtInt div_bound(ExtInt r, ExtInt k, bool upper) {
  if (!r.is_finite())
    return (r.is_pos_inf() == (k > ExtInt(0))) ? ExtInt::pos_inf() : ExtInt::neg_inf();
  if (!k.is_finite()) return ExtInt(0);  // r/inf tends to 0
  return upper ? r.div_floor(k.value()) : r.div_ceil(k.value());
}
}  // namespace detail

/// Superset hull of {v | exists k in known: (v op k) in result} for
/// side == Left, and of {v | exists k: (k op v) in result} for Right.
/// For Mul with 0 in known the unconstrained hull is returned.
inline Interval interval_inv_narrow(ArithOp op, const Interval& result,
                                    const Interval& known, Side side) {
  switch (op) {
    case ArithOp::Add:
      // v + k in result (both sides symmetric).
      return Interval(result.lo() - known.hi(), result.hi() - known.lo());
    case ArithOp::Sub:
      if (side == Side::Left)  // v - k in result
        return Interval(result.lo() + known.lo(), result.hi() + known.hi());
      // k - v in result
      return Interval(known.lo() - result.hi(), known.hi() - result.lo());
    case ArithOp::Mul: {
      // v * k in result, commutative.
      if (known.contains(0) || known.is_empty()) return Interval::full();
      ExtInt lo = ExtInt::pos_inf(), hi = ExtInt::neg_inf();
      const ExtInt rs[2] = {result.lo(), result.hi()};
      const ExtInt ks[2] = {known.lo(), known.hi()};
      for (ExtInt r : rs)
        for (ExtInt k : ks) {
          lo = min(lo, detail::div_bound(r, k, /*upper=*/false));
          hi = max(hi, detail::div_bound(r, k, /*upper=*/true));
        }
      return Interval(lo, hi);
    }
  }
  return Interval::full();
}

}  // namespace codom
