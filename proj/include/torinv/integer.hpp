#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>

namespace torinv {

/// Arbitrary-precision integer with an inline 64-bit fast path.
///
/// Values that fit in int64_t are stored inline; every arithmetic operation
/// checks for overflow and promotes to a GMP integer when needed. Results are
/// always renormalized, so a value has exactly one representation and
/// equality never depends on the storage path taken.
class Integer {
 public:
  Integer() = default;
  Integer(int v) : small_(v) {}
  Integer(long v) : small_(v) {}
  Integer(long long v) : small_(v) {}
  explicit Integer(const mpz_class& v) { assign(v); }

  Integer(const Integer& o) : small_(o.small_) {
    if (o.big_) big_ = std::make_unique<mpz_class>(*o.big_);
  }
  Integer(Integer&&) noexcept = default;
  Integer& operator=(const Integer& o) {
    if (this != &o) {
      small_ = o.small_;
      big_ = o.big_ ? std::make_unique<mpz_class>(*o.big_) : nullptr;
    }
    return *this;
  }
  Integer& operator=(Integer&&) noexcept = default;

  static Integer parse(std::string_view text);

  bool is_small() const { return !big_; }
  bool is_zero() const { return !big_ && small_ == 0; }
  bool is_one() const { return !big_ && small_ == 1; }
  bool is_unit() const { return !big_ && (small_ == 1 || small_ == -1); }
  int sign() const {
    if (big_) return sgn(*big_);
    return (small_ > 0) - (small_ < 0);
  }
  /// Only meaningful when is_small().
  int64_t small_value() const { return small_; }
  mpz_class to_mpz() const { return big_ ? *big_ : mpz_class(static_cast<long>(small_)); }
  std::string to_string() const;

  Integer operator-() const;
  Integer& operator+=(const Integer& o);
  Integer& operator-=(const Integer& o);
  Integer& operator*=(const Integer& o);
  friend Integer operator+(Integer a, const Integer& b) { return a += b; }
  friend Integer operator-(Integer a, const Integer& b) { return a -= b; }
  friend Integer operator*(Integer a, const Integer& b) { return a *= b; }

  /// this -= f * o, the inner operation of every elimination loop.
  void submul(const Integer& f, const Integer& o);

  friend bool operator==(const Integer& a, const Integer& b) {
    if (!a.big_ && !b.big_) return a.small_ == b.small_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // normalized: a big value never equals a small one
  }
  friend std::strong_ordering operator<=>(const Integer& a, const Integer& b);

  friend std::ostream& operator<<(std::ostream& os, const Integer& v) { return os << v.to_string(); }

 private:
  void assign(const mpz_class& v);
  void normalize();
  mpz_class& promote();

  int64_t small_ = 0;
  std::unique_ptr<mpz_class> big_;
};

Integer abs(const Integer& a);
/// Compares |a| with |b|.
std::strong_ordering abs_compare(const Integer& a, const Integer& b);
/// Floor division; b must be nonzero.
Integer div_floor(const Integer& a, const Integer& b);
/// Quotient rounded to nearest (ties toward floor), so |a - q*b| <= |b|/2.
Integer div_round(const Integer& a, const Integer& b);
/// Exact division; b must divide a.
Integer div_exact(const Integer& a, const Integer& b);
bool divides(const Integer& d, const Integer& a);
/// Nonnegative gcd.
Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);

struct Bezout {
  Integer g;  // nonnegative
  Integer s;
  Integer t;  // s*a + t*b == g
};
Bezout gcdext(const Integer& a, const Integer& b);

}  // namespace torinv
