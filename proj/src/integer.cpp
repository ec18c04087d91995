#include "torinv/integer.hpp"

#include <limits>
#include <stdexcept>

namespace torinv {

namespace {

constexpr int64_t kMin = std::numeric_limits<int64_t>::min();

mpz_class as_mpz(const Integer& v) { return v.to_mpz(); }

}  // namespace

void Integer::assign(const mpz_class& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) {
    small_ = mpz_get_si(v.get_mpz_t());
    big_.reset();
  } else {
    big_ = std::make_unique<mpz_class>(v);
  }
}

void Integer::normalize() {
  if (big_ && mpz_fits_slong_p(big_->get_mpz_t())) {
    small_ = mpz_get_si(big_->get_mpz_t());
    big_.reset();
  }
}

mpz_class& Integer::promote() {
  if (!big_) big_ = std::make_unique<mpz_class>(static_cast<long>(small_));
  return *big_;
}

Integer Integer::parse(std::string_view text) {
  std::string s(text);
  mpz_class v;
  if (s.empty() || v.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
    throw std::invalid_argument("not an integer: '" + s + "'");
  return Integer(v);
}

std::string Integer::to_string() const {
  if (big_) return big_->get_str();
  return std::to_string(small_);
}

Integer Integer::operator-() const {
  if (!big_ && small_ != kMin) return Integer(static_cast<long long>(-small_));
  return Integer(mpz_class(-as_mpz(*this)));
}

Integer& Integer::operator+=(const Integer& o) {
  if (!big_ && !o.big_) {
    int64_t r;
    if (!__builtin_add_overflow(small_, o.small_, &r)) {
      small_ = r;
      return *this;
    }
  }
  promote() += as_mpz(o);
  normalize();
  return *this;
}

Integer& Integer::operator-=(const Integer& o) {
  if (!big_ && !o.big_) {
    int64_t r;
    if (!__builtin_sub_overflow(small_, o.small_, &r)) {
      small_ = r;
      return *this;
    }
  }
  promote() -= as_mpz(o);
  normalize();
  return *this;
}

Integer& Integer::operator*=(const Integer& o) {
  if (!big_ && !o.big_) {
    int64_t r;
    if (!__builtin_mul_overflow(small_, o.small_, &r)) {
      small_ = r;
      return *this;
    }
  }
  promote() *= as_mpz(o);
  normalize();
  return *this;
}

void Integer::submul(const Integer& f, const Integer& o) {
  if (!big_ && !f.big_ && !o.big_) {
    int64_t p, r;
    if (!__builtin_mul_overflow(f.small_, o.small_, &p) && !__builtin_sub_overflow(small_, p, &r)) {
      small_ = r;
      return;
    }
  }
  mpz_class& me = promote();
  mpz_class prod = as_mpz(f) * as_mpz(o);
  me -= prod;
  normalize();
}

std::strong_ordering operator<=>(const Integer& a, const Integer& b) {
  if (!a.big_ && !b.big_) return a.small_ <=> b.small_;
  int c = cmp(a.to_mpz(), b.to_mpz());
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

Integer abs(const Integer& a) { return a.sign() < 0 ? -a : a; }

std::strong_ordering abs_compare(const Integer& a, const Integer& b) {
  if (a.is_small() && b.is_small() && a.small_value() != kMin && b.small_value() != kMin) {
    int64_t x = a.small_value() < 0 ? -a.small_value() : a.small_value();
    int64_t y = b.small_value() < 0 ? -b.small_value() : b.small_value();
    return x <=> y;
  }
  int c = mpz_cmpabs(a.to_mpz().get_mpz_t(), b.to_mpz().get_mpz_t());
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

Integer div_floor(const Integer& a, const Integer& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  if (a.is_small() && b.is_small() && !(a.small_value() == kMin && b.small_value() == -1)) {
    int64_t x = a.small_value(), y = b.small_value();
    int64_t q = x / y;
    if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
    return Integer(static_cast<long long>(q));
  }
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.to_mpz().get_mpz_t(), b.to_mpz().get_mpz_t());
  return Integer(q);
}

Integer div_round(const Integer& a, const Integer& b) {
  Integer q = div_floor(a, b);
  Integer r = a - q * b;  // sign of b, |r| < |b|
  Integer twice = r + r;
  if (abs_compare(twice, b) == std::strong_ordering::greater) q += 1;
  return q;
}

Integer div_exact(const Integer& a, const Integer& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  if (a.is_small() && b.is_small() && !(a.small_value() == kMin && b.small_value() == -1))
    return Integer(static_cast<long long>(a.small_value() / b.small_value()));
  mpz_class q;
  mpz_divexact(q.get_mpz_t(), a.to_mpz().get_mpz_t(), b.to_mpz().get_mpz_t());
  return Integer(q);
}

bool divides(const Integer& d, const Integer& a) {
  if (d.is_zero()) return a.is_zero();
  if (a.is_small() && d.is_small()) {
    if (d.small_value() == -1) return true;
    return a.small_value() % d.small_value() == 0;
  }
  return mpz_divisible_p(a.to_mpz().get_mpz_t(), d.to_mpz().get_mpz_t()) != 0;
}

Integer gcd(const Integer& a, const Integer& b) {
  if (a.is_small() && b.is_small() && a.small_value() != kMin && b.small_value() != kMin) {
    int64_t x = a.small_value() < 0 ? -a.small_value() : a.small_value();
    int64_t y = b.small_value() < 0 ? -b.small_value() : b.small_value();
    while (y != 0) {
      int64_t t = x % y;
      x = y;
      y = t;
    }
    return Integer(static_cast<long long>(x));
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.to_mpz().get_mpz_t(), b.to_mpz().get_mpz_t());
  return Integer(g);
}

Integer lcm(const Integer& a, const Integer& b) {
  if (a.is_zero() || b.is_zero()) return Integer(0);
  return abs(div_exact(a, gcd(a, b)) * b);
}

Bezout gcdext(const Integer& a, const Integer& b) {
  mpz_class g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.to_mpz().get_mpz_t(), b.to_mpz().get_mpz_t());
  return {Integer(g), Integer(s), Integer(t)};
}

}  // namespace torinv
