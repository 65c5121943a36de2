#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "drvote/error.hpp"

namespace drvote {

using Int = mpz_class;
using Rat = mpq_class;

// gmpxx has no long long constructors; these are lossless on LP64.
inline Int int_of(long long v) { return Int(static_cast<long>(v)); }
inline Rat rat_of(long long v) { return Rat(static_cast<long>(v)); }

// mpq_class does not canonicalize on construction; these helpers do.
inline Rat make_rat(long num, long den = 1) {
  if (den == 0) fail_domain("rational with zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) fail_domain("rational with zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "p", "p/q" and an optional leading sign; base 10 only.
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) fail_parse("empty rational literal");
  for (char c : text) {
    if (!(c == '-' || c == '+' || c == '/' || (c >= '0' && c <= '9')))
      fail_parse("bad rational literal: '" + text + "'");
  }
  Rat q;
  if (q.set_str(text, 10) != 0) fail_parse("bad rational literal: '" + text + "'");
  if (q.get_den() == 0) fail_parse("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

// "p/q" in lowest terms, plain "p" when the denominator is 1.
inline std::string format_rat(const Rat& q) { return q.get_str(); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline Rat rat_pow(const Rat& base, unsigned exp) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exp);
  out.canonicalize();
  return out;
}

inline Int lcm_of_denominators(const std::vector<Rat>& xs) {
  Int l = 1;
  for (const Rat& x : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

// Extended nonnegative value: a rational, or the +infinity sentinel used for
// incomparable elections and empty consensus classes. +inf compares greater
// than every finite value and equal to itself.
class ExtRat {
 public:
  ExtRat() : finite_(true), v_(0) {}
  explicit ExtRat(Rat v) : finite_(true), v_(std::move(v)) {}
  static ExtRat infinity() {
    ExtRat e;
    e.finite_ = false;
    return e;
  }

  bool is_finite() const { return finite_; }
  const Rat& value() const {
    if (!finite_) fail_domain("taking the value of an infinite quantity");
    return v_;
  }

  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.v_ == b.v_;
  }
  friend bool operator!=(const ExtRat& a, const ExtRat& b) { return !(a == b); }
  friend bool operator<(const ExtRat& a, const ExtRat& b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) { return a < b || a == b; }
  friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
  friend bool operator>=(const ExtRat& a, const ExtRat& b) { return b <= a; }

  friend ExtRat operator+(const ExtRat& a, const ExtRat& b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtRat(a.v_ + b.v_);
  }

  std::string str() const { return finite_ ? format_rat(v_) : "inf"; }

 private:
  bool finite_;
  Rat v_;
};

}  // namespace drvote
