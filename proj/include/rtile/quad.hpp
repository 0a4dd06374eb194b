#pragma once

// Exact arithmetic in the real quadratic field Q[sqrt 2].
//
// A value is stored as rat + irr * sqrt(2) with both parts canonical
// rationals, so equality is componentwise and the order is decided by sign
// analysis with rational squaring.  Nothing in here touches floating point
// except to_double(), which exists for rendering only.

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "rtile/error.hpp"

namespace rtile {

template <class R>
struct rational_traits;

template <>
struct rational_traits<mpq_class> {
  using integer = mpz_class;

  static mpq_class make(long num, long den = 1) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  static mpq_class make(const integer& num, const integer& den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  static integer num(const mpq_class& q) { return q.get_num(); }
  static integer den(const mpq_class& q) { return q.get_den(); }
  static double to_double(const mpq_class& q) { return q.get_d(); }
  static int sign(const mpq_class& q) { return sgn(q); }

  static integer floor(const mpq_class& q) {
    integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
  }

  // Accepts "-3", "3/4", "10.6", "-0.125".
  static mpq_class parse(std::string_view s) {
    std::string str(s);
    if (str.empty()) fail(Errc::parse_error, "empty rational");
    try {
      if (auto slash = str.find('/'); slash != std::string::npos) {
        mpq_class q(integer(str.substr(0, slash)), integer(str.substr(slash + 1)));
        if (q.get_den() == 0) fail(Errc::parse_error, "zero denominator in '" + str + "'");
        q.canonicalize();
        return q;
      }
      if (auto dot = str.find('.'); dot != std::string::npos) {
        bool neg = str[0] == '-';
        std::string whole = str.substr(neg || str[0] == '+' ? 1 : 0, dot - (neg || str[0] == '+' ? 1 : 0));
        std::string frac = str.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (frac.empty()) frac = "0";
        integer den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        mpq_class q(integer(whole) * den + integer(frac), den);
        q.canonicalize();
        return neg ? mpq_class(-q) : q;
      }
      if (str[0] == '+') str.erase(0, 1);
      return mpq_class(integer(str));
    } catch (const std::invalid_argument&) {
      fail(Errc::parse_error, "not a rational: '" + str + "'");
    }
  }

  static std::string to_string(const mpq_class& q) { return q.get_str(); }
};

template <class R>
class BasicQuad {
 public:
  using rational = R;
  using traits = rational_traits<R>;
  using integer = typename traits::integer;

  BasicQuad() : rat_(0), irr_(0) {}
  BasicQuad(long v) : rat_(v), irr_(0) {}  // NOLINT: integers embed implicitly
  explicit BasicQuad(R rat, R irr = R(0)) : rat_(std::move(rat)), irr_(std::move(irr)) {
    rat_.canonicalize();
    irr_.canonicalize();
  }

  static BasicQuad sqrt2() { return BasicQuad(R(0), R(1)); }
  static BasicQuad ratio(long num, long den) { return BasicQuad(traits::make(num, den)); }

  const R& rat() const { return rat_; }
  const R& irr() const { return irr_; }

  bool is_rational() const { return traits::sign(irr_) == 0; }
  bool is_zero() const { return traits::sign(rat_) == 0 && traits::sign(irr_) == 0; }

  int sign() const {
    const int a = traits::sign(rat_);
    const int b = traits::sign(irr_);
    if (b == 0) return a;
    if (a == 0 || a == b) return b;
    // Opposite signs: compare rat^2 against 2 irr^2.
    const R lhs = rat_ * rat_;
    const R rhs = 2 * irr_ * irr_;
    if (lhs == rhs) return 0;  // unreachable for irrational sqrt 2, kept for totality
    return lhs > rhs ? a : b;
  }

  BasicQuad operator-() const { return BasicQuad(R(-rat_), R(-irr_), raw_tag{}); }

  BasicQuad& operator+=(const BasicQuad& o) {
    rat_ += o.rat_;
    irr_ += o.irr_;
    return *this;
  }
  BasicQuad& operator-=(const BasicQuad& o) {
    rat_ -= o.rat_;
    irr_ -= o.irr_;
    return *this;
  }
  BasicQuad& operator*=(const BasicQuad& o) {
    R r = rat_ * o.rat_ + 2 * irr_ * o.irr_;
    R i = rat_ * o.irr_ + irr_ * o.rat_;
    rat_ = std::move(r);
    irr_ = std::move(i);
    return *this;
  }
  BasicQuad& operator/=(const BasicQuad& o) { return *this *= o.inverse(); }

  BasicQuad inverse() const {
    const R norm = rat_ * rat_ - 2 * irr_ * irr_;
    if (traits::sign(norm) == 0) throw std::domain_error("division by zero in Q[sqrt2]");
    return BasicQuad(R(rat_ / norm), R(-irr_ / norm), raw_tag{});
  }

  friend BasicQuad operator+(BasicQuad a, const BasicQuad& b) { return a += b; }
  friend BasicQuad operator-(BasicQuad a, const BasicQuad& b) { return a -= b; }
  friend BasicQuad operator*(BasicQuad a, const BasicQuad& b) { return a *= b; }
  friend BasicQuad operator/(BasicQuad a, const BasicQuad& b) { return a /= b; }

  friend bool operator==(const BasicQuad& a, const BasicQuad& b) {
    return a.rat_ == b.rat_ && a.irr_ == b.irr_;
  }
  friend std::strong_ordering operator<=>(const BasicQuad& a, const BasicQuad& b) {
    if (a == b) return std::strong_ordering::equal;
    return (a - b).sign() < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  double to_double() const {
    return traits::to_double(rat_) + traits::to_double(irr_) * 1.4142135623730950488;
  }

  /// Largest integer not exceeding the value.
  integer floor() const {
    if (is_rational()) return traits::floor(rat_);
    integer f(std::floor(to_double()));
    while (*this < from_integer(f)) f -= 1;
    while (*this >= from_integer(f + 1)) f += 1;
    return f;
  }

  integer ceil() const {
    integer f = floor();
    return *this == from_integer(f) ? f : integer(f + 1);
  }

  static BasicQuad from_integer(const integer& z) { return BasicQuad(R(z)); }

  std::string str() const {
    if (is_rational()) return traits::to_string(rat_);
    std::string out;
    if (traits::sign(rat_) != 0) out = traits::to_string(rat_);
    if (traits::sign(irr_) < 0) {
      out += "-";
    } else if (!out.empty()) {
      out += "+";
    }
    R mag = irr_ < 0 ? R(-irr_) : irr_;
    if (mag != 1) out += traits::to_string(mag) + "*";
    out += "sqrt2";
    return out;
  }

  friend std::ostream& operator<<(std::ostream& os, const BasicQuad& q) { return os << q.str(); }

 private:
  struct raw_tag {};
  BasicQuad(R rat, R irr, raw_tag) : rat_(std::move(rat)), irr_(std::move(irr)) {}

  R rat_;
  R irr_;
};

using QuadNum = BasicQuad<mpq_class>;
using Rational = mpq_class;

inline QuadNum alpha() { return QuadNum::sqrt2(); }
/// 1 + alpha, the period of the alternating {1, alpha} node pattern.
inline QuadNum kappa() { return QuadNum(1) + QuadNum::sqrt2(); }

inline QuadNum abs(const QuadNum& x) { return x.sign() < 0 ? -x : x; }
inline const QuadNum& min(const QuadNum& a, const QuadNum& b) { return b < a ? b : a; }
inline const QuadNum& max(const QuadNum& a, const QuadNum& b) { return a < b ? b : a; }

inline int compare(const QuadNum& x, const QuadNum& y) { return (x - y).sign(); }

inline QuadNum q_ratio(long num, long den) { return QuadNum::ratio(num, den); }

/// 2^-k as an exact rational.
inline QuadNum dyadic(unsigned k) {
  mpz_class den = 1;
  den <<= k;
  return QuadNum(mpq_class(mpz_class(1), den));
}

/// Parses "r", "s*sqrt2", "sqrt2", "r+s*sqrt2", "r-sqrt2"; rationals may be
/// integers, fractions or decimals.  "a" is accepted as a synonym for sqrt2.
inline QuadNum parse_quad(std::string_view text) {
  using T = rational_traits<mpq_class>;
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  auto pos = s.find("sqrt2");
  std::size_t token_len = 5;
  if (pos == std::string::npos) {
    pos = s.find('a');
    token_len = 1;
  }
  if (pos == std::string::npos) return QuadNum(T::parse(s));
  if (pos + token_len != s.size()) fail(Errc::parse_error, "sqrt2 term must come last in '" + s + "'");
  std::string head = s.substr(0, pos);
  if (!head.empty() && head.back() == '*') head.pop_back();
  // Split head into rational part and coefficient at the last sign that is
  // not a leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = head.size(); i-- > 1;) {
    if ((head[i] == '+' || head[i] == '-') && head[i - 1] != '/' && head[i - 1] != 'e') {
      split = i;
      break;
    }
  }
  std::string rat_part = split == std::string::npos ? "" : head.substr(0, split);
  std::string coef = split == std::string::npos ? head : head.substr(split);
  mpq_class irr;
  if (coef.empty() || coef == "+") {
    irr = 1;
  } else if (coef == "-") {
    irr = -1;
  } else {
    irr = T::parse(coef);
  }
  mpq_class rat = rat_part.empty() ? mpq_class(0) : T::parse(rat_part);
  return QuadNum(rat, irr);
}

}  // namespace rtile

template <class R>
struct std::hash<rtile::BasicQuad<R>> {
  std::size_t operator()(const rtile::BasicQuad<R>& q) const noexcept {
    std::hash<std::string> h;
    return h(q.rat().get_str()) * 31u ^ h(q.irr().get_str());
  }
};
