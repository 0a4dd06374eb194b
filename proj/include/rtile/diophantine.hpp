#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "rtile/error.hpp"
#include "rtile/quad.hpp"

namespace rtile {

struct ApproxResult {
  long m1 = 0;
  long m2 = 0;
  QuadNum err;  // x - (m1 + m2*alpha)

  QuadNum value() const { return QuadNum(m1) + QuadNum(m2) * alpha(); }
};

enum class Seg { one, alpha };

inline QuadNum seg_length(Seg s) { return s == Seg::one ? QuadNum(1) : alpha(); }

struct SegmentPartition {
  std::vector<Seg> labels;
  QuadNum start;

  QuadNum length() const {
    long ones = 0, alphas = 0;
    for (Seg s : labels) (s == Seg::one ? ones : alphas)++;
    return QuadNum(ones) + QuadNum(alphas) * alpha();
  }
  QuadNum end() const { return start + length(); }

  // start, then each successive right endpoint
  std::vector<QuadNum> breakpoints() const {
    std::vector<QuadNum> out{start};
    for (Seg s : labels) out.push_back(out.back() + seg_length(s));
    return out;
  }
};

namespace detail {

// sign of a + b*sqrt2 for machine integers
inline int sign_ab(__int128 a, __int128 b) {
  auto sg = [](__int128 v) { return (v > 0) - (v < 0); };
  if (b == 0) return sg(a);
  if (a == 0 || sg(a) == sg(b)) return a == 0 ? sg(b) : sg(a);
  const __int128 lhs = a * a, rhs = 2 * b * b;
  return lhs > rhs ? sg(a) : lhs < rhs ? sg(b) : 0;
}

struct Lattice {
  long m1, m2;
  bool operator<(const Lattice& o) const { return sign_ab(m1 - o.m1, m2 - o.m2) < 0; }
};

// smallest M with every circular gap of {j*alpha mod 1 : 0 <= j <= M} below 2*eps
inline long horizon(double two_eps) {
  if (two_eps > 1) return 0;
  std::vector<double> fr{0.0};
  const double a = std::sqrt(2.0);
  for (long m = 1;; ++m) {
    const double f = m * a - std::floor(m * a);
    fr.insert(std::upper_bound(fr.begin(), fr.end(), f), f);
    double gap = 1.0 - fr.back();
    for (std::size_t i = 1; i < fr.size(); ++i) gap = std::max(gap, fr[i] - fr[i - 1]);
    if (gap < two_eps * (1 - 1e-9)) return m;
  }
}

inline long to_long(const mpz_class& z) {
  if (!z.fits_slong_p()) fail(Errc::precondition_violated, "integer out of range: " + z.get_str());
  return z.get_si();
}

inline long integer_part(const Rational& q, const char* what) {
  if (q.get_den() != 1 || q < 0) fail(Errc::not_representable, std::string(what) + " is not a nonnegative integer");
  return to_long(q.get_num());
}

inline void require_positive(const Rational& eps) {
  if (eps <= 0) fail(Errc::precondition_violated, "eps must be positive");
}

}  // namespace detail

// Least integer N such that every real x >= N lies within eps (strictly) of
// some m1 + m2*sqrt2 with m1, m2 >= 0. Memoised.
inline long n_of_eps(const Rational& eps) {
  detail::require_positive(eps);
  static std::shared_mutex mu;
  static std::map<std::pair<std::string, std::string>, long> memo;
  const auto key = std::make_pair(eps.get_num().get_str(), eps.get_den().get_str());
  {
    std::shared_lock lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const long m = detail::horizon(2 * eps.get_d());
  const double top = m * std::sqrt(2.0) + 2;
  std::vector<detail::Lattice> pts;
  for (long m2 = 0; m2 * std::sqrt(2.0) <= top; ++m2)
    for (long m1 = 0; m1 + m2 * std::sqrt(2.0) <= top; ++m1) pts.push_back({m1, m2});
  std::sort(pts.begin(), pts.end());
  // gap (dm1 + dm2*sqrt2) >= 2 p/q  <=>  q*dm1 - 2p + q*dm2*sqrt2 >= 0
  const long p = detail::to_long(eps.get_num()), q = detail::to_long(eps.get_den());
  long n = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const __int128 d1 = pts[i + 1].m1 - pts[i].m1, d2 = pts[i + 1].m2 - pts[i].m2;
    if (detail::sign_ab(q * d1 - 2 * static_cast<__int128>(p), q * d2) < 0) continue;
    // the bad stretch [s_i + eps, s_{i+1} - eps] is nonempty; its top must sit below N
    const QuadNum top_bad = QuadNum(pts[i + 1].m1) + QuadNum(pts[i + 1].m2) * alpha() - QuadNum(eps);
    n = std::max(n, detail::to_long(top_bad.floor()) + 1);
  }
  std::unique_lock lock(mu);
  memo.emplace(key, n);
  return n;
}

namespace detail {

// minimal m2, then minimal m1, with |x - (m1 + m2 a)| < eps (or <= eps when closed)
inline std::optional<ApproxResult> select_pair(const QuadNum& x, const Rational& eps, long cap1, long cap2,
                                               bool closed) {
  const QuadNum e(eps);
  for (long m2 = 0; m2 <= cap2; ++m2) {
    const QuadNum rest = x - QuadNum(m2) * alpha();
    if (rest + e < QuadNum(0)) break;
    // smallest integer m1 >= 0 with rest - m1 < eps (or <=)
    mpz_class lo = (rest - e).floor();
    if (!closed || QuadNum(mpq_class(lo)) != rest - e) lo += 1;
    if (lo < 0) lo = 0;
    if (lo > cap1) continue;
    const long m1 = to_long(lo);
    const QuadNum err = rest - QuadNum(m1);
    const int s = compare(abs(err), e);
    if (s < 0 || (closed && s == 0)) return ApproxResult{m1, m2, err};
  }
  return std::nullopt;
}

}  // namespace detail

inline ApproxResult approx(const QuadNum& x, const Rational& eps) {
  detail::require_positive(eps);
  if (x.sign() < 0) fail(Errc::below_threshold, "x = " + x.str() + " is negative");
  const long cap = detail::to_long((x / alpha()).floor()) + 1;
  auto r = detail::select_pair(x, eps, detail::to_long((x + QuadNum(eps)).floor()), cap, false);
  if (r) return *r;
  // beyond N(eps) a pair always exists
  fail(Errc::below_threshold, "x = " + x.str() + " below N(eps) = " + std::to_string(n_of_eps(eps)));
}

// ones and alphas alternate (one first) while both remain, then the leftover kind
inline SegmentPartition partition_exact(const QuadNum& len, const QuadNum& start = QuadNum(0)) {
  const long m1 = detail::integer_part(len.rat(), "rational part");
  const long m2 = detail::integer_part(len.irr(), "sqrt2 part");
  SegmentPartition out{{}, start};
  out.labels.reserve(static_cast<std::size_t>(m1 + m2));
  for (long i = 0; i < std::min(m1, m2); ++i) {
    out.labels.push_back(Seg::one);
    out.labels.push_back(Seg::alpha);
  }
  for (long i = m2; i < m1; ++i) out.labels.push_back(Seg::one);
  for (long i = m1; i < m2; ++i) out.labels.push_back(Seg::alpha);
  return out;
}

struct IntervalExtension {
  QuadNum delta;
  long m1 = 0, m2 = 0;  // a + delta = m1 + m2*alpha
  SegmentPartition before, inner, after;

  std::vector<QuadNum> breakpoints() const {
    auto out = before.breakpoints();
    for (const auto* p : {&inner, &after}) {
      auto b = p->breakpoints();
      out.insert(out.end(), b.begin() + 1, b.end());
    }
    return out;
  }
};

// Shift [a, a + K(1+alpha)) by |delta| <= eps so that its left end lies in
// N + N*alpha, then tile [0, K'(1+alpha)) around it with 1- and alpha-segments.
inline IntervalExtension extend_interval(const QuadNum& a, long k, long k_outer, const Rational& eps) {
  detail::require_positive(eps);
  if (k < 0 || k_outer <= k) fail(Errc::precondition_violated, "need 0 <= K < K'");
  const long n = n_of_eps(eps);
  if (a < QuadNum(n)) fail(Errc::below_threshold, "a = " + a.str() + " below N(eps) = " + std::to_string(n));
  const QuadNum b = a + QuadNum(k) * kappa();
  if (QuadNum(k_outer) * kappa() < b + QuadNum(n))
    fail(Errc::precondition_violated, "inner interval too close to the outer end");
  const long cap = k_outer - k;
  auto r = detail::select_pair(a, eps, cap, cap, true);
  if (!r) fail(Errc::no_admissible_pair, "no (m1, m2) <= " + std::to_string(cap) + " within eps of " + a.str());
  IntervalExtension out;
  out.m1 = r->m1;
  out.m2 = r->m2;
  out.delta = -r->err;
  const QuadNum left = r->value();
  out.before = partition_exact(left);
  out.inner = partition_exact(QuadNum(k) * kappa(), left);
  out.after = partition_exact(QuadNum(cap - r->m1) + QuadNum(cap - r->m2) * alpha(), left + QuadNum(k) * kappa());
  return out;
}

inline std::string to_string(Seg s) { return s == Seg::one ? "one" : "alpha"; }

}  // namespace rtile
