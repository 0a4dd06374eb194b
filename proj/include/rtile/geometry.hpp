#pragma once

// Points, half-open rectangles and windows.
//
// A Window is the finite stand-in for one orbit: either a box with hard
// boundary or a flat torus.  All predicates use the sup-metric, so balls are
// cubes and every containment question reduces to interval arithmetic.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rtile/error.hpp"
#include "rtile/quad.hpp"

namespace rtile {

using Point = std::vector<QuadNum>;

inline Point operator+(const Point& a, const Point& b) {
  Point r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline Point operator-(const Point& a, const Point& b) {
  Point r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline Point constant_point(std::size_t d, const QuadNum& v) { return Point(d, v); }

inline QuadNum sup_norm(const Point& v) {
  QuadNum m;
  for (const auto& x : v) m = max(m, abs(x));
  return m;
}

inline bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline std::string to_string(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += p[i].str();
  }
  return s + ")";
}

/// Half-open box prod [lo_i, hi_i).
class Rect {
 public:
  Rect() = default;
  Rect(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) fail(Errc::precondition_violated, "rect corners differ in dimension");
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (!(lo_[i] < hi_[i])) fail(Errc::precondition_violated, "rect side " + std::to_string(i) + " is empty");
  }

  static Rect cube(std::size_t d, const QuadNum& lo, const QuadNum& hi) {
    return Rect(Point(d, lo), Point(d, hi));
  }
  /// [-r, r)^d
  static Rect centered(std::size_t d, const QuadNum& r) { return cube(d, -r, r); }

  std::size_t dim() const { return lo_.size(); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const QuadNum& lo(std::size_t i) const { return lo_[i]; }
  const QuadNum& hi(std::size_t i) const { return hi_[i]; }
  QuadNum side(std::size_t i) const { return hi_[i] - lo_[i]; }

  QuadNum volume() const {
    QuadNum v(1);
    for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }

  bool contains(const Point& p) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (p[i] < lo_[i] || !(p[i] < hi_[i])) return false;
    return true;
  }

  bool contains(const Rect& r) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (r.lo_[i] < lo_[i] || hi_[i] < r.hi_[i]) return false;
    return true;
  }

  bool intersects(const Rect& r) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (!(lo_[i] < r.hi_[i] && r.lo_[i] < hi_[i])) return false;
    return true;
  }

  Rect translated(const Point& t) const { return Rect(lo_ + t, hi_ + t, unchecked{}); }

  /// U = -U as sets of half-open boxes means lo = -hi.
  bool is_symmetric() const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (lo_[i] != -hi_[i]) return false;
    return true;
  }

  friend bool operator==(const Rect&, const Rect&) = default;

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i) s += "x";
      s += "[" + lo_[i].str() + "," + hi_[i].str() + ")";
    }
    return s;
  }

  struct unchecked {};
  Rect(Point lo, Point hi, unchecked) : lo_(std::move(lo)), hi_(std::move(hi)) {}

 private:
  Point lo_, hi_;
};

/// Measure of the intersection of two boxes; zero when disjoint.
inline QuadNum overlap_volume(const Rect& a, const Rect& b) {
  QuadNum v(1);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    QuadNum w = min(a.hi(i), b.hi(i)) - max(a.lo(i), b.lo(i));
    if (w.sign() <= 0) return QuadNum(0);
    v *= w;
  }
  return v;
}

/// R^{<-b}: every edge moved inward by b.
inline Rect shrink(const Rect& r, const QuadNum& b) {
  Point lo(r.lo()), hi(r.hi());
  for (std::size_t i = 0; i < r.dim(); ++i) {
    lo[i] += b;
    hi[i] -= b;
    if (!(lo[i] < hi[i]))
      fail(Errc::degenerate_shrink, "shrinking " + r.str() + " by " + b.str() + " empties axis " + std::to_string(i));
  }
  return Rect(std::move(lo), std::move(hi), Rect::unchecked{});
}

/// {x + y : x in a, y in b} for half-open boxes.
inline Rect minkowski_sum(const Rect& a, const Rect& b) {
  return Rect(a.lo() + b.lo(), a.hi() + b.hi(), Rect::unchecked{});
}

/// Reduces x into [0, period).
inline QuadNum wrap(const QuadNum& x, const QuadNum& period) {
  if (!(x < QuadNum(0)) && x < period) return x;
  auto q = (x / period).floor();
  return x - QuadNum::from_integer(q) * period;
}

class Window {
 public:
  enum class Kind { box, torus };

  static Window box(Rect r) { return Window(Kind::box, std::move(r)); }
  /// Flat torus prod R / L_i Z with fundamental domain [0, L_i).
  static Window torus(const Point& periods) {
    for (const auto& l : periods)
      if (l.sign() <= 0) fail(Errc::precondition_violated, "torus period must be positive");
    return Window(Kind::torus, Rect(Point(periods.size(), QuadNum(0)), periods));
  }
  static Window torus(std::size_t d, const QuadNum& period) { return torus(Point(d, period)); }

  Kind kind() const { return kind_; }
  bool is_torus() const { return kind_ == Kind::torus; }
  std::size_t dim() const { return domain_.dim(); }
  /// The box itself, or the fundamental domain of the torus.
  const Rect& domain() const { return domain_; }
  QuadNum period(std::size_t i) const { return domain_.side(i); }
  QuadNum volume() const { return domain_.volume(); }

  /// Canonical representative of a point.
  Point reduce(const Point& p) const {
    if (!is_torus()) return p;
    Point r(p);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = wrap(r[i], period(i));
    return r;
  }

  bool contains(const Point& p) const { return is_torus() || domain_.contains(p); }

  /// Displacement on one axis, wrapped into [-L/2, L/2) on a torus.
  QuadNum axis_displacement(std::size_t i, const QuadNum& from, const QuadNum& to) const {
    QuadNum d = to - from;
    if (!is_torus()) return d;
    const QuadNum l = period(i);
    const QuadNum half = l * q_ratio(1, 2);
    return wrap(d + half, l) - half;
  }

  Point displacement(const Point& from, const Point& to) const {
    Point d(from.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = axis_displacement(i, from[i], to[i]);
    return d;
  }

  QuadNum distance(const Point& a, const Point& b) const { return sup_norm(displacement(a, b)); }

  /// Whether the translates a + U and b + U are disjoint (U any box).
  bool translates_disjoint(const Point& a, const Point& b, const Rect& u) const {
    for (std::size_t i = 0; i < dim(); ++i) {
      const QuadNum w = u.side(i);
      QuadNum gap = abs(axis_displacement(i, a[i], b[i]));
      if (!is_torus()) {
        if (!(gap < w)) return true;
      } else if (!(gap < w) && !(period(i) - gap < w)) {
        return true;
      }
    }
    return false;
  }

  /// Whether p lies in c + V, with wraparound on a torus.
  bool in_translate(const Point& c, const Rect& v, const Point& p) const {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!is_torus()) {
        QuadNum d = p[i] - c[i];
        if (d < v.lo(i) || !(d < v.hi(i))) return false;
        continue;
      }
      // smallest lift of p - c that is >= lo
      const QuadNum l = period(i);
      QuadNum d = wrap(p[i] - c[i] - v.lo(i), l) + v.lo(i);
      if (!(d < v.hi(i))) return false;
    }
    return true;
  }

  /// The part of c + V inside the domain, as at most 2^d boxes on a torus.
  std::vector<Rect> translate_pieces(const Point& c, const Rect& v) const {
    std::vector<std::vector<std::pair<QuadNum, QuadNum>>> axes(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      QuadNum lo = c[i] + v.lo(i), hi = c[i] + v.hi(i);
      if (!is_torus()) {
        lo = max(lo, domain_.lo(i));
        hi = min(hi, domain_.hi(i));
        if (lo < hi) axes[i].emplace_back(lo, hi);
        continue;
      }
      const QuadNum l = period(i);
      if (!(hi - lo < l)) {
        axes[i].emplace_back(QuadNum(0), l);
        continue;
      }
      QuadNum s = wrap(lo, l);
      QuadNum e = s + (hi - lo);
      if (!(l < e)) {
        axes[i].emplace_back(s, e);
      } else {
        axes[i].emplace_back(s, l);
        axes[i].emplace_back(QuadNum(0), e - l);
      }
    }
    std::vector<Rect> out;
    Point lo(dim()), hi(dim());
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == dim()) {
        out.emplace_back(lo, hi, Rect::unchecked{});
        return;
      }
      for (const auto& [a, b] : axes[i]) {
        lo[i] = a;
        hi[i] = b;
        self(self, i + 1);
      }
    };
    rec(rec, 0);
    return out;
  }

 private:
  Window(Kind k, Rect r) : kind_(k), domain_(std::move(r)) {}

  Kind kind_;
  Rect domain_;
};

/// Whether the union of boxes covers `target`; on failure `witness` receives
/// an uncovered point.  Exact, by coordinate compression axis by axis.
inline bool boxes_cover(const Rect& target, const std::vector<Rect>& boxes, Point* witness = nullptr) {
  const std::size_t d = target.dim();
  Point cell(d);
  auto rec = [&](auto&& self, std::size_t axis, const std::vector<const Rect*>& live) -> bool {
    if (axis == d) return !live.empty();
    if (live.empty()) {
      for (std::size_t i = axis; i < d; ++i) cell[i] = target.lo(i);
      return false;
    }
    std::vector<QuadNum> cuts{target.lo(axis), target.hi(axis)};
    for (const Rect* b : live) {
      if (target.lo(axis) < b->lo(axis) && b->lo(axis) < target.hi(axis)) cuts.push_back(b->lo(axis));
      if (target.lo(axis) < b->hi(axis) && b->hi(axis) < target.hi(axis)) cuts.push_back(b->hi(axis));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      std::vector<const Rect*> next;
      for (const Rect* b : live)
        if (!(cuts[k] < b->lo(axis)) && cuts[k] < b->hi(axis)) next.push_back(b);
      cell[axis] = cuts[k];
      if (!self(self, axis + 1, next)) return false;
    }
    return true;
  };
  std::vector<const Rect*> all;
  for (const auto& b : boxes) all.push_back(&b);
  bool ok = rec(rec, 0, all);
  if (!ok && witness) *witness = cell;
  return ok;
}

}  // namespace rtile
