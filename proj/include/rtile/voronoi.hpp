#pragma once

// Sup-metric Voronoi cells with order tie-breaking.
//
// Exact measures are computed for d <= 2 by decomposing the query box into
// pieces on which every distance comparison has constant sign, then testing
// one interior sample per piece.  All distance functions are piecewise
// linear with slopes in {0, +-1, vertical}, so the decomposition only needs
// axis-parallel and diagonal lines.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "rtile/cross_section.hpp"

namespace rtile {

/// Index of the point owning x: minimal distance, ties to the earliest in
/// the cross-section order.
inline std::size_t voronoi_owner(const CrossSection& c, const Point& x) {
  if (c.empty()) fail(Errc::precondition_violated, "Voronoi owner of an empty cross-section");
  std::size_t best = 0;
  QuadNum best_d = c.window().distance(x, c[0]);
  for (std::size_t i = 1; i < c.size(); ++i) {
    QuadNum d = c.window().distance(x, c[i]);
    if (d < best_d || (d == best_d && c.before(c[i], c[best]))) {
      best = i;
      best_d = std::move(d);
    }
  }
  return best;
}

namespace detail {

inline std::vector<QuadNum> lifts(const CrossSection& c, std::size_t axis) {
  std::vector<QuadNum> out;
  for (const auto& p : c.points()) {
    out.push_back(p[axis]);
    if (c.window().is_torus()) {
      out.push_back(p[axis] + c.window().period(axis));
      out.push_back(p[axis] - c.window().period(axis));
    }
  }
  return out;
}

inline void sort_unique(std::vector<QuadNum>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline std::vector<QuadNum> axis_breaks(const std::vector<QuadNum>& ls) {
  std::vector<QuadNum> out(ls);
  const QuadNum half = q_ratio(1, 2);
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = i + 1; j < ls.size(); ++j) out.push_back((ls[i] + ls[j]) * half);
  sort_unique(out);
  return out;
}

inline QuadNum measure_1d(const CrossSection& c, std::size_t owner, const Rect& q) {
  std::vector<QuadNum> cuts{q.lo(0), q.hi(0)};
  for (auto& b : axis_breaks(lifts(c, 0)))
    if (q.lo(0) < b && b < q.hi(0)) cuts.push_back(b);
  sort_unique(cuts);
  QuadNum total;
  const QuadNum half = q_ratio(1, 2);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Point mid{(cuts[k] + cuts[k + 1]) * half};
    if (voronoi_owner(c, mid) == owner) total += cuts[k + 1] - cuts[k];
  }
  return total;
}

inline mpz_class rational_gcd_num(mpz_class a, const mpz_class& b) {
  mpz_gcd(a.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return a;
}

/// Largest h with every value an integer multiple of h, if all values are
/// rational.
inline std::optional<mpq_class> common_step(const std::vector<QuadNum>& values) {
  mpz_class lcm_den = 1, g = 0;
  for (const auto& v : values) {
    if (!v.is_rational()) return std::nullopt;
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), v.rat().get_den_mpz_t());
  }
  for (const auto& v : values) {
    mpz_class scaled = v.rat().get_num() * (lcm_den / v.rat().get_den());
    g = rational_gcd_num(g, abs(scaled));
  }
  if (g == 0) return std::nullopt;
  mpq_class h(g, lcm_den);
  h.canonicalize();
  return h;
}

/// Positions of the points in the cross-section order.
inline std::vector<std::size_t> order_ranks(const CrossSection& c) {
  std::vector<std::size_t> idx(c.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c.before(c[a], c[b]); });
  std::vector<std::size_t> rank(c.size());
  for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r;
  return rank;
}

/// Areas of every cell inside q when all data is rational.  The box is cut
/// into squares of side s (half the common step) and each square into four
/// triangles by its diagonals; no bisector crosses a triangle, so its
/// centroid decides the owner.  Arithmetic runs in units of s/6, where all
/// coordinates are integers.
inline std::optional<std::vector<QuadNum>> lattice_areas(const CrossSection& c, const Rect& q) {
  std::vector<QuadNum> vals{q.lo(0), q.hi(0), q.lo(1), q.hi(1)};
  for (const auto& p : c.points()) vals.insert(vals.end(), p.begin(), p.end());
  for (std::size_t i = 0; i < 2; ++i) {
    vals.push_back(c.window().domain().lo(i));
    vals.push_back(c.window().domain().hi(i));
  }
  auto h = common_step(vals);
  if (!h) return std::nullopt;
  const mpq_class s = *h / 2, unit = s / 6;
  const mpz_class nx = mpz_class(q.side(0).rat() / s), ny = mpz_class(q.side(1).rat() / s);
  if (nx * ny > 4'000'000) return std::nullopt;
  bool fits = true;
  auto units = [&](const QuadNum& v) -> long {
    mpq_class r = v.rat() / unit;
    if (r.get_den() != 1 || !r.get_num().fits_slong_p() || abs(r.get_num()) > (1L << 40)) {
      fits = false;
      return 0;
    }
    return r.get_num().get_si();
  };
  const bool torus = c.window().is_torus();
  const long px = units(c.window().period(0)), py = units(c.window().period(1));
  const long x0 = units(q.lo(0)), y0 = units(q.lo(1));
  std::vector<std::array<long, 2>> sites;
  for (const auto& p : c.points()) sites.push_back({units(p[0]), units(p[1])});
  if (!fits) return std::nullopt;
  const auto rank = order_ranks(c);
  auto axis = [&](long d, long period) {
    if (!torus) return d < 0 ? -d : d;
    long m = d % period;
    if (m < 0) m += period;
    return std::min(m, period - m);
  };
  std::vector<long> count(c.size(), 0);
  const long offs[4][2] = {{0, -2}, {2, 0}, {0, 2}, {-2, 0}};
  const long mx = nx.get_si(), my = ny.get_si();
  for (long i = 0; i < mx; ++i) {
    const long cx = x0 + 6 * i + 3;
    for (long j = 0; j < my; ++j) {
      const long cy = y0 + 6 * j + 3;
      for (const auto& o : offs) {
        const long x = cx + o[0], y = cy + o[1];
        std::size_t best = 0;
        long best_d = -1;
        for (std::size_t k = 0; k < sites.size(); ++k) {
          const long d = std::max(axis(x - sites[k][0], px), axis(y - sites[k][1], py));
          if (best_d < 0 || d < best_d || (d == best_d && rank[k] < rank[best])) {
            best = k;
            best_d = d;
          }
        }
        ++count[best];
      }
    }
  }
  std::vector<QuadNum> out;
  for (long n : count) out.push_back(QuadNum(s * s * mpq_class(n, 4)));
  return out;
}

inline std::optional<QuadNum> measure_2d_lattice(const CrossSection& c, std::size_t owner, const Rect& q) {
  auto all = lattice_areas(c, q);
  if (!all) return std::nullopt;
  return (*all)[owner];
}

struct Line {
  int slope;  // y = slope * x + t, slope in {-1, 0, 1}
  QuadNum t;
  QuadNum at(const QuadNum& x) const { return slope == 0 ? t : (slope > 0 ? x + t : t - x); }
  friend bool operator<(const Line& a, const Line& b) { return a.slope != b.slope ? a.slope < b.slope : a.t < b.t; }
  friend bool operator==(const Line& a, const Line& b) { return a.slope == b.slope && a.t == b.t; }
};

inline QuadNum measure_2d_sweep(const CrossSection& c, std::size_t owner, const Rect& q) {
  const auto lx = lifts(c, 0), ly = lifts(c, 1);
  std::vector<QuadNum> xs{q.lo(0), q.hi(0)};
  for (auto& b : axis_breaks(lx))
    if (q.lo(0) < b && b < q.hi(0)) xs.push_back(b);
  std::vector<Line> lines{{0, q.lo(1)}, {0, q.hi(1)}};
  for (auto& b : axis_breaks(ly))
    if (q.lo(1) < b && b < q.hi(1)) lines.push_back({0, b});
  for (const auto& px : lx)
    for (const auto& py : ly) {
      lines.push_back({1, py - px});
      lines.push_back({-1, py + px});
    }
  // keep diagonals that meet the query box
  std::erase_if(lines, [&](const Line& l) {
    if (l.slope == 0) return false;
    QuadNum a = l.at(q.lo(0)), b = l.at(q.hi(0));
    return (!(q.lo(1) < a) && !(q.lo(1) < b)) || (!(a < q.hi(1)) && !(b < q.hi(1)));
  });
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line &a = lines[i], &b = lines[j];
      if (a.slope == b.slope) continue;
      // slope_a x + t_a = slope_b x + t_b
      QuadNum x = (b.t - a.t) / QuadNum(a.slope - b.slope);
      if (q.lo(0) < x && x < q.hi(0)) xs.push_back(std::move(x));
    }
  sort_unique(xs);
  const QuadNum half = q_ratio(1, 2);
  QuadNum total;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const QuadNum &xa = xs[k], &xb = xs[k + 1];
    const QuadNum xm = (xa + xb) * half;
    std::vector<std::pair<QuadNum, const Line*>> live;
    for (const auto& l : lines) {
      QuadNum y = l.at(xm);
      if (!(y < q.lo(1)) && !(q.hi(1) < y)) live.emplace_back(std::move(y), &l);
    }
    std::sort(live.begin(), live.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t m = 0; m + 1 < live.size(); ++m) {
      const Line& lo = *live[m].second;
      const Line& hi = *live[m + 1].second;
      if (live[m].first == live[m + 1].first) continue;
      Point sample{xm, (live[m].first + live[m + 1].first) * half};
      if (voronoi_owner(c, sample) != owner) continue;
      total += (xb - xa) * ((hi.at(xa) - lo.at(xa)) + (hi.at(xb) - lo.at(xb))) * half;
    }
  }
  return total;
}

inline QuadNum measure_in_box(const CrossSection& c, std::size_t owner, const Rect& q) {
  switch (c.window().dim()) {
    case 1: return measure_1d(c, owner, q);
    case 2:
      if (auto fast = measure_2d_lattice(c, owner, q)) return *fast;
      return measure_2d_sweep(c, owner, q);
    default: fail(Errc::unsupported_dim, "exact Voronoi measure needs d <= 2");
  }
}

inline std::vector<QuadNum> measure_all_in_box(const CrossSection& c, const Rect& q) {
  if (c.window().dim() == 2)
    if (auto fast = lattice_areas(c, q)) return *fast;
  std::vector<QuadNum> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(measure_in_box(c, i, q));
  return out;
}

}  // namespace detail

/// Exact measures of every cell intersected with the box A (A may wrap on a
/// torus).  d must be 1 or 2.
inline std::vector<QuadNum> voronoi_overlaps(const CrossSection& c, const Rect& a) {
  std::vector<QuadNum> total(c.size());
  for (const auto& piece : c.window().translate_pieces(Point(c.window().dim(), QuadNum(0)), a)) {
    auto part = detail::measure_all_in_box(c, piece);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += part[i];
  }
  return total;
}

/// Exact Lebesgue measure of V_c intersected with the box A (A may wrap on a
/// torus).  d must be 1 or 2.
inline QuadNum voronoi_overlap(const CrossSection& c, std::size_t owner, const Rect& a) {
  QuadNum total;
  for (const auto& piece : c.window().translate_pieces(Point(c.window().dim(), QuadNum(0)), a))
    total += detail::measure_in_box(c, owner, piece);
  return total;
}

struct CellMeasureMode {
  enum class Kind { exact2d, montecarlo } kind = Kind::exact2d;
  std::size_t samples = 0;
  std::uint64_t seed = 1;

  static CellMeasureMode exact() { return {}; }
  static CellMeasureMode montecarlo(std::size_t n, std::uint64_t seed = 1) { return {Kind::montecarlo, n, seed}; }
};

struct CellMeasure {
  QuadNum value;  // exact area, or hits / samples * volume
  bool exact = true;
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of lambda(V_c intersected with a), any dimension.
inline CellMeasure voronoi_overlap_montecarlo(const CrossSection& c, std::size_t owner, const Rect& a,
                                              std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr long kGrain = 1L << 24;
  long hits = 0;
  const std::size_t d = c.window().dim();
  Point x(d);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < d; ++i)
      x[i] = a.lo(i) + a.side(i) * q_ratio(static_cast<long>(rng() % kGrain), kGrain);
    if (c.window().contains(x) && voronoi_owner(c, c.window().reduce(x)) == owner) ++hits;
  }
  return {a.volume() * q_ratio(hits, static_cast<long>(samples)), false, samples};
}

inline CellMeasure voronoi_cell_measure(const CrossSection& c, std::size_t owner, const CellMeasureMode& mode) {
  if (owner >= c.size()) fail(Errc::unknown_anchor, "no such cross-section point");
  if (mode.kind == CellMeasureMode::Kind::exact2d) {
    if (c.window().dim() != 2) fail(Errc::unsupported_dim, "exact cell measure is only available for d = 2");
    return {voronoi_overlap(c, owner, c.window().domain()), true, 0};
  }
  return voronoi_overlap_montecarlo(c, owner, c.window().domain(), mode.samples, mode.seed);
}

}  // namespace rtile
