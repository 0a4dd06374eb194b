#pragma once

// Finite cross-sections of a window: lacunarity and cocompactness
// predicates, F_W-independent colourings, and greedy extension to a maximal
// lacunary set driven by a replayable candidate stream.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "rtile/geometry.hpp"

namespace rtile {

/// Strict weak "comes before" relation used to break Voronoi ties.
using PointOrder = std::function<bool(const Point&, const Point&)>;

inline PointOrder lexicographic_order() { return [](const Point& a, const Point& b) { return lex_less(a, b); }; }

class CrossSection {
 public:
  CrossSection(Window window, std::vector<Point> points, PointOrder order = lexicographic_order())
      : window_(std::move(window)), points_(std::move(points)), order_(std::move(order)) {
    for (auto& p : points_) {
      if (p.size() != window_.dim()) fail(Errc::precondition_violated, "point dimension mismatch");
      p = window_.reduce(p);
    }
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (std::size_t j = i + 1; j < points_.size(); ++j)
        if (points_[i] == points_[j]) fail(Errc::precondition_violated, "duplicate cross-section point " + to_string(points_[i]));
  }

  const Window& window() const { return window_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const PointOrder& order() const { return order_; }
  bool before(const Point& a, const Point& b) const { return order_(a, b); }

  std::optional<std::size_t> index_of(const Point& p) const {
    Point q = window_.reduce(p);
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i] == q) return i;
    return std::nullopt;
  }

  CrossSection with_point(const Point& p) const {
    auto pts = points_;
    pts.push_back(p);
    return CrossSection(window_, std::move(pts), order_);
  }

 private:
  Window window_;
  std::vector<Point> points_;
  PointOrder order_;
};

/// True iff the translates c + U are pairwise disjoint.
inline bool is_lacunary(const CrossSection& c, const Rect& u) {
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (!c.window().translates_disjoint(c[i], c[j], u)) return false;
  return true;
}

/// True iff every window point lies in some c + V.
inline bool is_cocompact(const CrossSection& c, const Rect& v, Point* witness = nullptr) {
  std::vector<Rect> pieces;
  for (const auto& p : c.points()) {
    auto ps = c.window().translate_pieces(p, v);
    pieces.insert(pieces.end(), ps.begin(), ps.end());
  }
  return boxes_cover(c.window().domain(), pieces, witness);
}

/// U^2 = U + U.
inline Rect doubled(const Rect& u) { return minkowski_sum(u, u); }

struct IndependencePartition {
  std::vector<std::size_t> color;  // per cross-section point
  std::size_t classes = 0;

  std::vector<std::vector<std::size_t>> members() const {
    std::vector<std::vector<std::size_t>> out(classes);
    for (std::size_t i = 0; i < color.size(); ++i) out[color[i]].push_back(i);
    return out;
  }
};

/// Whether y lies in W.x (x != y), symmetrised.
inline bool fw_adjacent(const Window& win, const Point& x, const Point& y, const Rect& w) {
  return win.in_translate(x, w, y) || win.in_translate(y, w, x);
}

/// Greedy colouring of F_W in point order; uses at most maxdegree + 1 colours.
inline IndependencePartition independent_partition(const CrossSection& c, const Rect& w) {
  IndependencePartition out;
  out.color.assign(c.size(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::vector<bool> used(i + 1, false);
    for (std::size_t j = 0; j < i; ++j)
      if (fw_adjacent(c.window(), c[i], c[j], w) && out.color[j] <= i) used[out.color[j]] = true;
    std::size_t k = 0;
    while (used[k]) ++k;
    out.color[i] = k;
    out.classes = std::max(out.classes, k + 1);
  }
  return out;
}

/// Deterministic dense enumeration of a closed or half-open box: round r is
/// the grid lo + offset_r + j * mesh_r with mesh_r = mesh_0 / 2^r.  Seed 0
/// means no offset; any other seed draws a reproducible rational offset per
/// round in [0, mesh_r).
struct CandidateStream {
  Rect region;
  bool closed = false;
  QuadNum initial_mesh;
  std::uint64_t seed = 0;

  static CandidateStream over(const Window& w, std::uint64_t seed = 0) {
    QuadNum m = w.domain().side(0);
    for (std::size_t i = 1; i < w.dim(); ++i) m = max(m, w.domain().side(i));
    return CandidateStream{w.domain(), false, m, seed};
  }

  QuadNum mesh(unsigned round) const { return initial_mesh * dyadic(round); }

  std::vector<Point> round_points(unsigned round) const {
    const std::size_t d = region.dim();
    const QuadNum h = mesh(round);
    QuadNum offset;
    if (seed != 0) {
      std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + round);
      offset = h * q_ratio(static_cast<long>(rng() % 1021), 1021);
    }
    std::vector<std::vector<QuadNum>> axes(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (QuadNum x = region.lo(i) + offset;; x += h) {
        bool inside = closed ? !(region.hi(i) < x) : x < region.hi(i);
        if (!inside) break;
        axes[i].push_back(x);
      }
    }
    std::vector<Point> out;
    Point p(d);
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == d) {
        out.push_back(p);
        return;
      }
      for (const auto& x : axes[i]) {
        p[i] = x;
        self(self, i + 1);
      }
    };
    rec(rec, 0);
    return out;
  }
};

struct LacunaryConfig {
  Rect u;  // lacunarity body, symmetric
  Rect v;  // enlargement body; the window analogue uses the whole window
  CandidateStream stream;
};

struct MaximalExtension {
  CrossSection section;
  unsigned rounds = 0;
  QuadNum final_mesh;
};

namespace detail {

inline void greedy_accept(const Window& win, std::vector<Point>& pts, const Rect& u, const Point& cand) {
  Point p = win.reduce(cand);
  for (const auto& q : pts)
    if (!win.translates_disjoint(p, q, u)) return;
  pts.push_back(std::move(p));
}

inline void require_lacunary(const CrossSection& c, const Rect& u) {
  if (!u.is_symmetric()) fail(Errc::precondition_violated, "lacunarity body must be symmetric");
  if (!is_lacunary(c, u)) fail(Errc::not_lacunary_input, "input cross-section is not U-lacunary");
}

}  // namespace detail

/// Greedy point-at-a-time extension over an explicit candidate list.
inline CrossSection extend_with_candidates(const CrossSection& c, const Rect& u, const std::vector<Point>& candidates) {
  detail::require_lacunary(c, u);
  std::vector<Point> pts = c.points();
  for (const auto& cand : candidates) detail::greedy_accept(c.window(), pts, u, cand);
  return CrossSection(c.window(), std::move(pts), c.order());
}

/// Runs `rounds` rounds of the candidate stream, accepting every candidate
/// whose U-translate misses all accepted ones.
inline MaximalExtension extend_to_maximal(const CrossSection& c, const LacunaryConfig& cfg, unsigned rounds) {
  detail::require_lacunary(c, cfg.u);
  std::vector<Point> pts = c.points();
  for (unsigned r = 0; r < rounds; ++r)
    for (const auto& cand : cfg.stream.round_points(r)) detail::greedy_accept(c.window(), pts, cfg.u, cand);
  return MaximalExtension{CrossSection(c.window(), std::move(pts), c.order()), rounds,
                          rounds ? cfg.stream.mesh(rounds - 1) : cfg.stream.initial_mesh};
}

/// A cube radius r such that C is [-r, r)^d-cocompact, verified exactly.
/// Tries 2u first (the U^2 body for U = [-u, u)^d); after greedy rounds with
/// final mesh h the radius 2u + h is always sufficient.
struct CocompactnessCertificate {
  QuadNum radius;
  bool maximal_body = false;  // true when U^2 itself already covers
};

inline std::optional<CocompactnessCertificate> cocompactness_certificate(const CrossSection& c, const Rect& u,
                                                                         const QuadNum& mesh) {
  QuadNum r = u.hi(0);
  for (std::size_t i = 1; i < u.dim(); ++i) r = max(r, u.hi(i));
  const std::size_t d = c.window().dim();
  if (is_cocompact(c, doubled(u))) return CocompactnessCertificate{r + r, true};
  QuadNum wide = r + r + mesh;
  if (is_cocompact(c, Rect::centered(d, wide))) return CocompactnessCertificate{wide, false};
  return std::nullopt;
}

}  // namespace rtile
