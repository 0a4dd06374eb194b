#pragma once

// Rectangular tilings of box windows.  Tiles are anchored at their
// bottom-left corner.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "rtile/cross_section.hpp"
#include "rtile/diophantine.hpp"
#include "rtile/error.hpp"
#include "rtile/geometry.hpp"

namespace rtile {

struct Tile {
  Point anchor;
  Rect rect;
};

struct PartitionAudit {
  bool volume = true;     // tile volumes sum to the region volume
  bool disjoint = true;   // no two tiles meet
  bool contained = true;  // every tile inside the region
  std::string detail;

  bool ok() const { return volume && disjoint && contained; }
};

/// Exact partition audit: volume sum, containment, and pairwise
/// disjointness found by a sweep along the first axis.
inline PartitionAudit audit_partition(const std::vector<Rect>& tiles, const Rect& region) {
  PartitionAudit out;
  QuadNum total;
  for (const auto& t : tiles) {
    total += t.volume();
    if (out.contained && !region.contains(t)) {
      out.contained = false;
      out.detail = "tile " + t.str() + " leaves " + region.str();
    }
  }
  if (total != region.volume()) {
    out.volume = false;
    if (out.detail.empty()) out.detail = "volumes sum to " + total.str() + ", region has " + region.volume().str();
  }
  // doubles settle clear cases; anything within tol falls back to exact comparison
  constexpr double tol = 1e-7;
  struct Box {
    const Rect* r;
    std::vector<double> lo, hi;
  };
  std::vector<Box> boxes;
  boxes.reserve(tiles.size());
  for (const auto& t : tiles) {
    Box b{&t, {}, {}};
    for (std::size_t i = 0; i < t.dim(); ++i) {
      b.lo.push_back(t.lo(i).to_double());
      b.hi.push_back(t.hi(i).to_double());
    }
    boxes.push_back(std::move(b));
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) { return a.lo[0] < b.lo[0]; });
  auto apart = [&](const Box& a, const Box& b) {
    for (std::size_t i = 0; i < a.lo.size(); ++i)
      if (a.hi[i] < b.lo[i] - tol || b.hi[i] < a.lo[i] - tol) return true;
    return false;
  };
  std::vector<const Box*> active;
  for (const Box& t : boxes) {
    std::erase_if(active, [&](const Box* a) { return a->hi[0] < t.lo[0] - tol; });
    for (const Box* a : active)
      if (!apart(*a, t) && a->r->intersects(*t.r)) {
        out.disjoint = false;
        if (out.detail.empty()) out.detail = "tiles " + a->r->str() + " and " + t.r->str() + " overlap";
        return out;
      }
    active.push_back(&t);
  }
  return out;
}

class RectTiling {
 public:
  RectTiling(Window window, std::vector<Tile> tiles) : window_(std::move(window)), tiles_(std::move(tiles)) {}

  const Window& window() const { return window_; }
  const std::vector<Tile>& tiles() const { return tiles_; }
  std::size_t size() const { return tiles_.size(); }
  const Tile& operator[](std::size_t i) const { return tiles_[i]; }

  std::vector<Rect> rects() const {
    std::vector<Rect> out;
    for (const auto& t : tiles_) out.push_back(t.rect);
    return out;
  }

  PartitionAudit audit() const { return audit_partition(rects(), window_.domain()); }

  /// Smallest and largest side over all tiles and axes.
  std::pair<QuadNum, QuadNum> side_range() const {
    QuadNum lo = tiles_.at(0).rect.side(0), hi = lo;
    for (const auto& t : tiles_)
      for (std::size_t i = 0; i < t.rect.dim(); ++i) {
        lo = min(lo, t.rect.side(i));
        hi = max(hi, t.rect.side(i));
      }
    return {lo, hi};
  }

 private:
  Window window_;
  std::vector<Tile> tiles_;
};

/// Side vector in {1, alpha}^d; bit i set means side alpha on axis i.
struct TileType {
  std::size_t dim = 0;
  std::uint32_t bits = 0;

  static TileType ones(std::size_t d) { return {d, 0}; }
  static std::size_t count(std::size_t d) { return std::size_t{1} << d; }

  bool is_alpha(std::size_t i) const { return (bits >> i) & 1u; }
  QuadNum side(std::size_t i) const { return is_alpha(i) ? alpha() : QuadNum(1); }

  /// prod_i [-a(i)/2, a(i)/2)
  Rect centered_rect() const {
    Point lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      hi[i] = side(i) * q_ratio(1, 2);
      lo[i] = -hi[i];
    }
    return Rect(lo, hi);
  }

  /// "1" and "a" per axis, e.g. "1a".
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < dim; ++i) s += is_alpha(i) ? 'a' : '1';
    return s;
  }

  bool operator==(const TileType&) const = default;
};

/// The type of a box with all sides in {1, alpha}, if it has one.
inline std::optional<TileType> type_of(const Rect& r) {
  TileType t{r.dim(), 0};
  for (std::size_t i = 0; i < r.dim(); ++i) {
    const QuadNum s = r.side(i);
    if (s == alpha()) t.bits |= 1u << i;
    else if (s != QuadNum(1)) return std::nullopt;
  }
  return t;
}

class RegularTiling {
 public:
  RegularTiling(RectTiling tiling, std::vector<TileType> types) : tiling_(std::move(tiling)), types_(std::move(types)) {
    if (types_.size() != tiling_.size()) fail(Errc::type_mismatch, "one type per tile");
    for (std::size_t i = 0; i < types_.size(); ++i) {
      auto t = type_of(tiling_[i].rect);
      if (!t || *t != types_[i])
        fail(Errc::type_mismatch, "tile " + tiling_[i].rect.str() + " does not have type " + types_[i].str());
    }
  }

  /// Types read off the tile sides; raises TypeMismatch for other sides.
  static RegularTiling from_sides(RectTiling tiling) {
    std::vector<TileType> types;
    for (const auto& t : tiling.tiles()) {
      auto ty = type_of(t.rect);
      if (!ty) fail(Errc::type_mismatch, "tile " + t.rect.str() + " has a side outside {1, alpha}");
      types.push_back(*ty);
    }
    return RegularTiling(std::move(tiling), std::move(types));
  }

  const RectTiling& tiling() const { return tiling_; }
  const std::vector<TileType>& types() const { return types_; }
  std::size_t size() const { return tiling_.size(); }

  /// Tile count per type (indexed by bits), over tiles inside `region`.
  std::vector<std::size_t> type_counts(const std::optional<Rect>& region = std::nullopt) const {
    std::vector<std::size_t> out(TileType::count(tiling_.window().dim()), 0);
    for (std::size_t i = 0; i < size(); ++i)
      if (!region || region->contains(tiling_[i].rect)) ++out[types_[i].bits];
    return out;
  }

 private:
  RectTiling tiling_;
  std::vector<TileType> types_;
};

namespace detail {

/// round(x) for x > 0, halves rounded up
inline long round_positive(const QuadNum& x) { return to_long((x + QuadNum(q_ratio(1, 2))).floor()); }

inline void require_box(const Window& w) {
  if (w.is_torus()) fail(Errc::precondition_violated, "tilings are built on box windows");
}

/// Cartesian product of per-axis cuts; cuts[i] lists breakpoints.
template <class F>
void for_each_cell(const std::vector<std::vector<QuadNum>>& cuts, F&& f) {
  const std::size_t d = cuts.size();
  std::vector<std::size_t> idx(d, 0);
  for (const auto& c : cuts)
    if (c.size() < 2) return;
  Point lo(d), hi(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = cuts[i][idx[i]];
      hi[i] = cuts[i][idx[i] + 1];
    }
    f(Rect(lo, hi), idx);
    std::size_t k = 0;
    while (k < d && ++idx[k] + 1 == cuts[k].size()) idx[k++] = 0;
    if (k == d) return;
  }
}

}  // namespace detail

/// Lengths from which the equal-split rule always lands within eps of L'.
inline QuadNum bounded_sides_threshold(const QuadNum& target, const Rational& eps) {
  detail::require_positive(eps);
  // round(len/L') = n works as soon as n > L'/(2 eps)
  const long m = detail::to_long((target / QuadNum(2 * eps)).floor()) + 1;
  return target * (QuadNum(m) - QuadNum(q_ratio(1, 2)));
}

/// Splits each axis of a box window into n = round(len/L') equal pieces.
inline RectTiling tile_window_bounded_sides(const Window& w, const QuadNum& target, const Rational& eps) {
  detail::require_box(w);
  detail::require_positive(eps);
  if (!(QuadNum(0) < target)) fail(Errc::precondition_violated, "target side must be positive");
  const Rect& box = w.domain();
  std::vector<std::vector<QuadNum>> cuts(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const QuadNum len = box.side(i);
    const long n = std::max(1L, detail::round_positive(len / target));
    const QuadNum piece = len / QuadNum(n);
    if (!(abs(piece - target) < QuadNum(eps)))
      fail(Errc::window_too_small, "side " + len.str() + " cannot be split into pieces within eps of " + target.str());
    for (long k = 0; k <= n; ++k) cuts[i].push_back(k == n ? box.hi(i) : box.lo(i) + piece * QuadNum(k));
  }
  std::vector<Tile> tiles;
  detail::for_each_cell(cuts, [&](const Rect& r, const auto&) { tiles.push_back({r.lo(), r}); });
  return RectTiling(w, std::move(tiles));
}

struct InscribedGrid {
  CrossSection section;           // centers of the inscribed copies of R
  std::vector<QuadNum> coverage;  // covered fraction per tile
};

/// Packs copies of R into every tile from its bottom-left corner.
inline InscribedGrid inscribe_grid(const RectTiling& t, const Rect& r, const Rational& eps) {
  detail::require_positive(eps);
  const std::size_t d = r.dim();
  std::vector<Point> centers;
  std::vector<QuadNum> coverage;
  for (const auto& tile : t.tiles()) {
    std::vector<std::vector<QuadNum>> cuts(d);
    QuadNum covered(1);
    for (std::size_t i = 0; i < d; ++i) {
      const long k = detail::to_long((tile.rect.side(i) / r.side(i)).floor());
      for (long j = 0; j <= k; ++j) cuts[i].push_back(tile.rect.lo(i) + r.side(i) * QuadNum(j));
      covered *= r.side(i) * QuadNum(k);
    }
    const QuadNum frac = covered / tile.rect.volume();
    if (frac < QuadNum(1) - QuadNum(eps))
      fail(Errc::tiles_too_small, "tile " + tile.rect.str() + " covered only to " + frac.str());
    coverage.push_back(frac);
    detail::for_each_cell(cuts, [&](const Rect& cell, const auto&) { centers.push_back(cell.lo() - r.lo()); });
  }
  return {CrossSection(t.window(), std::move(centers)), std::move(coverage)};
}

/// Number of (1+alpha) blocks in a side, or NotMultiple.
inline long kappa_multiple(const QuadNum& side) {
  const QuadNum k = side / kappa();
  if (!k.is_rational() || k.rat().get_den() != 1 || k.rat() < 0)
    fail(Errc::not_multiple, "side " + side.str() + " is not a multiple of 1+sqrt2");
  return detail::to_long(k.rat().get_num());
}

/// Product of the alternating 1, alpha partitions of each side.
inline RegularTiling canonical_tiling(const Rect& r) {
  const std::size_t d = r.dim();
  std::vector<std::vector<QuadNum>> cuts(d);
  for (std::size_t i = 0; i < d; ++i) {
    const long k = kappa_multiple(r.side(i));
    cuts[i] = partition_exact(QuadNum(k) * kappa(), r.lo(i)).breakpoints();
  }
  std::vector<Tile> tiles;
  std::vector<TileType> types;
  detail::for_each_cell(cuts, [&](const Rect& cell, const auto&) {
    tiles.push_back({cell.lo(), cell});
    types.push_back(*type_of(cell));
  });
  return RegularTiling(RectTiling(Window::box(r), std::move(tiles)), std::move(types));
}

}  // namespace rtile
