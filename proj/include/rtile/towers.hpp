#pragma once

// Nested tower squares inside a box window and the regular tiling built on
// top of them, level by level.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rtile/cross_section.hpp"
#include "rtile/diophantine.hpp"
#include "rtile/error.hpp"
#include "rtile/geometry.hpp"
#include "rtile/tiling.hpp"

namespace rtile {

struct TowerLevel {
  QuadNum b, l, btilde;
  Rational eps;
};

struct TowerSpec {
  std::size_t dim = 1;
  QuadNum kappa = rtile::kappa();
  std::vector<TowerLevel> levels;  // levels[k - 1] is level k

  std::size_t depth() const { return levels.size(); }
  const TowerLevel& at(std::size_t k) const { return levels.at(k - 1); }

  /// R_k = [-l_k, l_k)^d
  Rect square(std::size_t k) const { return Rect::centered(dim, at(k).l); }
  /// R_k shrunk by b_k: the part that carries the level-k tiling
  Rect core(std::size_t k) const { return shrink(square(k), at(k).b); }

  /// eps_k = 2^-k, b_k the least kappa-multiple >= N(eps_k) + 2 kappa,
  /// btilde_k = b_k + 2 l_{k-1}, l_k = btilde_k + gap * kappa.
  /// Least admissible b_k for each given eps_k, and l_k = btilde_k + gap*(1+alpha).
  static TowerSpec with_eps(std::size_t d, const std::vector<Rational>& eps, long gap = 2) {
    TowerSpec s;
    s.dim = d;
    QuadNum prev_l;
    for (const auto& e : eps) {
      TowerLevel lv;
      lv.eps = e;
      const long n = n_of_eps(lv.eps);
      lv.b = s.kappa * QuadNum((QuadNum(n) / s.kappa).ceil() + 2);
      lv.btilde = lv.b + prev_l + prev_l;
      lv.l = lv.btilde + s.kappa * QuadNum(gap);
      prev_l = lv.l;
      s.levels.push_back(lv);
    }
    return s;
  }

  /// eps_k = 2^-k.
  static TowerSpec standard(std::size_t d, std::size_t depth, long gap = 2) {
    std::vector<Rational> eps;
    for (std::size_t k = 1; k <= depth; ++k) eps.emplace_back(1, 1u << k);
    return with_eps(d, eps, gap);
  }
};

namespace detail {

inline bool is_kappa_multiple(const QuadNum& x) {
  const QuadNum k = x / kappa();
  return k.is_rational() && k.rat().get_den() == 1 && k.rat() >= 0;
}

}  // namespace detail

/// Every violated constraint, one message each.
inline std::vector<std::string> validate_spec(const TowerSpec& s) {
  std::vector<std::string> out;
  if (s.kappa != kappa()) out.push_back("kappa is not 1+sqrt2");
  Rational eps_sum = 0;
  for (std::size_t k = 1; k <= s.depth(); ++k) {
    const auto& lv = s.at(k);
    const std::string tag = "level " + std::to_string(k) + ": ";
    if (lv.eps <= 0) {
      out.push_back(tag + "eps must be positive");
      continue;
    }
    eps_sum += lv.eps;
    if (!detail::is_kappa_multiple(lv.b)) out.push_back(tag + "b is not a multiple of 1+sqrt2");
    if (lv.b < QuadNum(n_of_eps(lv.eps)) + kappa() + kappa()) out.push_back(tag + "b below N(eps) + 2(1+sqrt2)");
    if (!detail::is_kappa_multiple(lv.l)) out.push_back(tag + "l is not a multiple of 1+sqrt2");
    if (lv.l < lv.btilde) out.push_back(tag + "l below btilde");
    const QuadNum prev_l = k > 1 ? s.at(k - 1).l : QuadNum(0);
    if (lv.btilde < lv.b + prev_l + prev_l) out.push_back(tag + "btilde below b + 2 l of the level below");
    if (k > 1) {
      if (!(lv.eps < s.at(k - 1).eps)) out.push_back(tag + "eps not strictly decreasing");
      if (lv.b < s.at(k - 1).b) out.push_back(tag + "b decreasing");
    }
  }
  if (eps_sum >= 1) out.push_back("sum of eps is not below 1");
  return out;
}

struct TowerSquare {
  Point anchor;
  std::optional<std::size_t> parent;  // index in the level above
  std::vector<std::size_t> children;  // indices in the level below
};

struct TowerFamily {
  Window window;
  TowerSpec spec;
  std::vector<std::vector<TowerSquare>> levels;  // levels[k - 1]

  const std::vector<TowerSquare>& level(std::size_t k) const { return levels.at(k - 1); }
  Rect square(std::size_t k, std::size_t i) const { return spec.square(k).translated(level(k).at(i).anchor); }
  Rect core(std::size_t k, std::size_t i) const { return spec.core(k).translated(level(k).at(i).anchor); }

  CrossSection section(std::size_t k) const {
    std::vector<Point> pts;
    for (const auto& sq : level(k)) pts.push_back(sq.anchor);
    return CrossSection(window, std::move(pts));
  }
};

struct TowerAudit {
  bool lacunary = true;
  bool nested = true;
  bool parents_nonempty = true;
  bool inside_window = true;
  QuadNum covered_fraction;  // of the window, by the top-level squares
  std::vector<std::string> failures;

  bool ok() const { return lacunary && nested && parents_nonempty && inside_window; }
};

/// Direct containment checks on a family.
inline TowerAudit audit_towers(const TowerFamily& f) {
  TowerAudit a;
  const std::size_t depth = f.levels.size();
  QuadNum covered;
  for (std::size_t k = 1; k <= depth; ++k) {
    const auto& lv = f.level(k);
    for (std::size_t i = 0; i < lv.size(); ++i) {
      const Rect sq = f.square(k, i);
      if (!f.window.domain().contains(sq)) {
        a.inside_window = false;
        a.failures.push_back("square " + sq.str() + " leaves the window");
      }
      for (std::size_t j = i + 1; j < lv.size(); ++j)
        if (sq.intersects(f.square(k, j))) {
          a.lacunary = false;
          a.failures.push_back("level " + std::to_string(k) + " squares " + std::to_string(i) + ", " +
                               std::to_string(j) + " overlap");
        }
      if (k < depth) {
        const auto& p = lv[i].parent;
        if (!p || !f.core(k + 1, *p).contains(sq)) {
          a.nested = false;
          a.failures.push_back("level " + std::to_string(k) + " square " + sq.str() + " not deep inside a parent");
        }
      }
      if (k > 1 && lv[i].children.empty()) {
        a.parents_nonempty = false;
        a.failures.push_back("level " + std::to_string(k) + " square " + sq.str() + " has no child");
      }
      if (k == depth) covered += sq.volume();
    }
  }
  a.covered_fraction = covered / f.window.domain().volume();
  return a;
}

namespace detail {

struct AnchorBox {
  Point lo, hi;  // closed; lo[i] == hi[i] allowed
};

// grid candidates lo + offset + j*h inside the closed box, h = mesh / 2^round
inline std::vector<Point> grid_candidates(const AnchorBox& box, const QuadNum& mesh, unsigned round,
                                          std::uint64_t seed) {
  const std::size_t d = box.lo.size();
  const QuadNum h = mesh * dyadic(round);
  QuadNum offset;
  if (seed != 0) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + round);
    offset = h * q_ratio(static_cast<long>(rng() % 1021), 1021);
  }
  std::vector<std::vector<QuadNum>> axes(d);
  for (std::size_t i = 0; i < d; ++i) {
    const QuadNum start = box.hi[i] < box.lo[i] + offset ? box.lo[i] : box.lo[i] + offset;
    for (QuadNum x = start; !(box.hi[i] < x); x += h) axes[i].push_back(x);
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

inline std::vector<Point> greedy_anchors(const Window& w, const AnchorBox& box, const Rect& body, std::uint64_t seed,
                                         unsigned rounds) {
  QuadNum m;
  for (std::size_t i = 0; i < box.lo.size(); ++i) m = max(m, box.hi[i] - box.lo[i]);
  if (m == QuadNum(0)) return {box.lo};
  std::vector<Point> pts;
  for (unsigned r = 0; r < rounds; ++r)
    for (const auto& cand : grid_candidates(box, m, r, seed)) greedy_accept(w, pts, body, cand);
  return pts;
}

// closed box of anchors c with c + [-l, l)^d inside `outer`
inline std::optional<AnchorBox> anchor_region(const Rect& outer, const QuadNum& l) {
  AnchorBox b{Point(outer.dim()), Point(outer.dim())};
  for (std::size_t i = 0; i < outer.dim(); ++i) {
    b.lo[i] = outer.lo(i) + l;
    b.hi[i] = outer.hi(i) - l;
    if (b.hi[i] < b.lo[i]) return std::nullopt;
  }
  return b;
}

}  // namespace detail

/// Top-down construction: the coarsest squares first by the unjittered
/// greedy rule, then each level inside the shrunk parents with a seeded
/// jitter.
inline TowerFamily build_towers(const Window& window, const TowerSpec& spec, std::uint64_t seed = 1,
                                unsigned rounds = 5) {
  detail::require_box(window);
  if (window.dim() != spec.dim) fail(Errc::precondition_violated, "window and spec dimensions differ");
  TowerFamily f{window, spec, {}};
  const std::size_t depth = spec.depth();
  if (depth == 0) return f;
  f.levels.resize(depth);
  const QuadNum top_l = spec.at(depth).l;
  for (std::size_t i = 0; i < spec.dim; ++i)
    if (window.domain().side(i) < QuadNum(4) * top_l)
      fail(Errc::window_too_small, "window side " + window.domain().side(i).str() + " below 4 l_K");
  auto top = detail::anchor_region(window.domain(), top_l);
  for (auto& p : detail::greedy_anchors(window, *top, spec.square(depth), 0, rounds))
    f.levels[depth - 1].push_back({p, std::nullopt, {}});
  for (std::size_t k = depth - 1; k >= 1; --k) {
    auto& parents = f.levels[k];
    auto& kids = f.levels[k - 1];
    for (std::size_t p = 0; p < parents.size(); ++p) {
      auto region = detail::anchor_region(f.core(k + 1, p), spec.at(k).l);
      if (!region) fail(Errc::window_too_small, "level " + std::to_string(k + 1) + " core cannot hold a child");
      const std::uint64_t s = seed * 1000003u + k * 7919u + p;
      for (auto& c : detail::greedy_anchors(window, *region, spec.square(k), s, rounds)) {
        parents[p].children.push_back(kids.size());
        kids.push_back({c, p, {}});
      }
    }
  }
  return f;
}

/// Nodes of the canonical tiling of a box with kappa-multiple sides: per
/// axis, lo + j kappa and lo + j kappa + 1.
struct CanonicalGrid {
  Rect region;

  // node index 2j for lo + j kappa, 2j + 1 for lo + j kappa + 1
  std::optional<long> node_index(std::size_t axis, const QuadNum& x) const {
    const QuadNum t = x - region.lo(axis);
    const long j = detail::to_long((t / kappa()).floor());
    const QuadNum r = t - QuadNum(j) * kappa();
    if (r == QuadNum(0)) return 2 * j;
    if (r == QuadNum(1)) return 2 * j + 1;
    return std::nullopt;
  }

  QuadNum node(std::size_t axis, long idx) const {
    const long j = idx >= 0 ? idx / 2 : -((1 - idx) / 2);
    return region.lo(axis) + QuadNum(j) * kappa() + QuadNum(idx - 2 * j);
  }

  /// Nearest node, ties toward -infinity.
  QuadNum snap(std::size_t axis, const QuadNum& x) const {
    const QuadNum t = x - region.lo(axis);
    const long j = detail::to_long((t / kappa()).floor());
    const QuadNum base = region.lo(axis) + QuadNum(j) * kappa();
    QuadNum best = base;
    for (const QuadNum& c : {base + QuadNum(1), base + kappa()})
      if (abs(c - x) < abs(best - x)) best = c;
    return best;
  }
};

struct SnapResult {
  std::vector<Rect> windows;
  bool pushed = false;  // the push-to-next-node fallback was used
};

/// One window per child: the child square with its lower corner snapped to
/// the nearest canonical node of `parent_core`.
inline SnapResult snap_windows(const Rect& parent_core, const std::vector<Rect>& children) {
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (!parent_core.contains(children[i])) fail(Errc::precondition_violated, "child " + children[i].str() + " not inside parent");
    for (std::size_t j = i + 1; j < children.size(); ++j)
      if (children[i].intersects(children[j])) fail(Errc::precondition_violated, "children overlap");
  }
  const CanonicalGrid grid{parent_core};
  const std::size_t d = parent_core.dim();
  std::vector<std::size_t> order(children.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lex_less(children[a].lo(), children[b].lo()); });
  SnapResult out;
  out.windows.resize(children.size());
  std::vector<Rect> placed;
  for (std::size_t i : order) {
    const Rect& c = children[i];
    Point lo(d);
    for (std::size_t a = 0; a < d; ++a) lo[a] = grid.snap(a, c.lo(a));
    const Point size = c.hi() - c.lo();
    auto clash = [&](const Rect& r) {
      return std::any_of(placed.begin(), placed.end(), [&](const Rect& q) { return q.intersects(r); });
    };
    Rect w(lo, lo + size);
    // push along the first axis to the next free node, staying within 1+alpha
    while (clash(w)) {
      out.pushed = true;
      const long idx = *grid.node_index(0, lo[0]) + 1;
      lo[0] = grid.node(0, idx);
      w = Rect(lo, lo + size);
      if (kappa() < abs(lo[0] - c.lo(0)) || !parent_core.contains(w))
        fail(Errc::snap_conflict, "no free node for child " + c.str());
    }
    placed.push_back(w);
    out.windows[i] = w;
  }
  return out;
}

struct ShiftLedger {
  std::vector<std::vector<Point>> own;    // [k - 1][i]: shift applied at level k
  std::vector<std::vector<Point>> total;  // [k - 1][i]: own plus every ancestor's

  QuadNum max_own(std::size_t k) const {
    QuadNum m;
    for (const auto& v : own.at(k - 1)) m = max(m, sup_norm(v));
    return m;
  }
  QuadNum max_total() const {
    QuadNum m;
    for (const auto& lv : total)
      for (const auto& v : lv) m = max(m, sup_norm(v));
    return m;
  }
};

/// pairs[a][n] = (index of a 1-tile, index of an a-tile); pairs[0] is unused.
struct ThetaMatching {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs;

  std::optional<std::size_t> apply(std::uint32_t type, std::size_t tile) const {
    for (const auto& [one, other] : pairs.at(type))
      if (one == tile) return other;
    return std::nullopt;
  }
  std::optional<std::size_t> inverse(std::uint32_t type, std::size_t tile) const {
    for (const auto& [one, other] : pairs.at(type))
      if (other == tile) return one;
    return std::nullopt;
  }
};

struct PlacedTile {
  Rect rect;
  TileType type;
  std::size_t level = 0;   // level at which the tile was laid
  std::size_t fragment = 0;
};

/// The tiling of every level-k core built so far.
struct TilingState {
  std::size_t level = 0;
  std::vector<PlacedTile> tiles;
  std::vector<std::vector<std::size_t>> region_tiles;  // per square of `level`
  ShiftLedger ledger;
  ThetaMatching theta;
  bool pushed = false;
};

namespace detail {

inline void match_new_tiles(TilingState& s, const std::vector<std::size_t>& fresh, std::size_t d) {
  std::vector<std::vector<std::size_t>> by_type(TileType::count(d));
  for (std::size_t t : fresh) by_type[s.tiles[t].type.bits].push_back(t);
  for (std::size_t a = 1; a < by_type.size(); ++a) {
    if (by_type[a].size() != by_type[0].size())
      fail(Errc::type_mismatch, "new tiles of type " + TileType{d, static_cast<std::uint32_t>(a)}.str() +
                                    " do not match the 1-tiles in number");
    for (std::size_t n = 0; n < by_type[0].size(); ++n) s.theta.pairs[a].emplace_back(by_type[0][n], by_type[a][n]);
  }
}

inline void lay(TilingState& s, std::vector<std::size_t>& fresh, const Rect& cell, std::size_t level) {
  fresh.push_back(s.tiles.size());
  s.tiles.push_back({cell, *type_of(cell), level, 0});
}

}  // namespace detail

/// Level 1: the canonical tiling of every level-1 core, no shift.
inline TilingState base_level(const TowerFamily& f) {
  if (f.levels.empty()) fail(Errc::precondition_violated, "empty family");
  const std::size_t d = f.spec.dim;
  TilingState s;
  s.level = 1;
  s.theta.pairs.resize(TileType::count(d));
  s.ledger.own.resize(f.levels.size());
  s.ledger.total.resize(f.levels.size());
  for (std::size_t k = 1; k <= f.levels.size(); ++k) {
    s.ledger.own[k - 1].assign(f.level(k).size(), Point(d, QuadNum(0)));
    s.ledger.total[k - 1].assign(f.level(k).size(), Point(d, QuadNum(0)));
  }
  for (std::size_t i = 0; i < f.level(1).size(); ++i) {
    std::vector<std::size_t> fresh;
    const auto canon = canonical_tiling(f.core(1, i));
    for (const auto& t : canon.tiling().tiles()) detail::lay(s, fresh, t.rect, 1);
    detail::match_new_tiles(s, fresh, d);
    s.region_tiles.push_back(std::move(fresh));
  }
  return s;
}

/// Moves the tiled cores of level k into their snapped windows, extends
/// them across the windows and fills the rest of each level-(k+1) core
/// canonically.
inline void extend_level(const TowerFamily& f, TilingState& s) {
  const std::size_t k = s.level;
  if (k == 0 || k >= f.levels.size()) fail(Errc::precondition_violated, "no level above " + std::to_string(k));
  const std::size_t d = f.spec.dim;
  const auto& lv = f.spec.at(k);
  const long k_inner = kappa_multiple(f.spec.core(k).side(0));
  const long k_outer = kappa_multiple(f.spec.square(k).side(0));
  std::vector<std::vector<std::size_t>> next;
  for (std::size_t p = 0; p < f.level(k + 1).size(); ++p) {
    const Rect pcore = f.core(k + 1, p);
    const auto& kids = f.level(k + 1)[p].children;
    std::vector<Rect> squares;
    for (std::size_t c : kids) squares.push_back(f.square(k, c));
    const auto snapped = snap_windows(pcore, squares);
    s.pushed = s.pushed || snapped.pushed;
    std::vector<std::size_t> region, fresh;
    for (std::size_t n = 0; n < kids.size(); ++n) {
      const std::size_t c = kids[n];
      const Rect& w = snapped.windows[n];
      const Rect core = f.core(k, c);
      Point delta(d);
      std::vector<std::vector<QuadNum>> cuts(d);
      std::vector<std::pair<std::size_t, std::size_t>> inner(d);  // segment index range of the core
      for (std::size_t a = 0; a < d; ++a) {
        const auto ext = extend_interval(core.lo(a) - w.lo(a), k_inner, k_outer, lv.eps);
        delta[a] = ext.delta;
        for (const auto& x : ext.breakpoints()) cuts[a].push_back(w.lo(a) + x);
        inner[a] = {ext.before.labels.size(), ext.before.labels.size() + ext.inner.labels.size()};
      }
      s.ledger.own[k - 1][c] = delta;
      for (std::size_t t : s.region_tiles[c]) {
        s.tiles[t].rect = s.tiles[t].rect.translated(delta);
        region.push_back(t);
      }
      detail::for_each_cell(cuts, [&](const Rect& cell, const std::vector<std::size_t>& idx) {
        bool in_core = true;
        for (std::size_t a = 0; a < d; ++a) in_core = in_core && idx[a] >= inner[a].first && idx[a] < inner[a].second;
        if (!in_core) detail::lay(s, fresh, cell, k + 1);
      });
    }
    // canonical cells of the parent core outside every window
    const CanonicalGrid grid{pcore};
    std::vector<std::vector<std::pair<long, long>>> spans(snapped.windows.size(), std::vector<std::pair<long, long>>(d));
    for (std::size_t n = 0; n < snapped.windows.size(); ++n)
      for (std::size_t a = 0; a < d; ++a)
        spans[n][a] = {*grid.node_index(a, snapped.windows[n].lo(a)), *grid.node_index(a, snapped.windows[n].hi(a))};
    std::vector<std::vector<QuadNum>> cuts(d);
    for (std::size_t a = 0; a < d; ++a)
      cuts[a] = partition_exact(pcore.side(a), pcore.lo(a)).breakpoints();
    detail::for_each_cell(cuts, [&](const Rect& cell, const std::vector<std::size_t>& idx) {
      for (const auto& sp : spans) {
        bool inside = true;
        for (std::size_t a = 0; a < d; ++a) {
          const long i = static_cast<long>(idx[a]);
          inside = inside && i >= sp[a].first && i < sp[a].second;
        }
        if (inside) return;
      }
      detail::lay(s, fresh, cell, k + 1);
    });
    detail::match_new_tiles(s, fresh, d);
    region.insert(region.end(), fresh.begin(), fresh.end());
    next.push_back(std::move(region));
  }
  // accumulate: a square moves with every ancestor
  for (std::size_t j = 1; j <= k; ++j)
    for (std::size_t i = 0; i < f.level(j).size(); ++i) {
      std::size_t up = i;
      for (std::size_t m = j; m < k; ++m) up = *f.level(m)[up].parent;
      auto& tot = s.ledger.total[j - 1][i];
      tot = tot + s.ledger.own[k - 1][up];
    }
  s.region_tiles = std::move(next);
  s.level = k + 1;
}

struct LimitFragment {
  std::size_t label = 0;  // index of the top-level square
  RegularTiling tiling;
};

struct LimitTiling {
  std::vector<LimitFragment> fragments;
  std::vector<PlacedTile> tiles;  // every tile; fragment field set
  ThetaMatching theta;            // indices into `tiles`
  ShiftLedger ledger;
  bool pushed = false;

  /// Final position of the level-k core i after all shifts.
  static Rect region(const TowerFamily& f, const ShiftLedger& l, std::size_t k, std::size_t i) {
    return f.core(k, i).translated(l.total[k - 1][i]);
  }
};

/// Runs every level; one regular tiling per top-level core.
inline LimitTiling limit_tiling(const TowerFamily& f) {
  LimitTiling out;
  if (f.levels.empty()) return out;
  TilingState s = base_level(f);
  while (s.level < f.levels.size()) extend_level(f, s);
  const std::size_t depth = f.levels.size();
  for (std::size_t i = 0; i < s.region_tiles.size(); ++i) {
    std::vector<Tile> tiles;
    std::vector<TileType> types;
    for (std::size_t t : s.region_tiles[i]) {
      s.tiles[t].fragment = i;
      tiles.push_back({s.tiles[t].rect.lo(), s.tiles[t].rect});
      types.push_back(s.tiles[t].type);
    }
    out.fragments.push_back({i, RegularTiling(RectTiling(Window::box(f.core(depth, i)), std::move(tiles)), std::move(types))});
  }
  out.tiles = std::move(s.tiles);
  out.theta = std::move(s.theta);
  out.ledger = std::move(s.ledger);
  out.pushed = s.pushed;
  return out;
}

}  // namespace rtile
