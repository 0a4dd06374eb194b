#pragma once

// Back-and-forth construction of a Lebesgue-preserving map between two
// tiled orbit fragments, and the normalization checks on such maps.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtile/error.hpp"
#include "rtile/geometry.hpp"
#include "rtile/towers.hpp"

namespace rtile {

/// Smallest n with 2^-k n / zeta in (1 - 2^-(k+1), 1).
inline long block_counts(const QuadNum& zeta, unsigned k) {
  if (zeta < QuadNum(4) || QuadNum(5) < zeta) fail(Errc::precondition_violated, "zeta " + zeta.str() + " outside [4, 5]");
  const QuadNum scale(Rational(mpz_class(1) << k));
  const QuadNum lower = zeta * scale * (QuadNum(1) - dyadic(k + 1));
  const long n = detail::to_long(lower.floor()) + 1;
  if (!(QuadNum(n) < zeta * scale)) fail(Errc::precondition_violated, "no block count below the tile side");
  return n;
}

struct FragmentTile {
  Point anchor;
  std::vector<QuadNum> zeta;  // tile is anchor + prod [0, zeta_i)
  std::size_t label = 0;
  std::optional<std::size_t> partner;  // tile on the other side it draws from first

  Rect rect() const {
    Point hi = anchor;
    for (std::size_t i = 0; i < hi.size(); ++i) hi[i] += zeta[i];
    return Rect(anchor, hi);
  }
};

/// A growing family of tiles: an initial fragment plus fresh tiles issued
/// on demand by the compressibility maps tau_n.
class OrbitFragmentProvider {
 public:
  OrbitFragmentProvider(std::size_t d, std::vector<std::vector<QuadNum>> zetas, std::vector<std::size_t> labels,
                        std::uint64_t seed, std::size_t capacity = 100000)
      : dim_(d), rng_(seed), capacity_(capacity) {
    if (zetas.size() != labels.size()) fail(Errc::precondition_violated, "one label per tile");
    for (std::size_t i = 0; i < zetas.size(); ++i) push(std::move(zetas[i]), labels[i]);
    initial_ = tiles_.size();
  }

  /// n tiles with seeded zeta in {4, 4.001, ..., 5}^d and labels i mod n_labels.
  static OrbitFragmentProvider random(std::size_t d, std::size_t n, std::size_t n_labels, std::uint64_t seed,
                                      std::size_t capacity = 100000) {
    std::mt19937_64 rng(seed ^ 0xA5A5A5A5ull);
    std::vector<std::vector<QuadNum>> zetas;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < n; ++i) {
      zetas.push_back(draw_zeta(rng, d));
      labels.push_back(i % std::max<std::size_t>(n_labels, 1));
    }
    return OrbitFragmentProvider(d, std::move(zetas), std::move(labels), seed, capacity);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tiles_.size(); }
  std::size_t initial() const { return initial_; }
  const FragmentTile& tile(std::size_t i) const { return tiles_.at(i); }
  void set_partner(std::size_t i, std::size_t p) { tiles_.at(i).partner = p; }

  /// tau_n(c) for n >= 1, issuing a fresh tile with the label of c the first time.
  std::size_t tau(std::size_t n, std::size_t c) {
    if (n == 0) fail(Errc::precondition_violated, "tau maps start at 1");
    if (c >= tiles_.size()) fail(Errc::unknown_anchor, "no tile " + std::to_string(c));
    const auto key = std::make_pair(n, c);
    if (auto it = tau_.find(key); it != tau_.end()) return it->second;
    if (tiles_.size() >= capacity_) fail(Errc::provider_exhausted, "no fresh tiles left");
    push(draw_zeta(rng_, dim_), tiles_[c].label);
    tau_.emplace(key, tiles_.size() - 1);
    return tiles_.size() - 1;
  }

  const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& tau_table() const { return tau_; }

 private:
  static std::vector<QuadNum> draw_zeta(std::mt19937_64& rng, std::size_t d) {
    std::vector<QuadNum> z;
    for (std::size_t i = 0; i < d; ++i) z.push_back(QuadNum(4) + q_ratio(static_cast<long>(rng() % 1001), 1000));
    return z;
  }

  void push(std::vector<QuadNum> zeta, std::size_t label) {
    if (zeta.size() != dim_) fail(Errc::precondition_violated, "zeta has the wrong dimension");
    for (const auto& z : zeta) (void)block_counts(z, 0);
    // tiles sit side by side along the first axis
    Point anchor(dim_, QuadNum(0));
    anchor[0] = QuadNum(static_cast<long>(6 * tiles_.size()));
    tiles_.push_back({anchor, std::move(zeta), label, std::nullopt});
  }

  std::size_t dim_;
  std::mt19937_64 rng_;
  std::size_t capacity_;
  std::size_t initial_ = 0;
  std::vector<FragmentTile> tiles_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> tau_;
};

struct BlockId {
  std::size_t tile = 0;
  unsigned level = 0;
  std::vector<long> idx;

  /// anchor + 2^-k idx + [0, 2^-k)^d
  Rect geometry(const FragmentTile& t) const {
    const QuadNum h = dyadic(level);
    Point lo = t.anchor, hi = t.anchor;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      lo[i] += h * QuadNum(idx[i]);
      hi[i] = lo[i] + h;
    }
    return Rect(lo, hi);
  }
  Rational volume() const {
    Rational v(1);
    for (std::size_t i = 0; i < idx.size(); ++i) v /= Rational(mpz_class(1) << level);
    return v;
  }
  bool operator==(const BlockId&) const = default;
};

enum class Direction { forth, back };

inline std::string to_string(Direction d) { return d == Direction::forth ? "forth" : "back"; }

/// One linear piece: the source blocks (X side) onto the target blocks (Y side).
struct MappedUnit {
  unsigned stage = 0;
  Direction dir = Direction::forth;
  std::vector<BlockId> source;
  std::vector<BlockId> target;
};

struct BlockMap {
  std::size_t dim = 0;
  unsigned finest = 0;  // deepest block level the map may use
  std::vector<MappedUnit> units;
  std::vector<std::size_t> x_tiles_after_forth;  // per stage
  std::vector<std::size_t> y_tiles_after_back;
};

namespace detail {

// used/free marks on the finest grid of every tile of one side
class Occupancy {
 public:
  Occupancy(unsigned finest) : finest_(finest) {}

  void sync(const OrbitFragmentProvider& p) {
    while (counts_.size() < p.size()) {
      const auto& t = p.tile(counts_.size());
      std::vector<std::vector<long>> c(finest_ + 1);
      std::size_t cells = 1;
      for (unsigned k = 0; k <= finest_; ++k)
        for (const auto& z : t.zeta) c[k].push_back(block_counts(z, k));
      for (long n : c[finest_]) cells *= static_cast<std::size_t>(n);
      counts_.push_back(std::move(c));
      used_.emplace_back(cells, 0);
    }
  }

  const std::vector<long>& counts(std::size_t tile, unsigned k) const { return counts_.at(tile).at(k); }

  template <class F>
  void for_each_fine(const BlockId& b, F&& f) const {
    const auto& n = counts_.at(b.tile)[finest_];
    const long step = 1L << (finest_ - b.level);
    const std::size_t d = b.idx.size();
    std::vector<long> off(d, 0);
    while (true) {
      std::size_t flat = 0;
      for (std::size_t i = 0; i < d; ++i) flat = flat * static_cast<std::size_t>(n[i]) + static_cast<std::size_t>(b.idx[i] * step + off[i]);
      f(flat);
      std::size_t i = d;
      while (i > 0 && ++off[i - 1] == step) off[--i] = 0;
      if (i == 0) return;
    }
  }

  bool is_free(const BlockId& b) const {
    bool free = true;
    for_each_fine(b, [&](std::size_t f) { free = free && !used_[b.tile][f]; });
    return free;
  }
  void mark(const BlockId& b) {
    for_each_fine(b, [&](std::size_t f) { used_[b.tile][f] = 1; });
  }

  /// Free level-k blocks of a tile inside its level-k cover, lex order.
  std::vector<BlockId> free_blocks(std::size_t tile, unsigned k) const {
    const auto& n = counts(tile, k);
    std::vector<BlockId> out;
    const std::size_t d = n.size();
    std::vector<long> idx(d, 0);
    while (true) {
      BlockId b{tile, k, idx};
      if (is_free(b)) out.push_back(std::move(b));
      std::size_t i = d;
      while (i > 0 && ++idx[i - 1] == n[i - 1]) idx[--i] = 0;
      if (i == 0) return out;
    }
  }

 private:
  unsigned finest_;
  std::vector<std::vector<std::vector<long>>> counts_;  // [tile][level][axis]
  std::vector<std::vector<char>> used_;
};

// draws free blocks from `home`, then tau_1(home), tau_2(home), ...
class BlockSupply {
 public:
  BlockSupply(OrbitFragmentProvider& p, Occupancy& occ, std::size_t home, unsigned level, std::size_t requester)
      : p_(p), occ_(occ), home_(home), level_(level), requester_(requester) {
    load(home_);
  }

  BlockId take() {
    while (pos_ == pool_.size()) {
      const std::size_t t = p_.tau(++j_, home_);
      if (!p_.tile(t).partner) p_.set_partner(t, requester_);
      occ_.sync(p_);
      load(t);
    }
    BlockId b = pool_[pos_++];
    occ_.mark(b);
    return b;
  }

 private:
  void load(std::size_t t) {
    pool_ = occ_.free_blocks(t, level_);
    pos_ = 0;
  }

  OrbitFragmentProvider& p_;
  Occupancy& occ_;
  std::size_t home_;
  unsigned level_;
  std::size_t requester_;
  std::size_t j_ = 0;
  std::vector<BlockId> pool_;
  std::size_t pos_ = 0;
};

}  // namespace detail

struct LoeState {
  BlockMap map;
  detail::Occupancy x, y;

  LoeState(std::size_t d, unsigned finest) : map{d, finest, {}, {}, {}}, x(finest), y(finest) {}
};

/// Pairs the initial tiles; the label correspondence must be a bijection.
inline LoeState seed_state(OrbitFragmentProvider& x, OrbitFragmentProvider& y,
                           const std::vector<std::pair<std::size_t, std::size_t>>& seed, unsigned finest) {
  if (x.dim() != y.dim()) fail(Errc::precondition_violated, "fragments differ in dimension");
  std::map<std::size_t, std::size_t> fwd, bwd;
  std::set<std::size_t> xs, ys;
  for (const auto& [a, b] : seed) {
    if (a >= x.size() || b >= y.size()) fail(Errc::unknown_anchor, "seed pairs an unknown tile");
    if (!xs.insert(a).second || !ys.insert(b).second) fail(Errc::precondition_violated, "seed is not injective");
    const std::size_t la = x.tile(a).label, lb = y.tile(b).label;
    if ((fwd.count(la) && fwd[la] != lb) || (bwd.count(lb) && bwd[lb] != la))
      fail(Errc::precondition_violated, "seed does not respect orbit labels");
    fwd[la] = lb;
    bwd[lb] = la;
    x.set_partner(a, b);
    y.set_partner(b, a);
  }
  if (xs.size() != x.size() || ys.size() != y.size())
    fail(Errc::precondition_violated, "seed must pair every initial tile");
  LoeState s(x.dim(), finest);
  s.x.sync(x);
  s.y.sync(y);
  return s;
}

/// Maps every free level-k block of every X tile onto a free level-k Y block.
inline void forth_step(LoeState& s, OrbitFragmentProvider& x, OrbitFragmentProvider& y, unsigned k) {
  if (k > s.map.finest) fail(Errc::precondition_violated, "level beyond the finest grid");
  const std::size_t nx = x.size();
  for (std::size_t t = 0; t < nx; ++t) {
    auto demand = s.x.free_blocks(t, k);
    if (demand.empty()) continue;
    detail::BlockSupply supply(y, s.y, *x.tile(t).partner, k, t);
    for (auto& b : demand) {
      s.x.mark(b);
      s.map.units.push_back({k, Direction::forth, {b}, {supply.take()}});
    }
  }
  s.map.x_tiles_after_forth.push_back(x.size());
}

/// Covers every free level-k Y block by 2^d free level-(k+1) X blocks.
inline void back_step(LoeState& s, OrbitFragmentProvider& x, OrbitFragmentProvider& y, unsigned k) {
  if (k + 1 > s.map.finest) fail(Errc::precondition_violated, "level beyond the finest grid");
  const std::size_t parts = std::size_t{1} << x.dim();
  for (std::size_t t = 0; t < y.size(); ++t) {
    auto open = s.y.free_blocks(t, k);
    if (open.empty()) continue;
    detail::BlockSupply supply(x, s.x, *y.tile(t).partner, k + 1, t);
    for (auto& b : open) {
      s.y.mark(b);
      MappedUnit u{k, Direction::back, {}, {b}};
      for (std::size_t n = 0; n < parts; ++n) u.source.push_back(supply.take());
      s.map.units.push_back(std::move(u));
    }
  }
  s.map.y_tiles_after_back.push_back(y.size());
}

/// Forth then back at every level 0..K.
inline BlockMap run_back_and_forth(OrbitFragmentProvider& x, OrbitFragmentProvider& y,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& seed, unsigned levels) {
  LoeState s = seed_state(x, y, seed, levels + 1);
  for (unsigned k = 0; k <= levels; ++k) {
    forth_step(s, x, y, k);
    back_step(s, x, y, k);
  }
  return s.map;
}

/// Identity seed on the initial tiles.
inline std::vector<std::pair<std::size_t, std::size_t>> identity_seed(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(i, i);
  return out;
}

struct BlockMapAudit {
  bool injective_x = true;
  bool injective_y = true;
  bool measure_preserved = true;
  bool levels_ok = true;    // forth: k to k; back: k+1 to k with 2^d sources
  bool coverage_ok = true;  // D_k covered after stage k, per-axis fractions in (1 - 2^-(k+1), 1 - 2^-(k+2)]
  std::string detail;

  bool ok() const { return injective_x && injective_y && measure_preserved && levels_ok && coverage_ok; }
};

/// Recomputes every check from the unit list alone.
inline BlockMapAudit audit_block_map(const BlockMap& m, const OrbitFragmentProvider& x, const OrbitFragmentProvider& y) {
  BlockMapAudit a;
  auto note = [&](bool& flag, const std::string& msg) {
    flag = false;
    if (a.detail.empty()) a.detail = msg;
  };
  const unsigned fine = m.finest;
  auto fine_cells = [&](const BlockId& b, std::vector<long> cell, auto&& emit) {
    const long step = 1L << (fine - b.level);
    const std::size_t d = b.idx.size();
    std::vector<long> off(d, 0);
    while (true) {
      for (std::size_t i = 0; i < d; ++i) cell[i] = b.idx[i] * step + off[i];
      emit(cell);
      std::size_t i = d;
      while (i > 0 && ++off[i - 1] == step) off[--i] = 0;
      if (i == 0) return;
    }
  };
  std::set<std::pair<std::size_t, std::vector<long>>> seen_x, seen_y;
  for (const auto& u : m.units) {
    Rational sv = 0, tv = 0;
    for (const auto& b : u.source) {
      sv += b.volume();
      fine_cells(b, std::vector<long>(m.dim), [&](const std::vector<long>& c) {
        if (!seen_x.insert({b.tile, c}).second) note(a.injective_x, "X cell used twice in tile " + std::to_string(b.tile));
      });
    }
    for (const auto& b : u.target) {
      tv += b.volume();
      fine_cells(b, std::vector<long>(m.dim), [&](const std::vector<long>& c) {
        if (!seen_y.insert({b.tile, c}).second) note(a.injective_y, "Y cell used twice in tile " + std::to_string(b.tile));
      });
    }
    if (sv != tv) note(a.measure_preserved, "unit measures differ");
    if (u.target.size() != 1) note(a.levels_ok, "a unit has more than one target");
    if (u.dir == Direction::forth && (u.source.size() != 1 || u.source[0].level != u.stage || u.target[0].level != u.stage))
      note(a.levels_ok, "forth unit off its level");
    if (u.dir == Direction::back) {
      if (u.source.size() != (std::size_t{1} << m.dim) || u.target[0].level != u.stage) note(a.levels_ok, "back unit shape");
      for (const auto& b : u.source)
        if (b.level != u.stage + 1) note(a.levels_ok, "back unit source off its level");
    }
  }
  // coverage: after stage k, D_k is inside the domain on X tiles present
  // after the forth step, and is exactly the range on Y tiles
  auto covered = [&](const std::set<std::pair<std::size_t, std::vector<long>>>& seen, std::size_t tile,
                     const std::vector<long>& n_k, unsigned k) {
    bool all = true;
    BlockId b{tile, k, std::vector<long>(m.dim, 0)};
    while (all) {
      fine_cells(b, std::vector<long>(m.dim), [&](const std::vector<long>& c) { all = all && seen.count({tile, c}); });
      std::size_t i = m.dim;
      while (i > 0 && ++b.idx[i - 1] == n_k[i - 1]) b.idx[--i] = 0;
      if (i == 0) break;
    }
    return all;
  };
  const unsigned stages = static_cast<unsigned>(m.x_tiles_after_forth.size());
  for (unsigned k = 0; k < stages; ++k) {
    const QuadNum window_lo = QuadNum(1) - dyadic(k + 1), window_hi = QuadNum(1) - dyadic(k + 2);
    for (const auto* side : {&x, &y})
      for (std::size_t t = 0; t < side->size(); ++t)
        for (const auto& z : side->tile(t).zeta) {
          const QuadNum frac = QuadNum(block_counts(z, k)) * dyadic(k) / z;
          if (!(window_lo < frac) || window_hi < frac) note(a.coverage_ok, "coverage fraction " + frac.str() + " outside the coverage window");
        }
    for (std::size_t t = 0; t < m.x_tiles_after_forth[k]; ++t) {
      std::vector<long> n;
      for (const auto& z : x.tile(t).zeta) n.push_back(block_counts(z, k));
      if (!covered(seen_x, t, n, k)) note(a.coverage_ok, "X tile " + std::to_string(t) + " not covered at level " + std::to_string(k));
    }
    if (k < m.y_tiles_after_back.size())
      for (std::size_t t = 0; t < m.y_tiles_after_back[k]; ++t) {
        std::vector<long> n;
        for (const auto& z : y.tile(t).zeta) n.push_back(block_counts(z, k));
        if (!covered(seen_y, t, n, k)) note(a.coverage_ok, "Y tile " + std::to_string(t) + " not covered at level " + std::to_string(k));
      }
  }
  // the final range is exactly D_K on every Y tile
  if (!m.y_tiles_after_back.empty()) {
    const unsigned last = static_cast<unsigned>(m.y_tiles_after_back.size() - 1);
    std::size_t expected = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      std::size_t cells = 1;
      for (const auto& z : y.tile(t).zeta) cells *= static_cast<std::size_t>(block_counts(z, last)) << (fine - last);
      expected += cells;
    }
    if (expected != seen_y.size()) note(a.coverage_ok, "range on Y is not the level cover");
  }
  return a;
}

/// Induced map on orbit labels, when it is a bijection.
inline std::optional<std::map<std::size_t, std::size_t>> label_map(const BlockMap& m, const OrbitFragmentProvider& x,
                                                                   const OrbitFragmentProvider& y) {
  std::map<std::size_t, std::size_t> fwd, bwd;
  for (const auto& u : m.units)
    for (const auto& s : u.source)
      for (const auto& t : u.target) {
        const std::size_t a = x.tile(s.tile).label, b = y.tile(t.tile).label;
        if (fwd.emplace(a, b).first->second != b || bwd.emplace(b, a).first->second != a) return std::nullopt;
      }
  return fwd;
}

enum class Verdict { loe, hoe, whoe };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::loe: return "LOE";
    case Verdict::hoe: return "HOE";
    case Verdict::whoe: return "wHOE";
  }
  return "?";
}

/// Source and image measure of one basis set, tagged with its orbit label.
struct NormalizationSample {
  std::size_t label = 0;
  QuadNum source;
  QuadNum image;
};

struct NormalizationReport {
  std::map<std::size_t, QuadNum> ratio;  // per label
  Verdict verdict = Verdict::loe;
};

/// Ratio image/source per label; LOE when all are 1, HOE when all agree.
inline NormalizationReport verify_normalization(const std::vector<NormalizationSample>& samples) {
  NormalizationReport r;
  for (const auto& s : samples) {
    if (!(QuadNum(0) < s.source)) fail(Errc::precondition_violated, "basis set of measure zero");
    const QuadNum q = s.image / s.source;
    auto [it, fresh] = r.ratio.emplace(s.label, q);
    if (!fresh && it->second != q)
      fail(Errc::inconsistent_ratio, "label " + std::to_string(s.label) + " has ratios " + it->second.str() + " and " + q.str());
  }
  bool ones = true, equal = true;
  for (const auto& [label, q] : r.ratio) {
    ones = ones && q == QuadNum(1);
    equal = equal && q == r.ratio.begin()->second;
  }
  r.verdict = ones ? Verdict::loe : equal ? Verdict::hoe : Verdict::whoe;
  return r;
}

/// One sample per mapped unit, labelled by the source tile.
inline std::vector<NormalizationSample> normalization_samples(const BlockMap& m, const OrbitFragmentProvider& x) {
  std::vector<NormalizationSample> out;
  for (const auto& u : m.units) {
    Rational sv = 0, tv = 0;
    for (const auto& b : u.source) sv += b.volume();
    for (const auto& b : u.target) tv += b.volume();
    out.push_back({x.tile(u.source.at(0).tile).label, QuadNum(sv), QuadNum(tv)});
  }
  return out;
}

/// Tile-to-tile map between two regular tilings, a translation on each tile.
struct TileMap {
  std::vector<std::size_t> image;  // X tile index -> Y tile index
  std::vector<Point> shift;        // per X tile

  Point apply(const std::vector<PlacedTile>& x, const Point& p) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].rect.contains(p)) return p + shift[i];
    fail(Errc::precondition_violated, "point " + to_string(p) + " outside the tiled region");
  }
};

namespace detail {

inline std::vector<std::map<std::size_t, std::size_t>> theta_tables(const ThetaMatching& t) {
  std::vector<std::map<std::size_t, std::size_t>> out(t.pairs.size());
  for (std::size_t a = 1; a < t.pairs.size(); ++a)
    for (const auto& [one, other] : t.pairs[a]) out[a].emplace(one, other);
  return out;
}

}  // namespace detail

/// Extends a bijection of 1-tiles to every tile by phi(theta_a(c)) = theta_a(phi(c)).
inline TileMap regular_tiling_loe(const std::vector<PlacedTile>& x, const ThetaMatching& tx,
                                  const std::vector<PlacedTile>& y, const ThetaMatching& ty,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& seed) {
  TileMap m;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  m.image.assign(x.size(), none);
  m.shift.assign(x.size(), Point{});
  std::vector<char> hit(y.size(), 0);
  auto assign = [&](std::size_t a, std::size_t b) {
    if (a >= x.size() || b >= y.size()) fail(Errc::unknown_anchor, "tile index out of range");
    if (x[a].type != y[b].type)
      fail(Errc::type_mismatch, "tile of type " + x[a].type.str() + " paired with type " + y[b].type.str());
    if (m.image[a] != none || hit[b]) fail(Errc::precondition_violated, "tile mapped twice");
    m.image[a] = b;
    hit[b] = 1;
    m.shift[a] = y[b].rect.lo() - x[a].rect.lo();
  };
  for (const auto& [a, b] : seed) {
    if (a < x.size() && x[a].type.bits != 0) fail(Errc::type_mismatch, "seed must pair 1-tiles");
    assign(a, b);
  }
  const auto table = detail::theta_tables(ty);
  for (std::size_t type = 1; type < tx.pairs.size(); ++type)
    for (const auto& [one, other] : tx.pairs[type]) {
      if (m.image[one] == none) continue;
      auto it = table.at(type).find(m.image[one]);
      if (it == table[type].end()) fail(Errc::precondition_violated, "theta on Y is not defined at the image tile");
      assign(other, it->second);
    }
  return m;
}

/// phi(theta_a(c)) == theta_a(phi(c)) for every matched 1-tile with an image.
inline bool commutes_with_theta(const TileMap& m, const ThetaMatching& tx, const ThetaMatching& ty) {
  const auto table = detail::theta_tables(ty);
  for (std::size_t type = 1; type < tx.pairs.size(); ++type)
    for (const auto& [one, other] : tx.pairs[type]) {
      if (m.image[one] == static_cast<std::size_t>(-1)) continue;
      auto it = table.at(type).find(m.image[one]);
      if (it == table[type].end() || m.image[other] != it->second) return false;
    }
  return true;
}

/// One sample per mapped tile: its volume and the volume of its image.
inline std::vector<NormalizationSample> normalization_samples(const TileMap& m, const std::vector<PlacedTile>& x,
                                                              const std::vector<PlacedTile>& y) {
  std::vector<NormalizationSample> out;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (m.image[i] != static_cast<std::size_t>(-1))
      out.push_back({x[i].fragment, x[i].rect.volume(), y[m.image[i]].rect.volume()});
  return out;
}

}  // namespace rtile
