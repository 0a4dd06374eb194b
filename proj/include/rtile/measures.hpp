#pragma once

#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtile/cross_section.hpp"
#include "rtile/error.hpp"
#include "rtile/geometry.hpp"
#include "rtile/voronoi.hpp"

namespace rtile {

/// Finite measure on a cross-section; weights[i] is the mass of point i.
struct SectionMeasure {
  std::vector<Rational> weights;

  static SectionMeasure zero(std::size_t n) { return {std::vector<Rational>(n, Rational(0))}; }
  Rational total() const {
    Rational t = 0;
    for (const auto& w : weights) t += w;
    return t;
  }
  bool operator==(const SectionMeasure&) const = default;
};

/// A partition of the window into domains W_c, one per cross-section point,
/// each inside c + V.
class BoundedTiling {
 public:
  enum class Kind { rect, voronoi };

  /// domains[i] is W_c for c = C[i], given in lifted coordinates around c
  /// (it may wrap on a torus).
  static BoundedTiling rectangular(CrossSection c, const std::vector<Rect>& domains, Rect body) {
    if (domains.size() != c.size()) fail(Errc::precondition_violated, "one domain per cross-section point");
    BoundedTiling t(Kind::rect, std::move(c), std::move(body));
    const Window& win = t.section_.window();
    const Point origin(win.dim(), QuadNum(0));
    QuadNum total;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      if (!t.body_.contains(domains[i].translated(Point(win.dim(), QuadNum(0)) - t.section_[i])))
        fail(Errc::precondition_violated, "domain " + domains[i].str() + " not inside c + V");
      t.pieces_.push_back(win.translate_pieces(origin, domains[i]));
      for (const auto& p : t.pieces_.back()) total += p.volume();
    }
    if (total != win.volume()) fail(Errc::precondition_violated, "domain volumes do not add up to the window");
    for (std::size_t i = 0; i < t.pieces_.size(); ++i)
      for (std::size_t j = i + 1; j < t.pieces_.size(); ++j)
        for (const auto& a : t.pieces_[i])
          for (const auto& b : t.pieces_[j])
            if (a.intersects(b)) fail(Errc::precondition_violated, "domains " + a.str() + " and " + b.str() + " overlap");
    return t;
  }

  /// Voronoi domains; V must witness cocompactness so every cell sits in c + V.
  static BoundedTiling voronoi(CrossSection c, Rect body, std::size_t mc_samples = 200000) {
    if (!body.is_symmetric()) fail(Errc::precondition_violated, "Voronoi body must be symmetric");
    if (!is_cocompact(c, body)) fail(Errc::precondition_violated, "cross-section is not V-cocompact");
    BoundedTiling t(Kind::voronoi, std::move(c), std::move(body));
    t.samples_ = mc_samples;
    return t;
  }

  Kind kind() const { return kind_; }
  const CrossSection& section() const { return section_; }
  const Window& window() const { return section_.window(); }
  const Rect& body() const { return body_; }
  std::size_t size() const { return section_.size(); }
  bool exact() const { return kind_ == Kind::rect || window().dim() <= 2; }

  /// lambda(W_i intersected with A); A may wrap on a torus.
  QuadNum overlap(std::size_t i, const Rect& a) const {
    if (i >= size()) fail(Errc::unknown_anchor, "no such cross-section point");
    if (kind_ == Kind::voronoi) {
      bool near = false;
      for (const auto& piece : window().translate_pieces(Point(window().dim(), QuadNum(0)), a))
        for (const auto& cell : window().translate_pieces(section_[i], body_)) near = near || piece.intersects(cell);
      if (!near) return QuadNum(0);
      if (window().dim() > 2) {
        QuadNum total;
        for (const auto& piece : window().translate_pieces(Point(window().dim(), QuadNum(0)), a))
          total += voronoi_overlap_montecarlo(section_, i, piece, samples_, 0x5eed + i).value;
        return total;
      }
      const std::string key = a.str();
      {
        std::lock_guard lock(cache_->mu);
        if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second[i];
      }
      auto all = voronoi_overlaps(section_, a);
      std::lock_guard lock(cache_->mu);
      return cache_->values.emplace(key, std::move(all)).first->second[i];
    }
    QuadNum total;
    for (const auto& q : window().translate_pieces(Point(window().dim(), QuadNum(0)), a))
      for (const auto& p : pieces_[i]) total += overlap_volume(p, q);
    return total;
  }

  QuadNum domain_volume(std::size_t i) const { return overlap(i, window().domain()); }

 private:
  BoundedTiling(Kind k, CrossSection c, Rect body) : kind_(k), section_(std::move(c)), body_(std::move(body)) {}

  Kind kind_;
  CrossSection section_;
  Rect body_;
  std::vector<std::vector<Rect>> pieces_;
  std::size_t samples_ = 0;
  struct Cache {
    std::mutex mu;
    std::unordered_map<std::string, std::vector<QuadNum>> values;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Piecewise-constant density over the domains of a bounded tiling.
struct PhaseMeasure {
  std::shared_ptr<const BoundedTiling> tiling;
  std::vector<Rational> density;

  /// c * Lebesgue on the whole window.
  static PhaseMeasure lebesgue(const Window& win, const Rational& c = 1) {
    const std::size_t d = win.dim();
    Point big(d);
    for (std::size_t i = 0; i < d; ++i) big[i] = win.domain().side(i);
    const Point zero(d, QuadNum(0));
    CrossSection one(win, {win.domain().lo()});
    auto t = BoundedTiling::rectangular(one, {win.domain()}, Rect(zero - big, big));
    return {std::make_shared<const BoundedTiling>(std::move(t)), {c}};
  }

  QuadNum operator()(const Rect& a) const {
    QuadNum total;
    for (std::size_t i = 0; i < density.size(); ++i)
      if (density[i] != 0) total += QuadNum(density[i]) * tiling->overlap(i, a);
    return total;
  }

  QuadNum total() const { return (*this)(tiling->window().domain()); }
};

inline QuadNum xi(const Rect& a, const Point& c, const BoundedTiling& t) {
  auto i = t.section().index_of(c);
  if (!i) fail(Errc::unknown_anchor, "point " + to_string(c) + " is not in the cross-section");
  return t.overlap(*i, a);
}

/// mu_nu(A) = sum_c nu(c) * xi(A, c)
inline PhaseMeasure lift(const SectionMeasure& nu, std::shared_ptr<const BoundedTiling> t) {
  if (nu.weights.size() != t->size()) fail(Errc::precondition_violated, "measure and tiling sizes differ");
  for (const auto& w : nu.weights)
    if (w < 0) fail(Errc::precondition_violated, "negative weight");
  return {std::move(t), nu.weights};
}

namespace detail {

inline Rational to_rational(const QuadNum& q, const char* what) {
  if (!q.is_rational()) fail(Errc::precondition_violated, std::string(what) + " is irrational: " + q.str());
  return q.rat();
}

}  // namespace detail

/// nu_mu({c}) = mu(c + U) / lambda(U)
inline SectionMeasure pull(const PhaseMeasure& mu, const CrossSection& c, const Rect& u) {
  if (!is_lacunary(c, u)) fail(Errc::not_lacunary, "translates c + U overlap");
  const QuadNum vol = u.volume();
  SectionMeasure out;
  for (const auto& p : c.points()) out.weights.push_back(detail::to_rational(mu(u.translated(p)) / vol, "pulled weight"));
  return out;
}

/// Checks mu_nu restricted to U.C equals lambda|_U x nu on the product boxes
/// (c + A) for A = U and each half-split sub-box of U.
inline bool product_identity_check(const SectionMeasure& nu, std::shared_ptr<const BoundedTiling> t, const Rect& u) {
  const CrossSection& c = t->section();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (t->overlap(i, u.translated(c[i])) != u.volume())
      fail(Errc::precondition_violated, "c + U not inside W_c for c = " + to_string(c[i]));
  const PhaseMeasure mu = lift(nu, t);
  const std::size_t d = u.dim();
  std::vector<Rect> basis{u};
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Point lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      const QuadNum mid = (u.lo(k) + u.hi(k)) * q_ratio(1, 2);
      lo[k] = (mask >> k & 1) ? mid : u.lo(k);
      hi[k] = (mask >> k & 1) ? u.hi(k) : mid;
    }
    basis.emplace_back(lo, hi);
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    for (const auto& a : basis)
      if (mu(a.translated(c[i])) != a.volume() * QuadNum(nu.weights[i])) return false;
  return true;
}

/// mu(X) / nu_mu(C); not 1 in general.
inline QuadNum mass_ratio(const PhaseMeasure& mu, const SectionMeasure& nu) {
  if (nu.total() == 0) fail(Errc::precondition_violated, "section measure has zero mass");
  return mu.total() / QuadNum(nu.total());
}

/// Ergodicity bookkeeping: the number of distinct orbit-fragment labels.
inline std::size_t distinct_label_count(const std::vector<std::string>& labels) {
  return std::set<std::string>(labels.begin(), labels.end()).size();
}

}  // namespace rtile
