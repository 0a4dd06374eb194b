#include <catch_amalgamated.hpp>

#include <random>

#include "rtile/measures.hpp"

using namespace rtile;

namespace {

Point p1(const QuadNum& x) { return Point{x}; }

Rect interval(const QuadNum& a, const QuadNum& b) { return Rect(Point{a}, Point{b}); }

std::shared_ptr<const BoundedTiling> two_point_circle() {
  CrossSection c(Window::torus(1, QuadNum(2)), {p1(QuadNum(0)), p1(QuadNum(1))});
  return std::make_shared<const BoundedTiling>(BoundedTiling::rectangular(
      c, {interval(q_ratio(-1, 2), q_ratio(1, 2)), interval(q_ratio(1, 2), q_ratio(3, 2))}, Rect::centered(1, QuadNum(1))));
}

SectionMeasure random_measure(std::mt19937_64& rng, std::size_t n) {
  SectionMeasure nu;
  for (std::size_t i = 0; i < n; ++i) {
    Rational w(static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 12));
    w.canonicalize();
    nu.weights.push_back(w);
  }
  return nu;
}

// random partition of [0, L) into intervals of length >= 2, anchored at an
// interior point at least 1/2 from both ends
struct Cut1 {
  std::vector<QuadNum> anchors;
  std::vector<std::pair<QuadNum, QuadNum>> cells;
};

Cut1 random_cut(std::mt19937_64& rng, long length) {
  Cut1 out;
  long at = 0;
  while (at < length) {
    long len = 2 + static_cast<long>(rng() % 3);
    if (length - at - len < 2) len = length - at;
    const QuadNum lo(at), hi(at + len);
    out.cells.emplace_back(lo, hi);
    out.anchors.push_back(lo + q_ratio(1, 2) + q_ratio(static_cast<long>(rng() % (2 * len - 1)), 2));
    at += len;
  }
  return out;
}

struct RectLayout {
  std::vector<Point> anchors;
  std::vector<Rect> domains;
};

// a rectangular bounded tiling of the torus [0, L)^d as a product of cuts
RectLayout random_layout(std::mt19937_64& rng, std::size_t d, long length) {
  std::vector<Cut1> cuts;
  for (std::size_t k = 0; k < d; ++k) cuts.push_back(random_cut(rng, length));
  std::vector<Point> anchors;
  std::vector<Rect> domains;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Point c(d), lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      c[k] = cuts[k].anchors[idx[k]];
      lo[k] = cuts[k].cells[idx[k]].first;
      hi[k] = cuts[k].cells[idx[k]].second;
    }
    anchors.push_back(c);
    domains.emplace_back(lo, hi);
    std::size_t k = 0;
    while (k < d && ++idx[k] == cuts[k].cells.size()) idx[k++] = 0;
    if (k == d) break;
  }
  return {anchors, domains};
}

std::shared_ptr<const BoundedTiling> build(const RectLayout& l, std::size_t d, long length) {
  CrossSection c(Window::torus(d, QuadNum(length)), l.anchors);
  return std::make_shared<const BoundedTiling>(BoundedTiling::rectangular(c, l.domains, Rect::centered(d, QuadNum(length))));
}

std::shared_ptr<const BoundedTiling> random_rect_tiling(std::mt19937_64& rng, std::size_t d, long length) {
  return build(random_layout(rng, d, length), d, length);
}

// jittered grid of spacing 2 with Voronoi domains
std::shared_ptr<const BoundedTiling> jittered_voronoi(std::mt19937_64& rng, std::size_t d, long cells) {
  std::vector<Point> pts;
  std::vector<long> idx(d, 0);
  while (true) {
    Point p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = QuadNum(2 * idx[k]) + q_ratio(static_cast<long>(rng() % 2), 4);
    pts.push_back(p);
    std::size_t k = 0;
    while (k < d && ++idx[k] == cells) idx[k++] = 0;
    if (k == d) break;
  }
  CrossSection c(Window::torus(d, QuadNum(2 * cells)), pts);
  return std::make_shared<const BoundedTiling>(BoundedTiling::voronoi(c, Rect::centered(d, QuadNum(2))));
}

}  // namespace

TEST_CASE("xi on a two-point circle", "[measures]") {
  auto t = two_point_circle();
  CHECK(xi(interval(QuadNum(0), q_ratio(1, 4)), p1(QuadNum(0)), *t) == q_ratio(1, 4));
  CHECK(xi(interval(QuadNum(1), q_ratio(5, 4)), p1(QuadNum(0)), *t) == QuadNum(0));
  CHECK(xi(interval(QuadNum(-1), QuadNum(1)), p1(QuadNum(0)), *t) == QuadNum(1));
  // wrapping query
  CHECK(xi(interval(q_ratio(-1, 4), q_ratio(1, 4)), p1(QuadNum(0)), *t) == q_ratio(1, 2));
  try {
    (void)xi(interval(QuadNum(0), QuadNum(1)), p1(q_ratio(1, 3)), *t);
    FAIL("expected UnknownAnchor");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_anchor);
  }
}

TEST_CASE("lift and pull on a two-point circle", "[measures]") {
  auto t = two_point_circle();
  const SectionMeasure half{{Rational(1, 2), Rational(1, 2)}};
  auto mu = lift(half, t);
  CHECK(mu(interval(QuadNum(0), q_ratio(1, 4))) == q_ratio(1, 8));
  CHECK(lift(SectionMeasure::zero(2), t).total() == QuadNum(0));
  CHECK(mu.total() == QuadNum(1));

  const Rect u = Rect::centered(1, q_ratio(1, 4));
  auto leb = PhaseMeasure::lebesgue(t->window(), Rational(1, 2));
  CHECK(leb.total() == QuadNum(1));
  CHECK(pull(leb, t->section(), u) == half);
  CHECK(pull(PhaseMeasure::lebesgue(t->window(), 0), t->section(), u) == SectionMeasure::zero(2));
  CHECK(pull(mu, t->section(), u) == half);

  try {
    (void)pull(leb, t->section(), Rect::centered(1, QuadNum(1)));
    FAIL("expected NotLacunary");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_lacunary);
  }
}

TEST_CASE("product identity", "[measures]") {
  auto t = two_point_circle();
  const Rect u = Rect::centered(1, q_ratio(1, 4));
  CHECK(product_identity_check({{Rational(1, 2), Rational(1, 2)}}, t, u));
  CHECK(product_identity_check({{Rational(3, 4), Rational(1, 4)}}, t, u));

  CrossSection c(Window::torus(1, QuadNum(2)), {p1(QuadNum(0)), p1(QuadNum(1))});
  auto skewed = std::make_shared<const BoundedTiling>(BoundedTiling::rectangular(
      c, {interval(QuadNum(0), QuadNum(1)), interval(QuadNum(1), QuadNum(2))}, Rect::centered(1, QuadNum(1))));
  try {
    (void)product_identity_check({{Rational(1, 2), Rational(1, 2)}}, skewed, u);
    FAIL("expected PreconditionViolated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::precondition_violated);
  }
}

TEST_CASE("rectangular tilings are validated", "[measures]") {
  CrossSection c(Window::torus(1, QuadNum(2)), {p1(QuadNum(0)), p1(QuadNum(1))});
  const Rect v = Rect::centered(1, QuadNum(1));
  CHECK_THROWS_AS(BoundedTiling::rectangular(c, {interval(q_ratio(-1, 2), q_ratio(1, 2)), interval(QuadNum(0), QuadNum(1))}, v),
                  Error);
  CHECK_THROWS_AS(BoundedTiling::rectangular(c, {interval(q_ratio(-1, 2), q_ratio(1, 2)), interval(q_ratio(1, 2), q_ratio(5, 4))}, v),
                  Error);
  CHECK_THROWS_AS(BoundedTiling::rectangular(c, {interval(q_ratio(-1, 2), q_ratio(1, 2)), interval(q_ratio(1, 2), q_ratio(3, 2))},
                                             Rect::centered(1, q_ratio(1, 4))),
                  Error);
}

TEST_CASE("round trip through rectangular and Voronoi tilings", "[measures][property]") {
  std::mt19937_64 rng(83);
  for (std::size_t d = 1; d <= 2; ++d) {
    auto vor = jittered_voronoi(rng, d, d == 1 ? 6 : 3);
    for (int t = 0; t < 10; ++t) {
      auto rect = random_rect_tiling(rng, d, 10);
      const SectionMeasure nu = random_measure(rng, rect->size());
      for (const auto& u : {Rect::centered(d, q_ratio(1, 2)), Rect::centered(d, q_ratio(1, 4))}) {
        REQUIRE(pull(lift(nu, rect), rect->section(), u) == nu);
        REQUIRE(product_identity_check(nu, rect, u));
      }
      const SectionMeasure nv = random_measure(rng, vor->size());
      for (const auto& u : {Rect::centered(d, q_ratio(1, 2)), Rect::centered(d, q_ratio(3, 8))})
        REQUIRE(pull(lift(nv, vor), vor->section(), u) == nv);
    }
  }
}

TEST_CASE("lift agrees across tilings with the same domains", "[measures][property]") {
  // grid points with square domains are both Voronoi and rectangular
  std::mt19937_64 rng(89);
  for (std::size_t d = 1; d <= 2; ++d) {
    std::vector<Point> pts;
    std::vector<Rect> doms;
    for (long i = 0; i < 4; ++i)
      for (long j = 0; j < (d == 2 ? 4 : 1); ++j) {
        Point p = d == 1 ? Point{QuadNum(2 * i)} : Point{QuadNum(2 * i), QuadNum(2 * j)};
        pts.push_back(p);
        doms.push_back(Rect::centered(d, QuadNum(1)).translated(p));
      }
    CrossSection c(Window::torus(d, QuadNum(8)), pts);
    auto rect = std::make_shared<const BoundedTiling>(BoundedTiling::rectangular(c, doms, Rect::centered(d, QuadNum(2))));
    auto vor = std::make_shared<const BoundedTiling>(BoundedTiling::voronoi(c, Rect::centered(d, QuadNum(2))));
    for (int t = 0; t < 5; ++t) {
      const SectionMeasure nu = random_measure(rng, c.size());
      auto a = lift(nu, rect), b = lift(nu, vor);
      for (int q = 0; q < 20; ++q) {
        Point lo(d), hi(d);
        for (std::size_t k = 0; k < d; ++k) {
          lo[k] = q_ratio(static_cast<long>(rng() % 64), 8);
          hi[k] = lo[k] + q_ratio(1 + static_cast<long>(rng() % 40), 8);
        }
        REQUIRE(a(Rect(lo, hi)) == b(Rect(lo, hi)));
      }
    }
  }
}

TEST_CASE("lifted measures are translation invariant", "[measures][property]") {
  std::mt19937_64 rng(97);
  for (int t = 0; t < 20; ++t) {
    const RectLayout base = random_layout(rng, 2, 10);
    const Point shift{q_ratio(static_cast<long>(rng() % 80), 8), q_ratio(static_cast<long>(rng() % 80), 8)};
    RectLayout moved;
    const Window win = Window::torus(2, QuadNum(10));
    for (std::size_t i = 0; i < base.anchors.size(); ++i) {
      const Point c = win.reduce(base.anchors[i] + shift);
      moved.anchors.push_back(c);
      moved.domains.push_back(base.domains[i].translated(c - base.anchors[i]));
    }
    auto a = build(base, 2, 10), b = build(moved, 2, 10);
    const SectionMeasure nu = random_measure(rng, a->size());
    auto mu = lift(nu, a), mv = lift(nu, b);
    for (int q = 0; q < 20; ++q) {
      Point lo{q_ratio(static_cast<long>(rng() % 80), 8), q_ratio(static_cast<long>(rng() % 80), 8)};
      Point hi = lo + Point{q_ratio(1 + static_cast<long>(rng() % 60), 8), q_ratio(1 + static_cast<long>(rng() % 60), 8)};
      REQUIRE(mu(Rect(lo, hi)) == mv(Rect(lo, hi).translated(shift)));
    }
  }
}

TEST_CASE("mass ratio and label count", "[measures]") {
  auto t = two_point_circle();
  CHECK(mass_ratio(lift({{Rational(1, 2), Rational(1, 2)}}, t), {{Rational(1, 2), Rational(1, 2)}}) == QuadNum(1));
  CrossSection c(Window::torus(1, QuadNum(2)), {p1(QuadNum(0)), p1(QuadNum(1))});
  auto skewed = std::make_shared<const BoundedTiling>(BoundedTiling::rectangular(
      c, {interval(q_ratio(-1, 2), QuadNum(1)), interval(QuadNum(1), q_ratio(3, 2))}, Rect::centered(1, QuadNum(1))));
  CHECK(mass_ratio(lift({{Rational(1), Rational(0)}}, skewed), {{Rational(1), Rational(0)}}) == q_ratio(3, 2));
  CHECK(distinct_label_count({"a", "b", "a"}) == 2);
}
