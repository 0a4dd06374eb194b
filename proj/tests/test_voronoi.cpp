#include <catch_amalgamated.hpp>

#include <random>
#include <tuple>

#include "rtile/voronoi.hpp"

using namespace rtile;

namespace {

Point p2(long x, long y) { return Point{QuadNum(x), QuadNum(y)}; }

// brute force over all nine lifts of the other point
double lifted_distance(double x0, double x1, double c0, double c1, double l) {
  double best = 1e300;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      best = std::min(best, std::max(std::abs(x0 - c0 - a * l), std::abs(x1 - c1 - b * l)));
  return best;
}

// midpoint grid over the torus [0, l)^2 with sites (0,0) and (sep,0):
// area strictly nearer each site, and area equidistant
std::tuple<double, double, double> split_oracle(double l, double sep, int n) {
  double s0 = 0, s1 = 0, tie = 0;
  const double cell = (l / n) * (l / n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = (i + 0.5) * l / n, y = (j + 0.5) * l / n;
      const double d0 = lifted_distance(x, y, 0, 0, l), d1 = lifted_distance(x, y, sep, 0, l);
      if (std::abs(d0 - d1) < 1e-12) tie += cell;
      else if (d0 < d1) s0 += cell;
      else s1 += cell;
    }
  return {s0, s1, tie};
}

}  // namespace

TEST_CASE("owner with tie-breaking", "[voronoi]") {
  Window t = Window::torus(2, QuadNum(10));
  CrossSection c(t, {p2(0, 0), p2(4, 0)});
  CHECK(voronoi_owner(c, p2(1, 1)) == 0);
  CHECK(voronoi_owner(c, p2(2, 0)) == 0);  // equidistant, lex-first wins
  REQUIRE(lifted_distance(8, 0, 0, 0, 10) < lifted_distance(8, 0, 4, 0, 10));
  CHECK(voronoi_owner(c, p2(8, 0)) == 0);

  // an injected order flips the tie
  CrossSection rev(t, {p2(0, 0), p2(4, 0)}, [](const Point& a, const Point& b) { return lex_less(b, a); });
  CHECK(voronoi_owner(rev, p2(2, 0)) == 1);
}

TEST_CASE("exact cell areas", "[voronoi]") {
  Window t4 = Window::torus(2, QuadNum(4));
  CrossSection grid(t4, {p2(0, 0), p2(2, 0), p2(0, 2), p2(2, 2)});
  for (std::size_t i = 0; i < 4; ++i) CHECK(voronoi_cell_measure(grid, i, CellMeasureMode::exact()).value == QuadNum(4));

  Window t3 = Window::torus(2, QuadNum(3));
  CHECK(voronoi_cell_measure(CrossSection(t3, {p2(1, 1)}), 0, CellMeasureMode::exact()).value == QuadNum(9));

  Window t8 = Window::torus(2, QuadNum(8));
  CrossSection two(t8, {p2(0, 0), p2(4, 0)});
  auto a0 = voronoi_cell_measure(two, 0, CellMeasureMode::exact()).value;
  auto a1 = voronoi_cell_measure(two, 1, CellMeasureMode::exact()).value;
  // sup-metric ties fill a region of positive area, all of it going to the lex-first point
  const auto [strict0, strict1, tied] = split_oracle(8, 4, 400);
  CHECK(strict0 + tied / 2 == Catch::Approx(32).epsilon(1e-3));
  CHECK(strict1 + tied / 2 == Catch::Approx(32).epsilon(1e-3));
  CHECK(a0.to_double() == Catch::Approx(strict0 + tied).epsilon(0.01));
  CHECK(a1.to_double() == Catch::Approx(strict1).epsilon(0.01));
  CHECK(a0 + a1 == QuadNum(64));
  auto mc = voronoi_cell_measure(two, 0, CellMeasureMode::montecarlo(20000, 5));
  CHECK(!mc.exact);
  CHECK(mc.samples == 20000);
  CHECK(mc.value.to_double() == Catch::Approx(a0.to_double()).epsilon(0.01));

  try {
    (void)voronoi_cell_measure(CrossSection(Window::torus(1, QuadNum(4)), {Point{QuadNum(0)}}), 0, CellMeasureMode::exact());
    FAIL("expected UnsupportedDim");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_dim);
  }
}

TEST_CASE("irrational coordinates use the sweep and still partition the torus", "[voronoi]") {
  Window t = Window::torus(2, QuadNum(4));
  CrossSection c(t, {p2(0, 0), Point{alpha(), QuadNum(1)}, Point{QuadNum(3), alpha() + QuadNum(1)}});
  QuadNum total;
  for (std::size_t i = 0; i < c.size(); ++i) total += voronoi_cell_measure(c, i, CellMeasureMode::exact()).value;
  CHECK(total == QuadNum(16));
}

TEST_CASE("lattice path and sweep agree", "[voronoi][property]") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 15; ++n) {
    Window t = Window::torus(2, QuadNum(6));
    std::vector<Point> pts;
    while (pts.size() < 3) {
      Point p{q_ratio(static_cast<long>(rng() % 12), 2), q_ratio(static_cast<long>(rng() % 12), 2)};
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    CrossSection c(t, pts);
    QuadNum total;
    for (std::size_t i = 0; i < c.size(); ++i) {
      auto fast = detail::measure_2d_lattice(c, i, t.domain());
      REQUIRE(fast.has_value());
      REQUIRE(*fast == detail::measure_2d_sweep(c, i, t.domain()));
      total += *fast;
    }
    REQUIRE(total == QuadNum(36));
  }
}

TEST_CASE("owners partition sampled points", "[voronoi][property]") {
  std::mt19937_64 rng(43);
  Window t = Window::torus(3, QuadNum(5));
  std::vector<Point> pts;
  for (int k = 0; k < 5; ++k)
    pts.push_back(Point{q_ratio(k, 1), q_ratio((3 * k) % 5, 1), q_ratio((2 * k + 1) % 5, 1)});
  pts.push_back(Point{q_ratio(5, 2), q_ratio(5, 2), q_ratio(5, 2)});
  CrossSection c(t, pts);
  for (int s = 0; s < 300; ++s) {
    Point x{q_ratio(static_cast<long>(rng() % 500), 100), q_ratio(static_cast<long>(rng() % 500), 100),
            q_ratio(static_cast<long>(rng() % 500), 100)};
    std::size_t owner = voronoi_owner(c, x);
    const QuadNum best = t.distance(x, c[owner]);
    for (std::size_t i = 0; i < c.size(); ++i) {
      REQUIRE(!(t.distance(x, c[i]) < best));
      if (i != owner && t.distance(x, c[i]) == best) REQUIRE(c.before(c[owner], c[i]));
    }
  }
}
