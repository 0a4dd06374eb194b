#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "rtile/towers.hpp"

using namespace rtile;

namespace {

const double kKappa = 1 + std::sqrt(2.0);

// every canonical node of [lo, lo + n kappa) by direct enumeration
std::vector<double> node_list(double lo, long n) {
  std::vector<double> out;
  for (long j = 0; j <= n; ++j) {
    out.push_back(lo + j * kKappa);
    if (j < n) out.push_back(lo + j * kKappa + 1);
  }
  return out;
}

double nearest_node(const std::vector<double>& nodes, double x) {
  double best = nodes.front();
  for (double v : nodes)
    if (std::abs(v - x) < std::abs(best - x) - 1e-12) best = v;
  return best;
}

TowerSpec two_level_line() {
  TowerSpec s;
  s.dim = 1;
  s.levels.push_back({QuadNum(0), kappa(), kappa(), Rational(1, 2)});
  s.levels.push_back({QuadNum(3) * kappa(), QuadNum(8) * kappa(), QuadNum(8) * kappa(), Rational(1, 4)});
  return s;
}

}  // namespace

TEST_CASE("standard spec validates", "[towers]") {
  for (std::size_t depth = 1; depth <= 4; ++depth) {
    auto s = TowerSpec::standard(2, depth);
    CHECK(validate_spec(s).empty());
    for (std::size_t k = 1; k <= depth; ++k) {
      // least kappa-multiple above N + 2 kappa, recomputed in doubles
      const double need = static_cast<double>(n_of_eps(s.at(k).eps)) + 2 * kKappa;
      const double b = s.at(k).b.to_double();
      CHECK(b >= need - 1e-9);
      CHECK(b - kKappa < need);
    }
  }
}

TEST_CASE("spec violations are reported", "[towers]") {
  auto s = TowerSpec::standard(1, 2);
  auto bad_b = s;
  bad_b.levels[0].b += QuadNum(1);
  CHECK(!validate_spec(bad_b).empty());

  auto bad_l = s;
  bad_l.levels[1].l = bad_l.levels[1].b + bad_l.levels[0].l;
  bad_l.levels[1].btilde = bad_l.levels[1].l;
  auto v = validate_spec(bad_l);
  CHECK(std::any_of(v.begin(), v.end(), [](const std::string& m) { return m.find("btilde") != std::string::npos; }));

  auto bad_eps = s;
  bad_eps.levels[1].eps = bad_eps.levels[0].eps;
  CHECK(!validate_spec(bad_eps).empty());
}

TEST_CASE("two-level family on a line", "[towers]") {
  Window w = Window::box(Rect(Point{QuadNum(0)}, Point{QuadNum(40) * kappa()}));
  auto f = build_towers(w, two_level_line());
  auto a = audit_towers(f);
  INFO((a.failures.empty() ? "" : a.failures.front()));
  CHECK(a.ok());
  REQUIRE(f.level(2).size() >= 1);
  // direct containment in doubles
  for (std::size_t i = 0; i < f.level(1).size(); ++i) {
    const double c = f.level(1)[i].anchor[0].to_double();
    const double p = f.level(2)[*f.level(1)[i].parent].anchor[0].to_double();
    CHECK(c - kKappa >= p - 5 * kKappa - 1e-9);
    CHECK(c + kKappa <= p + 5 * kKappa + 1e-9);
  }
  CHECK(is_lacunary(f.section(1), f.spec.square(1)));
  CHECK(is_lacunary(f.section(2), f.spec.square(2)));
}

TEST_CASE("degenerate depths", "[towers]") {
  auto one = TowerSpec::standard(2, 1);
  Window w = Window::box(Rect::cube(2, QuadNum(0), QuadNum(4) * one.at(1).l));
  auto f = build_towers(w, one);
  CHECK(f.levels.size() == 1);
  CHECK(f.level(1).size() == 4);
  CHECK(audit_towers(f).ok());
  CHECK(audit_towers(f).covered_fraction == QuadNum(1));

  auto none = build_towers(w, TowerSpec{2, kappa(), {}});
  CHECK(none.levels.empty());

  try {
    (void)build_towers(Window::box(Rect::cube(2, QuadNum(0), QuadNum(10))), one);
    FAIL("expected WindowTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::window_too_small);
  }
}

TEST_CASE("snapping to canonical nodes", "[towers]") {
  const Rect parent(Point{QuadNum(0)}, Point{QuadNum(10) * kappa()});
  const auto nodes = node_list(0, 10);

  // centred child
  const QuadNum mid = QuadNum(5) * kappa();
  const Rect child(Point{mid - kappa()}, Point{mid + kappa()});
  auto s = snap_windows(parent, {child});
  CHECK(!s.pushed);
  CHECK(s.windows[0].lo(0).to_double() == Catch::Approx(nearest_node(nodes, child.lo(0).to_double())));
  CHECK(abs(s.windows[0].lo(0) - child.lo(0)) <= kappa() * q_ratio(1, 2));
  CHECK(s.windows[0].side(0) == child.side(0));

  // already on the grid
  const Rect on(Point{QuadNum(2) * kappa() + QuadNum(1)}, Point{QuadNum(4) * kappa() + QuadNum(1)});
  CHECK(snap_windows(parent, {on}).windows[0] == on);

  // two children two cells apart
  const Rect a(Point{q_ratio(13, 10)}, Point{q_ratio(13, 10) + QuadNum(2) * kappa()});
  const Rect b(Point{a.hi(0) + QuadNum(2)}, Point{a.hi(0) + QuadNum(2) + QuadNum(2) * kappa()});
  auto two = snap_windows(parent, {a, b});
  CHECK(!two.windows[0].intersects(two.windows[1]));
  for (std::size_t i = 0; i < 2; ++i) {
    const Rect& c = i ? b : a;
    CHECK(two.windows[i].lo(0).to_double() == Catch::Approx(nearest_node(nodes, c.lo(0).to_double())));
    CHECK(parent.contains(two.windows[i]));
  }
}

TEST_CASE("snapped windows stay disjoint and close", "[towers][property]") {
  std::mt19937_64 rng(53);
  for (int n = 0; n < 40; ++n) {
    const Rect parent = Rect::cube(2, QuadNum(0), QuadNum(20) * kappa());
    std::vector<Rect> kids;
    for (int t = 0; t < 30 && kids.size() < 6; ++t) {
      Point lo{q_ratio(static_cast<long>(rng() % 3500), 100), q_ratio(static_cast<long>(rng() % 3500), 100)};
      Rect r(lo, lo + Point{QuadNum(4) * kappa(), QuadNum(4) * kappa()});
      if (!parent.contains(r)) continue;
      if (std::any_of(kids.begin(), kids.end(), [&](const Rect& k) { return k.intersects(r); })) continue;
      kids.push_back(r);
    }
    auto s = snap_windows(parent, kids);
    REQUIRE(!s.pushed);
    const CanonicalGrid grid{parent};
    for (std::size_t i = 0; i < kids.size(); ++i) {
      REQUIRE(parent.contains(s.windows[i]));
      for (std::size_t a = 0; a < 2; ++a) {
        REQUIRE(grid.node_index(a, s.windows[i].lo(a)).has_value());
        REQUIRE(grid.node_index(a, s.windows[i].hi(a)).has_value());
        REQUIRE(abs(s.windows[i].lo(a) - kids[i].lo(a)) <= kappa() * q_ratio(1, 2));
      }
      for (std::size_t j = i + 1; j < kids.size(); ++j) REQUIRE(!s.windows[i].intersects(s.windows[j]));
    }
  }
}

TEST_CASE("base level is canonical with no shift", "[towers]") {
  auto spec = TowerSpec::standard(2, 1);
  Window w = Window::box(Rect::cube(2, QuadNum(0), QuadNum(4) * spec.at(1).l));
  auto f = build_towers(w, spec);
  auto st = base_level(f);
  for (std::size_t i = 0; i < f.level(1).size(); ++i) {
    const auto canon = canonical_tiling(f.core(1, i));
    REQUIRE(st.region_tiles[i].size() == canon.size());
    for (std::size_t n = 0; n < canon.size(); ++n) CHECK(st.tiles[st.region_tiles[i][n]].rect == canon.tiling()[n].rect);
  }
  CHECK(st.ledger.max_total() == QuadNum(0));
}

TEST_CASE("limit tiling on a line alternates with equal counts", "[towers]") {
  auto spec = TowerSpec::standard(1, 2);
  Window w = Window::box(Rect(Point{QuadNum(0)}, Point{QuadNum(4) * spec.at(2).l}));
  auto f = build_towers(w, spec);
  auto lt = limit_tiling(f);
  REQUIRE(lt.fragments.size() == f.level(2).size());
  for (const auto& fr : lt.fragments) {
    CHECK(fr.tiling.tiling().audit().ok());
    auto counts = fr.tiling.type_counts();
    CHECK(counts[0] == counts[1]);
  }
  CHECK(lt.ledger.max_own(1) <= QuadNum(spec.at(1).eps));
}

TEST_CASE("limit tiling in the plane", "[towers]") {
  auto spec = TowerSpec::standard(2, 2);
  Window w = Window::box(Rect::cube(2, QuadNum(0), QuadNum(4) * spec.at(2).l));
  auto f = build_towers(w, spec, 7);
  REQUIRE(audit_towers(f).ok());
  auto lt = limit_tiling(f);
  CHECK(!lt.pushed);

  for (const auto& fr : lt.fragments) {
    auto audit = fr.tiling.tiling().audit();
    INFO(audit.detail);
    CHECK(audit.ok());
    for (const auto& t : fr.tiling.tiling().tiles())
      for (std::size_t a = 0; a < 2; ++a) CHECK((t.rect.side(a) == QuadNum(1) || t.rect.side(a) == alpha()));
  }

  // equal type counts inside every level-1 and level-2 region, counted by containment
  for (std::size_t k = 1; k <= 2; ++k)
    for (std::size_t i = 0; i < f.level(k).size(); ++i) {
      const Rect region = LimitTiling::region(f, lt.ledger, k, i);
      std::vector<std::size_t> counts(4, 0);
      for (const auto& t : lt.tiles)
        if (region.contains(t.rect)) ++counts[t.type.bits];
      CHECK(counts[0] > 0);
      CHECK(std::set<std::size_t>(counts.begin(), counts.end()).size() == 1);
    }

  // ledger bounds
  QuadNum bound;
  for (std::size_t k = 1; k <= 2; ++k) {
    CHECK(lt.ledger.max_own(k) <= QuadNum(spec.at(k).eps));
    bound += QuadNum(spec.at(k).eps);
  }
  CHECK(lt.ledger.max_total() <= bound);

  // theta: a bijection onto the right type, inside one fragment
  for (std::uint32_t a = 1; a < 4; ++a) {
    std::set<std::size_t> ones, others;
    for (const auto& [one, other] : lt.theta.pairs[a]) {
      CHECK(lt.tiles[one].type.bits == 0);
      CHECK(lt.tiles[other].type.bits == a);
      CHECK(lt.tiles[one].fragment == lt.tiles[other].fragment);
      ones.insert(one);
      others.insert(other);
    }
    std::size_t n_one = 0, n_a = 0;
    for (const auto& t : lt.tiles) {
      n_one += t.type.bits == 0;
      n_a += t.type.bits == a;
    }
    CHECK(ones.size() == n_one);
    CHECK(others.size() == n_a);
  }
  const std::size_t sample = lt.theta.pairs[3].front().first;
  CHECK(lt.theta.inverse(3, *lt.theta.apply(3, sample)) == sample);
}
