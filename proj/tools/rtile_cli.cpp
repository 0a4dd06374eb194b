// rtile: command-line front end.  Every run is determined by its flags and
// seed; JSON output is byte-stable.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rtile/cross_section.hpp"
#include "rtile/diophantine.hpp"
#include "rtile/loe.hpp"
#include "rtile/measures.hpp"
#include "rtile/serialize.hpp"
#include "rtile/svg.hpp"
#include "rtile/tiling.hpp"
#include "rtile/towers.hpp"

using namespace rtile;

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* v = std::getenv("RT_LOG");
  if (!v) return LogLevel::quiet;
  const std::string s(v);
  if (s == "debug") return LogLevel::debug;
  if (s == "info") return LogLevel::info;
  return LogLevel::quiet;
}

void log(LogLevel at, const std::string& msg) {
  static const LogLevel level = log_level();
  if (static_cast<int>(at) <= static_cast<int>(level)) std::cerr << "[rtile] " << msg << '\n';
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string svg;
  std::string format = "json";
};

struct Outcome {
  Json result;
  bool pass = true;
};

bool looks_quad(const Json& j) { return j.is_object() && j.size() == 2 && j.contains("rat") && j.contains("irr"); }

void emit(const Common& c, const std::string& command, const Outcome& o) {
  Json doc{{"schema", kSchema}, {"command", command}, {"seed", c.seed}, {"pass", o.pass}, {"result", o.result}};
  std::ostringstream text;
  if (c.format == "text") {
    text << command << ": " << (o.pass ? "PASS" : "FAIL") << '\n';
    for (const auto& [key, value] : o.result.items()) {
      if (looks_quad(value)) text << key << " = " << quad_from_json(value).str() << '\n';
      else if (value.is_primitive()) text << key << " = " << value.dump() << '\n';
      else text << key << " = <" << value.size() << " entries>\n";
    }
  } else {
    text << doc.dump(2) << '\n';
  }
  if (c.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(c.out);
    if (!f) fail(Errc::precondition_violated, "cannot write " + c.out);
    f << text.str();
    log(LogLevel::info, "wrote " + c.out);
  }
}

// cross-section ---------------------------------------------------------------

struct SectionArgs {
  std::size_t d = 2;
  std::string side = "10";
  std::string radius = "1";
  unsigned rounds = 6;
};

Outcome run_cross_section(const Common& c, const SectionArgs& a) {
  Window t = Window::torus(a.d, parse_quad(a.side));
  const Rect u = Rect::centered(a.d, parse_quad(a.radius));
  LacunaryConfig cfg{u, t.domain(), CandidateStream::over(t, c.seed == 1 ? 0 : c.seed)};
  auto ext = extend_to_maximal(CrossSection(t, {}), cfg, a.rounds);
  auto cert = cocompactness_certificate(ext.section, u, ext.final_mesh);
  Outcome o;
  const bool lacunary = is_lacunary(ext.section, u);
  o.result["window"] = to_json(t.domain());
  o.result["points"] = to_json(ext.section)["points"];
  o.result["size"] = ext.section.size();
  o.result["lacunarity_body"] = to_json(u);
  o.result["lacunary"] = lacunary;
  o.result["cocompactness_radius_certificate"] = cert ? to_json(cert->radius) : Json(nullptr);
  o.pass = lacunary && cert.has_value();
  if (!c.svg.empty() && a.d == 2) {
    SvgCanvas svg(t.domain());
    for (const auto& p : ext.section.points())
      for (const auto& piece : t.translate_pieces(p, u)) svg.rect(piece, "#5fa8d3", "#0d3b66", 0.8, 0.6);
    svg.save(c.svg);
  }
  return o;
}

// measures --------------------------------------------------------------------

struct MeasureArgs {
  std::size_t d = 2;
  long n = 3;            // grid points per axis
  std::string step = "2";
  unsigned trials = 5;
};

Outcome run_measures(const Common& c, const MeasureArgs& a) {
  const QuadNum s = parse_quad(a.step);
  Window t = Window::torus(a.d, s * QuadNum(a.n));
  std::vector<Point> pts;
  std::vector<Rect> domains;
  Point idx(a.d, QuadNum(0));
  const Point half(a.d, s * q_ratio(1, 2));
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == a.d) {
      pts.push_back(idx);
      domains.emplace_back(idx - half, idx + half);
      return;
    }
    for (long j = 0; j < a.n; ++j) {
      idx[i] = s * QuadNum(j);
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  CrossSection sec(t, pts);
  const Rect v = Rect::centered(a.d, s);
  auto rect_t = std::make_shared<const BoundedTiling>(BoundedTiling::rectangular(sec, domains, v));
  auto vor_t = std::make_shared<const BoundedTiling>(BoundedTiling::voronoi(sec, v));
  const Rect u1 = Rect::centered(a.d, s * q_ratio(1, 4));
  const Rect u2 = Rect::centered(a.d, s * q_ratio(1, 2));
  std::mt19937_64 rng(c.seed);
  Outcome o;
  Json trials = Json::array();
  for (unsigned n = 0; n < a.trials; ++n) {
    SectionMeasure nu;
    for (std::size_t i = 0; i < sec.size(); ++i) nu.weights.push_back(Rational(static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 9)));
    for (auto& w : nu.weights) w.canonicalize();
    Json row;
    bool ok = true;
    for (const auto& [name, tiling] : {std::pair{"rect", rect_t}, std::pair{"voronoi", vor_t}}) {
      if (a.d > 2 && tiling->kind() == BoundedTiling::Kind::voronoi) continue;
      const auto mu = lift(nu, tiling);
      // lift: mu(A) against sum_c nu(c) xi(A, c), for A = the window and each c + U
      Json lift_rows = Json::array(), pull_rows = Json::array();
      auto lift_pair = [&](const Rect& area) {
        QuadNum direct;
        for (std::size_t i = 0; i < sec.size(); ++i) direct += QuadNum(nu.weights[i]) * xi(area, sec[i], *tiling);
        const QuadNum lifted = mu(area);
        ok = ok && direct == lifted;
        return Json{{"area", to_json(area)}, {"mu", to_json(lifted)}, {"sum_nu_xi", to_json(direct)}};
      };
      lift_rows.push_back(lift_pair(t.domain()));
      for (std::size_t i = 0; i < sec.size(); ++i) lift_rows.push_back(lift_pair(u1.translated(sec[i])));
      // pull: mu(c + U) / lambda(U) against nu(c), for two bodies U
      for (const Rect* u : {&u1, &u2}) {
        const auto back = pull(mu, sec, *u);
        Json pts = Json::array();
        for (std::size_t i = 0; i < sec.size(); ++i)
          pts.push_back(Json{{"nu", to_json(nu.weights[i])}, {"pulled", to_json(back.weights[i])}});
        pull_rows.push_back(Json{{"body", to_json(*u)}, {"points", pts}});
        ok = ok && back == nu;
      }
      row[name] = Json{{"lift", lift_rows}, {"pull", pull_rows}};
    }
    row["pass"] = ok;
    row["total"] = to_json(nu.total());
    trials.push_back(row);
    o.pass = o.pass && ok;
  }
  o.result["points"] = sec.size();
  o.result["trials"] = trials;
  return o;
}

// approx / partition / extend -------------------------------------------------

Outcome run_approx(const std::string& x, const std::string& eps) {
  const Rational e = parse_quad(eps).rat();
  Outcome o;
  o.result = to_json(approx(parse_quad(x), e));
  o.result["n_of_eps"] = n_of_eps(e);
  return o;
}

Outcome run_partition(const std::string& len, const std::string& start) {
  Outcome o;
  o.result = to_json(partition_exact(parse_quad(len), parse_quad(start)));
  return o;
}

Outcome run_extend(const std::string& a, long k, long k_outer, const std::string& eps) {
  auto ext = extend_interval(parse_quad(a), k, k_outer, parse_quad(eps).rat());
  Outcome o;
  o.result["delta"] = to_json(ext.delta);
  o.result["m1"] = ext.m1;
  o.result["m2"] = ext.m2;
  o.result["before"] = to_json(ext.before);
  o.result["inner"] = to_json(ext.inner);
  o.result["after"] = to_json(ext.after);
  return o;
}

// towers ----------------------------------------------------------------------

struct TowerArgs {
  std::size_t d = 2;
  std::size_t levels = 3;
  long gap = 2;
  std::vector<std::string> eps;  // empty: 2^-k
  bool tiles = false;
};

TowerFamily standard_family(const TowerArgs& a, std::uint64_t seed) {
  const std::size_t d = a.d, levels = a.eps.empty() ? a.levels : a.eps.size();
  std::vector<Rational> eps;
  for (const auto& e : a.eps) eps.push_back(parse_quad(e).rat());
  auto spec = eps.empty() ? TowerSpec::standard(d, levels, a.gap) : TowerSpec::with_eps(d, eps, a.gap);
  if (auto v = validate_spec(spec); !v.empty()) fail(Errc::precondition_violated, "spec invalid: " + v.front());
  const QuadNum side = levels ? QuadNum(4) * spec.at(levels).l : QuadNum(1);
  return build_towers(Window::box(Rect::cube(d, QuadNum(0), side)), spec, seed);
}

void draw_tiling(const TowerFamily& f, const LimitTiling& lt, const std::string& path) {
  SvgCanvas svg(f.window.domain(), 1000);
  for (const auto& t : lt.tiles) svg.rect(t.rect, type_colour(t.type.bits), "#222", 0.2);
  for (std::size_t k = 1; k <= f.levels.size(); ++k)
    for (std::size_t i = 0; i < f.level(k).size(); ++i)
      svg.rect(LimitTiling::region(f, lt.ledger, k, i), "none", k % 2 ? "#c0392b" : "#1e8449", 1.0 + k, 0.0);
  svg.save(path);
}

Outcome run_towers(const Common& c, const TowerArgs& a) {
  auto f = standard_family(a, c.seed);
  log(LogLevel::info, "family built");
  auto audit = audit_towers(f);
  auto lt = limit_tiling(f);
  log(LogLevel::info, std::to_string(lt.tiles.size()) + " tiles laid");
  Outcome o;
  o.result["spec"] = to_json(f.spec);
  o.result["family"] = to_json(f);
  o.result["audit"] = to_json(audit);
  bool tiling_ok = true, counts_ok = true;
  Json fragments = Json::array();
  for (const auto& fr : lt.fragments) {
    const auto pa = fr.tiling.tiling().audit();
    const auto counts = fr.tiling.type_counts();
    const bool equal = std::all_of(counts.begin(), counts.end(), [&](std::size_t n) { return n == counts[0]; });
    tiling_ok = tiling_ok && pa.ok();
    counts_ok = counts_ok && equal;
    fragments.push_back(Json{{"label", fr.label}, {"tiles", fr.tiling.size()}, {"partition", pa.ok()}, {"type_counts", counts}});
  }
  QuadNum eps_sum;
  for (std::size_t k = 1; k <= f.spec.depth(); ++k) eps_sum += QuadNum(f.spec.at(k).eps);
  const bool shifts_ok = lt.ledger.own.empty() || !(eps_sum < lt.ledger.max_total());
  o.result["fragments"] = fragments;
  o.result["ledger"] = to_json(lt.ledger);
  o.result["shift_bound"] = to_json(eps_sum);
  o.result["snap_fallback_used"] = lt.pushed;
  if (a.tiles) o.result["tiling"] = to_json(lt);
  o.pass = audit.ok() && tiling_ok && counts_ok && shifts_ok;
  if (!c.svg.empty() && a.d == 2) draw_tiling(f, lt, c.svg);
  return o;
}

// loe -------------------------------------------------------------------------

struct LoeArgs {
  std::size_t d = 2;
  std::size_t tiles = 20;
  std::size_t labels = 4;
  unsigned levels = 2;
  bool units = false;
};

Outcome run_loe(const Common& c, const LoeArgs& a) {
  auto x = OrbitFragmentProvider::random(a.d, a.tiles, a.labels, c.seed);
  auto y = OrbitFragmentProvider::random(a.d, a.tiles, a.labels, c.seed + 0x9E37);
  auto m = run_back_and_forth(x, y, identity_seed(a.tiles), a.levels);
  auto audit = audit_block_map(m, x, y);
  auto report = verify_normalization(normalization_samples(m, x));
  Outcome o;
  Json stages = Json::array();
  for (unsigned k = 0; k <= a.levels; ++k)
    for (Direction dir : {Direction::forth, Direction::back}) {
      std::size_t units = 0;
      Rational source = 0, image = 0;
      for (const auto& u : m.units)
        if (u.stage == k && u.dir == dir) {
          ++units;
          for (const auto& b : u.source) source += b.volume();
          for (const auto& b : u.target) image += b.volume();
        }
      stages.push_back(Json{{"stage", k}, {"dir", to_string(dir)}, {"units", units},
                            {"source_measure", to_json(source)}, {"image_measure", to_json(image)}});
    }
  o.result["stages"] = stages;
  o.result["x_tiles"] = x.size();
  o.result["y_tiles"] = y.size();
  o.result["audit"] = Json{{"ok", audit.ok()}, {"injective_x", audit.injective_x}, {"injective_y", audit.injective_y},
                           {"measure_preserved", audit.measure_preserved}, {"levels_ok", audit.levels_ok},
                           {"coverage_ok", audit.coverage_ok}, {"detail", audit.detail}};
  o.result["normalization"] = to_json(report);
  if (a.units) o.result["map"] = to_json(m);
  o.pass = audit.ok() && report.verdict == Verdict::loe;
  if (!c.svg.empty() && a.d == 2) {
    QuadNum right(6 * static_cast<long>(std::max(x.size(), y.size())));
    SvgCanvas svg(Rect(Point{QuadNum(0), QuadNum(0)}, Point{right, QuadNum(12)}), 1400);
    const Point lift{QuadNum(0), QuadNum(6)};
    for (std::size_t t = 0; t < x.size(); ++t) svg.rect(x.tile(t).rect().translated(lift), "none", "#222", 0.8);
    for (std::size_t t = 0; t < y.size(); ++t) svg.rect(y.tile(t).rect(), "none", "#222", 0.8);
    for (const auto& u : m.units) {
      const std::string col = type_colour(u.stage * 2 + (u.dir == Direction::back));
      for (const auto& b : u.source) svg.rect(b.geometry(x.tile(b.tile)).translated(lift), col, "none", 0, 0.7);
      for (const auto& b : u.target) svg.rect(b.geometry(y.tile(b.tile)), col, "none", 0, 0.7);
    }
    svg.save(c.svg);
  }
  return o;
}

// pipeline --------------------------------------------------------------------

Outcome run_pipeline(const Common& c, const TowerArgs& a) {
  auto fx = standard_family(a, c.seed);
  auto fy = standard_family(a, c.seed + 1);
  auto tx = limit_tiling(fx);
  auto ty = limit_tiling(fy);
  std::map<std::size_t, std::vector<std::size_t>> ones_x, ones_y;
  for (std::size_t i = 0; i < tx.tiles.size(); ++i)
    if (tx.tiles[i].type.bits == 0) ones_x[tx.tiles[i].fragment].push_back(i);
  for (std::size_t i = 0; i < ty.tiles.size(); ++i)
    if (ty.tiles[i].type.bits == 0) ones_y[ty.tiles[i].fragment].push_back(i);
  std::vector<std::pair<std::size_t, std::size_t>> seed;
  for (const auto& [frag, xs] : ones_x)
    for (std::size_t n = 0; n < std::min(xs.size(), ones_y[frag].size()); ++n) seed.emplace_back(xs[n], ones_y[frag][n]);
  auto map = regular_tiling_loe(tx.tiles, tx.theta, ty.tiles, ty.theta, seed);
  const bool commutes = commutes_with_theta(map, tx.theta, ty.theta);
  auto report = verify_normalization(normalization_samples(map, tx.tiles, ty.tiles));
  std::size_t mapped = 0;
  for (auto i : map.image) mapped += i != static_cast<std::size_t>(-1);
  Outcome o;
  o.result["x_tiles"] = tx.tiles.size();
  o.result["y_tiles"] = ty.tiles.size();
  o.result["mapped_tiles"] = mapped;
  o.result["commutes_with_theta"] = commutes;
  o.result["normalization"] = to_json(report);
  o.pass = commutes && report.verdict == Verdict::loe && mapped > 0;
  if (!c.svg.empty() && a.d == 2) draw_tiling(fx, tx, c.svg);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular rectangular tilings, tower hierarchies and Lebesgue orbit equivalences"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--seed", common.seed, "random seed");
    s->add_option("--out", common.out, "output path (default stdout)");
    s->add_option("--svg", common.svg, "SVG picture path (d = 2 only)");
    s->add_option("--format", common.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };

  SectionArgs sa;
  auto* cs = app.add_subcommand("cross-section", "greedy maximal lacunary cross-section on a torus");
  cs->add_option("--d", sa.d)->check(CLI::Range(1, 3));
  cs->add_option("--side", sa.side, "torus side");
  cs->add_option("--radius", sa.radius, "half side of the lacunarity cube");
  cs->add_option("--rounds", sa.rounds);
  add_common(cs);

  MeasureArgs ma;
  auto* measures = app.add_subcommand("measures", "measure transfer between phase space and a cross-section");
  measures->require_subcommand(1);
  auto* ms = measures->add_subcommand("round-trip", "lift then pull on a grid section, both sides printed");
  ms->add_option("--d", ma.d)->check(CLI::Range(1, 3));
  ms->add_option("--n", ma.n, "grid points per axis")->check(CLI::Range(1, 12));
  ms->add_option("--step", ma.step, "grid spacing");
  ms->add_option("--trials", ma.trials);
  add_common(ms);

  std::string ax = "10", aeps = "0.1";
  auto* ap = app.add_subcommand("approx", "m1 + m2*sqrt2 approximation");
  ap->add_option("--x", ax);
  ap->add_option("--eps", aeps);
  add_common(ap);

  std::string plen, pstart = "0";
  auto* pp = app.add_subcommand("partition", "exact 1/sqrt2 partition of an interval");
  pp->add_option("--len", plen, "length r + s*sqrt2")->required();
  pp->add_option("--start", pstart);
  add_common(pp);

  std::string ea, eeps = "0.5";
  long ek = 1, eko = 4;
  auto* ep = app.add_subcommand("extend", "shift and extend an interval tiling");
  ep->add_option("--a", ea, "left end of the inner interval")->required();
  ep->add_option("--k", ek, "inner length in units of 1+sqrt2");
  ep->add_option("--k-outer", eko, "outer length in units of 1+sqrt2");
  ep->add_option("--eps", eeps);
  add_common(ep);

  TowerArgs ta;
  auto* tw = app.add_subcommand("towers", "tower family and regular limit tiling");
  tw->add_option("--d", ta.d)->check(CLI::Range(1, 3));
  tw->add_option("--levels", ta.levels)->check(CLI::Range(0, 4));
  tw->add_option("--gap", ta.gap, "l_k - btilde_k in units of 1+sqrt2")->check(CLI::Range(0, 8));
  tw->add_option("--eps", ta.eps, "eps schedule, one value per level (default 2^-k)")->delimiter(',');
  tw->add_flag("--tiles", ta.tiles, "include every tile in the JSON");
  add_common(tw);

  LoeArgs la;
  auto* lo = app.add_subcommand("loe", "back-and-forth block map between two fragments");
  lo->add_option("--d", la.d)->check(CLI::Range(1, 3));
  lo->add_option("--tiles", la.tiles)->check(CLI::Range(1, 200));
  lo->add_option("--labels", la.labels)->check(CLI::Range(1, 50));
  lo->add_option("--levels", la.levels)->check(CLI::Range(0, 4));
  lo->add_flag("--units", la.units, "include every mapped unit in the JSON");
  add_common(lo);

  TowerArgs pa;
  pa.levels = 2;
  auto* pl = app.add_subcommand("pipeline", "towers, regular tilings, tile map, normalization");
  pl->add_option("--d", pa.d)->check(CLI::Range(1, 3));
  pl->add_option("--levels", pa.levels)->check(CLI::Range(1, 3));
  pl->add_option("--eps", pa.eps, "eps schedule, one value per level (default 2^-k)")->delimiter(',');
  add_common(pl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    std::string name = sub->get_name();
    if (sub == measures) {
      sub = ms;
      name += " round-trip";
    }
    log(LogLevel::debug, "running " + name);
    Outcome o;
    if (sub == cs) o = run_cross_section(common, sa);
    else if (sub == ms) o = run_measures(common, ma);
    else if (sub == ap) o = run_approx(ax, aeps);
    else if (sub == pp) o = run_partition(plen, pstart);
    else if (sub == ep) o = run_extend(ea, ek, eko, eeps);
    else if (sub == tw) o = run_towers(common, ta);
    else if (sub == lo) o = run_loe(common, la);
    else o = run_pipeline(common, pa);
    emit(common, name, o);
    return o.pass ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "rtile: " << e.what() << '\n';
    return e.code() == Errc::parse_error ? 2 : 1;
  }
}
