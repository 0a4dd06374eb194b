#pragma once

// JSON views of the library types.  Exact numbers are written symbolically:
// a QuadNum is {"rat": [num, den], "irr": [num, den]} with decimal strings.

#include <json.hpp>

#include "rtile/cross_section.hpp"
#include "rtile/diophantine.hpp"
#include "rtile/loe.hpp"
#include "rtile/tiling.hpp"
#include "rtile/towers.hpp"

namespace rtile {

using Json = nlohmann::ordered_json;

constexpr int kSchema = 1;

inline Json to_json(const Rational& q) { return Json::array({q.get_num().get_str(), q.get_den().get_str()}); }

inline Json to_json(const QuadNum& x) {
  Json j;
  j["rat"] = to_json(x.rat());
  j["irr"] = to_json(x.irr());
  return j;
}

inline Rational rational_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
    fail(Errc::parse_error, "rational must be [num, den] strings");
  try {
    mpq_class q{mpz_class(j[0].get<std::string>()), mpz_class(j[1].get<std::string>())};
    if (q.get_den() == 0) fail(Errc::parse_error, "zero denominator");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    fail(Errc::parse_error, "bad integer in rational");
  }
}

inline QuadNum quad_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rat") || !j.contains("irr")) fail(Errc::parse_error, "quad needs rat and irr");
  return QuadNum(rational_from_json(j["rat"]), rational_from_json(j["irr"]));
}

inline Json to_json(const Point& p) {
  Json j = Json::array();
  for (const auto& x : p) j.push_back(to_json(x));
  return j;
}

inline Json to_json(const Rect& r) { return Json{{"lo", to_json(r.lo())}, {"hi", to_json(r.hi())}}; }

inline Json to_json(const CrossSection& c) {
  Json pts = Json::array();
  for (const auto& p : c.points()) pts.push_back(to_json(p));
  return Json{{"window", to_json(c.window().domain())}, {"torus", c.window().is_torus()}, {"points", pts}};
}

inline Json to_json(const ApproxResult& a) { return Json{{"m1", a.m1}, {"m2", a.m2}, {"err", to_json(a.err)}}; }

inline Json to_json(const SegmentPartition& p) {
  Json labels = Json::array();
  for (Seg s : p.labels) labels.push_back(to_string(s));
  return Json{{"start", to_json(p.start)}, {"labels", labels}, {"length", to_json(p.length())}};
}

inline Json to_json(const TowerSpec& s) {
  Json levels = Json::array();
  for (std::size_t k = 1; k <= s.depth(); ++k) {
    const auto& lv = s.at(k);
    levels.push_back(Json{{"k", k},
                          {"eps", to_json(lv.eps)},
                          {"b", to_json(lv.b)},
                          {"btilde", to_json(lv.btilde)},
                          {"l", to_json(lv.l)}});
  }
  return Json{{"d", s.dim}, {"kappa", to_json(s.kappa)}, {"levels", levels}};
}

inline Json to_json(const TowerFamily& f) {
  Json levels = Json::array();
  for (std::size_t k = 1; k <= f.levels.size(); ++k) {
    Json squares = Json::array();
    for (const auto& sq : f.level(k)) {
      Json j{{"anchor", to_json(sq.anchor)}};
      j["parent"] = sq.parent ? Json(*sq.parent) : Json(nullptr);
      j["children"] = sq.children;
      squares.push_back(std::move(j));
    }
    levels.push_back(Json{{"k", k}, {"squares", squares}});
  }
  return Json{{"window", to_json(f.window.domain())}, {"spec", to_json(f.spec)}, {"levels", levels}};
}

inline Json to_json(const TowerAudit& a) {
  return Json{{"ok", a.ok()},
              {"lacunary", a.lacunary},
              {"nested", a.nested},
              {"parents_nonempty", a.parents_nonempty},
              {"inside_window", a.inside_window},
              {"covered_fraction", to_json(a.covered_fraction)},
              {"failures", a.failures}};
}

inline Json to_json(const ShiftLedger& l) {
  Json levels = Json::array();
  for (std::size_t k = 0; k < l.own.size(); ++k) {
    Json own = Json::array(), total = Json::array();
    for (const auto& v : l.own[k]) own.push_back(to_json(v));
    for (const auto& v : l.total[k]) total.push_back(to_json(v));
    levels.push_back(Json{{"k", k + 1}, {"own", own}, {"total", total}});
  }
  return Json{{"max_total", to_json(l.max_total())}, {"levels", levels}};
}

inline Json to_json(const LimitTiling& t) {
  Json tiles = Json::array();
  for (const auto& p : t.tiles)
    tiles.push_back(Json{{"rect", to_json(p.rect)}, {"type", p.type.str()}, {"level", p.level}, {"fragment", p.fragment}});
  Json theta = Json::object();
  for (std::size_t a = 1; a < t.theta.pairs.size(); ++a) {
    Json pairs = Json::array();
    for (const auto& [one, other] : t.theta.pairs[a]) pairs.push_back(Json::array({one, other}));
    theta[TileType{t.tiles.empty() ? 0 : t.tiles[0].type.dim, static_cast<std::uint32_t>(a)}.str()] = pairs;
  }
  return Json{{"tiles", tiles}, {"theta", theta}, {"ledger", to_json(t.ledger)}, {"pushed", t.pushed}};
}

inline Json to_json(const BlockId& b) { return Json{{"tile", b.tile}, {"level", b.level}, {"idx", b.idx}}; }

inline Json to_json(const BlockMap& m) {
  Json units = Json::array();
  for (const auto& u : m.units) {
    Json src = Json::array(), dst = Json::array();
    for (const auto& b : u.source) src.push_back(to_json(b));
    for (const auto& b : u.target) dst.push_back(to_json(b));
    units.push_back(Json{{"stage", u.stage}, {"dir", to_string(u.dir)}, {"source", src}, {"target", dst}});
  }
  return Json{{"d", m.dim}, {"finest", m.finest}, {"units", units}};
}

inline Json to_json(const NormalizationReport& r) {
  Json ratios = Json::object();
  for (const auto& [label, q] : r.ratio) ratios[std::to_string(label)] = to_json(q);
  return Json{{"verdict", to_string(r.verdict)}, {"ratios", ratios}};
}

}  // namespace rtile
