#include <catch_amalgamated.hpp>

#include <random>

#include "rtile/quad.hpp"

using namespace rtile;

namespace {

QuadNum random_quad(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50), den(1, 12);
  return QuadNum(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
}

// sign(r + s*sqrt2) decided only through squares of rationals.
int sign_by_squares(const mpq_class& r, const mpq_class& s) {
  if (s == 0) return sgn(r);
  if (r == 0) return sgn(s);
  if (sgn(r) == sgn(s)) return sgn(r);
  return r * r > 2 * s * s ? sgn(r) : sgn(s);
}

}  // namespace

TEST_CASE("field operations on documented examples", "[quad]") {
  const QuadNum one_plus = parse_quad("1+sqrt2");
  const QuadNum minus_one_plus = parse_quad("-1+sqrt2");
  CHECK(one_plus * minus_one_plus == QuadNum(1));
  CHECK(alpha() * alpha() == QuadNum(2));
  CHECK(q_ratio(1, 2) + QuadNum(mpq_class(0), mpq_class(1, 2)) == QuadNum(mpq_class(1, 2), mpq_class(1, 2)));
  CHECK((-one_plus).str() == "-1-sqrt2");
  CHECK(one_plus.inverse() == minus_one_plus);
}

TEST_CASE("comparison matches the squaring oracle", "[quad]") {
  const QuadNum x = parse_quad("1+sqrt2");
  const QuadNum y = parse_quad("12071/5000");
  // x, y > 0, so x > y iff x^2 > y^2 iff 2 sqrt2 > y^2 - 3 iff 8 > (y^2 - 3)^2.
  const mpq_class y2m3 = y.rat() * y.rat() - 3;
  REQUIRE(y2m3 > 0);
  const bool oracle_greater = mpq_class(8) > y2m3 * y2m3;
  CHECK(oracle_greater);
  CHECK(x > y);
  CHECK(compare(x, x) == 0);
  CHECK(alpha() < parse_quad("3/2"));
}

TEST_CASE("to_double", "[quad]") {
  CHECK(alpha().to_double() == Catch::Approx(1.41421356).epsilon(1e-8));
  CHECK(QuadNum(1).to_double() == 1.0);
  CHECK(q_ratio(-1, 2).to_double() == -0.5);
}

TEST_CASE("parsing", "[quad]") {
  CHECK(parse_quad("10.6") == q_ratio(53, 5));
  CHECK(parse_quad("2+2*sqrt2") == QuadNum(2) + QuadNum(2) * alpha());
  CHECK(parse_quad("3-sqrt2") == QuadNum(3) - alpha());
  CHECK(parse_quad("-1/2*sqrt2") == q_ratio(-1, 2) * alpha());
  CHECK(parse_quad("1+a") == kappa());
  CHECK_THROWS_AS(parse_quad("abc"), Error);
}

TEST_CASE("floor and ceil", "[quad]") {
  CHECK(alpha().floor() == 1);
  CHECK((-alpha()).floor() == -2);
  CHECK(QuadNum(3).floor() == 3);
  CHECK(QuadNum(3).ceil() == 3);
  CHECK((QuadNum(5) * alpha()).floor() == 7);
  CHECK((QuadNum(5) * alpha()).ceil() == 8);
}

TEST_CASE("field axioms on random values", "[quad][property]") {
  std::mt19937_64 rng(20261016);
  for (int n = 0; n < 2000; ++n) {
    QuadNum a = random_quad(rng), b = random_quad(rng), c = random_quad(rng);
    REQUIRE((a + b) + c == a + (b + c));
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE(a + b == b + a);
    REQUIRE(a * b == b * a);
    REQUIRE(a - a == QuadNum(0));
    if (!a.is_zero()) REQUIRE(a * a.inverse() == QuadNum(1));
  }
}

TEST_CASE("order is total and agrees with floating point when well separated", "[quad][property]") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 2000; ++n) {
    QuadNum a = random_quad(rng), b = random_quad(rng);
    int s = compare(a, b);
    REQUIRE(s == sign_by_squares(a.rat() - b.rat(), a.irr() - b.irr()));
    REQUIRE(compare(b, a) == -s);
    double fa = a.to_double(), fb = b.to_double();
    if (std::abs(fa - fb) > 1e-9 * (1 + std::abs(fa))) REQUIRE((fa < fb) == (s < 0));
  }
}

TEST_CASE("sums of unit and alpha lengths never drift", "[quad][property]") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) {
    long ones = 0, alphas = 0;
    QuadNum total;
    for (int k = 0; k < 100; ++k) {
      if (rng() & 1) {
        total += QuadNum(1);
        ++ones;
      } else {
        total += alpha();
        ++alphas;
      }
    }
    REQUIRE(total == QuadNum(ones) + QuadNum(alphas) * alpha());
  }
}
