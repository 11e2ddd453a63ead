#include <doctest.h>

#include "roughweyl/io.hpp"

#include <cmath>

using namespace rw;

TEST_CASE("grids") {
  CHECK(parse_grid("").empty());
  auto a = parse_grid("5:20:5");
  REQUIRE(a.size() == 4);
  CHECK(a.back() == 20.0);
  auto b = parse_grid("10,15.5,30");
  REQUIRE(b.size() == 3);
  CHECK(b[1] == 15.5);
  CHECK(parse_grid("7").size() == 1);
  CHECK_THROWS_AS(parse_grid("1:2"), InputError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), InputError);
  CHECK_THROWS_AS(parse_grid("1,x"), InputError);
}

TEST_CASE("domain specs") {
  CHECK(domain_from_json(Json{{"kind", "unit-square"}}).area() == doctest::Approx(1.0));
  CHECK(domain_from_json(Json{{"kind", "l-shape"}}).area() == doctest::Approx(0.75));
  auto box = domain_from_json(Json{{"kind", "box"}, {"lo", {0, 0}}, {"hi", {2, 0.5}}});
  CHECK(box.area() == doctest::Approx(1.0));
  auto g = domain_from_json(Json{{"kind", "graph"}, {"xs", {0, 0.5, 1}}, {"ys", {1, 1.5, 1}}});
  CHECK(g.area() == doctest::Approx(1.25));
  CHECK_THROWS_AS(domain_from_json(Json{{"kind", "torus"}}), InputError);
  CHECK_THROWS_AS(domain_from_json(Json{{"kind", "box"}, {"lo", {0, 0}}}), InputError);
  CHECK_THROWS_AS(domain_from_json(Json{{"kind", "unit-square"}, {"format_version", 99}}), InputError);
}

TEST_CASE("bump parameters round trip") {
  BumpSeriesParams prm;
  prm.p = 3;
  prm.n_max = 2;
  prm.alpha = 0.6;
  prm.eps = constant_schedule(4);
  Json j = bump_params_to_json(prm);
  CHECK(j["format_version"] == kFormatVersion);
  BumpSeriesParams back = bump_params_from_json(j);
  CHECK(back.p == 3);
  CHECK(back.n_max == 2);
  CHECK(back.alpha == 0.6);
  CHECK(back.theorem_faithful == prm.theorem_faithful);
  CHECK(back.eps_at(3) == prm.eps_at(3));
  Json spec = j;
  spec["kind"] = "bump-series";
  CHECK(domain_from_json(spec).area() == doctest::Approx(make_domain(prm).area()));
}

TEST_CASE("reports serialise deterministically") {
  auto sq = CompositeDomain::unit_square();
  CoverReport r = m_cover(sq, 0.25);
  std::string a = to_json(r).dump(), b = to_json(m_cover(sq, 0.25)).dump();
  CHECK(a == b);
  Json c = to_json(Check{"x", true, 0.5, "note"});
  CHECK(c["id"] == "x");
  CHECK(c["pass"] == true);
  std::string svg = cover_svg(sq, r, 200);
  CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("curve csv carries flags") {
  CountingCurve c;
  c.lambdas = {1, 2};
  c.counts = {0, 1};
  c.weyl = {0.1, 0.3};
  c.excess = {-0.1, 0.7};
  c.flags = {"ok", "ok;staircase-surrogate"};
  c.bc = Bc::Neumann;
  c.h = 0.5;
  std::string s = curve_csv(c);
  CHECK(s.find("lambda,count,weyl,excess,flags") != std::string::npos);
  CHECK(s.find("staircase-surrogate") != std::string::npos);
}
