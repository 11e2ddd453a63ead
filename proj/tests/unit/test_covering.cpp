#include <doctest.h>

#include "roughweyl/bump_series.hpp"
#include "roughweyl/constants.hpp"
#include "roughweyl/covering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace rw;

namespace {
Point P(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}
Point P1(double x) {
  Point p(1);
  p << x;
  return p;
}

// Max overlap by probing the centre of every cell of the planar arrangement.
int brute_multiplicity(const std::vector<AxisBox>& boxes) {
  std::set<double> xs, ys;
  for (const auto& b : boxes) {
    xs.insert(b.lo(0));
    xs.insert(b.hi(0));
    ys.insert(b.lo(1));
    ys.insert(b.hi(1));
  }
  std::vector<double> X(xs.begin(), xs.end()), Y(ys.begin(), ys.end());
  int best = 0;
  for (std::size_t i = 0; i + 1 < X.size(); ++i)
    for (std::size_t j = 0; j + 1 < Y.size(); ++j) {
      Point c = P(0.5 * (X[i] + X[i + 1]), 0.5 * (Y[j] + Y[j + 1]));
      int n = 0;
      for (const auto& b : boxes) n += b.contains_point(c);
      best = std::max(best, n);
    }
  return best;
}

bool passes(const CoverReport& r, const std::string& id) {
  const Check* c = r.find(id);
  return c != nullptr && c->pass;
}

BumpSeriesParams exploration() {
  BumpSeriesParams prm;
  prm.eps = constant_schedule(8);
  return prm;
}
}  // namespace

TEST_CASE("multiplicity of small families") {
  CHECK(multiplicity({}) == 0);
  CHECK(multiplicity({AxisBox(P(0, 0), P(1, 1)), AxisBox(P(1, 0), P(2, 1))}) == 1);
  CHECK(multiplicity({AxisBox(P(0, 0), P(2, 2)), AxisBox(P(1, 1), P(3, 3))}) == 2);
}

TEST_CASE("multiplicity matches arrangement probing on random dyadic boxes") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pos(0, 63), len(1, 24);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<AxisBox> boxes;
    for (int i = 0; i < 100; ++i) {
      double x = pos(rng) / 64.0, y = pos(rng) / 64.0;
      boxes.emplace_back(P(x, y), P(x + len(rng) / 64.0, y + len(rng) / 64.0));
    }
    CHECK(multiplicity(boxes) == brute_multiplicity(boxes));
  }
}

TEST_CASE("overlap stats find gaps") {
  AxisBox region(P(0, 0), P(2, 1));
  OverlapStats s = overlap_stats({AxisBox(P(0, 0), P(1, 1)), AxisBox(P(1.5, 0), P(2, 1))}, region);
  CHECK(s.min == 0);
  CHECK(s.max == 1);
  CHECK(s.witness[0] > 1.0);
  CHECK(s.witness[0] < 1.5);
  OverlapStats t = overlap_stats({AxisBox(P(0, 0), P(1, 1)), AxisBox(P(1, 0), P(2, 1))}, region);
  CHECK(t.min == 1);
}

TEST_CASE("besicovitch on a single point and on a pair") {
  CoverReport one = besicovitch_cover({P(0.3, 0.3)}, std::vector<double>{0.1});
  CHECK(one.pieces.size() == 1);
  CHECK(one.multiplicity == 1);
  CHECK(one.disjoint_subfamily.size() == 1);
  CoverReport two = besicovitch_cover({P1(0), P1(1)}, std::vector<double>{3, 3});
  CHECK(two.pieces.size() >= 1);
  CHECK(two.multiplicity <= 2);
  CHECK(two.all_pass());
  CHECK_THROWS(besicovitch_cover({P1(0)}, std::vector<double>{0.0}));
}

TEST_CASE("besicovitch on random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point> K;
  for (int i = 0; i < 64; ++i) K.push_back(P(u(rng), u(rng)));
  CoverReport r = besicovitch_cover(K, std::vector<double>(64, 0.1));
  CHECK(r.all_pass());
  CHECK(r.multiplicity <= 4);
  CHECK(r.multiplicity == brute_multiplicity(r.boxes()));
  // every point is covered by a selected cube
  for (const auto& k : K) {
    bool hit = false;
    for (const auto& b : r.boxes()) hit = hit || b.closure_contains(k);
    CHECK(hit);
  }
  CHECK(static_cast<double>(r.disjoint_subfamily.size()) >= static_cast<double>(r.pieces.size()) / 16.0);
  for (std::size_t i = 0; i < r.disjoint_subfamily.size(); ++i)
    for (std::size_t j = i + 1; j < r.disjoint_subfamily.size(); ++j)
      CHECK_FALSE(r.pieces[r.disjoint_subfamily[i]].box.overlaps(r.pieces[r.disjoint_subfamily[j]].box));
}

TEST_CASE("osc_cover of constant, linear and bump graphs") {
  Point lo = P1(0), hi = P1(1);
  auto c = BoundaryFunction::constant(AxisBox(lo, hi), 1.0);
  CoverReport rc = osc_cover(c, 0.1);
  CHECK(rc.pieces.size() == 1);
  CHECK(rc.multiplicity == 1);

  auto lin = BoundaryFunction::polyline({0, 1}, {0, 1});
  CoverReport rl = osc_cover(lin, 0.25);
  CHECK(rl.all_pass());
  for (const auto& p : rl.pieces) CHECK(p.box.max_edge() <= 0.5 + 1e-12);

  auto f = BoundaryFunction::bump_series(exploration());
  CoverReport rb = osc_cover(f, 0.125);
  CHECK(rb.all_pass());
  CHECK(rb.multiplicity <= 4);
}

TEST_CASE("refine_partition edges") {
  auto c = BoundaryFunction::constant(AxisBox(P1(0), P1(1)), 1.0);
  CoverReport one = refine_partition(c, 1.0, 0);
  CHECK(one.pieces.size() == 1);
  CHECK(one.all_pass());

  auto lin = BoundaryFunction::polyline({0, 1}, {0, 1});
  CoverReport r = refine_partition(lin, 0.25, 0);
  CHECK(r.all_pass());
  for (const auto& p : r.pieces) {
    CHECK(p.box.max_edge() <= 0.25);
    CHECK(p.box.max_edge() > 0.125);
  }
}

TEST_CASE("whitney on the unit square") {
  auto sq = CompositeDomain::unit_square();
  CoverReport w = whitney(sq, 3, 8);
  CHECK(passes(w, "disjoint"));
  CHECK(passes(w, "distance-sandwich"));
  CHECK(passes(w, "measure"));
  double total = w.residue_measure;
  for (const auto& p : w.pieces) {
    total += p.box.volume();
    double e = p.box.max_edge();
    CHECK(std::ldexp(1.0, static_cast<int>(std::round(std::log2(e)))) == e);  // dyadic edge
    CHECK(std::fmod(p.box.lo(0), e) == 0.0);
    CHECK(std::fmod(p.box.lo(1), e) == 0.0);
    // exact square distance
    double dmin = std::min({p.box.lo(0), 1 - p.box.hi(0), p.box.lo(1), 1 - p.box.hi(1)});
    double s = std::sqrt(2.0) * e;
    CHECK(s <= dmin);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(multiplicity(w.boxes()) == 1);
}

TEST_CASE("whitney per-scale counts on the bump domain") {
  auto om = make_domain(exploration());
  CoverReport w = whitney(om, 2, 9);
  CHECK(w.all_pass());
  MeasureProfile mp = measure_profile(om, std::ldexp(1.0, -10));
  const double sd = std::sqrt(2.0);
  for (int i = 2; i <= 9; ++i) {
    long long n = 0;
    for (const auto& p : w.pieces) n += p.level == i;
    double s = std::ldexp(1.0, -i);
    double bound = std::ldexp(1.0, 2 * i) * (mp.hi(4 * sd * s) - mp.lo(sd * s));
    CHECK(static_cast<double>(n) <= bound);
  }
}

TEST_CASE("graph_partition over a flat chart") {
  Chart ch;
  ch.map = AxisMap::identity(2);
  ch.f = BoundaryFunction::constant(AxisBox(P1(0), P1(1)), 1.0);
  ch.b = 0.0;
  CoverReport r = graph_partition(ch, 0.25);
  CHECK(r.all_pass());
  CHECK(r.multiplicity <= 2);
  bool any_v = false;
  for (const auto& p : r.pieces) {
    if (p.kind != PieceKind::V) continue;
    any_v = true;
    CHECK(p.base.max_edge() <= 0.25);
    CHECK(p.floor == doctest::Approx(0.75));
  }
  CHECK(any_v);
  CHECK_THROWS_AS(graph_partition(ch, 0.75), PreconditionError);
}

TEST_CASE("graph_partition on the bump chart") {
  auto om = make_domain(exploration());
  const Chart* top = nullptr;
  for (const auto& c : om.charts())
    if (c.f.kind() != FunctionKind::Constant) top = &c;
  REQUIRE(top != nullptr);
  for (int k = 3; k <= 5; ++k) {
    CoverReport r = graph_partition(*top, std::ldexp(1.0, -k));
    CHECK(r.all_pass());
    for (const auto& p : r.pieces)
      if (p.kind == PieceKind::V) {
        CHECK(p.base.max_edge() <= std::ldexp(1.0, -k));
        CHECK(top->f.osc(p.base).hi <= std::ldexp(1.0, -k - 1));
      }
  }
}

TEST_CASE("m_cover of the unit square") {
  auto sq = CompositeDomain::unit_square();
  const double delta = 0.25, d0 = delta / std::sqrt(2.0);
  CoverReport r = m_cover(sq, delta);
  CHECK(r.all_pass());
  CHECK(r.multiplicity == 1);
  int expect = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double x0 = i * delta, y0 = j * delta;
      double dmin = std::min({x0, 1 - x0 - delta, y0, 1 - y0 - delta});
      expect += dmin < d0;
    }
  CHECK(static_cast<int>(r.pieces.size()) == expect);
  for (const auto& p : r.pieces) CHECK(p.box.max_edge() <= delta);
}

TEST_CASE("domain_partition on a rectangle and the bump domain") {
  auto sq = CompositeDomain::unit_square();
  CoverReport r = domain_partition(sq, 0.125);
  CHECK(r.all_pass());
  CHECK_THROWS_AS(domain_partition(sq, 1.0), PreconditionError);
  auto om = make_domain(exploration());
  CoverReport b = domain_partition(om, 0.0625);
  CHECK(b.all_pass());
  for (const auto& p : b.pieces) CHECK(piece_max_distance(om, p) <= std::sqrt(2.0) * 0.0625 + 0.0625 / std::sqrt(2.0));
}

TEST_CASE("dyadic sums against closed forms") {
  DyadicSum a = dyadic_sum_bound([](double) { return 1.0; }, 1, 4);
  CHECK(a.lhs == 3.0);
  CHECK(a.rhs == doctest::Approx(2 * std::log(8.0)));
  DyadicSum b = dyadic_sum_bound([](double t) { return t; }, 1, 2);
  CHECK(b.lhs == 3.0);
  CHECK(b.rhs == doctest::Approx(6.0));
  DyadicSum c = dyadic_sum_bound([](double) { return 1.0; }, 3, 3.5);
  CHECK(c.lhs == 0.0);
  CHECK(c.lhs <= c.rhs);
  CHECK_THROWS_AS(dyadic_sum_bound([](double t) { return 1.0 / (t * t); }, 1, 8), PreconditionError);
}
