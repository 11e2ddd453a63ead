#include <doctest.h>

#include "roughweyl/boundary_function.hpp"
#include "roughweyl/bump_series.hpp"
#include "roughweyl/domain.hpp"

#include <cmath>
#include <random>

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
AxisBox I(double a, double b) { return AxisBox(P1(a), P1(b)); }

BumpSeriesParams exploration() {
  BumpSeriesParams prm;
  prm.eps = constant_schedule(8);
  return prm;
}
}  // namespace

TEST_CASE("osc of simple functions") {
  auto lin = BoundaryFunction::polyline({0, 1}, {0, 1});
  Enclosure o = lin.osc1(0, 1);
  CHECK(o.lo == 0.5);
  CHECK(o.hi == 0.5);
  auto c = BoundaryFunction::constant(I(0, 1), 2.0);
  CHECK(c.osc(I(0.25, 0.5)).hi == 0.0);
  CHECK_THROWS_AS(lin.osc1(0.5, 1.5), DomainError);
}

TEST_CASE("osc of the level-2 bump sum contains the dense-grid value") {
  BumpSeriesParams prm = exploration();
  prm.n_max = 2;
  auto f = BoundaryFunction::bump_series(prm);
  double mx = -1e9, mn = 1e9;
  const int n = 1 << 14;
  for (int i = 0; i <= n; ++i) {
    double v = bump_sum(prm, static_cast<double>(i) / n, 2);
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  Enclosure o = f.osc1(0, 1);
  CHECK(o.contains(0.5 * (mx - mn)));
}

TEST_CASE("v_count conventions and linear packing") {
  auto c = BoundaryFunction::constant(I(0, 1), 1.0);
  VCount v = v_count(c, I(0, 1), 0.1, 8);
  CHECK(v.lower == 1);
  CHECK(v.upper == 1);
  auto lin = BoundaryFunction::polyline({0, 1}, {0, 1});
  VCount w = v_count(lin, I(0, 1), 0.25, 8);
  CHECK(w.lower == 2);
  CHECK(w.lower <= w.upper);
  CHECK_THROWS_AS(v_count(lin, I(0, 1), 0.0, 4), DomainError);
}

TEST_CASE("v_count brackets the brute-force dyadic packing on the bump chart") {
  BumpSeriesParams prm = exploration();
  auto f = BoundaryFunction::bump_series(prm);
  const double delta = 0.125;
  // Dyadic intervals are nested or disjoint, so the best packing is a tree
  // recursion: take a qualifying interval or the best of its two halves.
  std::function<long long(double, double, int)> best = [&](double a, double b, int lvl) -> long long {
    long long here = f.osc1(a, b).lo >= delta ? 1 : 0;
    if (lvl == 8) return here;
    double m = 0.5 * (a + b);
    return std::max(here, best(a, m, lvl + 1) + best(m, b, lvl + 1));
  };
  long long packing = best(0, 1, 0);
  VCount v = v_count(f, I(0, 1), delta, 8);
  CHECK(v.lower == packing);
  CHECK(v.upper >= packing);
}

TEST_CASE("holder_check on linear and constant graphs") {
  auto lin = BoundaryFunction::polyline({0, 1}, {0, 1});
  HolderSample h = holder_check(lin, 1.0, 10000, 3);
  CHECK(h.seminorm_lower == doctest::Approx(1.0).epsilon(1e-9));
  auto c = BoundaryFunction::constant(I(0, 1), 0.3);
  CHECK(holder_check(c, 0.5, 1000, 3).seminorm_lower == 0.0);
}

TEST_CASE("greedy osc breaks are maximal and certified") {
  auto lin = BoundaryFunction::polyline({0, 1}, {0, 1});
  auto br = greedy_osc_breaks(lin, 0, 1, 0.25);
  REQUIRE(br.size() >= 2);
  CHECK(br.front() == 0.0);
  CHECK(br.back() == 1.0);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) CHECK(lin.osc1(br[i], br[i + 1]).hi <= 0.25);
  CHECK(br.size() == 3);  // two intervals of length 1/2
}

TEST_CASE("unit square distances and layer measure") {
  auto sq = CompositeDomain::unit_square();
  Enclosure c = sq.boundary_dist(P(0.5, 0.5));
  CHECK(c.lo == doctest::Approx(0.5));
  CHECK(c.hi == doctest::Approx(0.5));
  Enclosure q = sq.boundary_dist(P(0.25, 0.5));
  CHECK(q.contains(0.25));
  CHECK(q.width() < 1e-12);
  CHECK_THROWS_AS(sq.boundary_dist(P(1.5, 0.5)), DomainError);
  CHECK(boundary_layer_measure(sq, 0.1, 1.0 / 128).contains(0.36));
  CHECK(boundary_layer_measure(sq, 0.5, 1.0 / 128).contains(1.0));
  CHECK(boundary_layer_measure(sq, 0.75, 1.0 / 128).contains(1.0));
}

TEST_CASE("layer measure enclosure tightens with resolution") {
  auto sq = CompositeDomain::unit_square();
  double w1 = boundary_layer_measure(sq, 0.1, 1.0 / 32).width();
  double w2 = boundary_layer_measure(sq, 0.1, 1.0 / 128).width();
  CHECK(w2 <= w1);
}

TEST_CASE("L-shape geometry") {
  auto L = CompositeDomain::l_shape();
  CHECK(L.area() == doctest::Approx(0.75));
  CHECK(L.inside(P(0.25, 0.25)));
  CHECK_FALSE(L.inside(P(0.75, 0.75)));
  CHECK(L.delta_omega() > 0);
  CHECK(L.validate_charts().empty());
}

TEST_CASE("bump domain boundary distance against brute-force segments") {
  auto om = make_domain(exploration());
  REQUIRE(om.is_polygon());
  const Polygon& poly = om.polygon();
  Vec2 x(0.5, 0.01);
  double brute = INFINITY;
  for (std::size_t i = 0; i < poly.segment_count(); ++i)
    brute = std::min(brute, point_segment_distance(x, poly.seg_a(i), poly.seg_b(i)));
  Enclosure e = om.boundary_dist(P(0.5, 0.01));
  CHECK(e.contains(brute));
  CHECK(brute == doctest::Approx(0.01));
}

TEST_CASE("bump domain layer measure against Monte Carlo") {
  auto om = make_domain(exploration());
  const double eps = std::ldexp(1.0, -6);
  Enclosure e = boundary_layer_measure(om, eps, std::ldexp(1.0, -9));
  std::mt19937_64 rng(2024);
  const AxisBox& bb = om.bounding_box();
  std::uniform_real_distribution<double> ux(bb.lo(0), bb.hi(0)), uy(bb.lo(1), bb.hi(1));
  const int n = 200000;
  long long hit = 0;
  for (int i = 0; i < n; ++i) {
    Point p = P(ux(rng), uy(rng));
    if (om.inside(p) && om.distance(p) <= eps) ++hit;
  }
  double mc = bb.volume() * hit / n;
  double se = bb.volume() * std::sqrt(hit * (1.0 - static_cast<double>(hit) / n)) / n;
  CHECK(e.lo <= mc + 5 * se);
  CHECK(mc - 5 * se <= e.hi);
}

TEST_CASE("measure profile is monotone and saturates at the area") {
  auto L = CompositeDomain::l_shape();
  MeasureProfile mp = measure_profile(L, 1.0 / 64);
  CHECK(mp.lo.monotone());
  CHECK(mp.hi.monotone());
  CHECK(mp.saturation.contains(0.75));
  double prev = 0;
  for (double s = 0.01; s < 0.6; s += 0.01) {
    CHECK(mp.lo(s) <= mp.hi(s));
    CHECK(mp.hi(s) >= prev);
    prev = mp.hi(s);
  }
}

TEST_CASE("profile curve evaluation") {
  auto c = ProfileCurve::piecewise_linear({0, 1, 2}, {0, 1, 1});
  CHECK(c(0.5) == doctest::Approx(0.5));
  CHECK(c(5.0) == 1.0);
  auto s = ProfileCurve::step({{0.5, 2.0}, {1.0, 1.0}});
  CHECK(s(0.25) == 0.0);
  CHECK(s(0.5) == 2.0);  // right-continuous
  CHECK(s(2.0) == 3.0);
}

TEST_CASE("lip_tau coefficients") {
  TauFunction t = lip_tau(0.5, 1.0, 1.0, 2);
  CHECK(t.beta == doctest::Approx(2.0));
  CHECK(t.A == doctest::Approx(0.25 * std::sqrt(2.0)));
  CHECK(t.B == 1.0);
  CHECK(lip_tau(0.5, 0.0, 1.0, 2)(7.0) == 1.0);
  CHECK(lip_tau(2.0 / 3.0, 1.0, 1.0, 3).beta == doctest::Approx(3.0));
  CHECK_THROWS_AS(lip_tau(1.0, 1.0, 1.0, 2), DomainError);
}

TEST_CASE("tau integral closed forms") {
  TauFunction one = TauFunction::power_law(0, 1, 1);
  CHECK(one.integral_t2(1, 4) == doctest::Approx(0.75));
  TauFunction lin = TauFunction::power_law(1, 1, 0);
  CHECK(lin.integral_t2(1, std::exp(1.0)) == doctest::Approx(1.0));
  TauFunction tab = TauFunction::tabulated({1, 2}, {1, 1});
  CHECK(tab.integral_t2(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("tau_fit constants") {
  // one linear chart on top of the unit square
  auto om = CompositeDomain::graph_domain(BoundaryFunction::polyline({0, 1}, {1, 1.5}), "ramp");
  auto tau = TauFunction::power_law(1, 1, 1);
  TauFit fit = tau_fit(om, tau, {0.5, 0.25, 0.125}, 8);
  CHECK(fit.value > 0);
  CHECK(fit.value <= om.n_charts());
  auto sq = CompositeDomain::unit_square();
  TauFit flat = tau_fit(sq, TauFunction::power_law(0, 1, 1), {0.5, 0.1}, 6);
  CHECK(flat.value <= sq.n_charts());
  CHECK(flat.value == doctest::Approx(sq.n_charts()));
}
