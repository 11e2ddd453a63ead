#include <doctest.h>

#include "roughweyl/geometry.hpp"

#include <random>

using namespace rw;

namespace {
Point P(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}
}  // namespace

TEST_CASE("axis box basics") {
  AxisBox b(P(0, 0), P(2, 1));
  CHECK(b.volume() == 2.0);
  CHECK(b.max_edge() == 2.0);
  CHECK(b.min_edge() == 1.0);
  CHECK_FALSE(b.is_cube());
  CHECK(b.contains_point(P(1, 0.5)));
  CHECK_FALSE(b.contains_point(P(0, 0.5)));  // open
  CHECK(b.closure_contains(P(0, 0.5)));
  CHECK(b.bisect().size() == 4);
  CHECK(b.split(4).size() == 16);
  double total = 0;
  for (const auto& c : b.split(3)) total += c.volume();
  CHECK(total == doctest::Approx(2.0));
}

TEST_CASE("touching boxes do not overlap") {
  AxisBox a(P(0, 0), P(1, 1)), c(P(1, 0), P(2, 1)), e(P(0.5, 0.5), P(1.5, 1.5));
  CHECK_FALSE(a.overlaps(c));
  CHECK(a.overlaps(e));
  AxisBox i = a.intersection(e);
  CHECK(i.volume() == doctest::Approx(0.25));
}

TEST_CASE("segment distances") {
  CHECK(point_segment_distance(Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0)) == doctest::Approx(1.0));
  CHECK(point_segment_distance(Vec2(3, 0), Vec2(-1, 0), Vec2(1, 0)) == doctest::Approx(2.0));
  AxisBox b(P(0, 0), P(1, 1));
  CHECK(box_segment_distance(b, Vec2(2, -5), Vec2(2, 5)) == doctest::Approx(1.0));
  CHECK(box_segment_distance(b, Vec2(-1, 0.5), Vec2(2, 0.5)) == 0.0);
  CHECK(segment_meets_box(b, Vec2(1, 0.2), Vec2(3, 0.2)));        // touches the closed box
  CHECK_FALSE(segment_meets_open_box(b, Vec2(1, 0.2), Vec2(3, 0.2)));
  CHECK(box_point_max_distance(b, Vec2(0, 0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("polygon area, perimeter and membership") {
  Polygon sq({{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}});
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.perimeter() == doctest::Approx(4.0));
  CHECK(sq.inside(Vec2(0.5, 0.5)));
  CHECK_FALSE(sq.inside(Vec2(1.0, 0.5)));
  CHECK(sq.on_boundary(Vec2(1.0, 0.5)));
  CHECK(sq.distance(Vec2(0.25, 0.5)) == doctest::Approx(0.25));
  Enclosure a = sq.clipped_area(AxisBox(P(0.5, 0.5), P(1.5, 1.5)));
  CHECK(a.contains(0.25));
}

TEST_CASE("polygon box distance agrees with sampled distances") {
  Polygon tri({{Vec2(0, 0), Vec2(1, 0), Vec2(0.3, 0.8)}});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int t = 0; t < 200; ++t) {
    double x = u(rng), y = u(rng), e = 0.125;
    AxisBox b = AxisBox::cube(P(x, y), e);
    double dmin = tri.box_distance(b);
    // the box distance is a lower bound of every point distance in the box
    for (int k = 0; k <= 4; ++k)
      for (int l = 0; l <= 4; ++l) CHECK(dmin <= tri.distance(Vec2(x + e * k / 4, y + e * l / 4)) + 1e-12);
  }
}

TEST_CASE("enclosure arithmetic") {
  Enclosure a(1, 2), b(0.5, 0.75);
  Enclosure s = a + b;
  CHECK(s.lo == 1.5);
  CHECK(s.hi == 2.75);
  Enclosure m = 2.0 * a;
  CHECK(m.contains(3.0));
  CHECK(m.contains(Enclosure(2, 4)));
}
