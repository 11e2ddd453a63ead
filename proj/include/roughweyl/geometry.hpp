#ifndef ROUGHWEYL_GEOMETRY_HPP
#define ROUGHWEYL_GEOMETRY_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace rw {

using Point = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Outcome of one certified inequality.
struct Check {
  std::string id;
  bool pass = false;
  double margin = 0.0;  // rhs - lhs in the natural units of the check
  std::string note;
};

// Closed interval [lo, hi] guaranteed to contain the quantity it describes.
// `declared` marks enclosures that rely on declared tolerances (sampled data)
// rather than exact arithmetic.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;
  bool declared = false;

  Enclosure() = default;
  Enclosure(double l, double h, bool decl = false);
  static Enclosure exact(double v) { return {v, v}; }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Enclosure& e) const { return lo <= e.lo && e.hi <= hi; }
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);
Enclosure operator*(double s, const Enclosure& a);

// Open axis-aligned box. Corners are expected to be dyadic so that the
// predicates below are exact in binary floating point.
class AxisBox {
 public:
  AxisBox() = default;
  AxisBox(Point lo, Point hi);
  static AxisBox cube(const Point& lo, double edge);
  static AxisBox centred(const Point& centre, double edge);
  static AxisBox unit(int dim);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  double lo(int i) const { return lo_[i]; }
  double hi(int i) const { return hi_[i]; }
  double edge(int i) const { return hi_[i] - lo_[i]; }
  double max_edge() const;
  double min_edge() const;
  bool is_cube() const;
  double volume() const;
  double diameter() const;
  Point centre() const;

  bool contains_point(const Point& x) const;         // open box
  bool closure_contains(const Point& x) const;       // closed box
  bool contains_box(const AxisBox& other) const;     // closure inclusion
  bool overlaps(const AxisBox& other) const;         // open interiors meet
  AxisBox intersection(const AxisBox& other) const;  // requires overlaps()
  AxisBox slice(int axis, double lo, double hi) const;

  // 2^dim children obtained by halving every edge.
  std::vector<AxisBox> bisect() const;
  // Split into m^dim congruent boxes.
  std::vector<AxisBox> split(int m) const;

  std::string str() const;
  bool operator==(const AxisBox& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  Point lo_;
  Point hi_;
};

// Lexicographic order by (lo, hi); used for diff-stable output.
bool box_less(const AxisBox& a, const AxisBox& b);

// Euclidean distances in the plane.
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
// Distance between a closed segment and a closed axis box (0 if they meet).
double box_segment_distance(const AxisBox& box, const Vec2& a, const Vec2& b);
bool segment_meets_box(const AxisBox& box, const Vec2& a, const Vec2& b);
// True when the closed segment meets the open box.
bool segment_meets_open_box(const AxisBox& box, const Vec2& a, const Vec2& b);
// Farthest distance from a point of the closed box to point p.
double box_point_max_distance(const AxisBox& box, const Vec2& p);

// Closed polygonal curves; the domain is the set of points with odd winding.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<std::vector<Vec2>> rings);

  const std::vector<std::vector<Vec2>>& rings() const { return rings_; }
  std::size_t segment_count() const { return seg_a_.size(); }
  const Vec2& seg_a(std::size_t i) const { return seg_a_[i]; }
  const Vec2& seg_b(std::size_t i) const { return seg_b_[i]; }

  // Strict interior test; points on the boundary count as outside.
  bool inside(const Vec2& p) const;
  bool on_boundary(const Vec2& p) const;
  double distance(const Vec2& p) const;
  // Minimum over the closed box of the distance to the boundary curve.
  double box_distance(const AxisBox& box) const;
  bool box_meets_boundary(const AxisBox& box) const;
  // True when some boundary segment meets the open box.
  bool open_box_meets_boundary(const AxisBox& box) const;
  // Area of (polygon interior) intersected with the box; exact clipping when the
  // polygon is small, otherwise the trivial enclosure [0, area(box)].
  Enclosure clipped_area(const AxisBox& box) const;
  double area() const;
  double perimeter() const;
  AxisBox bounding_box() const;
  double diameter() const;
  std::vector<Vec2> vertices() const;

 private:
  std::vector<std::vector<Vec2>> rings_;
  std::vector<Vec2> seg_a_, seg_b_;
  // Uniform bucket grid over the bounding box for segment lookups.
  double gx0_ = 0, gy0_ = 0, gh_ = 1;
  int gnx_ = 1, gny_ = 1;
  std::vector<std::vector<int>> buckets_;
  void build_buckets();
  template <class F>
  void visit_segments_near(const AxisBox& region, F&& f) const;
};

}  // namespace rw

#endif
