#ifndef ROUGHWEYL_DOMAIN_HPP
#define ROUGHWEYL_DOMAIN_HPP

#include "roughweyl/boundary_function.hpp"
#include "roughweyl/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rw {

// Signed axis permutation plus translation: y_i = sign_i * x_{perm_i} + offset_i.
struct AxisMap {
  std::vector<int> perm;
  std::vector<int> sign;
  Point offset;

  static AxisMap identity(int d);
  int dim() const { return static_cast<int>(perm.size()); }
  Point to_local(const Point& x) const;
  Point to_global(const Point& y) const;
  AxisBox box_to_local(const AxisBox& b) const;
  AxisBox box_to_global(const AxisBox& b) const;
  void validate() const;
};

// In local coordinates the chart is {(y', y_d) : y' in base(f), b < y_d < f(y')}.
struct Chart {
  AxisMap map;
  BoundaryFunction f;
  double b = 0.0;

  int dim() const { return map.dim(); }
  double edge() const { return f.base().max_edge(); }
  // base x (b, sup f), local coordinates
  AxisBox local_box() const;
  bool contains_local(const Point& y) const;
};

// Edge chart for an axis-aligned boundary piece of a planar domain: the
// boundary lies on x_axis = level for the tangential range (t0, t1), the
// interior is on the side `inward` (+1 or -1) and the chart has depth `depth`.
Chart flat_chart(int d, int axis, double level, int inward, const AxisBox& tangential, double depth);

class CompositeDomain {
 public:
  // Planar domain bounded by a polygon.
  CompositeDomain(std::string name, std::vector<Chart> charts, Polygon boundary);
  // Axis box in any dimension, with one flat chart per face.
  static CompositeDomain box(const AxisBox& b, std::string name = "box");
  static CompositeDomain unit_square();
  static CompositeDomain l_shape();
  // Unit square whose top side is replaced by the graph of f (f > 0 on base [0,1]).
  static CompositeDomain graph_domain(const BoundaryFunction& top, std::string name);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::vector<Chart>& charts() const { return charts_; }
  int n_charts() const { return static_cast<int>(charts_.size()); }
  const AxisBox& bounding_box() const { return bbox_; }
  double diameter() const { return diameter_; }
  double delta_omega() const { return delta_omega_; }
  double area() const;  // exact measure
  bool is_polygon() const { return polygon_.has_value(); }
  const Polygon& polygon() const;
  // Declared tolerance of the boundary itself (truncated series).
  double representation_error() const { return representation_error_; }

  bool inside(const Point& x) const;  // open set membership
  double distance(const Point& x) const;  // to the boundary, any point
  Enclosure boundary_dist(const Point& x) const;  // x must be inside

  enum class BoxClass { Inside, Outside, Mixed };
  BoxClass classify(const AxisBox& box) const;  // open box against the open domain
  // min over the closed box of dist(., boundary)
  double box_distance(const AxisBox& box) const;
  // an upper bound for max over the closed box of dist(., boundary)
  double box_max_distance(const AxisBox& box) const;
  // measure of box intersected with the domain (exact for polygons and boxes)
  double clipped_area(const AxisBox& box) const;

  // sampled points of the boundary (for chart coverage checks and probes)
  std::vector<Point> boundary_samples(double spacing) const;

  // chart checks; empty when all pass
  std::vector<std::string> validate_charts(int probes_per_axis = 16) const;

 private:
  CompositeDomain() = default;
  std::string name_;
  int dim_ = 2;
  std::vector<Chart> charts_;
  std::optional<Polygon> polygon_;
  std::optional<AxisBox> box_;
  AxisBox bbox_;
  double diameter_ = 0.0;
  double delta_omega_ = 0.0;
  double representation_error_ = 0.0;

  void finish();
  bool passes_delta(double delta) const;
};

// Nondecreasing, right-continuous function on [0, inf): linear between knots,
// jumps allowed at knots, constant after the last knot.
struct ProfileCurve {
  std::vector<double> s;      // knots, s[0] = 0
  std::vector<double> left;   // left limit at s[i]
  std::vector<double> right;  // value at s[i]

  double operator()(double x) const;
  void push(double knot, double left_value, double right_value);
  bool monotone() const;
  static ProfileCurve step(const std::vector<std::pair<double, double>>& jumps);  // (position, increment)
  static ProfileCurve piecewise_linear(std::vector<double> knots, std::vector<double> values);
};

// Enclosure of s -> mu(boundary layer of width s).
struct MeasureProfile {
  ProfileCurve lo, hi;
  Enclosure saturation;
  double resolution = 0.0;
  bool declared = false;

  Enclosure operator()(double s) const { return {lo(s), hi(s), declared}; }
  static MeasureProfile exact(const ProfileCurve& c);  // lo = hi = c
};

MeasureProfile measure_profile(const CompositeDomain& omega, double resolution);
Enclosure boundary_layer_measure(const CompositeDomain& omega, double eps, double resolution);

struct TauFunction {
  enum class Kind { PowerLaw, Tabulated } kind = Kind::PowerLaw;
  double A = 0.0, beta = 1.0, B = 1.0;
  std::vector<double> t, values;  // tabulated, linear in between

  static TauFunction power_law(double A, double beta, double B);
  static TauFunction tabulated(std::vector<double> t, std::vector<double> values);
  double operator()(double x) const;
  // integral of t^{-2} tau(t) over [lo, hi]
  double integral_t2(double lo, double hi) const;
};

struct TauFit {
  double value = 0.0;
  double t_min = 0.0, t_max = 0.0;
};

TauFit tau_fit(const CompositeDomain& omega, const TauFunction& tau, const std::vector<double>& probe_deltas,
               int depth = 10);
TauFunction lip_tau(double alpha, double seminorm, double diameter, int d);

}  // namespace rw

#endif
