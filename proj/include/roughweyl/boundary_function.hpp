#ifndef ROUGHWEYL_BOUNDARY_FUNCTION_HPP
#define ROUGHWEYL_BOUNDARY_FUNCTION_HPP

#include "roughweyl/bump_series.hpp"
#include "roughweyl/geometry.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace rw {

enum class FunctionKind { Polyline, Constant, BumpSeries, Samples };

const char* kind_name(FunctionKind k);

// A continuous graph function on a closed (d-1)-box. Evaluation is exact for
// polylines and constants; bump series are evaluated level by level; samples
// are interpolated multilinearly and their enclosures are marked declared.
class BoundaryFunction {
 public:
  static BoundaryFunction polyline(std::vector<double> xs, std::vector<double> ys);
  static BoundaryFunction constant(const AxisBox& base, double value);
  // Converted to a polyline when the base is 1-D and the vertex count is small.
  static BoundaryFunction bump_series(const BumpSeriesParams& prm, double offset = 0.0);
  static BoundaryFunction samples(const AxisBox& base, std::vector<int> shape, std::vector<double> values);

  FunctionKind kind() const { return kind_; }
  int dim_base() const { return base_.dim(); }
  const AxisBox& base() const { return base_; }
  bool exact() const { return kind_ == FunctionKind::Polyline || kind_ == FunctionKind::Constant; }

  double operator()(const Point& x) const;
  double eval1(double x) const;

  Enclosure sup(const AxisBox& box) const;
  Enclosure inf(const AxisBox& box) const;
  Enclosure osc(const AxisBox& box) const;
  // 1-D conveniences.
  Enclosure sup1(double lo, double hi) const;
  Enclosure inf1(double lo, double hi) const;
  Enclosure osc1(double lo, double hi) const;
  double integral1(double lo, double hi) const;  // polyline/constant only

  double lipschitz() const;  // max slope bound (Euclidean)
  BoundaryFunction shifted(double c) const;

  std::optional<double> holder_alpha;
  std::optional<double> holder_seminorm;
  // Declared distance to the function being modelled (truncation tail).
  double representation_error = 0.0;

  // Polyline data (empty otherwise).
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const BumpSeriesParams* bump() const { return bump_ ? bump_.get() : nullptr; }
  double offset() const { return offset_; }
  const std::vector<int>& sample_shape() const { return shape_; }
  const std::vector<double>& sample_values() const { return values_; }

 private:
  FunctionKind kind_ = FunctionKind::Constant;
  AxisBox base_;
  double offset_ = 0.0;  // constant value, or additive offset
  std::vector<double> xs_, ys_;
  // sparse tables for range max/min over polyline vertices
  std::vector<std::vector<double>> rmax_, rmin_;
  std::shared_ptr<const BumpSeriesParams> bump_;
  std::vector<int> shape_;
  std::vector<double> values_;

  void build_tables();
  double vertex_range_max(std::size_t i, std::size_t j) const;
  double vertex_range_min(std::size_t i, std::size_t j) const;
  void check_box(const AxisBox& box) const;
  Enclosure sample_range(const AxisBox& box, bool upper) const;
};

// Exact greedy cover of a 1-D base by maximal closed intervals with
// Osc <= eps (certified through the upper enclosure). Returns the break
// points t_0 < t_1 < ... < t_N.
std::vector<double> greedy_osc_breaks(const BoundaryFunction& f, double lo, double hi, double eps);

struct VCount {
  long long lower = 1;
  long long upper = 1;
  static constexpr long long kUnbounded = std::numeric_limits<long long>::max();
};

VCount v_count(const BoundaryFunction& f, const AxisBox& box, double delta, int depth);

struct HolderSample {
  double seminorm_lower = 0.0;
  long long violations = 0;
  long long pairs = 0;
};

HolderSample holder_check(const BoundaryFunction& f, double alpha, long long sample_budget,
                          std::uint64_t seed = 1);

}  // namespace rw

#endif
