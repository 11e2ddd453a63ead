#ifndef ROUGHWEYL_COVERING_HPP
#define ROUGHWEYL_COVERING_HPP

#include "roughweyl/boundary_function.hpp"
#include "roughweyl/domain.hpp"
#include "roughweyl/geometry.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rw {

// P: rectangle with max edge <= scale. V: subgraph sliver over a base cube,
// floor exactly `scale` below the cap infimum. M: domain trimmed by a cube of
// edge `scale`. W: dyadic Whitney cube of edge `scale`.
enum class PieceKind { P, V, M, W };

const char* piece_kind_name(PieceKind k);

struct PartitionPiece {
  PieceKind kind = PieceKind::P;
  AxisBox box;     // global bounding box (the piece itself for P and W)
  AxisBox local;   // chart coordinates, when the piece comes from a chart
  AxisBox base;    // V: base cube in chart coordinates
  double floor = 0.0;  // V: floor level in chart coordinates
  int chart = -1;
  double scale = 0.0;
  Enclosure mu;  // measure of the piece
  int level = 0;  // W: dyadic level i; P from bands: band index m
};

struct CoverReport {
  std::vector<PartitionPiece> pieces;
  int multiplicity = 0;
  long long small_piece_count = 0;
  bool coverage_ok = true;
  std::vector<Point> coverage_witnesses;  // uncovered probe points, if any
  std::vector<Check> checks;
  // whitney only
  std::vector<AxisBox> residue;
  double residue_measure = 0.0;
  // besicovitch only: indices into pieces of the disjoint subfamily
  std::vector<int> disjoint_subfamily;
  std::vector<double> radii;
  long long generated = 0;  // pieces built before any filtering

  bool all_pass() const;
  const Check* find(const std::string& id) const;
  std::vector<AxisBox> boxes() const;
};

// Exact maximum overlap of open boxes (0 for an empty family).
int multiplicity(const std::vector<AxisBox>& boxes);

// Min and max of the overlap count over the cells of `region` cut out by the
// box coordinates. min >= 1 means the closures cover the closed region.
struct OverlapStats {
  int min = 0;
  int max = 0;
  Point witness;  // a point where the min is attained
};
OverlapStats overlap_stats(const std::vector<AxisBox>& boxes, const AxisBox& region);

// Greedy largest-radius-first selection of centred cubes Q_{rho(y)}[y].
CoverReport besicovitch_cover(const std::vector<Point>& K, const std::vector<double>& rho);
CoverReport besicovitch_cover(const std::vector<Point>& K, const std::function<double(const Point&)>& rho);

// Cubes covering the closed base with Osc <= eps on each.
CoverReport osc_cover(const BoundaryFunction& f, double eps);

// osc_cover at 2^{m-1} delta with large cubes split to edges in (delta/2, delta].
CoverReport refine_partition(const BoundaryFunction& f, double delta, int m);

CoverReport whitney(const CompositeDomain& omega, int i_min, int i_max, double residue_threshold = INFINITY);

// P/V partition of a chart's subgraph. Pieces for which `keep` returns false
// are dropped as they are generated; checks on the full family run only when
// no filter is given.
using PieceFilter = std::function<bool(const PartitionPiece&)>;
CoverReport graph_partition(const Chart& chart, double delta, const PieceFilter& keep = nullptr,
                            int chart_index = 0);

CoverReport m_cover(const CompositeDomain& omega, double delta);

struct PartitionOptions {
  const TauFunction* tau = nullptr;  // enables the cardinality checks
  double c_tau = 1.0;
  int probes = 10000;
  std::uint64_t seed = 1;
};
CoverReport domain_partition(const CompositeDomain& omega, double delta, const PartitionOptions& opt = {});

// Closure membership for a piece produced by graph_partition/m_cover/whitney.
bool piece_closure_contains(const CompositeDomain& omega, const PartitionPiece& piece, const Point& x);
// Upper bound for sup over the piece of dist(., boundary).
double piece_max_distance(const CompositeDomain& omega, const PartitionPiece& piece);

struct DyadicSum {
  double lhs = 0.0;
  double rhs = 0.0;
};
DyadicSum dyadic_sum_bound(const std::function<double(double)>& h, double a, double b);

}  // namespace rw

#endif
