#ifndef ROUGHWEYL_EIGENSOLVER_HPP
#define ROUGHWEYL_EIGENSOLVER_HPP

#include "roughweyl/counting.hpp"
#include "roughweyl/domain.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <vector>

namespace rw {

// Planar raster: cell (i, j) spans origin + h [i, i+1] x [j, j+1]; node (i, j)
// sits at origin + h (i, j).
struct GridMask {
  double h = 0.0;
  Vec2 origin = Vec2::Zero();
  int nx = 0, ny = 0;
  std::vector<std::uint8_t> cells;  // nx * ny, cell centre inside the domain
  std::vector<std::uint8_t> nodes;  // (nx + 1) * (ny + 1), node inside the domain
  double measure_gap = 0.0;         // |h^2 #cells - area|

  bool cell(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i] != 0; }
  bool node(int i, int j) const { return nodes[static_cast<std::size_t>(j) * (nx + 1) + i] != 0; }
  long long cell_count() const;
  long long node_count() const;
  static GridMask from_cells(int nx, int ny, double h, const std::vector<std::uint8_t>& cells);
};

GridMask rasterize(const CompositeDomain& omega, double h);

struct DiscreteOperator {
  Eigen::SparseMatrix<double> A;  // symmetric, both triangles stored
  Bc bc = Bc::Dirichlet;
  double h = 0.0;
  int dim() const { return static_cast<int>(A.rows()); }
};

// Neumann: cell-centred finite volumes, flux across faces shared by two cells.
// Dirichlet: five-point stencil on inside nodes, zero outside.
DiscreteOperator assemble(const GridMask& mask, Bc bc);

struct InertiaCount {
  long long count = 0;
  bool nudged = false;   // a near-zero pivot forced a downward shift of lambda^2
  bool flagged = false;  // the shift did not resolve it
};

// Counts eigenvalues strictly below lambda^2 through the signs of D in a
// fill-reducing sparse L D L^T of A - lambda^2 I.
class InertiaCounter {
 public:
  explicit InertiaCounter(const DiscreteOperator& op);
  InertiaCount count_below(double lambda);

 private:
  const DiscreteOperator& op_;
  Eigen::SparseMatrix<double> shifted_;
  std::vector<Eigen::Index> diag_pos_;  // value index of each diagonal entry
  std::vector<double> diag_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;

  bool factor(double shift, long long& negatives, double& smallest);
};

InertiaCount count_below(const DiscreteOperator& op, double lambda);
// Dense symmetric eigendecomposition; for cross-checks on small operators.
long long dense_count_below(const DiscreteOperator& op, double lambda);

struct CountingCurve {
  std::vector<double> lambdas;
  std::vector<long long> counts;
  std::vector<double> weyl;
  std::vector<double> excess;
  std::vector<std::string> flags;
  Bc bc = Bc::Dirichlet;
  double h = 0.0;
};

CountingCurve sweep(const CompositeDomain& omega, const std::vector<double>& lambdas, double h, Bc bc);
CountingCurve sweep(const GridMask& mask, double area, const std::vector<double>& lambdas, Bc bc);

struct ExcessFit {
  double exponent = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // bootstrap 95% interval
  int points = 0;
};
ExcessFit fit_excess(const CountingCurve& curve, double lambda_lo, double lambda_hi, std::uint64_t seed = 1,
                     int resamples = 1000);

}  // namespace rw

#endif
