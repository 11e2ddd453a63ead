#include "roughweyl/eigensolver.hpp"

#include "roughweyl/constants.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rw {

long long GridMask::cell_count() const {
  return std::count(cells.begin(), cells.end(), std::uint8_t{1});
}

long long GridMask::node_count() const {
  return std::count(nodes.begin(), nodes.end(), std::uint8_t{1});
}

GridMask GridMask::from_cells(int nx, int ny, double h, const std::vector<std::uint8_t>& cells) {
  if (nx <= 0 || ny <= 0 || cells.size() != static_cast<std::size_t>(nx) * ny)
    throw DomainError("from_cells: cell array does not match the grid");
  GridMask m;
  m.h = h;
  m.nx = nx;
  m.ny = ny;
  m.cells = cells;
  // a node is inside when all four cells around it are
  m.nodes.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0);
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      if (m.cell(i - 1, j - 1) && m.cell(i, j - 1) && m.cell(i - 1, j) && m.cell(i, j))
        m.nodes[static_cast<std::size_t>(j) * (nx + 1) + i] = 1;
  return m;
}

GridMask rasterize(const CompositeDomain& omega, double h) {
  if (omega.dim() != 2) throw DomainError("rasterize supports planar domains only");
  if (!(h > 0)) throw PreconditionError("rasterize needs h > 0");
  if (h > omega.delta_omega())
    throw PreconditionError("rasterize: h <= delta_Omega violated (h = " + std::to_string(h) + ")");
  const AxisBox& bb = omega.bounding_box();
  GridMask m;
  m.h = h;
  m.origin = Vec2(bb.lo(0), bb.lo(1));
  m.nx = static_cast<int>(std::ceil(bb.edge(0) / h - 1e-12));
  m.ny = static_cast<int>(std::ceil(bb.edge(1) / h - 1e-12));
  m.cells.assign(static_cast<std::size_t>(m.nx) * m.ny, 0);
  m.nodes.assign(static_cast<std::size_t>(m.nx + 1) * (m.ny + 1), 0);
  Point x(2);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      x << m.origin[0] + (i + 0.5) * h, m.origin[1] + (j + 0.5) * h;
      if (omega.inside(x)) m.cells[static_cast<std::size_t>(j) * m.nx + i] = 1;
    }
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i) {
      x << m.origin[0] + i * h, m.origin[1] + j * h;
      if (omega.inside(x)) m.nodes[static_cast<std::size_t>(j) * (m.nx + 1) + i] = 1;
    }
  m.measure_gap = std::abs(h * h * static_cast<double>(m.cell_count()) - omega.area());
  return m;
}

DiscreteOperator assemble(const GridMask& mask, Bc bc) {
  DiscreteOperator op;
  op.bc = bc;
  op.h = mask.h;
  const double w = 1.0 / (mask.h * mask.h);
  std::vector<Eigen::Triplet<double>> t;
  if (bc == Bc::Neumann) {
    std::vector<int> id(mask.cells.size(), -1);
    int n = 0;
    for (std::size_t k = 0; k < mask.cells.size(); ++k)
      if (mask.cells[k]) id[k] = n++;
    if (n == 0) throw DomainError("assemble: empty mask");
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    auto link = [&](int a, int b) {
      t.emplace_back(a, b, -w);
      t.emplace_back(b, a, -w);
      diag[static_cast<std::size_t>(a)] += w;
      diag[static_cast<std::size_t>(b)] += w;
    };
    for (int j = 0; j < mask.ny; ++j)
      for (int i = 0; i < mask.nx; ++i) {
        int a = id[static_cast<std::size_t>(j) * mask.nx + i];
        if (a < 0) continue;
        if (i + 1 < mask.nx) {
          int b = id[static_cast<std::size_t>(j) * mask.nx + i + 1];
          if (b >= 0) link(a, b);
        }
        if (j + 1 < mask.ny) {
          int b = id[static_cast<std::size_t>(j + 1) * mask.nx + i];
          if (b >= 0) link(a, b);
        }
      }
    for (int a = 0; a < n; ++a) t.emplace_back(a, a, diag[static_cast<std::size_t>(a)]);
    op.A.resize(n, n);
  } else {
    const int sx = mask.nx + 1;
    std::vector<int> id(mask.nodes.size(), -1);
    int n = 0;
    for (std::size_t k = 0; k < mask.nodes.size(); ++k)
      if (mask.nodes[k]) id[k] = n++;
    if (n == 0) throw DomainError("assemble: empty mask");
    for (int j = 0; j <= mask.ny; ++j)
      for (int i = 0; i <= mask.nx; ++i) {
        int a = id[static_cast<std::size_t>(j) * sx + i];
        if (a < 0) continue;
        t.emplace_back(a, a, 4 * w);
        if (i + 1 <= mask.nx) {
          int b = id[static_cast<std::size_t>(j) * sx + i + 1];
          if (b >= 0) {
            t.emplace_back(a, b, -w);
            t.emplace_back(b, a, -w);
          }
        }
        if (j + 1 <= mask.ny) {
          int b = id[static_cast<std::size_t>(j + 1) * sx + i];
          if (b >= 0) {
            t.emplace_back(a, b, -w);
            t.emplace_back(b, a, -w);
          }
        }
      }
    op.A.resize(n, n);
  }
  op.A.setFromTriplets(t.begin(), t.end());
  op.A.makeCompressed();
  return op;
}

// ---- inertia

InertiaCounter::InertiaCounter(const DiscreteOperator& op) : op_(op) {
  if (op.dim() == 0) throw DomainError("inertia count on an empty operator");
  shifted_ = op.A.triangularView<Eigen::Lower>();
  shifted_.makeCompressed();
  diag_pos_.resize(static_cast<std::size_t>(op.dim()));
  for (int c = 0; c < shifted_.outerSize(); ++c) {
    bool found = false;
    for (Eigen::Index k = shifted_.outerIndexPtr()[c]; k < shifted_.outerIndexPtr()[c + 1]; ++k)
      if (shifted_.innerIndexPtr()[k] == c) {
        diag_pos_[static_cast<std::size_t>(c)] = k;
        diag_.push_back(shifted_.valuePtr()[k]);
        found = true;
      }
    if (!found) throw DomainError("operator is missing a diagonal entry");
  }
}

bool InertiaCounter::factor(double shift, long long& negatives, double& smallest) {
  for (std::size_t c = 0; c < diag_.size(); ++c) shifted_.valuePtr()[diag_pos_[c]] = diag_[c] - shift;
  if (!analyzed_) {
    ldlt_.analyzePattern(shifted_);
    analyzed_ = true;
  }
  ldlt_.factorize(shifted_);
  if (ldlt_.info() != Eigen::Success) return false;
  const auto& D = ldlt_.vectorD();
  negatives = 0;
  smallest = INFINITY;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    if (D[i] < 0) ++negatives;
    smallest = std::min(smallest, std::abs(D[i]));
  }
  return true;
}

InertiaCount InertiaCounter::count_below(double lambda) {
  if (!(lambda >= 0)) throw PreconditionError("count_below needs lambda >= 0");
  InertiaCount r;
  const double scale = 8.0 / (op_.h * op_.h);
  double shift = lambda * lambda;
  for (int attempt = 0; attempt < 4; ++attempt) {
    long long neg = 0;
    double smallest = 0.0;
    bool ok = factor(shift, neg, smallest);
    if (ok && smallest > 1e-13 * scale) {
      r.count = neg;
      return r;
    }
    // eigenvalue (numerically) at the shift: move below it so ties stay excluded
    r.nudged = true;
    shift -= 1e-12 * std::max(shift, 1.0) * std::pow(10.0, attempt);
    if (shift < 0) shift = 0;
    if (ok && attempt == 3) r.count = neg;
  }
  r.flagged = true;
  return r;
}

InertiaCount count_below(const DiscreteOperator& op, double lambda) {
  InertiaCounter c(op);
  return c.count_below(lambda);
}

long long dense_count_below(const DiscreteOperator& op, double lambda) {
  if (op.dim() > 4000) throw DomainError("dense cross-check limited to dimension 4000");
  Eigen::MatrixXd M = Eigen::MatrixXd(op.A);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double l2 = lambda * lambda;
  return std::count_if(ev.data(), ev.data() + ev.size(), [&](double v) { return v < l2; });
}

// ---- curves

CountingCurve sweep(const GridMask& mask, double area, const std::vector<double>& lambdas, Bc bc) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw PreconditionError("sweep needs an ascending grid");
  CountingCurve c;
  c.bc = bc;
  c.h = mask.h;
  if (lambdas.empty()) return c;
  DiscreteOperator op = assemble(mask, bc);
  InertiaCounter counter(op);
  const double cw = weyl_constant(2);
  for (double l : lambdas) {
    InertiaCount n = counter.count_below(l);
    c.lambdas.push_back(l);
    c.counts.push_back(n.count);
    c.weyl.push_back(cw * area * l * l);
    c.excess.push_back(static_cast<double>(n.count) - c.weyl.back());
    std::string flag = n.flagged ? "flagged" : (n.nudged ? "nudged" : "ok");
    if (bc == Bc::Neumann) flag += ";staircase-surrogate";
    c.flags.push_back(flag);
  }
  for (std::size_t i = 1; i < c.counts.size(); ++i)
    if (c.counts[i] < c.counts[i - 1]) c.flags[i] += ";non-monotone";
  return c;
}

CountingCurve sweep(const CompositeDomain& omega, const std::vector<double>& lambdas, double h, Bc bc) {
  if (lambdas.empty()) {
    CountingCurve c;
    c.bc = bc;
    c.h = h;
    return c;
  }
  return sweep(rasterize(omega, h), omega.area(), lambdas, bc);
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& idx) {
  double mx = 0, my = 0;
  for (int i : idx) {
    mx += x[i];
    my += y[i];
  }
  mx /= idx.size();
  my /= idx.size();
  double sxy = 0, sxx = 0;
  for (int i : idx) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : NAN;
}

}  // namespace

ExcessFit fit_excess(const CountingCurve& curve, double lambda_lo, double lambda_hi, std::uint64_t seed, int resamples) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    double l = curve.lambdas[i];
    if (l < lambda_lo || l > lambda_hi) continue;
    double e = std::abs(curve.excess[i]);
    if (!(e > 0)) continue;
    x.push_back(std::log(l));
    y.push_back(std::log(e));
  }
  if (x.size() < 5) throw DomainError("fit_excess needs at least 5 points with nonzero excess in the window");
  ExcessFit f;
  f.points = static_cast<int>(x.size());
  std::vector<int> all(x.size());
  std::iota(all.begin(), all.end(), 0);
  f.exponent = slope(x, y, all);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(x.size()) - 1);
  std::vector<double> boot;
  std::vector<int> idx(x.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& i : idx) i = pick(rng);
    double s = slope(x, y, idx);
    if (std::isfinite(s)) boot.push_back(s);
  }
  if (boot.empty()) {
    f.ci_lo = f.ci_hi = f.exponent;
    return f;
  }
  std::sort(boot.begin(), boot.end());
  f.ci_lo = boot[static_cast<std::size_t>(0.025 * (boot.size() - 1))];
  f.ci_hi = boot[static_cast<std::size_t>(0.975 * (boot.size() - 1))];
  return f;
}

}  // namespace rw
