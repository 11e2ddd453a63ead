#include <doctest.h>

#include "roughweyl/bump_series.hpp"
#include "roughweyl/constants.hpp"
#include "roughweyl/eigensolver.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace rw;

namespace {
const double pi = std::numbers::pi;

GridMask random_mask(std::mt19937_64& rng, int nx, int ny, double fill) {
  std::bernoulli_distribution on(fill);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(nx) * ny);
  for (auto& c : cells) c = on(rng);
  return GridMask::from_cells(nx, ny, 1.0 / std::max(nx, ny), cells);
}

CountingCurve synthetic(const std::vector<double>& lams, double (*excess)(double)) {
  CountingCurve c;
  for (double l : lams) {
    c.lambdas.push_back(l);
    c.counts.push_back(0);
    c.weyl.push_back(0);
    c.excess.push_back(excess(l));
  }
  return c;
}
}  // namespace

TEST_CASE("single and double cell neumann operators") {
  GridMask one = GridMask::from_cells(1, 1, 1.0, {1});
  DiscreteOperator a = assemble(one, Bc::Neumann);
  CHECK(a.dim() == 1);
  CHECK(a.A.coeff(0, 0) == 0.0);
  CHECK(count_below(a, 1e-6).count == 1);
  CHECK(count_below(a, 0).count == 0);

  GridMask two = GridMask::from_cells(2, 1, 1.0, {1, 1});
  DiscreteOperator b = assemble(two, Bc::Neumann);
  CHECK(b.dim() == 2);
  CHECK(count_below(b, 1.0).count == 1);                 // {0, 2}
  CHECK(count_below(b, std::sqrt(2.0) * 0.999).count == 1);
  CHECK(count_below(b, 1.5).count == 2);
  CHECK(dense_count_below(b, 1.5) == 2);
}

TEST_CASE("empty masks are rejected") {
  GridMask none = GridMask::from_cells(2, 2, 0.5, {0, 0, 0, 0});
  CHECK_THROWS_AS(assemble(none, Bc::Neumann), DomainError);
  CHECK_THROWS_AS(assemble(none, Bc::Dirichlet), DomainError);
}

TEST_CASE("unit square raster") {
  auto sq = CompositeDomain::unit_square();
  GridMask m = rasterize(sq, 1.0 / 64);
  CHECK(m.cell_count() == 64 * 64);
  CHECK(m.measure_gap == 0.0);
  CHECK(m.node_count() == 63 * 63);
  CHECK_THROWS_AS(rasterize(sq, 0.5), PreconditionError);
}

TEST_CASE("raster of the bump domain") {
  BumpSeriesParams prm;
  prm.eps = constant_schedule(8);
  auto om = make_domain(prm);
  GridMask m = rasterize(om, std::ldexp(1.0, -7));
  long long inside = 0;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      Point c(2);
      c << m.origin[0] + (i + 0.5) * m.h, m.origin[1] + (j + 0.5) * m.h;
      bool in = om.inside(c);
      CHECK(in == m.cell(i, j));
      inside += in;
    }
  CHECK(inside == m.cell_count());
  CHECK(m.measure_gap < 0.05);
}

TEST_CASE("operator invariants") {
  std::mt19937_64 rng(3);
  GridMask m = random_mask(rng, 12, 9, 0.7);
  DiscreteOperator n = assemble(m, Bc::Neumann);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n.dim());
  CHECK((n.A * ones).cwiseAbs().maxCoeff() < 1e-9);
  Eigen::SparseMatrix<double> t = n.A.transpose();
  CHECK((n.A - t).norm() == 0.0);
  CHECK(count_below(n, 1e6).count == n.dim());
  DiscreteOperator d = assemble(m, Bc::Dirichlet);
  for (int i = 0; i < d.dim(); ++i) {
    double off = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.A, i); it; ++it)
      if (it.row() != i) off += std::abs(it.value());
    CHECK(d.A.coeff(i, i) > 0);
    CHECK(d.A.coeff(i, i) >= off);
  }
  CHECK(count_below(d, 0).count == 0);
}

TEST_CASE("neumann zero modes count the components") {
  // two separate blocks
  std::vector<std::uint8_t> cells = {1, 1, 0, 1, 1,
                                     1, 1, 0, 1, 1};
  DiscreteOperator op = assemble(GridMask::from_cells(5, 2, 0.2, cells), Bc::Neumann);
  CHECK(count_below(op, 1e-4).count == 2);
}

TEST_CASE("inertia agrees with dense eigenvalues on random masks") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 12; ++t) {
    GridMask m = random_mask(rng, 10 + t, 8 + t, 0.8);
    for (Bc bc : {Bc::Dirichlet, Bc::Neumann}) {
      DiscreteOperator op;
      try {
        op = assemble(m, bc);
      } catch (const DomainError&) {
        continue;
      }
      InertiaCounter ic(op);
      for (int k = 0; k < 5; ++k) {
        double lam = 60 * u(rng);
        InertiaCount c = ic.count_below(lam);
        CHECK_FALSE(c.flagged);
        CHECK(c.count == dense_count_below(op, lam));
      }
    }
  }
}

TEST_CASE("ties at lambda squared are excluded") {
  GridMask two = GridMask::from_cells(2, 1, 1.0, {1, 1});
  DiscreteOperator b = assemble(two, Bc::Neumann);
  InertiaCount c = count_below(b, std::sqrt(2.0));
  CHECK(c.count == 1);
}

TEST_CASE("square dirichlet counts") {
  auto sq = CompositeDomain::unit_square();
  DiscreteOperator op = assemble(rasterize(sq, 1.0 / 128), Bc::Dirichlet);
  const double h = 1.0 / 128;
  const double first = 8 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
  CHECK(std::abs(first - 2 * pi * pi) <= 0.01 * 2 * pi * pi);
  CHECK(count_below(op, std::sqrt(first) * (1 - 1e-9)).count == 0);
  CHECK(count_below(op, std::sqrt(first) * (1 + 1e-9)).count == 1);
  CHECK(count_below(op, 10).count == 6);
}

TEST_CASE("dense cross-check at coarse pitch") {
  auto sq = CompositeDomain::unit_square();
  DiscreteOperator op = assemble(rasterize(sq, 1.0 / 64), Bc::Dirichlet);
  CHECK(dense_count_below(op, 10) == 6);
  CHECK(count_below(op, 10).count == 6);
}

TEST_CASE("dirichlet counts grow with the mask") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> pick(0, 14 * 14 - 1);
  std::vector<std::uint8_t> cells(14 * 14, 0);
  for (int j = 3; j < 11; ++j)
    for (int i = 3; i < 11; ++i) cells[j * 14 + i] = 1;
  long long prev = count_below(assemble(GridMask::from_cells(14, 14, 1.0 / 14, cells), Bc::Dirichlet), 40).count;
  for (int step = 0; step < 30; ++step) {
    cells[pick(rng)] = 1;
    long long now = count_below(assemble(GridMask::from_cells(14, 14, 1.0 / 14, cells), Bc::Dirichlet), 40).count;
    CHECK(now >= prev);
    prev = now;
  }
}

TEST_CASE("h refinement approaches the lattice count") {
  auto sq = CompositeDomain::unit_square();
  const double lam = 20;
  long long exact = cube_count_exact(1, lam, 2, Bc::Dirichlet);
  long long prev_err = -1;
  for (int n : {64, 128, 256}) {
    long long c = count_below(assemble(rasterize(sq, 1.0 / n), Bc::Dirichlet), lam).count;
    long long err = std::llabs(c - exact);
    if (prev_err >= 0) CHECK(err <= prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 1);
}

TEST_CASE("sweeps") {
  auto sq = CompositeDomain::unit_square();
  CountingCurve empty = sweep(sq, {}, 1.0 / 64, Bc::Dirichlet);
  CHECK(empty.lambdas.empty());
  CountingCurve c = sweep(sq, {5, 10, 20}, 1.0 / 128, Bc::Dirichlet);
  REQUIRE(c.counts.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    long long ex = cube_count_exact(1, c.lambdas[i], 2, Bc::Dirichlet);
    CHECK(std::abs(static_cast<double>(c.counts[i] - ex)) <= 0.02 * std::max<double>(ex, 1.0));
    CHECK(c.weyl[i] == doctest::Approx(c.lambdas[i] * c.lambdas[i] / (4 * pi)));
    CHECK(c.excess[i] == doctest::Approx(c.counts[i] - c.weyl[i]));
    if (i > 0) CHECK(c.counts[i] >= c.counts[i - 1]);
  }
  CountingCurve n = sweep(sq, {5, 10}, 1.0 / 64, Bc::Neumann);
  CHECK(n.flags[0].find("staircase") != std::string::npos);
  CHECK_THROWS_AS(sweep(sq, {10, 5}, 1.0 / 64, Bc::Dirichlet), PreconditionError);
}

TEST_CASE("excess fits on synthetic curves") {
  std::vector<double> lams;
  for (int i = 0; i <= 20; ++i) lams.push_back(10 * std::pow(10.0, i / 20.0));
  ExcessFit f = fit_excess(synthetic(lams, [](double l) { return std::pow(l, 1.5); }), 0, 1e9);
  CHECK(std::abs(f.exponent - 1.5) <= 1e-9);
  CHECK(f.ci_lo <= 1.5 + 1e-9);
  CHECK(f.ci_hi >= 1.5 - 1e-9);
  CHECK(f.points == 21);

  std::vector<double> big;
  for (int i = 0; i <= 20; ++i) big.push_back(1e3 * std::pow(10.0, i / 20.0));
  ExcessFit g = fit_excess(synthetic(big, [](double l) { return 3 * std::pow(l, 1.5) + l; }), 1e3, 1e4);
  CHECK(g.exponent > 1.4);
  CHECK(g.exponent < 1.6);

  CHECK_THROWS_AS(fit_excess(synthetic(lams, [](double) { return 0.0; }), 0, 1e9), DomainError);
  CHECK_THROWS_AS(fit_excess(synthetic({1, 2, 3}, [](double l) { return l; }), 0, 10), DomainError);
}

TEST_CASE("square dirichlet excess slope is near one") {
  std::vector<double> lams;
  for (double l = 50; l <= 400; l += 5) lams.push_back(l);
  CountingCurve c;
  for (double l : lams) {
    c.lambdas.push_back(l);
    long long n = cube_count_exact(1, l, 2, Bc::Dirichlet);
    c.counts.push_back(n);
    c.weyl.push_back(l * l / (4 * pi));
    c.excess.push_back(n - c.weyl.back());
  }
  ExcessFit f = fit_excess(c, 50, 400);
  CHECK(f.exponent == doctest::Approx(1.0).epsilon(0.15));
}
