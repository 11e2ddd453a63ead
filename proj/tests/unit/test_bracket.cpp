#include <doctest.h>

#include "roughweyl/bracket.hpp"
#include "roughweyl/bump_series.hpp"
#include "roughweyl/constants.hpp"

#include <cmath>

using namespace rw;

namespace {
Point P(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

long long ledger_total(const std::vector<LedgerEntry>& l) {
  long long s = 0;
  for (const auto& e : l) s += e.contribution;
  return s;
}

void check_result(const BracketResult& r) {
  CHECK(ledger_total(r.dirichlet.lower_ledger) == r.dirichlet.lower);
  CHECK(ledger_total(r.dirichlet.upper_ledger) == r.dirichlet.upper);
  CHECK(ledger_total(r.neumann.upper_ledger) == r.neumann.upper);
  CHECK(r.dirichlet.lower <= r.dirichlet.upper);
  CHECK(r.neumann.lower <= r.neumann.upper);
  CHECK(r.dirichlet.certified == r.dirichlet.refusals.empty());
  CHECK(r.neumann.certified == r.neumann.refusals.empty());
}
}  // namespace

TEST_CASE("scale selection") {
  auto sq = CompositeDomain::unit_square();
  for (double lam : {0.5, 5.0, 40.0}) {
    double d = bracket_delta(sq, lam);
    CHECK(std::ldexp(1.0, static_cast<int>(std::round(std::log2(d)))) == d);
    CHECK(d <= sq.delta_omega());
    CHECK(d <= 1 / lam);
    CHECK(2 * d > std::min({sq.delta_omega(), 1 / lam, constants(2).C[7] / (2 * lam)}));
  }
  CHECK_THROWS_AS(bracket_delta(sq, 0), PreconditionError);
}

TEST_CASE("unit square brackets contain the exact counts") {
  auto sq = CompositeDomain::unit_square();
  for (double lam : {5.0, 10.0, 20.0, 40.0}) {
    BracketResult r = bracket(sq, lam);
    CAPTURE(lam);
    check_result(r);
    CHECK(r.dirichlet.certified);
    CHECK(r.neumann.certified);
    long long nd = cube_count_exact(1, lam, 2, Bc::Dirichlet);
    long long nn = cube_count_exact(1, lam, 2, Bc::Neumann);
    CHECK(r.dirichlet.lower <= nd);
    CHECK(nd <= r.dirichlet.upper);
    CHECK(r.neumann.lower <= nn);
    CHECK(nn <= r.neumann.upper);
  }
}

TEST_CASE("tiny lambda") {
  BracketResult r = bracket(CompositeDomain::unit_square(), 0.01);
  CHECK(r.dirichlet.lower == 0);
  CHECK(r.neumann.lower == 0);
  CHECK(r.neumann.upper >= 1);
  CHECK(r.dirichlet.upper >= 0);
}

TEST_CASE("rectangle brackets contain the separated-variable counts") {
  auto rect = CompositeDomain::box(AxisBox(P(0, 0), P(2, 1)), "rect");
  for (double lam : {4.0, 12.0}) {
    BracketResult r = bracket(rect, lam);
    check_result(r);
    long long nd = lattice_count(std::vector<double>{2, 1}, lam, Bc::Dirichlet).lo;
    long long nn = lattice_count(std::vector<double>{2, 1}, lam, Bc::Neumann).hi;
    CHECK(r.dirichlet.lower <= nd);
    CHECK(nd <= r.dirichlet.upper);
    CHECK(nn <= r.neumann.upper);
  }
}

TEST_CASE("L-shape brackets are consistent with its three squares") {
  auto L = CompositeDomain::l_shape();
  for (double lam : {8.0, 16.0}) {
    BracketResult r = bracket(L, lam);
    check_result(r);
    CHECK(r.dirichlet.certified);
    // N_D(L) >= sum of three Dirichlet squares, N_N(L) <= sum of three Neumann squares
    long long sd = 3 * cube_count_exact(0.5, lam, 2, Bc::Dirichlet);
    long long sn = 3 * cube_count_exact(0.5, lam, 2, Bc::Neumann);
    CHECK(r.dirichlet.lower <= sn);
    CHECK(sd <= r.dirichlet.upper);
    CHECK(sd <= r.neumann.upper);
  }
}

TEST_CASE("bump domain bracket runs and keeps its ledgers") {
  BumpSeriesParams prm;
  prm.eps = constant_schedule(8);
  BracketResult r = bracket(make_domain(prm), 10);
  check_result(r);
  CHECK(r.kappa_dirichlet >= 1);
  CHECK(r.kappa_neumann >= 1);
  CHECK(r.weyl_term == doctest::Approx(weyl_constant(2) * make_domain(prm).area() * 100));
}
