#include <doctest.h>

#include "roughweyl/bump_series.hpp"
#include "roughweyl/domain.hpp"

#include <cmath>
#include <random>

using namespace rw;

namespace {
BumpSeriesParams params(int p, int n_max, bool faithful) {
  BumpSeriesParams prm;
  prm.p = p;
  prm.n_max = n_max;
  prm.eps = constant_schedule(n_max + 2);
  prm.theorem_faithful = faithful;
  return prm;
}
}  // namespace

TEST_CASE("bump sums at hand-checked points") {
  BumpSeriesParams prm = params(2, 3, false);
  CHECK(bump_sum(prm, 0.0, 3) == 0.0);
  CHECK(bump_sum(prm, 1.0, 3) == 0.0);
  CHECK(bump_sum(prm, 0.5, 0) == 0.5);
  // level 0 tent at 5/8 plus the level-1 tent at its peak
  CHECK(bump_sum(prm, 0.625, 1) == doctest::Approx(0.375 + 0.5 * std::exp2(-4.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("pyramid") {
  Eigen::VectorXd x(2);
  x << 0.5, 0.25;
  CHECK(psi(x) == 0.25);
  x << 1.5, 0.5;
  CHECK(psi(x) == 0.0);
  CHECK(psi_integral(1) == doctest::Approx(0.25));
}

TEST_CASE("tail bounds") {
  BumpSeriesParams prm = params(2, 3, false);
  CHECK(tail_bound(prm, 3) == doctest::Approx(std::exp2(-16.0 / 3.0)));
  for (int n = 0; n < 6; ++n) CHECK(tail_bound(prm, n + 1) <= tail_bound(prm, n));
  BumpSeriesParams z = prm;
  z.eps = {1, 1, 1, 1, 0};
  CHECK(tail_bound(z, 3) == 0.0);
}

TEST_CASE("partial sums increase and stay within the tail") {
  BumpSeriesParams prm = params(2, 4, false);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 2000; ++t) {
    double x = u(rng);
    for (int n = 0; n < 4; ++n) {
      double a = bump_sum(prm, x, n), b = bump_sum(prm, x, n + 1);
      CHECK(a <= b);
      CHECK(bump_sum(prm, x, 4) - a <= tail_bound(prm, n) + 1e-15);
    }
  }
}

TEST_CASE("bump height constant") {
  CHECK(b_psi_p(params(24, 2, true)) == doctest::Approx(std::sqrt(2.0) * std::exp2(-5.0) * 1.5));
  CHECK(b_psi_p(params(24, 2, true)) == doctest::Approx(0.0663).epsilon(1e-3));
  CHECK(b_psi_p(params(12, 2, true)) == doctest::Approx(1.061).epsilon(1e-3));
}

TEST_CASE("theorem-faithful certificates") {
  ConstructionCertificate ok = certify(params(24, 2, true));
  for (const auto& c : ok.checks) {
    CAPTURE(c.id);
    CHECK(c.pass);
    CHECK(c.margin >= 0);
  }
  CHECK(std::abs(ok.c_psi_p - ok.c_psi_p_alt) <= 1e-6);

  ConstructionCertificate bad = certify(params(12, 2, true));
  REQUIRE(bad.find("bump-height") != nullptr);
  CHECK_FALSE(bad.find("bump-height")->pass);
  CHECK_THROWS_AS(validate(params(12, 2, true)), ConstructionError);
}

TEST_CASE("exploration mode records failures without refusing") {
  BumpSeriesParams prm = params(2, 3, false);
  ConstructionCertificate c = certify(prm);
  CHECK_FALSE(c.all_pass());
  CHECK_FALSE(c.find("bump-height")->pass);
  CHECK(c.find("schedule")->pass);
  CompositeDomain om = make_domain(prm);
  CHECK(om.area() == doctest::Approx(1.0 + bump_integral(prm, 3)));
  CHECK(om.representation_error() == doctest::Approx(tail_bound(prm, 3)));
}

TEST_CASE("scale exponent clause fails for small p") {
  BumpSeriesParams prm = params(2, 2, false);
  prm.alpha = 0.2;  // p < 1/(1 - alpha) and p < 1/alpha
  ConstructionCertificate c = certify(prm);
  const Check* s = c.find("scale-exponent");
  REQUIRE(s != nullptr);
  CHECK_FALSE(s->pass);
}

TEST_CASE("decaying schedule satisfies the half-index condition") {
  auto e = decaying_schedule(0.5, 2.0 / 3.0, 24, 12);
  for (std::size_t j = 1; j < e.size(); ++j) {
    CHECK(e[j] <= e[j - 1]);
    CHECK(e[j / 2] <= 2 * e[j]);
    CHECK(std::exp2((1 - 2.0 / 3.0) * (static_cast<double>(j / 2) - static_cast<double>(j)) * 24) <= e[j / 2]);
  }
}

TEST_CASE("spectral windows and the lower-bound evaluator") {
  BumpSeriesParams prm = params(24, 2, true);
  auto w = spectral_windows(prm);
  double c = c_psi_p(prm).first;
  REQUIRE(w.size() == 2);
  CHECK(w[0].first == doctest::Approx(c * std::exp2(16.0)));
  LipLowerBound lb = lip_lower_bound(prm, w[0].first);
  CHECK(lb.n == 1);
  CHECK(lb.terms[1] == doctest::Approx(std::pow(c * std::exp2(16.0), -1.5) * std::pow(w[0].first, 1.5)));
  CHECK_THROWS_AS(lip_lower_bound(prm, 10.0), DomainError);
}

TEST_CASE("volume gap between levels") {
  BumpSeriesParams prm = params(2, 4, false);
  for (int n = 1; n <= 4; ++n)
    CHECK(bump_integral(prm, 4) - bump_integral(prm, n - 1) <=
          prm.eps_at(n) * std::exp2(-prm.alpha * (n - 1) * prm.p) * kPsiMax + 1e-15);
}
