#include <doctest.h>

#include "roughweyl/constants.hpp"

#include <cmath>
#include <numbers>

using namespace rw;

TEST_CASE("weyl constants in low dimension") {
  const double pi = std::numbers::pi;
  CHECK(weyl_constant(1) == doctest::Approx(1 / pi));
  CHECK(weyl_constant(2) == doctest::Approx(1 / (4 * pi)));
  CHECK(weyl_constant(3) == doctest::Approx(1 / (6 * pi * pi)));
}

TEST_CASE("planar table") {
  const double pi = std::numbers::pi;
  ConstantsTable t = constants(2);
  CHECK(t.C[1] == doctest::Approx(1 + 1 / (2 * pi)));
  CHECK(t.C[2] == 4.0);
  CHECK(t.C[3] == 24.0);
  CHECK(t.C[5] == doctest::Approx(1 / std::sqrt(1 + 2 / (pi * pi))));
}

TEST_CASE("defining relations hold in every dimension") {
  const double pi = std::numbers::pi;
  for (int d = 2; d <= 5; ++d) {
    ConstantsTable t = constants(d);
    const double* C = t.C;
    CAPTURE(d);
    CHECK(C[2] == std::pow(4.0, d - 1));
    CHECK(C[3] == std::pow(24.0, d - 1));
    CHECK(C[4] == std::sqrt(4 * C[2] + 2));
    CHECK(C[5] == std::min(1 / std::sqrt(1 + 2 / (pi * pi)), pi / (1 + 1.0 / d)));
    CHECK(C[7] == C[5] / C[4]);
    CHECK(C[7] < C[5]);
    CHECK(C[8] == std::max(1.0, 1 / std::sqrt(C[7])));
    CHECK(C[9] == 8 * C[3] * C[8]);
    double c1 = 0;
    for (int n = 0; n < d; ++n)
      c1 += std::tgamma(n + 1.0) * std::tgamma(d - n + 1.0) / std::tgamma(d + 1.0) * (n == 0 ? 1.0 : weyl_constant(n));
    CHECK(C[1] == doctest::Approx(c1).epsilon(1e-15));
    const double rd = std::sqrt(static_cast<double>(d));
    CHECK(C[6] == doctest::Approx(std::pow(2.0, d - 1) * C[2] + (3 * C[2] + 1) * std::pow(2 * rd, d)));
    const double shell = std::pow(4 * rd + 4 / rd, d);
    CHECK(C[10] == doctest::Approx((d + 1) * (12 * rd * C[1] + 4 * t.C_W + (std::pow(4.0, d) * std::pow(d, d) + C[6]) * shell)));
    CHECK(C[11] == doctest::Approx((d + 1) * (12 * rd * C[1] + 4 * t.C_W + (std::pow(4.0, d) * std::pow(d, d) + 2) * shell)));
    for (int k = 1; k <= 11; ++k) CHECK(C[k] > 0);
  }
  CHECK_THROWS(constants(1));
}
