#include "roughweyl/constants.hpp"

#include "roughweyl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rw {

double weyl_constant(int d) {
  if (d < 1) throw DomainError("weyl_constant needs d >= 1");
  const double pi = std::numbers::pi;
  double ball = std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return ball / std::pow(2.0 * pi, d);
}

ConstantsTable constants(int d) {
  if (d < 2) throw DomainError("constants need d >= 2");
  const double pi = std::numbers::pi;
  const double rd = std::sqrt(static_cast<double>(d));
  ConstantsTable t;
  t.d = d;
  t.C_W = weyl_constant(d);
  double c1 = 0.0;
  for (int n = 0; n < d; ++n) {
    double w = std::tgamma(n + 1.0) * std::tgamma(d - n + 1.0) / std::tgamma(d + 1.0);
    c1 += w * (n == 0 ? 1.0 : weyl_constant(n));
  }
  t.besicovitch = std::ldexp(1.0, d - 1);
  t.besicovitch_hat = std::ldexp(1.0, 2 * (d - 1));
  double* C = t.C;
  C[1] = c1;
  C[2] = std::ldexp(1.0, d - 1) * t.besicovitch;
  C[3] = std::pow(6.0, d - 1) * t.besicovitch_hat;
  C[4] = std::sqrt(4 * C[2] + 2);
  C[5] = std::min(1.0 / std::sqrt(1 + 2 / (pi * pi)), pi / (1 + 1.0 / d));
  C[6] = std::ldexp(1.0, d - 1) * C[2] + (3 * C[2] + 1) * std::pow(2 * rd, d);
  C[7] = C[5] / C[4];
  C[8] = std::max(1.0, 1.0 / std::sqrt(C[7]));
  C[9] = 8 * C[3] * C[8];
  double shell = std::pow(4 * rd + 4 / rd, d);
  double dd = std::pow(4.0 * d, d);
  C[10] = (d + 1) * (12 * rd * C[1] + 4 * t.C_W + (dd + C[6]) * shell);
  C[11] = (d + 1) * (12 * rd * C[1] + 4 * t.C_W + (dd + 2) * shell);
  return t;
}

}  // namespace rw
