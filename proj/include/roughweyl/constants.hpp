#ifndef ROUGHWEYL_CONSTANTS_HPP
#define ROUGHWEYL_CONSTANTS_HPP

namespace rw {

// (2 pi)^{-d} times the volume of the unit d-ball.
double weyl_constant(int d);

// Dimensional constants of the bracketing estimates. C[1..11] are the
// numbered constants; C[0] is unused. The covering constants use the
// continuous-radius values C_n = 2^n and hat C_n = 4^n.
struct ConstantsTable {
  int d = 0;
  double C_W = 0.0;
  double C[12] = {};
  double besicovitch = 0.0;      // C_{d-1}
  double besicovitch_hat = 0.0;  // hat C_{d-1}
};

ConstantsTable constants(int d);

}  // namespace rw

#endif
