#ifndef ROUGHWEYL_BUMP_SERIES_HPP
#define ROUGHWEYL_BUMP_SERIES_HPP

#include "roughweyl/geometry.hpp"

#include <string>
#include <vector>

namespace rw {

class CompositeDomain;

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sum over levels j of eps_j 2^{-alpha j p} g_j, where g_j tiles the unit
// (d-1)-cube with 2^{(d-1)jp} copies of the coordinate-min pyramid
// psi(x) = min_i min(x_i, 1 - x_i). |psi|_1 = 1 and a_psi = 1/2.
struct BumpSeriesParams {
  int d = 2;
  double alpha = 2.0 / 3.0;
  int p = 2;
  int n_max = 3;
  // eps[j] for j = 0..n_max+1 at least; entries past the end repeat the last.
  std::vector<double> eps;
  bool theorem_faithful = false;
  std::string schedule = "constant";
  // The realized domain is the unit cube topped by base_height + f.
  double base_height = 1.0;

  double eps_at(int j) const;
  int base_dim() const { return d - 1; }
};

constexpr double kPsiLip = 1.0;
constexpr double kPsiMax = 0.5;

// eps_j = 1 for all j.
std::vector<double> constant_schedule(int length);
// eps_j = (1+j)^{-theta}, then raised where needed so that the two-sided
// dyadic condition on [j/2] holds. Always nonincreasing.
std::vector<double> decaying_schedule(double theta, double alpha, int p, int length);

double psi(const Point& x);  // pyramid on the unit cube, 0 outside
double psi_integral(int base_dim);
double b_psi_p(const BumpSeriesParams& prm);

// f_n(x), exact for dyadic x with j p <= 48 for all active levels.
double bump_sum(const BumpSeriesParams& prm, const Point& x, int n);
double bump_sum(const BumpSeriesParams& prm, double x, int n);
// g_j(x) alone (without eps and scaling).
double bump_level(const BumpSeriesParams& prm, const Point& x, int j);

double tail_bound(const BumpSeriesParams& prm, int n);
// Sum_{j<=n} eps_j 2^{(1-alpha) j p}: the Lipschitz constant of f_n.
double lipschitz_bound(const BumpSeriesParams& prm, int n);
// Rigorous upper bound for |f_n|_beta from the pointwise estimate
// |g_j(x)-g_j(y)| <= min(2^{jp}|x-y|, a_psi). n < 0 means the full series.
double holder_bound(const BumpSeriesParams& prm, int n, double beta);
// Integral of f_n over the unit base.
double bump_integral(const BumpSeriesParams& prm, int n);

struct ConstructionCertificate {
  std::vector<Check> checks;
  double c_psi_p = 0.0;
  double c_psi_p_alt = 0.0;  // second, independent quadrature
  bool all_pass() const;
  const Check* find(const std::string& id) const;
};

// c_{psi,p} by two independent quadratures (adaptive Gauss-Kronrod on the
// pyramid level-set density, composite Simpson on the direct integral).
std::pair<double, double> c_psi_p(const BumpSeriesParams& prm);

ConstructionCertificate certify(const BumpSeriesParams& prm);

// Throws ConstructionError naming the first failed inequality when the
// params are theorem-faithful and some structural inequality fails.
void validate(const BumpSeriesParams& prm);

// d = 2 only: the unit square topped by base_height + f_{n_max}.
CompositeDomain make_domain(const BumpSeriesParams& prm);

struct LipLowerBound {
  double value = 0.0;
  int n = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double terms[4] = {0, 0, 0, 0};
};

// Right side of the Lip_alpha lower-bound certificate. c_d is the
// unspecified dimensional constant of the lambda^{d-alpha} term.
LipLowerBound lip_lower_bound(const BumpSeriesParams& prm, double lambda, double c_d = 1.0);
std::vector<std::pair<double, double>> spectral_windows(const BumpSeriesParams& prm);

}  // namespace rw

#endif
