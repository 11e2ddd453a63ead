#ifndef ROUGHWEYL_COUNTING_HPP
#define ROUGHWEYL_COUNTING_HPP

#include "roughweyl/covering.hpp"
#include "roughweyl/domain.hpp"

#include <optional>
#include <vector>

namespace rw {

enum class Bc { Dirichlet, Neumann };
const char* bc_name(Bc bc);

// Counts of k with pi^2 sum (k_i/e_i)^2 < lambda^2. `lo` and `hi` bracket the
// exact integer: lattice points within a relative 1e-12 of the sphere are
// counted in hi only. Because pi^2 is irrational the exact count is `lo`
// unless a point sits in that sliver.
struct LatticeCount {
  long long lo = 0;
  long long hi = 0;
  bool exact() const { return lo == hi; }
};

// Budget on the number of enumerated rows; exceeded -> DomainError.
inline constexpr double kLatticeBudget = 2e8;

LatticeCount lattice_count(const std::vector<double>& edges, double lambda, Bc bc);
LatticeCount lattice_count(const AxisBox& box, double lambda, Bc bc);
long long cube_count_exact(double edge, double lambda, int d, Bc bc);

// |N - C_W (e lambda)^d| <= C_1 ((e lambda)^{d-1} + 1) for both conditions.
Check lemma28_check(double edge, double lambda, int d);

struct PieceThreshold {
  double one = 0.0;                 // N <= 1 (P, V: N = 1) for lambda <= one
  std::optional<double> zero;       // M only: N = 0 for lambda <= zero
};
PieceThreshold piece_threshold(PieceKind kind, double delta, const Enclosure& mu, int d);
PieceThreshold piece_threshold(const PartitionPiece& piece, int d);

// Integral of t^{-k} ... in the variable s = 1/t:  J_k(S) = int_S^inf mu(s) s^{-k} ds.
// For k = 2 this is int_0^{1/S} mu(1/t) dt.
double profile_tail_moment(const ProfileCurve& mu, double S, int k);

// 3 (4 sqrt d) C_1 int_{(delta1, inf)} (s^{-1} lambda^{d-1} + s^{-d}) d mu(s)
// through the transformed integral; lo uses profile.lo where it enters with a
// plus sign and profile.hi where it enters with a minus sign, hi the reverse.
Enclosure r_omega(double lambda, double delta1, const MeasureProfile& profile, int d);
// Same Stieltjes integral summed directly over the jumps and linear parts of
// one curve (no change of variables).
double r_omega_direct(double lambda, double delta1, const ProfileCurve& mu, int d);
double r_omega_transformed(double lambda, double delta1, const ProfileCurve& mu, int d);

struct Rhs13 {
  double value = 0.0;          // general-d estimate
  double tau_term = 0.0;
  double layer_term = 0.0;
  double planar = NAN;         // d = 2 only; shape-only with the free constant c
  double C_Omega = 0.0;
};
// c_tau is the BV constant of the boundary functions relative to tau.
Rhs13 theorem13_rhs(const CompositeDomain& omega, double lambda, const TauFunction& tau, double c_tau,
                    const MeasureProfile& profile, double planar_c = 1.0);

double theorem18_rhs(int d, double lambda, const MeasureProfile& profile);
double theorem18_rhs(const CompositeDomain& omega, double lambda, const MeasureProfile& profile);

struct RemainderExponents {
  double neumann = 0.0;
  double dirichlet = 0.0;
  bool weyl_valid = false;
};
RemainderExponents remainder_exponents(double alpha, int d);

// Layer measure envelope for Hölder charts: n D^{d-1} (eps + eps^alpha |f|_alpha).
double holder_layer_bound(int n_charts, double diameter, int d, double eps, double alpha, double seminorm);

}  // namespace rw

#endif
