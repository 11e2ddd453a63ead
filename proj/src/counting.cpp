#include "roughweyl/counting.hpp"

#include "roughweyl/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rw {

const char* bc_name(Bc bc) { return bc == Bc::Dirichlet ? "dirichlet" : "neumann"; }

namespace {

constexpr double kRel = 1e-12;

struct Walk {
  std::vector<double> inv2;  // 1 / e_i^2
  int kmin = 1;
  double r2 = 0;  // (lambda/pi)^2
  long long rows = 0;
  LatticeCount out;

  // Largest k with k^2 * w < x (or kmin - 1 if none).
  static long long top(double x, double w, long long kmin) {
    if (x <= 0) return kmin - 1;
    long long k = static_cast<long long>(std::ceil(std::sqrt(x / w))) + 1;
    while (k >= kmin && static_cast<double>(k) * static_cast<double>(k) * w >= x) --k;
    return std::max(k, kmin - 1);
  }

  void run(std::size_t axis, double used) {
    const double w = inv2[axis];
    if (axis + 1 == inv2.size()) {
      if (++rows > kLatticeBudget) throw DomainError("lattice count exceeds the enumeration budget");
      long long lo = top(r2 * (1 - kRel) - used, w, kmin);
      long long hi = top(r2 * (1 + kRel) - used, w, kmin);
      out.lo += lo - kmin + 1;
      out.hi += hi - kmin + 1;
      return;
    }
    long long kmax = top(r2 * (1 + kRel) - used, w, kmin);
    for (long long k = kmin; k <= kmax; ++k) run(axis + 1, used + static_cast<double>(k) * static_cast<double>(k) * w);
  }
};

double c1_of(int d) {
  if (d >= 2) return constants(d).C[1];
  return 1.0;  // d = 1: only the n = 0 term
}

// int_a^b s^m ds, b may be infinite when m < -1
double power_integral(double a, double b, int m) {
  if (!(b > a)) return 0.0;
  if (m == -1) return std::log(b / a);
  double e = m + 1.0;
  if (std::isinf(b)) return -std::pow(a, e) / e;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

}  // namespace

LatticeCount lattice_count(const std::vector<double>& edges, double lambda, Bc bc) {
  if (edges.empty()) throw DomainError("lattice_count needs at least one edge");
  for (double e : edges)
    if (!(e > 0)) throw DomainError("lattice_count needs positive edges");
  if (!(lambda >= 0)) throw DomainError("lattice_count needs lambda >= 0");
  Walk w;
  w.kmin = bc == Bc::Dirichlet ? 1 : 0;
  w.r2 = (lambda / std::numbers::pi) * (lambda / std::numbers::pi);
  for (double e : edges) w.inv2.push_back(1.0 / (e * e));
  // rough row estimate before walking: product of ranges of all but the last axis
  double est = 1.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) est *= edges[i] * lambda / std::numbers::pi + 1;
  if (est > kLatticeBudget) throw DomainError("lattice count exceeds the enumeration budget");
  w.run(0, 0.0);
  return w.out;
}

LatticeCount lattice_count(const AxisBox& box, double lambda, Bc bc) {
  std::vector<double> e;
  for (int i = 0; i < box.dim(); ++i) e.push_back(box.edge(i));
  return lattice_count(e, lambda, bc);
}

long long cube_count_exact(double edge, double lambda, int d, Bc bc) {
  if (d < 1) throw DomainError("cube_count_exact needs d >= 1");
  return lattice_count(std::vector<double>(static_cast<std::size_t>(d), edge), lambda, bc).lo;
}

Check lemma28_check(double edge, double lambda, int d) {
  const double x = edge * lambda;
  const double weyl = weyl_constant(d) * std::pow(x, d);
  const double rhs = c1_of(d) * (std::pow(x, d - 1) + 1);
  Check c;
  c.id = "cube-count-envelope";
  c.margin = INFINITY;
  for (Bc bc : {Bc::Dirichlet, Bc::Neumann}) {
    LatticeCount n = lattice_count(std::vector<double>(static_cast<std::size_t>(d), edge), lambda, bc);
    double dev = std::max(std::abs(static_cast<double>(n.lo) - weyl), std::abs(static_cast<double>(n.hi) - weyl));
    c.margin = std::min(c.margin, rhs - dev);
  }
  c.pass = c.margin >= 0;
  return c;
}

PieceThreshold piece_threshold(PieceKind kind, double delta, const Enclosure& mu, int d) {
  if (!(delta > 0)) throw DomainError("piece_threshold needs delta > 0");
  const double pi = std::numbers::pi;
  PieceThreshold t;
  switch (kind) {
    case PieceKind::P:
      t.one = pi / delta;
      break;
    case PieceKind::V:
      t.one = 1.0 / (std::sqrt(1 + 2 / (pi * pi)) * delta);
      break;
    case PieceKind::M: {
      t.one = pi / delta;
      double rad = 0.5 - 0.5 * mu.hi / std::pow(delta, d);
      if (rad > 0) t.zero = std::sqrt(rad) * pi / delta;
      break;
    }
    default:
      throw DomainError("piece_threshold: no threshold for this piece kind");
  }
  return t;
}

PieceThreshold piece_threshold(const PartitionPiece& piece, int d) {
  double delta = piece.scale;
  if (piece.kind == PieceKind::P) delta = piece.local.dim() > 0 ? piece.local.max_edge() : piece.box.max_edge();
  return piece_threshold(piece.kind, delta, piece.mu, d);
}

double profile_tail_moment(const ProfileCurve& mu, double S, int k) {
  if (k < 2) throw DomainError("profile_tail_moment needs k >= 2");
  if (S < 0) throw DomainError("profile_tail_moment needs S >= 0");
  double sum = 0.0;
  const std::size_t n = mu.s.size();
  for (std::size_t i = 0; i < n; ++i) {
    double a = mu.s[i];
    double b = i + 1 < n ? mu.s[i + 1] : INFINITY;
    if (b <= S) continue;
    double lo = std::max(a, S);
    double beta = i + 1 < n ? (mu.left[i + 1] - mu.right[i]) / (b - a) : 0.0;
    double alpha = mu.right[i] - beta * a;
    if (lo == 0.0) {
      if (alpha != 0.0 || beta != 0.0) return INFINITY;
      continue;
    }
    sum += alpha * power_integral(lo, b, -k);
    if (beta != 0.0) sum += beta * power_integral(lo, b, 1 - k);
  }
  return sum;
}

double r_omega_transformed(double lambda, double delta1, const ProfileCurve& mu, int d) {
  if (!(delta1 > 0)) throw DomainError("r_omega needs delta1 > 0");
  const double K = 12 * std::sqrt(static_cast<double>(d)) * c1_of(d);
  const double l = std::pow(lambda, d - 1);
  double g = l / delta1 + std::pow(delta1, -d);
  return K * (l * profile_tail_moment(mu, delta1, 2) + d * profile_tail_moment(mu, delta1, d + 1) - g * mu(delta1));
}

double r_omega_direct(double lambda, double delta1, const ProfileCurve& mu, int d) {
  if (!(delta1 > 0)) throw DomainError("r_omega needs delta1 > 0");
  const double K = 12 * std::sqrt(static_cast<double>(d)) * c1_of(d);
  const double l = std::pow(lambda, d - 1);
  auto g = [&](double s) { return l / s + std::pow(s, -d); };
  double sum = 0.0;
  const std::size_t n = mu.s.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (mu.s[i] > delta1) sum += g(mu.s[i]) * (mu.right[i] - mu.left[i]);
    if (i + 1 < n) {
      double a = std::max(mu.s[i], delta1), b = mu.s[i + 1];
      if (b <= a) continue;
      double beta = (mu.left[i + 1] - mu.right[i]) / (mu.s[i + 1] - mu.s[i]);
      sum += beta * (l * std::log(b / a) + power_integral(a, b, -d));
    }
  }
  return K * sum;
}

Enclosure r_omega(double lambda, double delta1, const MeasureProfile& profile, int d) {
  if (!(delta1 > 0)) throw DomainError("r_omega needs delta1 > 0");
  if (!(lambda >= 0)) throw DomainError("r_omega needs lambda >= 0");
  const double K = 12 * std::sqrt(static_cast<double>(d)) * c1_of(d);
  const double l = std::pow(lambda, d - 1);
  const double g = l / delta1 + std::pow(delta1, -d);
  auto body = [&](const ProfileCurve& c) {
    return l * profile_tail_moment(c, delta1, 2) + d * profile_tail_moment(c, delta1, d + 1);
  };
  double hi = K * (body(profile.hi) - g * profile.lo(delta1));
  double lo = K * (body(profile.lo) - g * profile.hi(delta1));
  return Enclosure(std::max(0.0, lo), std::max(0.0, hi), profile.declared);
}

Rhs13 theorem13_rhs(const CompositeDomain& omega, double lambda, const TauFunction& tau, double c_tau,
                    const MeasureProfile& profile, double planar_c) {
  if (!(lambda >= 1.0 / omega.delta_omega()))
    throw PreconditionError("theorem13_rhs: lambda >= 1/delta_Omega violated (lambda = " + std::to_string(lambda) +
                            ", 1/delta_Omega = " + std::to_string(1.0 / omega.delta_omega()) + ")");
  const int d = omega.dim();
  const ConstantsTable ct = constants(d);
  const double n = omega.n_charts();
  const double D = omega.diameter();
  Rhs13 r;
  r.C_Omega = 4 * ct.C[8] * std::sqrt(n);
  const double T = r.C_Omega * lambda;
  r.tau_term = ct.C[9] * c_tau * std::sqrt(n) * lambda * tau.integral_t2(1 / (2 * D), T);
  r.layer_term = ct.C[10] * n * std::pow(lambda, d - 1) * profile_tail_moment(profile.hi, 1 / T, 2);
  r.value = r.tau_term + r.layer_term;
  if (d == 2) {
    const double c = planar_c;
    const double Tp = c * std::sqrt(n) * lambda;
    r.planar = c * c_tau * tau(Tp) + c * n * lambda * (D + profile_tail_moment(profile.hi, 1 / Tp, 2));
  }
  return r;
}

double theorem18_rhs(int d, double lambda, const MeasureProfile& profile) {
  if (!(lambda > 0)) throw PreconditionError("theorem18_rhs needs lambda > 0");
  return constants(d).C[11] * std::pow(lambda, d - 1) * profile_tail_moment(profile.hi, 1 / lambda, 2);
}

double theorem18_rhs(const CompositeDomain& omega, double lambda, const MeasureProfile& profile) {
  return theorem18_rhs(omega.dim(), lambda, profile);
}

RemainderExponents remainder_exponents(double alpha, int d) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("remainder_exponents needs alpha in (0,1)");
  if (d < 2) throw DomainError("remainder_exponents needs d >= 2");
  RemainderExponents e;
  e.neumann = (d - 1) / alpha;
  e.dirichlet = d - alpha;
  e.weyl_valid = e.neumann < d;
  return e;
}

double holder_layer_bound(int n_charts, double diameter, int d, double eps, double alpha, double seminorm) {
  return n_charts * std::pow(diameter, d - 1) * (eps + std::pow(eps, alpha) * seminorm);
}

}  // namespace rw
