#include "roughweyl/bump_series.hpp"

#include "roughweyl/constants.hpp"
#include "roughweyl/domain.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rw {

double BumpSeriesParams::eps_at(int j) const {
  if (eps.empty()) return 1.0;
  if (j < 0) throw DomainError("negative level");
  return j < static_cast<int>(eps.size()) ? eps[j] : eps.back();
}

std::vector<double> constant_schedule(int length) { return std::vector<double>(std::max(1, length), 1.0); }

std::vector<double> decaying_schedule(double theta, double alpha, int p, int length) {
  if (theta < 0 || theta > 1) throw DomainError("decay exponent must be in [0,1]");
  length = std::max(1, length);
  std::vector<double> e(length);
  for (int j = 0; j < length; ++j) e[j] = std::pow(1.0 + j, -theta);
  // raise entries until both sides of the two-sided dyadic condition hold
  for (int pass = 0; pass < 200; ++pass) {
    bool changed = false;
    for (int j = 1; j < length; ++j) {
      int h = j / 2;
      double floor_h = std::exp2((1 - alpha) * (h - j) * p);
      if (e[h] < floor_h) {
        e[h] = std::min(1.0, floor_h);
        changed = true;
      }
      if (e[h] > 2 * e[j]) {
        e[j] = 0.5 * e[h];
        changed = true;
      }
    }
    for (int j = length - 2; j >= 0; --j)
      if (e[j] < e[j + 1]) {
        e[j] = e[j + 1];
        changed = true;
      }
    if (!changed) break;
  }
  return e;
}

double psi(const Point& x) {
  double m = INFINITY;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] > 1) return 0.0;
    m = std::min({m, x[i], 1.0 - x[i]});
  }
  return m;
}

double psi_integral(int base_dim) {
  if (base_dim < 1) throw DomainError("base dimension must be >= 1");
  // level sets {psi > t} are cubes of edge 1 - 2t
  return 1.0 / (2.0 * (base_dim + 1));
}

double b_psi_p(const BumpSeriesParams& prm) {
  return std::sqrt(static_cast<double>(prm.d)) * std::exp2(3 - (1 - prm.alpha) * prm.p) * (kPsiLip + kPsiMax);
}

double bump_level(const BumpSeriesParams& prm, const Point& x, int j) {
  const int n = static_cast<int>(x.size());
  double m = INFINITY;
  for (int i = 0; i < n; ++i) {
    if (x[i] < 0 || x[i] > 1) return 0.0;
    double t;
    if (x[i] >= 1) {
      t = 1.0;
    } else {
      double u = std::ldexp(x[i], j * prm.p);
      t = u - std::floor(u);
    }
    m = std::min({m, t, 1.0 - t});
  }
  return m;
}

double bump_sum(const BumpSeriesParams& prm, const Point& x, int n) {
  double s = 0.0;
  for (int j = 0; j <= n; ++j) {
    double e = prm.eps_at(j);
    if (e == 0.0) continue;
    s += e * std::exp2(-prm.alpha * j * prm.p) * bump_level(prm, x, j);
  }
  return s;
}

double bump_sum(const BumpSeriesParams& prm, double x, int n) { return bump_sum(prm, Point::Constant(1, x), n); }

namespace {

double weight(const BumpSeriesParams& prm, int j) { return prm.eps_at(j) * std::exp2(-prm.alpha * j * prm.p); }

// sum_{j >= from} eps_j 2^{-alpha j p}, with a geometric tail after 64 explicit terms
double weight_tail(const BumpSeriesParams& prm, int from) {
  double s = 0.0;
  for (int j = from; j < from + 64; ++j) s += weight(prm, j);
  return s + weight(prm, from + 64) / (1 - std::exp2(-prm.alpha * prm.p));
}

}  // namespace

double tail_bound(const BumpSeriesParams& prm, int n) {
  if (n < 0) throw DomainError("tail level must be >= 0");
  double geometric = kPsiMax * weight_tail(prm, n + 1);
  double stated = 2 * weight(prm, n + 1) * kPsiMax;
  // the stated form is valid once 2^{-alpha p} <= 1/2; the geometric one always
  return std::exp2(-prm.alpha * prm.p) <= 0.5 ? std::max(geometric, stated) : geometric;
}

double lipschitz_bound(const BumpSeriesParams& prm, int n) {
  double s = 0.0;
  for (int j = 0; j <= n; ++j) s += prm.eps_at(j) * std::exp2((1 - prm.alpha) * j * prm.p);
  return kPsiLip * s;
}

double holder_bound(const BumpSeriesParams& prm, int n, double beta) {
  if (!(beta > 0 && beta <= 1)) throw DomainError("holder exponent must be in (0,1]");
  const double a = kPsiMax, al = prm.alpha, p = prm.p;
  // h(r) = sum_j eps_j 2^{-alpha j p} min(2^{jp} r, a) / r^beta is unimodal
  // between the breakpoints r_K = a 2^{-Kp}, so its sup sits on one of them.
  auto at = [&](int K, int jmax) {
    double s = 0.0;
    for (int j = 0; j < std::min(K, jmax + 1); ++j)
      s += prm.eps_at(j) * std::exp2((1 - al) * j * p - (1 - beta) * K * p);
    double sat = 0.0;
    if (jmax >= K) {
      for (int j = K; j <= jmax; ++j) sat += prm.eps_at(j) * std::exp2(-al * j * p + beta * K * p);
    }
    return std::pow(a, 1 - beta) * s + std::pow(a, 1 - beta) * sat;
  };
  double best = 0.0;
  if (n >= 0) {
    for (int K = 0; K <= n; ++K) best = std::max(best, at(K, n));
    return best;
  }
  if (beta > al) return INFINITY;
  const int kmax = 64;
  for (int K = 0; K <= kmax; ++K) {
    double s = 0.0;
    for (int j = 0; j < K; ++j) s += prm.eps_at(j) * std::exp2((1 - al) * j * p - (1 - beta) * K * p);
    // weight_tail(K) 2^{beta K p}, with the scale folded into each exponent
    double sat = 0.0;
    for (int j = K; j < K + 64; ++j) sat += prm.eps_at(j) * std::exp2(beta * K * p - al * j * p);
    sat += prm.eps_at(K + 64) * std::exp2(beta * K * p - al * (K + 64) * p) / (1 - std::exp2(-al * p));
    best = std::max(best, std::pow(a, 1 - beta) * (s + sat));
  }
  // K > kmax: monotone schedule gives a uniform majorant
  double s1 = 0.0;
  for (int j = 0; j < kmax; ++j) s1 += prm.eps_at(j) * std::exp2((1 - al) * j * p - (1 - beta) * (kmax + 1) * p);
  double g = std::exp2(-(1 - al) * p) / (1 - std::exp2(-(1 - al) * p));
  double ek = prm.eps_at(kmax);
  double far = std::pow(a, 1 - beta) * (s1 + ek * g + ek / (1 - std::exp2(-al * p)));
  return std::max(best, far);
}

double bump_integral(const BumpSeriesParams& prm, int n) {
  double s = 0.0;
  for (int j = 0; j <= n; ++j) s += weight(prm, j);
  return psi_integral(prm.base_dim()) * s;
}

bool ConstructionCertificate::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ConstructionCertificate::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

std::pair<double, double> c_psi_p(const BumpSeriesParams& prm) {
  const int m = prm.base_dim();
  const double a = kPsiMax, b = b_psi_p(prm);
  auto Fc = [](double u) { return 0.5 * u + 0.25 * std::sin(2 * u); };  // int_0^u cos^2
  auto Fs = [](double u) { return 0.5 * u - 0.25 * std::sin(2 * u); };  // int_0^u sin^2
  auto rho = [m](double t) { return 2.0 * m * std::pow(1 - 2 * t, m - 1); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double numA = GK::integrate([&](double t) { return Fc(t + a) * rho(t); }, 0.0, 0.5, 15, 1e-14);
  double denA = GK::integrate([&](double t) { return Fs(t - b) * rho(t); }, 0.0, 0.5, 15, 1e-14);
  const int N = 10000;
  auto simpson = [N](auto&& g, double lo, double hi) {
    double h = (hi - lo) / N, s = g(lo) + g(hi);
    for (int i = 1; i < N; ++i) s += (i % 2 ? 4.0 : 2.0) * g(lo + i * h);
    return s * h / 3.0;
  };
  double numB, denB;
  if (m == 1) {
    auto ps = [](double x) { return std::min(x, 1 - x); };
    numB = simpson([&](double x) { return Fc(ps(x) + a); }, 0.0, 1.0);
    denB = simpson([&](double x) { return Fs(ps(x) - b); }, 0.0, 1.0);
  } else {
    numB = simpson([&](double t) { return Fc(t + a) * rho(t); }, 0.0, 0.5);
    denB = simpson([&](double t) { return Fs(t - b) * rho(t); }, 0.0, 0.5);
  }
  auto ratio = [](double n, double d) { return d > 0 ? std::sqrt(n / d) : std::nan(""); };
  return {ratio(numA, denA), ratio(numB, denB)};
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ConstructionCertificate certify(const BumpSeriesParams& prm) {
  ConstructionCertificate cert;
  const double al = prm.alpha, p = prm.p, a = kPsiMax;
  auto add = [&](std::string id, bool pass, double margin, std::string note) {
    cert.checks.push_back({std::move(id), pass, margin, std::move(note)});
  };

  double v1 = std::exp2(1 - al * p);
  add("scale-exponent", v1 <= 1, 1 - v1, "2^{1-alpha p} <= 1");
  double v2 = 1 / (1 - std::exp2(-al * p));
  add("geometric-alpha", v2 <= 2, 2 - v2, "(1 - 2^{-alpha p})^{-1} <= 2");
  double v3 = 1 / (1 - std::exp2(-(1 - al) * p));
  add("geometric-lipschitz", v3 <= 2, 2 - v3, "(1 - 2^{-(1-alpha) p})^{-1} <= 2");

  {
    // log2 of rhs minus log2 of lhs, for n = 1..32
    double u = (1 - al) * p, worst = INFINITY;
    for (int n = 1; n <= 32; ++n) {
      double m = 1 + std::log2(-std::expm1(-u * std::log(2.0))) - std::log2(-std::expm1(-(n + 1) * u * std::log(2.0)));
      worst = std::min(worst, m);
    }
    add("level-sum", worst >= 0, worst, "geometric level sum, log2 margin over n = 1..32");
  }

  {
    int J = std::max(64, prm.n_max + 2);
    double worst = INFINITY;
    bool ok = true;
    for (int j = 0; j <= J; ++j) {
      double e = prm.eps_at(j);
      if (e < 0 || e > 1) ok = false;
      if (j > 0 && e > prm.eps_at(j - 1)) ok = false;
    }
    for (int j = 1; j <= J; ++j) {
      int h = j / 2;
      double lo = std::exp2((1 - al) * (h - j) * p);
      double eh = prm.eps_at(h), ej = prm.eps_at(j);
      worst = std::min({worst, eh - lo, 2 * ej - eh});
    }
    add("schedule", ok && worst >= 0, worst, "eps nonincreasing in [0,1] and two-sided half-index condition");
  }

  double b = b_psi_p(prm);
  add("bump-height", a > b, a - b, "a_psi = " + fmt(a) + " vs b_psi_p = " + fmt(b));

  auto [cA, cB] = c_psi_p(prm);
  cert.c_psi_p = cA;
  cert.c_psi_p_alt = cB;
  {
    bool ok = std::isfinite(cA) && std::isfinite(cB) && std::abs(cA - cB) <= 1e-6;
    add("c-psi-p", ok, ok ? 1e-6 - std::abs(cA - cB) : -1.0,
        "two quadratures: " + fmt(cA) + " and " + fmt(cB));
  }

  {
    // g_j vanishes on the boundaries of the level-n cells for j >= n
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> bit(0, 1 << 20);
    const int m = prm.base_dim();
    double worst = 0.0;
    for (int n = 0; n <= prm.n_max; ++n) {
      long long cells = n * prm.p >= 20 ? (1LL << 20) : (1LL << (n * prm.p));
      for (int j = n; j <= prm.n_max; ++j)
        for (long long k = 0; k <= std::min<long long>(cells, 512); ++k) {
          Point x(m);
          for (int i = 0; i < m; ++i) x[i] = std::ldexp(static_cast<double>(bit(rng)), -20);
          x[0] = std::ldexp(static_cast<double>(k), -n * prm.p);
          if (x[0] > 1) x[0] = 1;
          worst = std::max(worst, bump_level(prm, x, j));
        }
    }
    add("boundary-zero", worst == 0.0, 0.0 - worst, "g_j on level-n cell faces");
  }

  {
    double worst = INFINITY;
    for (int n = 0; n <= prm.n_max; ++n) {
      double lhs = kPsiMax * weight_tail(prm, n + 1);
      double rhs = 2 * weight(prm, n + 1) * a;
      double rhs2 = prm.eps_at(n + 1) * std::exp2(-al * n * p) * a;
      if (rhs > 0) worst = std::min(worst, (rhs - lhs) / rhs);
      else worst = std::min(worst, lhs == 0 ? 0.0 : -1.0);
      if (rhs2 > 0) worst = std::min(worst, (rhs2 - rhs) / rhs2);
    }
    add("tail", worst >= 0, worst, "truncation tail against the stated bound");
  }

  {
    double worst = INFINITY;
    for (int n = 0; n <= prm.n_max; ++n)
      for (double beta : {al, 1.0}) {
        double lhs = holder_bound(prm, n, beta);
        double rhs = std::exp2(1 + (beta - al) * n * p) * (kPsiLip + a);
        worst = std::min(worst, (rhs - lhs) / rhs);
      }
    add("holder-levels", worst >= 0, worst, "|f_n|_beta for beta in {alpha, 1}");
  }

  {
    double lhs = holder_bound(prm, -1, al), rhs = 2 * (kPsiLip + a);
    add("holder-full", lhs <= rhs, (rhs - lhs) / rhs, "|f|_alpha = " + fmt(lhs));
  }

  {
    double worst = INFINITY;
    const int m = prm.base_dim();
    for (int n = 1; n <= prm.n_max; ++n) {
      // f_{n-1} is linear on every level-n cell, with steepest slope L_{n-1}
      double lhs = lipschitz_bound(prm, n - 1) * std::sqrt(static_cast<double>(m)) * std::exp2(-n * p);
      double rhs = prm.eps_at(n) * std::exp2(-al * n * p) * b;
      worst = std::min(worst, rhs > 0 ? (rhs - lhs) / rhs : -1.0);
    }
    if (prm.n_max < 1) worst = 0.0;
    add("level-oscillation", worst >= 0, worst, "2 Osc(f_{n-1}) on level-n cells");
  }
  return cert;
}

void validate(const BumpSeriesParams& prm) {
  if (prm.d < 2) throw DomainError("bump series needs d >= 2");
  if (!(prm.alpha > 0 && prm.alpha < 1)) throw DomainError("alpha must be in (0,1)");
  if (prm.p < 1) throw DomainError("p must be a positive integer");
  if (prm.n_max < 0) throw DomainError("n_max must be >= 0");
  for (std::size_t j = 0; j < prm.eps.size(); ++j) {
    if (prm.eps[j] < 0 || prm.eps[j] > 1) throw DomainError("eps entries must lie in [0,1]");
    if (j > 0 && prm.eps[j] > prm.eps[j - 1]) throw DomainError("eps schedule must be nonincreasing");
  }
  if (!prm.theorem_faithful) return;
  double pmin = std::max(1 / prm.alpha, 1 / (1 - prm.alpha));
  if (prm.p < pmin) throw ConstructionError("p = " + std::to_string(prm.p) + " is below max(1/alpha, 1/(1-alpha))");
  ConstructionCertificate cert = certify(prm);
  for (const auto& c : cert.checks)
    if (!c.pass) throw ConstructionError("failed " + c.id + ": " + c.note);
}

CompositeDomain make_domain(const BumpSeriesParams& prm) {
  validate(prm);
  if (prm.d != 2) throw DomainError("geometry is only built for d = 2");
  BoundaryFunction f = BoundaryFunction::bump_series(prm, prm.base_height);
  if (f.kind() != FunctionKind::Polyline)
    throw ConstructionError("n_max * p is too large to build the boundary polyline");
  f.holder_alpha = prm.alpha;
  f.holder_seminorm = holder_bound(prm, prm.n_max, prm.alpha);
  std::ostringstream name;
  name << "bump-series(alpha=" << prm.alpha << ",p=" << prm.p << ",n=" << prm.n_max << ")";
  return CompositeDomain::graph_domain(f, name.str());
}

std::vector<std::pair<double, double>> spectral_windows(const BumpSeriesParams& prm) {
  double c = c_psi_p(prm).first;
  std::vector<std::pair<double, double>> w;
  for (int n = 1; n <= prm.n_max; ++n) {
    double lo = c / prm.eps_at(n) * std::exp2(prm.alpha * n * prm.p);
    double hi = c / prm.eps_at(n + 1) * std::exp2(prm.alpha * (n + 1) * prm.p);
    w.emplace_back(lo, hi);
  }
  return w;
}

LipLowerBound lip_lower_bound(const BumpSeriesParams& prm, double lambda, double c_d) {
  auto windows = spectral_windows(prm);
  if (windows.empty()) throw DomainError("no spectral windows for n_max < 1");
  if (!std::isfinite(windows[0].first)) throw DomainError("c_psi_p is undefined for these parameters");
  int n = 0;
  for (std::size_t i = 0; i < windows.size(); ++i)
    if (lambda >= windows[i].first && lambda <= windows[i].second) {
      n = static_cast<int>(i) + 1;
      break;
    }
  if (n == 0) {
    std::size_t near = 0;
    double gap = INFINITY;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      double g = lambda < windows[i].first ? windows[i].first - lambda : lambda - windows[i].second;
      if (g < gap) {
        gap = g;
        near = i;
      }
    }
    throw DomainError("lambda = " + fmt(lambda) + " lies outside every window; nearest is n = " +
                      std::to_string(near + 1) + " [" + fmt(windows[near].first) + ", " + fmt(windows[near].second) + "]");
  }
  const int d = prm.d;
  const double al = prm.alpha, c = c_psi_p(prm).first, a = kPsiMax;
  const double cw = weyl_constant(d);
  double mu = prm.base_height + bump_integral(prm, n);
  LipLowerBound out;
  out.n = n;
  out.window_lo = windows[n - 1].first;
  out.window_hi = windows[n - 1].second;
  double e = (d - 1) / al;
  out.terms[0] = cw * mu * std::pow(lambda, d);
  out.terms[1] = std::pow(c * std::exp2(al * prm.p), -e) * std::pow(prm.eps_at(n + 1), e) * std::pow(lambda, e);
  out.terms[2] = -c_d * (kPsiLip + a + 1) * std::pow(lambda, d - al);
  out.terms[3] = -cw * a * c * std::exp2(2 * al * prm.p + 1) * std::pow(lambda, d - 1);
  out.value = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
  return out;
}

}  // namespace rw
