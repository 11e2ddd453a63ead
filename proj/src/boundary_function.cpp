#include "roughweyl/boundary_function.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace rw {

const char* kind_name(FunctionKind k) {
  switch (k) {
    case FunctionKind::Polyline: return "polyline";
    case FunctionKind::Constant: return "constant";
    case FunctionKind::BumpSeries: return "bump-series";
    case FunctionKind::Samples: return "samples";
  }
  return "?";
}

namespace {
// vertex count cap for turning a bump series into an explicit polyline
constexpr int kMaxPolylineLog2 = 22;
}

BoundaryFunction BoundaryFunction::polyline(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) throw DomainError("polyline needs >= 2 matching vertices");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError("polyline abscissae must be strictly increasing");
  for (double y : ys)
    if (!std::isfinite(y)) throw DomainError("polyline value is not finite");
  BoundaryFunction f;
  f.kind_ = FunctionKind::Polyline;
  f.base_ = AxisBox(Point::Constant(1, xs.front()), Point::Constant(1, xs.back()));
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  f.build_tables();
  return f;
}

BoundaryFunction BoundaryFunction::constant(const AxisBox& base, double value) {
  BoundaryFunction f;
  f.kind_ = FunctionKind::Constant;
  f.base_ = base;
  f.offset_ = value;
  f.holder_alpha = 1.0;
  f.holder_seminorm = 0.0;
  return f;
}

BoundaryFunction BoundaryFunction::bump_series(const BumpSeriesParams& prm, double offset) {
  const int n = prm.base_dim();
  if (n < 1) throw DomainError("bump series needs d >= 2");
  const long long bits = static_cast<long long>(prm.n_max) * prm.p + 1;
  if (n == 1 && bits <= kMaxPolylineLog2) {
    const std::size_t m = std::size_t{1} << bits;
    std::vector<double> xs(m + 1), ys(m + 1);
    const double hstep = std::ldexp(1.0, -static_cast<int>(bits));
    for (std::size_t k = 0; k <= m; ++k) {
      xs[k] = static_cast<double>(k) * hstep;
      ys[k] = offset + bump_sum(prm, xs[k], prm.n_max);
    }
    BoundaryFunction f = polyline(std::move(xs), std::move(ys));
    f.bump_ = std::make_shared<BumpSeriesParams>(prm);
    f.offset_ = offset;
    f.representation_error = tail_bound(prm, prm.n_max);
    return f;
  }
  BoundaryFunction f;
  f.kind_ = FunctionKind::BumpSeries;
  f.base_ = AxisBox::unit(n);
  f.offset_ = offset;
  f.bump_ = std::make_shared<BumpSeriesParams>(prm);
  f.representation_error = tail_bound(prm, prm.n_max);
  return f;
}

BoundaryFunction BoundaryFunction::samples(const AxisBox& base, std::vector<int> shape, std::vector<double> values) {
  if (static_cast<int>(shape.size()) != base.dim()) throw DomainError("sample shape does not match base dimension");
  std::size_t total = 1;
  for (int s : shape) {
    if (s < 2) throw DomainError("sample grid needs >= 2 points per axis");
    total *= static_cast<std::size_t>(s);
  }
  if (values.size() != total) throw DomainError("sample value count does not match grid");
  BoundaryFunction f;
  f.kind_ = FunctionKind::Samples;
  f.base_ = base;
  f.shape_ = std::move(shape);
  f.values_ = std::move(values);
  return f;
}

void BoundaryFunction::build_tables() {
  const std::size_t n = ys_.size();
  rmax_.assign(1, ys_);
  rmin_.assign(1, ys_);
  for (std::size_t w = 1; 2 * w <= n; w *= 2) {
    const auto& pmax = rmax_.back();
    const auto& pmin = rmin_.back();
    std::vector<double> nmax(n - 2 * w + 1), nmin(n - 2 * w + 1);
    for (std::size_t i = 0; i + 2 * w <= n; ++i) {
      nmax[i] = std::max(pmax[i], pmax[i + w]);
      nmin[i] = std::min(pmin[i], pmin[i + w]);
    }
    rmax_.push_back(std::move(nmax));
    rmin_.push_back(std::move(nmin));
  }
}

double BoundaryFunction::vertex_range_max(std::size_t i, std::size_t j) const {
  std::size_t len = j - i + 1;
  int k = std::bit_width(len) - 1;
  return std::max(rmax_[k][i], rmax_[k][j + 1 - (std::size_t{1} << k)]);
}

double BoundaryFunction::vertex_range_min(std::size_t i, std::size_t j) const {
  std::size_t len = j - i + 1;
  int k = std::bit_width(len) - 1;
  return std::min(rmin_[k][i], rmin_[k][j + 1 - (std::size_t{1} << k)]);
}

void BoundaryFunction::check_box(const AxisBox& box) const {
  if (box.dim() != base_.dim() || !base_.contains_box(box))
    throw DomainError("box " + box.str() + " is not inside the base " + base_.str());
}

double BoundaryFunction::eval1(double x) const {
  switch (kind_) {
    case FunctionKind::Polyline: {
      if (x < xs_.front() || x > xs_.back()) throw DomainError("evaluation outside base");
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.end()) return ys_.back();
      std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      std::size_t i = j - 1;
      if (x == xs_[i]) return ys_[i];
      double t = (x - xs_[i]) / (xs_[j] - xs_[i]);
      return ys_[i] + t * (ys_[j] - ys_[i]);
    }
    default:
      return (*this)(Point::Constant(1, x));
  }
}

double BoundaryFunction::operator()(const Point& x) const {
  if (x.size() != base_.dim()) throw DomainError("evaluation point has wrong dimension");
  if (!base_.closure_contains(x)) throw DomainError("evaluation outside base");
  switch (kind_) {
    case FunctionKind::Polyline: return eval1(x[0]);
    case FunctionKind::Constant: return offset_;
    case FunctionKind::BumpSeries: return offset_ + bump_sum(*bump_, x, bump_->n_max);
    case FunctionKind::Samples: {
      const int n = base_.dim();
      std::vector<int> i0(n);
      std::vector<double> t(n);
      for (int a = 0; a < n; ++a) {
        double u = (x[a] - base_.lo(a)) / base_.edge(a) * (shape_[a] - 1);
        int k = std::clamp(static_cast<int>(std::floor(u)), 0, shape_[a] - 2);
        i0[a] = k;
        t[a] = u - k;
      }
      double acc = 0.0;
      for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < n; ++a) {
          int bit = (corner >> a) & 1;
          w *= bit ? t[a] : 1.0 - t[a];
          idx = idx * shape_[a] + (i0[a] + bit);
        }
        acc += w * values_[idx];
      }
      return acc;
    }
  }
  return 0.0;
}

Enclosure BoundaryFunction::sup1(double lo, double hi) const {
  return sup(AxisBox(Point::Constant(1, lo), Point::Constant(1, hi)));
}
Enclosure BoundaryFunction::inf1(double lo, double hi) const {
  return inf(AxisBox(Point::Constant(1, lo), Point::Constant(1, hi)));
}
Enclosure BoundaryFunction::osc1(double lo, double hi) const {
  return osc(AxisBox(Point::Constant(1, lo), Point::Constant(1, hi)));
}

// Multilinear interpolation attains its extrema at grid nodes of touched
// cells (outer bound); values at the box corners, centre and interior nodes
// are attained (inner bound).
Enclosure BoundaryFunction::sample_range(const AxisBox& box, bool upper) const {
  const int n = base_.dim();
  std::vector<int> a(n), b(n);
  for (int k = 0; k < n; ++k) {
    double s = (shape_[k] - 1) / base_.edge(k);
    a[k] = std::clamp(static_cast<int>(std::floor((box.lo(k) - base_.lo(k)) * s)), 0, shape_[k] - 2);
    b[k] = std::clamp(static_cast<int>(std::ceil((box.hi(k) - base_.lo(k)) * s)), a[k] + 1, shape_[k] - 1);
  }
  double outer = upper ? -INFINITY : INFINITY;
  std::vector<int> idx(a);
  for (;;) {
    std::size_t flat = 0;
    for (int k = 0; k < n; ++k) flat = flat * shape_[k] + idx[k];
    outer = upper ? std::max(outer, values_[flat]) : std::min(outer, values_[flat]);
    int k = n - 1;
    while (k >= 0) {
      if (++idx[k] <= b[k]) break;
      idx[k] = a[k];
      --k;
    }
    if (k < 0) break;
  }
  double inner = (*this)(box.centre());
  for (int corner = 0; corner < (1 << n); ++corner) {
    Point c(n);
    for (int k = 0; k < n; ++k) c[k] = ((corner >> k) & 1) ? box.hi(k) : box.lo(k);
    double v = (*this)(c);
    inner = upper ? std::max(inner, v) : std::min(inner, v);
  }
  if (upper) return {std::min(inner, outer), outer, true};
  return {outer, std::max(inner, outer), true};
}

Enclosure BoundaryFunction::sup(const AxisBox& box) const {
  check_box(box);
  switch (kind_) {
    case FunctionKind::Constant: return Enclosure::exact(offset_);
    case FunctionKind::Polyline: {
      double lo = box.lo(0), hi = box.hi(0);
      double v = std::max(eval1(lo), eval1(hi));
      auto i = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), lo) - xs_.begin());
      auto j = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), hi) - xs_.begin());
      if (i < j) v = std::max(v, vertex_range_max(i, j - 1));
      return Enclosure::exact(v);
    }
    case FunctionKind::BumpSeries: {
      double c = (*this)(box.centre());
      double best = c;
      const int n = box.dim();
      for (int corner = 0; corner < (1 << n); ++corner) {
        Point q(n);
        for (int k = 0; k < n; ++k) q[k] = ((corner >> k) & 1) ? box.hi(k) : box.lo(k);
        best = std::max(best, (*this)(q));
      }
      return {best, std::max(best, c + lipschitz() * 0.5 * box.diameter())};
    }
    case FunctionKind::Samples: return sample_range(box, true);
  }
  return {};
}

Enclosure BoundaryFunction::inf(const AxisBox& box) const {
  check_box(box);
  switch (kind_) {
    case FunctionKind::Constant: return Enclosure::exact(offset_);
    case FunctionKind::Polyline: {
      double lo = box.lo(0), hi = box.hi(0);
      double v = std::min(eval1(lo), eval1(hi));
      auto i = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), lo) - xs_.begin());
      auto j = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), hi) - xs_.begin());
      if (i < j) v = std::min(v, vertex_range_min(i, j - 1));
      return Enclosure::exact(v);
    }
    case FunctionKind::BumpSeries: {
      double c = (*this)(box.centre());
      double best = c;
      const int n = box.dim();
      for (int corner = 0; corner < (1 << n); ++corner) {
        Point q(n);
        for (int k = 0; k < n; ++k) q[k] = ((corner >> k) & 1) ? box.hi(k) : box.lo(k);
        best = std::min(best, (*this)(q));
      }
      return {std::min(best, c - lipschitz() * 0.5 * box.diameter()), best};
    }
    case FunctionKind::Samples: return sample_range(box, false);
  }
  return {};
}

Enclosure BoundaryFunction::osc(const AxisBox& box) const {
  Enclosure s = sup(box), i = inf(box);
  return {std::max(0.0, 0.5 * (s.lo - i.hi)), 0.5 * (s.hi - i.lo), s.declared || i.declared};
}

double BoundaryFunction::integral1(double lo, double hi) const {
  if (kind_ == FunctionKind::Constant) return offset_ * (hi - lo);
  if (kind_ != FunctionKind::Polyline) throw DomainError("integral only for exact 1-D functions");
  if (lo < xs_.front() || hi > xs_.back() || lo > hi) throw DomainError("integral range outside base");
  double s = 0.0;
  double x0 = lo, y0 = eval1(lo);
  auto i = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), lo) - xs_.begin());
  for (; i < xs_.size() && xs_[i] < hi; ++i) {
    s += 0.5 * (y0 + ys_[i]) * (xs_[i] - x0);
    x0 = xs_[i];
    y0 = ys_[i];
  }
  s += 0.5 * (y0 + eval1(hi)) * (hi - x0);
  return s;
}

double BoundaryFunction::lipschitz() const {
  switch (kind_) {
    case FunctionKind::Constant: return 0.0;
    case FunctionKind::Polyline: {
      double m = 0.0;
      for (std::size_t i = 1; i < xs_.size(); ++i)
        m = std::max(m, std::abs(ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]));
      return m;
    }
    case FunctionKind::BumpSeries: return kPsiLip * lipschitz_bound(*bump_, bump_->n_max);
    case FunctionKind::Samples: {
      // per-axis bound on the partial derivative of the interpolant
      const int n = base_.dim();
      double acc = 0.0;
      std::vector<std::size_t> stride(n, 1);
      for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * shape_[k + 1];
      for (int k = 0; k < n; ++k) {
        double hk = base_.edge(k) / (shape_[k] - 1), m = 0.0;
        for (std::size_t flat = 0; flat < values_.size(); ++flat) {
          std::size_t coord = (flat / stride[k]) % shape_[k];
          if (coord + 1 < static_cast<std::size_t>(shape_[k]))
            m = std::max(m, std::abs(values_[flat + stride[k]] - values_[flat]) / hk);
        }
        acc += m * m;
      }
      return std::sqrt(acc);
    }
  }
  return 0.0;
}

BoundaryFunction BoundaryFunction::shifted(double c) const {
  BoundaryFunction g = *this;
  switch (kind_) {
    case FunctionKind::Polyline:
      for (double& y : g.ys_) y += c;
      g.offset_ += c;
      g.build_tables();
      break;
    case FunctionKind::Samples:
      for (double& v : g.values_) v += c;
      break;
    default:
      g.offset_ += c;
  }
  return g;
}

std::vector<double> greedy_osc_breaks(const BoundaryFunction& f, double lo, double hi, double eps) {
  if (!(eps > 0)) throw DomainError("oscillation level must be positive");
  std::vector<double> breaks{lo};
  double t = lo;
  while (t < hi) {
    if (f.osc1(t, hi).hi <= eps) {
      breaks.push_back(hi);
      break;
    }
    double a = t, b = hi;
    for (int it = 0; it < 200 && b - a > 0; ++it) {
      double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      if (f.osc1(t, m).hi <= eps) a = m;
      else b = m;
    }
    if (a <= t) throw DomainError("oscillation cover stalled (function not continuous at resolution)");
    breaks.push_back(a);
    t = a;
  }
  return breaks;
}

namespace {

// Earliest-end greedy packing of intervals with certified Osc >= delta.
long long packing_1d(const BoundaryFunction& f, double lo, double hi, double delta) {
  long long count = 0;
  double t = lo;
  while (t < hi && f.osc1(t, hi).lo >= delta) {
    double a = t, b = hi;
    for (int it = 0; it < 200; ++it) {
      double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      if (f.osc1(t, m).lo >= delta) b = m;
      else a = m;
    }
    ++count;
    t = b;
  }
  return count;
}

long long packing_tree(const BoundaryFunction& f, const AxisBox& box, double delta, int depth) {
  long long here = f.osc(box).lo >= delta ? 1 : 0;
  if (depth <= 0) return here;
  if (f.osc(box).hi < delta) return 0;
  long long kids = 0;
  for (const auto& c : box.bisect()) kids += packing_tree(f, c, delta, depth - 1);
  return std::max(here, kids);
}

}  // namespace

VCount v_count(const BoundaryFunction& f, const AxisBox& box, double delta, int depth) {
  if (!(delta > 0)) throw DomainError("v_count needs delta > 0");
  if (depth < 0) throw DomainError("v_count needs depth >= 0");
  Enclosure o = f.osc(box);
  if (o.hi < delta) return {1, 1};
  const int n = box.dim();
  VCount out;
  // keep the dyadic tree within a sane node budget
  int tree_depth = std::min(depth, std::max(0, 22 / n));
  out.lower = std::max<long long>(1, packing_tree(f, box, delta, tree_depth));
  out.upper = VCount::kUnbounded;
  if (n == 1) {
    out.lower = std::max(out.lower, packing_1d(f, box.lo(0), box.hi(0), delta));
    double eps2 = delta * (1.0 - std::ldexp(1.0, -20));
    auto br = greedy_osc_breaks(f, box.lo(0), box.hi(0), eps2);
    long long pieces = static_cast<long long>(br.size()) - 1;
    out.upper = std::max<long long>(1, pieces - 1);
  }
  // volume bound: a cube with Osc >= delta has edge >= s_min
  double alpha = f.holder_alpha.value_or(1.0);
  double semi = f.holder_seminorm ? *f.holder_seminorm : f.lipschitz();
  if (!f.holder_seminorm) alpha = 1.0;
  if (semi > 0 && std::isfinite(semi)) {
    double s_min = std::pow(2.0 * delta / semi, 1.0 / alpha) / std::sqrt(static_cast<double>(n));
    double bound = box.volume() / std::pow(s_min, n);
    if (bound < 9e18) out.upper = std::min(out.upper, std::max<long long>(1, static_cast<long long>(std::floor(bound))));
  }
  out.upper = std::max(out.upper, out.lower);
  return out;
}

HolderSample holder_check(const BoundaryFunction& f, double alpha, long long sample_budget, std::uint64_t seed) {
  if (!(alpha > 0 && alpha <= 1)) throw DomainError("holder exponent must be in (0,1]");
  if (sample_budget < 2) throw DomainError("sample budget must be >= 2");
  std::mt19937_64 rng(seed);
  const AxisBox& B = f.base();
  const int n = B.dim();
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto random_point = [&]() {
    Point x(n);
    for (int k = 0; k < n; ++k) x[k] = B.lo(k) + U(rng) * B.edge(k);
    return x;
  };
  HolderSample out;
  const double declared = f.holder_seminorm.value_or(INFINITY);
  const double scale = B.max_edge();
  for (long long s = 0; s < sample_budget; ++s) {
    Point x = random_point(), y;
    if (s % 2 == 0) {
      y = random_point();
    } else {
      // local pair at a random dyadic separation
      double r = scale * std::ldexp(1.0, -static_cast<int>(U(rng) * 30.0));
      y = x;
      for (int k = 0; k < n; ++k) y[k] = std::clamp(x[k] + r * (2.0 * U(rng) - 1.0), B.lo(k), B.hi(k));
    }
    double dist = (x - y).norm();
    if (dist == 0.0) continue;
    double q = std::abs(f(x) - f(y)) / std::pow(dist, alpha);
    out.seminorm_lower = std::max(out.seminorm_lower, q);
    ++out.pairs;
    if (q > declared * (1.0 + 1e-12) + 1e-15) ++out.violations;
  }
  return out;
}

}  // namespace rw
