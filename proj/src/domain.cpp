#include "roughweyl/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace rw {

AxisMap AxisMap::identity(int d) {
  AxisMap m;
  m.perm.resize(d);
  std::iota(m.perm.begin(), m.perm.end(), 0);
  m.sign.assign(d, 1);
  m.offset = Point::Zero(d);
  return m;
}

void AxisMap::validate() const {
  const int d = dim();
  if (static_cast<int>(sign.size()) != d || offset.size() != d) throw DomainError("axis map has inconsistent sizes");
  std::vector<int> seen(d, 0);
  for (int p : perm) {
    if (p < 0 || p >= d || seen[p]++) throw DomainError("axis map permutation is invalid");
  }
  for (int s : sign)
    if (s != 1 && s != -1) throw DomainError("axis map signs must be +1 or -1");
}

Point AxisMap::to_local(const Point& x) const {
  Point y(dim());
  for (int i = 0; i < dim(); ++i) y[i] = sign[i] * x[perm[i]] + offset[i];
  return y;
}

Point AxisMap::to_global(const Point& y) const {
  Point x(dim());
  for (int i = 0; i < dim(); ++i) x[perm[i]] = sign[i] * (y[i] - offset[i]);
  return x;
}

AxisBox AxisMap::box_to_local(const AxisBox& b) const {
  Point lo(dim()), hi(dim());
  for (int i = 0; i < dim(); ++i) {
    double u = sign[i] * b.lo(perm[i]) + offset[i], v = sign[i] * b.hi(perm[i]) + offset[i];
    lo[i] = std::min(u, v);
    hi[i] = std::max(u, v);
  }
  return AxisBox(lo, hi);
}

AxisBox AxisMap::box_to_global(const AxisBox& b) const {
  Point lo(dim()), hi(dim());
  for (int i = 0; i < dim(); ++i) {
    double u = sign[i] * (b.lo(i) - offset[i]), v = sign[i] * (b.hi(i) - offset[i]);
    lo[perm[i]] = std::min(u, v);
    hi[perm[i]] = std::max(u, v);
  }
  return AxisBox(lo, hi);
}

AxisBox Chart::local_box() const {
  const AxisBox& base = f.base();
  const int n = base.dim();
  Point lo(n + 1), hi(n + 1);
  lo.head(n) = base.lo();
  hi.head(n) = base.hi();
  lo[n] = b;
  hi[n] = f.sup(base).hi;
  return AxisBox(lo, hi);
}

bool Chart::contains_local(const Point& y) const {
  const int n = f.dim_base();
  Point yp = y.head(n);
  if (!f.base().contains_point(yp)) return false;
  return y[n] > b && y[n] < f(yp);
}

Chart flat_chart(int d, int axis, double level, int inward, const AxisBox& tangential, double depth) {
  if (tangential.dim() != d - 1) throw DomainError("tangential box must have dimension d-1");
  if (!(depth > 0)) throw DomainError("chart depth must be positive");
  Chart c;
  c.map.perm.clear();
  for (int i = 0; i < d; ++i)
    if (i != axis) c.map.perm.push_back(i);
  c.map.perm.push_back(axis);
  c.map.sign.assign(d, 1);
  int s = -inward;
  c.map.sign[d - 1] = s;
  c.map.offset = Point::Zero(d);
  c.map.offset[d - 1] = -s * level;
  c.f = BoundaryFunction::constant(tangential, 0.0);
  c.b = -depth;
  return c;
}

namespace {

std::vector<Vec2> convex_hull(std::vector<Vec2> p) {
  std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k - 1);
  return h;
}

double hull_diameter(const std::vector<Vec2>& pts) {
  auto h = convex_hull(pts);
  double best = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) best = std::max(best, (h[i] - h[j]).norm());
  return best;
}

Vec2 v2(const Point& x) { return Vec2(x[0], x[1]); }

}  // namespace

CompositeDomain::CompositeDomain(std::string name, std::vector<Chart> charts, Polygon boundary)
    : name_(std::move(name)), dim_(2), charts_(std::move(charts)), polygon_(std::move(boundary)) {
  finish();
}

CompositeDomain CompositeDomain::box(const AxisBox& b, std::string name) {
  const int d = b.dim();
  if (d < 2) throw DomainError("box domain needs d >= 2");
  std::vector<Chart> charts;
  for (int axis = 0; axis < d; ++axis) {
    Point lo(d - 1), hi(d - 1);
    for (int i = 0, k = 0; i < d; ++i)
      if (i != axis) {
        lo[k] = b.lo(i);
        hi[k] = b.hi(i);
        ++k;
      }
    AxisBox tang(lo, hi);
    double depth = 0.5 * b.edge(axis);
    charts.push_back(flat_chart(d, axis, b.lo(axis), +1, tang, depth));
    charts.push_back(flat_chart(d, axis, b.hi(axis), -1, tang, depth));
  }
  if (d == 2) {
    Polygon poly({{Vec2(b.lo(0), b.lo(1)), Vec2(b.hi(0), b.lo(1)), Vec2(b.hi(0), b.hi(1)), Vec2(b.lo(0), b.hi(1))}});
    return CompositeDomain(std::move(name), std::move(charts), std::move(poly));
  }
  CompositeDomain dom;
  dom.name_ = std::move(name);
  dom.dim_ = d;
  dom.charts_ = std::move(charts);
  dom.box_ = b;
  dom.finish();
  return dom;
}

CompositeDomain CompositeDomain::unit_square() { return box(AxisBox::unit(2), "unit-square"); }

CompositeDomain CompositeDomain::l_shape() {
  auto iv = [](double a, double b) { return AxisBox(Point::Constant(1, a), Point::Constant(1, b)); };
  const double h = 0.25;
  std::vector<Chart> charts{
      flat_chart(2, 1, 0.0, +1, iv(0.0, 1.0), h),    // bottom
      flat_chart(2, 0, 1.0, -1, iv(0.0, 0.5), h),    // right
      flat_chart(2, 1, 0.5, -1, iv(0.25, 1.0), h),   // upper edge of the right arm
      flat_chart(2, 0, 0.5, -1, iv(0.25, 1.0), h),   // reentrant vertical edge
      flat_chart(2, 1, 1.0, -1, iv(0.0, 0.5), h),    // top
      flat_chart(2, 0, 0.0, +1, iv(0.0, 1.0), h),    // left
  };
  Polygon poly({{Vec2(0, 0), Vec2(1, 0), Vec2(1, 0.5), Vec2(0.5, 0.5), Vec2(0.5, 1), Vec2(0, 1)}});
  return CompositeDomain("l-shape", std::move(charts), std::move(poly));
}

CompositeDomain CompositeDomain::graph_domain(const BoundaryFunction& top, std::string name) {
  if (top.kind() != FunctionKind::Polyline && top.kind() != FunctionKind::Constant)
    throw DomainError("graph domain needs an exact 1-D top function");
  if (top.base().lo(0) != 0.0 || top.base().hi(0) != 1.0) throw DomainError("graph domain top must live on [0,1]");
  double low = top.inf(top.base()).lo;
  if (!(low > 0)) throw DomainError("graph domain top must stay positive");
  auto iv = [](double a, double b) { return AxisBox(Point::Constant(1, a), Point::Constant(1, b)); };
  double depth = std::min(0.5, 0.5 * low);
  std::vector<Chart> charts;
  Chart tc;
  tc.map = AxisMap::identity(2);
  tc.f = top;
  tc.b = low - depth;
  charts.push_back(tc);
  charts.push_back(flat_chart(2, 1, 0.0, +1, iv(0.0, 1.0), depth));
  charts.push_back(flat_chart(2, 0, 0.0, +1, iv(0.0, low), 0.5));
  charts.push_back(flat_chart(2, 0, 1.0, -1, iv(0.0, low), 0.5));
  std::vector<Vec2> ring{Vec2(0, 0), Vec2(1, 0)};
  if (top.kind() == FunctionKind::Polyline) {
    for (std::size_t i = top.xs().size(); i-- > 0;) ring.emplace_back(top.xs()[i], top.ys()[i]);
  } else {
    ring.emplace_back(1.0, top.offset());
    ring.emplace_back(0.0, top.offset());
  }
  return CompositeDomain(std::move(name), std::move(charts), Polygon({ring}));
}

const Polygon& CompositeDomain::polygon() const {
  if (!polygon_) throw DomainError("domain is not planar");
  return *polygon_;
}

double CompositeDomain::area() const { return polygon_ ? polygon_->area() : box_->volume(); }

bool CompositeDomain::inside(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point has wrong dimension");
  return polygon_ ? polygon_->inside(v2(x)) : box_->contains_point(x);
}

double CompositeDomain::distance(const Point& x) const {
  if (polygon_) return polygon_->distance(v2(x));
  const AxisBox& b = *box_;
  if (b.contains_point(x)) {
    double m = INFINITY;
    for (int i = 0; i < dim_; ++i) m = std::min({m, x[i] - b.lo(i), b.hi(i) - x[i]});
    return m;
  }
  Point ex(dim_);
  for (int i = 0; i < dim_; ++i) ex[i] = std::max({b.lo(i) - x[i], 0.0, x[i] - b.hi(i)});
  return ex.norm();
}

Enclosure CompositeDomain::boundary_dist(const Point& x) const {
  if (!inside(x)) throw DomainError("boundary_dist needs a point inside the domain");
  double v = distance(x);
  // one rounding in the square root and a few in the projection
  double slack = 4 * std::numeric_limits<double>::epsilon() * v;
  return {std::max(0.0, v - slack), v + slack};
}

CompositeDomain::BoxClass CompositeDomain::classify(const AxisBox& box) const {
  if (polygon_) {
    if (polygon_->open_box_meets_boundary(box)) return BoxClass::Mixed;
    return polygon_->inside(v2(box.centre())) ? BoxClass::Inside : BoxClass::Outside;
  }
  if (box_->contains_box(box)) return BoxClass::Inside;
  if (!box_->overlaps(box)) return BoxClass::Outside;
  return BoxClass::Mixed;
}

double CompositeDomain::box_distance(const AxisBox& box) const {
  if (polygon_) return polygon_->box_distance(box);
  const AxisBox& b = *box_;
  bool strictly_inside = true;
  for (int i = 0; i < dim_; ++i)
    if (!(box.lo(i) > b.lo(i) && box.hi(i) < b.hi(i))) strictly_inside = false;
  if (strictly_inside) {
    double m = INFINITY;
    for (int i = 0; i < dim_; ++i) m = std::min({m, box.lo(i) - b.lo(i), b.hi(i) - box.hi(i)});
    return m;
  }
  Point gap(dim_);
  for (int i = 0; i < dim_; ++i) gap[i] = std::max({b.lo(i) - box.hi(i), 0.0, box.lo(i) - b.hi(i)});
  return gap.norm();
}

double CompositeDomain::box_max_distance(const AxisBox& box) const {
  if (box_ && box_->contains_box(box)) {
    // distance to the faces is a min of one-variable tents, maximised axis by axis
    double m = INFINITY;
    for (int i = 0; i < dim_; ++i) {
      double mid = 0.5 * (box_->lo(i) + box_->hi(i));
      double x = std::clamp(mid, box.lo(i), box.hi(i));
      m = std::min(m, std::min(x - box_->lo(i), box_->hi(i) - x));
    }
    return m;
  }
  double diag = box.diameter();
  return std::min(distance(box.centre()) + 0.5 * diag, box_distance(box) + diag);
}

double CompositeDomain::clipped_area(const AxisBox& box) const {
  if (polygon_) return polygon_->clipped_area(box).hi;
  if (!box_->overlaps(box)) return 0.0;
  return box_->intersection(box).volume();
}

std::vector<Point> CompositeDomain::boundary_samples(double spacing) const {
  std::vector<Point> out;
  if (polygon_) {
    const Polygon& P = *polygon_;
    for (std::size_t s = 0; s < P.segment_count(); ++s) {
      Vec2 a = P.seg_a(s), b = P.seg_b(s);
      int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
      for (int k = 0; k < m; ++k) {
        Vec2 p = a + (static_cast<double>(k) / m) * (b - a);
        out.push_back(Point(p));
      }
    }
    return out;
  }
  const AxisBox& b = *box_;
  int m = std::max(1, std::min(8, static_cast<int>(std::ceil(b.max_edge() / spacing))));
  for (int axis = 0; axis < dim_; ++axis)
    for (int side = 0; side < 2; ++side) {
      AxisBox face = b.slice(axis, b.lo(axis), b.hi(axis));
      for (const auto& cell : face.split(m)) {
        Point c = cell.centre();
        c[axis] = side ? b.hi(axis) : b.lo(axis);
        out.push_back(c);
      }
    }
  return out;
}

std::vector<std::string> CompositeDomain::validate_charts(int probes) const {
  std::vector<std::string> bad;
  for (std::size_t l = 0; l < charts_.size(); ++l) {
    const Chart& c = charts_[l];
    std::string tag = "chart " + std::to_string(l) + ": ";
    if (c.dim() != dim_ || c.f.dim_base() != dim_ - 1) {
      bad.push_back(tag + "dimension mismatch");
      continue;
    }
    Enclosure lowf = c.f.inf(c.f.base());
    if (!(c.b < lowf.lo)) bad.push_back(tag + "floor b is not below inf f");
    if (c.f.base().max_edge() > diameter_ * (1 + 1e-12)) bad.push_back(tag + "base edge exceeds the diameter");
    if (c.f.sup(c.f.base()).hi - c.b > diameter_ * (1 + 1e-12)) bad.push_back(tag + "height exceeds the diameter");
    // interior probes of the chart must lie in the domain
    const AxisBox& base = c.f.base();
    int n = base.dim();
    int pb = dim_ == 2 ? probes : std::max(2, probes / 4);
    for (const auto& cell : base.split(pb)) {
      Point yp = cell.centre();
      double top = c.f(yp);
      for (int j = 0; j < pb; ++j) {
        Point y(n + 1);
        y.head(n) = yp;
        y[n] = c.b + (j + 0.5) / pb * (top - c.b);
        if (!inside(c.map.to_global(y))) {
          bad.push_back(tag + "probe outside the domain");
          j = pb;
          break;
        }
      }
      if (!bad.empty() && bad.back() == tag + "probe outside the domain") break;
    }
  }
  // every boundary sample must sit in the closure of some chart
  double spacing = bbox_.max_edge() / 256.0;
  for (const Point& x : boundary_samples(spacing)) {
    bool hit = false;
    for (const Chart& c : charts_) {
      Point y = c.map.to_local(x);
      int n = c.f.dim_base();
      Point yp = y.head(n);
      if (!c.f.base().closure_contains(yp)) continue;
      double tol = 1e-12 * bbox_.max_edge();
      if (y[n] >= c.b - tol && y[n] <= c.f(yp) + tol) {
        hit = true;
        break;
      }
    }
    if (!hit) {
      bad.push_back("boundary point not covered by any chart");
      break;
    }
  }
  return bad;
}

bool CompositeDomain::passes_delta(double delta) const {
  const double rd = std::sqrt(static_cast<double>(dim_));
  for (const Chart& c : charts_) {
    if (delta > rd * c.f.base().min_edge()) return false;
    if (2 * delta > c.f.inf(c.f.base()).lo - c.b) return false;
  }
  if (!polygon_) return true;  // flat face charts of a box cover the layer exactly
  // boundary layer coverage on a verification grid of pitch delta/8
  const double g = delta / 8;
  int nx = static_cast<int>(std::ceil(bbox_.edge(0) / g)), ny = static_cast<int>(std::ceil(bbox_.edge(1) / g));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      AxisBox cell(Vec2(bbox_.lo(0) + ix * g, bbox_.lo(1) + iy * g),
                   Vec2(bbox_.lo(0) + (ix + 1) * g, bbox_.lo(1) + (iy + 1) * g));
      if (classify(cell) == BoxClass::Outside) continue;
      if (box_distance(cell) > delta) continue;
      for (int py = 1; py <= 3; ++py)
        for (int px = 1; px <= 3; ++px) {
          Point x(2);
          x << cell.lo(0) + 0.25 * px * g, cell.lo(1) + 0.25 * py * g;
          if (!inside(x) || distance(x) > delta) continue;
          bool hit = false;
          for (const Chart& c : charts_)
            if (c.contains_local(c.map.to_local(x))) {
              hit = true;
              break;
            }
          if (!hit) return false;
        }
    }
  return true;
}

void CompositeDomain::finish() {
  if (charts_.empty()) throw DomainError("domain needs at least one chart");
  for (const Chart& c : charts_) {
    c.map.validate();
    if (c.dim() != dim_) throw DomainError("chart dimension does not match the domain");
    representation_error_ = std::max(representation_error_, c.f.representation_error);
  }
  if (polygon_) {
    bbox_ = polygon_->bounding_box();
    diameter_ = hull_diameter(polygon_->vertices());
  } else {
    bbox_ = *box_;
    diameter_ = box_->diameter();
  }
  delta_omega_ = 0.0;
  for (int k = -10; k <= 40; ++k) {
    double delta = std::ldexp(1.0, -k);
    if (delta > diameter_) continue;
    if (passes_delta(delta)) {
      delta_omega_ = delta;
      break;
    }
  }
  if (delta_omega_ == 0.0) throw DomainError("no admissible boundary-layer scale for the charts of " + name_);
}

// ---- profiles ----

double ProfileCurve::operator()(double x) const {
  if (s.empty() || x < s.front()) return 0.0;
  auto it = std::upper_bound(s.begin(), s.end(), x);
  std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
  if (i + 1 == s.size()) return right[i];
  double t = (x - s[i]) / (s[i + 1] - s[i]);
  return right[i] + t * (left[i + 1] - right[i]);
}

void ProfileCurve::push(double knot, double lv, double rv) {
  if (!s.empty() && !(knot > s.back())) throw DomainError("profile knots must increase");
  s.push_back(knot);
  left.push_back(lv);
  right.push_back(rv);
}

bool ProfileCurve::monotone() const {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (right[i] < left[i]) return false;
    if (i + 1 < s.size() && left[i + 1] < right[i]) return false;
  }
  return true;
}

ProfileCurve ProfileCurve::step(const std::vector<std::pair<double, double>>& jumps) {
  std::map<double, double> acc;
  for (const auto& [pos, inc] : jumps) acc[std::max(0.0, pos)] += inc;
  ProfileCurve c;
  double run = 0.0;
  if (acc.empty() || acc.begin()->first > 0.0) c.push(0.0, 0.0, 0.0);
  for (const auto& [pos, inc] : acc) {
    c.push(pos, run, run + inc);
    run += inc;
  }
  return c;
}

ProfileCurve ProfileCurve::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.empty()) throw DomainError("profile needs matching knots and values");
  ProfileCurve c;
  if (knots.front() > 0.0) c.push(0.0, 0.0, 0.0);
  for (std::size_t i = 0; i < knots.size(); ++i) c.push(knots[i], values[i], values[i]);
  if (!c.monotone()) throw DomainError("profile must be nondecreasing");
  return c;
}

MeasureProfile MeasureProfile::exact(const ProfileCurve& c) {
  MeasureProfile p;
  p.lo = c;
  p.hi = c;
  double top = c.right.empty() ? 0.0 : c.right.back();
  p.saturation = Enclosure::exact(top);
  return p;
}

namespace {

void cap_curve(ProfileCurve& c, double cap) {
  for (auto& v : c.left) v = std::min(v, cap);
  for (auto& v : c.right) v = std::min(v, cap);
}

}  // namespace

MeasureProfile measure_profile(const CompositeDomain& omega, double r) {
  if (!(r > 0)) throw DomainError("resolution must be positive");
  MeasureProfile out;
  out.resolution = r;
  const double area = omega.area();
  out.saturation = Enclosure::exact(area);
  if (!omega.is_polygon()) {
    // box: mu(s) = V - prod(e_i - 2s)_+, sampled at multiples of the resolution
    const AxisBox& b = omega.bounding_box();
    auto mu = [&](double s) {
      double p = 1.0;
      for (int i = 0; i < b.dim(); ++i) p *= std::max(0.0, b.edge(i) - 2 * s);
      return area - p;
    };
    double half = 0.5 * b.min_edge();
    int k = std::max(1, static_cast<int>(std::ceil(half / r)));
    std::vector<std::pair<double, double>> lo, hi;
    double prev_lo = 0.0, prev_hi = 0.0;
    for (int i = 0; i <= k; ++i) {
      double s = std::min(half, i * r);
      double vlo = mu(s), vhi = mu(std::min(half, (i + 1) * r));
      lo.emplace_back(s, vlo - prev_lo);
      hi.emplace_back(s, vhi - prev_hi);
      prev_lo = vlo;
      prev_hi = vhi;
      if (s == half) break;
    }
    out.lo = ProfileCurve::step(lo);
    out.hi = ProfileCurve::step(hi);
    cap_curve(out.hi, area);
    return out;
  }
  const Polygon& P = omega.polygon();
  const AxisBox& bb = omega.bounding_box();
  long long nx = static_cast<long long>(std::ceil(bb.edge(0) / r));
  long long ny = static_cast<long long>(std::ceil(bb.edge(1) / r));
  if (nx * ny > 64LL * 1024 * 1024) throw DomainError("measure grid too fine for this domain");
  std::vector<std::pair<double, double>> inner, outer;
  for (long long iy = 0; iy < ny; ++iy)
    for (long long ix = 0; ix < nx; ++ix) {
      AxisBox cell(Vec2(bb.lo(0) + ix * r, bb.lo(1) + iy * r), Vec2(bb.lo(0) + (ix + 1) * r, bb.lo(1) + (iy + 1) * r));
      auto cls = omega.classify(cell);
      if (cls == CompositeDomain::BoxClass::Outside) continue;
      Enclosure ca = cls == CompositeDomain::BoxClass::Inside ? Enclosure::exact(r * r) : P.clipped_area(cell);
      double dmin = cls == CompositeDomain::BoxClass::Mixed ? 0.0 : omega.box_distance(cell);
      double dmax = omega.box_max_distance(cell);
      if (ca.lo > 0) inner.emplace_back(dmax, ca.lo);
      outer.emplace_back(dmin, ca.hi);
    }
  out.lo = ProfileCurve::step(inner);
  out.hi = ProfileCurve::step(outer);
  cap_curve(out.hi, area);
  cap_curve(out.lo, area);
  return out;
}

Enclosure boundary_layer_measure(const CompositeDomain& omega, double eps, double resolution) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  return measure_profile(omega, resolution)(eps);
}

// ---- tau ----

TauFunction TauFunction::power_law(double A, double beta, double B) {
  if (A < 0 || B < 0 || beta < 0) throw DomainError("power-law tau needs nonnegative parameters");
  TauFunction t;
  t.kind = Kind::PowerLaw;
  t.A = A;
  t.beta = beta;
  t.B = B;
  return t;
}

TauFunction TauFunction::tabulated(std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2) throw DomainError("tabulated tau needs >= 2 matching points");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw DomainError("tabulated tau abscissae must increase");
    if (v[i] < v[i - 1]) throw DomainError("tabulated tau must be nondecreasing");
  }
  if (!(t.front() > 0) || v.front() < 0) throw DomainError("tabulated tau needs positive abscissae");
  TauFunction f;
  f.kind = Kind::Tabulated;
  f.t = std::move(t);
  f.values = std::move(v);
  return f;
}

double TauFunction::operator()(double x) const {
  if (kind == Kind::PowerLaw) return A * std::pow(x, beta) + B;
  if (x > t.back()) throw DomainError("tau evaluated beyond its table");
  if (x <= t.front()) return values.front();
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t j = static_cast<std::size_t>(it - t.begin());
  if (j == t.size()) return values.back();
  std::size_t i = j - 1;
  double w = (x - t[i]) / (t[j] - t[i]);
  return values[i] + w * (values[j] - values[i]);
}

double TauFunction::integral_t2(double lo, double hi) const {
  if (!(lo > 0) || hi < lo) throw DomainError("tau integral needs 0 < lo <= hi");
  if (kind == Kind::PowerLaw) {
    double a = beta == 1.0 ? A * std::log(hi / lo) : A * (std::pow(hi, beta - 1) - std::pow(lo, beta - 1)) / (beta - 1);
    return a + B * (1.0 / lo - 1.0 / hi);
  }
  if (hi > t.back()) throw DomainError("tau integral beyond its table");
  // knots of the linear interpolant, plus the constant part below t[0]
  double sum = 0.0;
  auto piece = [&](double a, double b, double c0, double c1) {
    // integral of (c0 + c1 t)/t^2
    sum += c0 * (1.0 / a - 1.0 / b) + c1 * std::log(b / a);
  };
  double x = lo;
  if (x < t.front()) {
    double b = std::min(hi, t.front());
    piece(x, b, values.front(), 0.0);
    x = b;
  }
  for (std::size_t i = 0; i + 1 < t.size() && x < hi; ++i) {
    if (t[i + 1] <= x) continue;
    double b = std::min(hi, t[i + 1]);
    double c1 = (values[i + 1] - values[i]) / (t[i + 1] - t[i]);
    double c0 = values[i] - c1 * t[i];
    piece(x, b, c0, c1);
    x = b;
  }
  return sum;
}

TauFit tau_fit(const CompositeDomain& omega, const TauFunction& tau, const std::vector<double>& probe_deltas,
               int depth) {
  if (probe_deltas.empty()) throw DomainError("tau_fit needs probe deltas");
  TauFit fit;
  fit.t_min = INFINITY;
  for (double d : probe_deltas) {
    if (!(d > 0)) throw DomainError("probe deltas must be positive");
    double t = 1.0 / d;
    double tv = tau(t);
    if (tv == 0.0) throw DomainError("tau vanishes at a probe");
    double sum = 0.0;
    for (const Chart& c : omega.charts()) {
      VCount v = v_count(c.f, c.f.base(), d, depth);
      sum += v.upper == VCount::kUnbounded ? INFINITY : static_cast<double>(v.upper);
    }
    fit.value = std::max(fit.value, sum / tv);
    fit.t_min = std::min(fit.t_min, t);
    fit.t_max = std::max(fit.t_max, t);
  }
  return fit;
}

TauFunction lip_tau(double alpha, double seminorm, double diameter, int d) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("lip_tau needs alpha in (0,1)");
  if (seminorm < 0 || !(diameter > 0) || d < 2) throw DomainError("lip_tau needs seminorm >= 0, diameter > 0, d >= 2");
  double e = (d - 1) / alpha;
  double A = std::pow(2.0, (1.0 - d) / alpha) * std::pow(static_cast<double>(d), 0.5 * (d - 1)) *
             std::pow(diameter, d - 1) * std::pow(seminorm, e);
  return TauFunction::power_law(A, e, 1.0);
}

}  // namespace rw
