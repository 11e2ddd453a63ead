#include "roughweyl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rw {

Enclosure::Enclosure(double l, double h, bool decl) : lo(l), hi(h), declared(decl) {
  if (!(l <= h)) throw std::logic_error("enclosure with lo > hi");
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  return {a.lo + b.lo, a.hi + b.hi, a.declared || b.declared};
}

Enclosure operator*(double s, const Enclosure& a) {
  if (s >= 0) return {s * a.lo, s * a.hi, a.declared};
  return {s * a.hi, s * a.lo, a.declared};
}

AxisBox::AxisBox(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() == 0)
    throw DomainError("box corners have mismatched dimensions");
  for (int i = 0; i < lo_.size(); ++i)
    if (!(lo_[i] < hi_[i])) throw DomainError("degenerate box: " + str());
}

AxisBox AxisBox::cube(const Point& lo, double edge) {
  return AxisBox(lo, (lo.array() + edge).matrix());
}

AxisBox AxisBox::centred(const Point& c, double edge) {
  return AxisBox((c.array() - 0.5 * edge).matrix(), (c.array() + 0.5 * edge).matrix());
}

AxisBox AxisBox::unit(int dim) {
  return AxisBox(Point::Zero(dim), Point::Ones(dim));
}

double AxisBox::max_edge() const { return (hi_ - lo_).maxCoeff(); }
double AxisBox::min_edge() const { return (hi_ - lo_).minCoeff(); }
bool AxisBox::is_cube() const { return max_edge() == min_edge(); }
double AxisBox::volume() const { return (hi_ - lo_).prod(); }
double AxisBox::diameter() const { return (hi_ - lo_).norm(); }
Point AxisBox::centre() const { return 0.5 * (lo_ + hi_); }

bool AxisBox::contains_point(const Point& x) const {
  return (x.array() > lo_.array()).all() && (x.array() < hi_.array()).all();
}

bool AxisBox::closure_contains(const Point& x) const {
  return (x.array() >= lo_.array()).all() && (x.array() <= hi_.array()).all();
}

bool AxisBox::contains_box(const AxisBox& o) const {
  return (o.lo_.array() >= lo_.array()).all() && (o.hi_.array() <= hi_.array()).all();
}

bool AxisBox::overlaps(const AxisBox& o) const {
  return (lo_.array() < o.hi_.array()).all() && (o.lo_.array() < hi_.array()).all();
}

AxisBox AxisBox::intersection(const AxisBox& o) const {
  return AxisBox(lo_.cwiseMax(o.lo_), hi_.cwiseMin(o.hi_));
}

AxisBox AxisBox::slice(int axis, double l, double h) const {
  Point a = lo_, b = hi_;
  a[axis] = l;
  b[axis] = h;
  return AxisBox(a, b);
}

std::vector<AxisBox> AxisBox::bisect() const { return split(2); }

std::vector<AxisBox> AxisBox::split(int m) const {
  if (m < 1) throw DomainError("split factor must be positive");
  const int d = dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(m);
  std::vector<AxisBox> out;
  out.reserve(total);
  std::vector<int> idx(d, 0);
  Point step = (hi_ - lo_) / m;
  for (std::size_t t = 0; t < total; ++t) {
    Point a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a[i] = lo_[i] + idx[i] * step[i];
      // last slab snaps to hi so the split covers the box exactly
      b[i] = (idx[i] == m - 1) ? hi_[i] : lo_[i] + (idx[i] + 1) * step[i];
    }
    out.emplace_back(a, b);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::string AxisBox::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int i = 0; i < lo_.size(); ++i) {
    if (i) os << " x ";
    os << "(" << lo_[i] << "," << hi_[i] << ")";
  }
  os << "]";
  return os.str();
}

bool box_less(const AxisBox& a, const AxisBox& b) {
  for (int i = 0; i < a.dim(); ++i)
    if (a.lo(i) != b.lo(i)) return a.lo(i) < b.lo(i);
  for (int i = 0; i < a.dim(); ++i)
    if (a.hi(i) != b.hi(i)) return a.hi(i) < b.hi(i);
  return false;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

static double point_box_distance(const Vec2& p, const AxisBox& box) {
  double dx = std::max({box.lo(0) - p.x(), 0.0, p.x() - box.hi(0)});
  double dy = std::max({box.lo(1) - p.y(), 0.0, p.y() - box.hi(1)});
  return std::hypot(dx, dy);
}

bool segment_meets_box(const AxisBox& box, const Vec2& a, const Vec2& b) {
  // Liang-Barsky clip against the closed box
  double t0 = 0.0, t1 = 1.0;
  Vec2 d = b - a;
  for (int i = 0; i < 2; ++i) {
    if (d[i] == 0.0) {
      if (a[i] < box.lo(i) || a[i] > box.hi(i)) return false;
      continue;
    }
    double ta = (box.lo(i) - a[i]) / d[i];
    double tb = (box.hi(i) - a[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

bool segment_meets_open_box(const AxisBox& box, const Vec2& a, const Vec2& b) {
  // strict version of the clip above: need t in [0,1] with lo < a + t d < hi
  double lo_t = -INFINITY, hi_t = INFINITY;
  Vec2 d = b - a;
  for (int i = 0; i < 2; ++i) {
    if (d[i] == 0.0) {
      if (!(a[i] > box.lo(i) && a[i] < box.hi(i))) return false;
      continue;
    }
    double ta = (box.lo(i) - a[i]) / d[i];
    double tb = (box.hi(i) - a[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    lo_t = std::max(lo_t, ta);
    hi_t = std::min(hi_t, tb);
  }
  return lo_t < hi_t && lo_t < 1.0 && hi_t > 0.0;
}

double box_segment_distance(const AxisBox& box, const Vec2& a, const Vec2& b) {
  if (segment_meets_box(box, a, b)) return 0.0;
  // disjoint convex sets: the minimum is attained at a vertex of one of them
  double best = std::min(point_box_distance(a, box), point_box_distance(b, box));
  for (int cx = 0; cx < 2; ++cx)
    for (int cy = 0; cy < 2; ++cy) {
      Vec2 c(cx ? box.hi(0) : box.lo(0), cy ? box.hi(1) : box.lo(1));
      best = std::min(best, point_segment_distance(c, a, b));
    }
  return best;
}

double box_point_max_distance(const AxisBox& box, const Vec2& p) {
  double dx = std::max(std::abs(p.x() - box.lo(0)), std::abs(p.x() - box.hi(0)));
  double dy = std::max(std::abs(p.y() - box.lo(1)), std::abs(p.y() - box.hi(1)));
  return std::hypot(dx, dy);
}

namespace {

double ring_signed_area(const std::vector<Vec2>& r) {
  double a = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vec2& p = r[i];
    const Vec2& q = r[(i + 1) % r.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool ring_contains(const std::vector<Vec2>& r, const Vec2& p) {
  bool odd = false;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vec2& a = r[i];
    const Vec2& b = r[(i + 1) % r.size()];
    if ((a.y() > p.y()) == (b.y() > p.y())) continue;
    double xi = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
    if (xi > p.x()) odd = !odd;
  }
  return odd;
}

// Sutherland-Hodgman against one half plane: keep sign*(x_axis - level) <= 0.
std::vector<Vec2> clip_half(const std::vector<Vec2>& in, int axis, double level, double sign) {
  std::vector<Vec2> out;
  if (in.empty()) return out;
  out.reserve(in.size() + 4);
  auto keep = [&](const Vec2& v) { return sign * (v[axis] - level) <= 0.0; };
  for (std::size_t i = 0; i < in.size(); ++i) {
    const Vec2& p = in[i];
    const Vec2& q = in[(i + 1) % in.size()];
    bool kp = keep(p), kq = keep(q);
    if (kp) out.push_back(p);
    if (kp != kq) {
      double t = (level - p[axis]) / (q[axis] - p[axis]);
      Vec2 x = p + t * (q - p);
      x[axis] = level;
      out.push_back(x);
    }
  }
  return out;
}

constexpr std::size_t kClipVertexLimit = 20000;

}  // namespace

Polygon::Polygon(std::vector<std::vector<Vec2>> rings) : rings_(std::move(rings)) {
  // orient outer rings counter-clockwise and holes clockwise
  for (std::size_t i = 0; i < rings_.size(); ++i) {
    if (rings_[i].size() < 3) throw DomainError("polygon ring needs at least 3 vertices");
    int depth = 0;
    for (std::size_t j = 0; j < rings_.size(); ++j)
      if (j != i && ring_contains(rings_[j], rings_[i][0])) ++depth;
    bool ccw = ring_signed_area(rings_[i]) > 0;
    if (ccw != (depth % 2 == 0)) std::reverse(rings_[i].begin(), rings_[i].end());
  }
  for (const auto& r : rings_) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec2& a = r[i];
      const Vec2& b = r[(i + 1) % r.size()];
      if (a == b) continue;
      seg_a_.push_back(a);
      seg_b_.push_back(b);
    }
  }
  if (seg_a_.empty()) throw DomainError("polygon has no edges");
  build_buckets();
}

void Polygon::build_buckets() {
  AxisBox bb = bounding_box();
  double w = bb.edge(0), h = bb.edge(1);
  double target = std::max(1.0, std::sqrt(4.0 * static_cast<double>(seg_a_.size())));
  gh_ = std::max(w, h) / target;
  gx0_ = bb.lo(0);
  gy0_ = bb.lo(1);
  gnx_ = std::max(1, static_cast<int>(std::ceil(w / gh_)));
  gny_ = std::max(1, static_cast<int>(std::ceil(h / gh_)));
  buckets_.assign(static_cast<std::size_t>(gnx_) * gny_, {});
  for (std::size_t s = 0; s < seg_a_.size(); ++s) {
    const Vec2 &a = seg_a_[s], &b = seg_b_[s];
    auto cx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - gx0_) / gh_)), 0, gnx_ - 1); };
    auto cy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - gy0_) / gh_)), 0, gny_ - 1); };
    int x0 = cx(std::min(a.x(), b.x())), x1 = cx(std::max(a.x(), b.x()));
    int y0 = cy(std::min(a.y(), b.y())), y1 = cy(std::max(a.y(), b.y()));
    for (int iy = y0; iy <= y1; ++iy)
      for (int ix = x0; ix <= x1; ++ix) {
        // skip cells the segment cannot reach (long diagonals)
        AxisBox cell(Vec2(gx0_ + ix * gh_, gy0_ + iy * gh_), Vec2(gx0_ + (ix + 1) * gh_, gy0_ + (iy + 1) * gh_));
        AxisBox fat(Vec2(cell.lo(0) - 1e-12 * gh_, cell.lo(1) - 1e-12 * gh_),
                    Vec2(cell.hi(0) + 1e-12 * gh_, cell.hi(1) + 1e-12 * gh_));
        if (x0 == x1 || y0 == y1 || segment_meets_box(fat, a, b))
          buckets_[static_cast<std::size_t>(iy) * gnx_ + ix].push_back(static_cast<int>(s));
      }
  }
}

template <class F>
void Polygon::visit_segments_near(const AxisBox& region, F&& f) const {
  int x0 = std::clamp(static_cast<int>(std::floor((region.lo(0) - gx0_) / gh_)), 0, gnx_ - 1);
  int x1 = std::clamp(static_cast<int>(std::floor((region.hi(0) - gx0_) / gh_)), 0, gnx_ - 1);
  int y0 = std::clamp(static_cast<int>(std::floor((region.lo(1) - gy0_) / gh_)), 0, gny_ - 1);
  int y1 = std::clamp(static_cast<int>(std::floor((region.hi(1) - gy0_) / gh_)), 0, gny_ - 1);
  // Expanding rings of buckets. After ring r every unvisited segment is at
  // least r*gh away from the region, so the callback can stop the search by
  // returning a current best distance.
  for (int r = 0;; ++r) {
    int ax = x0 - r, bx = x1 + r, ay = y0 - r, by = y1 + r;
    bool any = false;
    for (int iy = ay; iy <= by; ++iy) {
      if (iy < 0 || iy >= gny_) continue;
      bool edge_row = (iy == ay || iy == by);
      for (int ix = ax; ix <= bx; ++ix) {
        if (ix < 0 || ix >= gnx_) continue;
        if (!edge_row && ix != ax && ix != bx) continue;
        any = true;
        for (int s : buckets_[static_cast<std::size_t>(iy) * gnx_ + ix]) f(s);
      }
    }
    double reach = r * gh_;
    if (!any && ax < 0 && ay < 0 && bx >= gnx_ && by >= gny_) return;
    if (!f.keep_going(reach)) return;
  }
}

namespace {
template <class G>
struct MinVisitor {
  G dist;
  double best = std::numeric_limits<double>::infinity();
  void operator()(int s) { best = std::min(best, dist(s)); }
  bool keep_going(double reach) const { return best > reach; }
};
template <class G>
MinVisitor<G> make_min(G g) { return MinVisitor<G>{g}; }
}  // namespace

double Polygon::distance(const Vec2& p) const {
  AxisBox pt(Vec2(p.x(), p.y()), Vec2(std::nextafter(p.x(), INFINITY), std::nextafter(p.y(), INFINITY)));
  auto v = make_min([&](int s) { return point_segment_distance(p, seg_a_[s], seg_b_[s]); });
  visit_segments_near(pt, v);
  return v.best;
}

double Polygon::box_distance(const AxisBox& box) const {
  auto v = make_min([&](int s) { return box_segment_distance(box, seg_a_[s], seg_b_[s]); });
  visit_segments_near(box, v);
  return v.best;
}

bool Polygon::box_meets_boundary(const AxisBox& box) const { return box_distance(box) == 0.0; }

bool Polygon::open_box_meets_boundary(const AxisBox& box) const {
  struct Hit {
    const Polygon* poly;
    const AxisBox* box;
    bool hit = false;
    void operator()(int s) {
      if (!hit && segment_meets_open_box(*box, poly->seg_a_[s], poly->seg_b_[s])) hit = true;
    }
    bool keep_going(double) const { return false; }
  } v{this, &box};
  visit_segments_near(box, v);
  return v.hit;
}

Enclosure Polygon::clipped_area(const AxisBox& box) const {
  if (seg_a_.size() > kClipVertexLimit) return {0.0, box.volume()};
  double total = 0.0;
  for (const auto& r : rings_) {
    std::vector<Vec2> c = clip_half(r, 0, box.lo(0), -1.0);
    c = clip_half(c, 0, box.hi(0), 1.0);
    c = clip_half(c, 1, box.lo(1), -1.0);
    c = clip_half(c, 1, box.hi(1), 1.0);
    if (c.size() >= 3) total += ring_signed_area(c);
  }
  total = std::clamp(total, 0.0, box.volume());
  // rounding in the clip is a few ulps of the box area
  double slack = 64 * std::numeric_limits<double>::epsilon() * box.volume();
  return {std::max(0.0, total - slack), std::min(box.volume(), total + slack)};
}

bool Polygon::on_boundary(const Vec2& p) const { return distance(p) == 0.0; }

bool Polygon::inside(const Vec2& p) const {
  AxisBox bb = bounding_box();
  if (p.x() <= bb.lo(0) || p.x() >= bb.hi(0) || p.y() <= bb.lo(1) || p.y() >= bb.hi(1)) return false;
  if (on_boundary(p)) return false;
  int iy = std::clamp(static_cast<int>(std::floor((p.y() - gy0_) / gh_)), 0, gny_ - 1);
  int start = std::clamp(static_cast<int>(std::floor((p.x() - gx0_) / gh_)), 0, gnx_ - 1);
  std::vector<int> cand;
  for (int ix = start; ix < gnx_; ++ix) {
    const auto& bucket = buckets_[static_cast<std::size_t>(iy) * gnx_ + ix];
    cand.insert(cand.end(), bucket.begin(), bucket.end());
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  bool odd = false;
  for (int s : cand) {
    const Vec2 &a = seg_a_[s], &b = seg_b_[s];
    if ((a.y() > p.y()) == (b.y() > p.y())) continue;
    double xi = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
    if (xi > p.x()) odd = !odd;
  }
  return odd;
}

double Polygon::area() const {
  double s = 0.0;
  for (const auto& r : rings_) s += ring_signed_area(r);
  return std::abs(s);
}

double Polygon::perimeter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < seg_a_.size(); ++i) s += (seg_b_[i] - seg_a_[i]).norm();
  return s;
}

AxisBox Polygon::bounding_box() const {
  Vec2 lo = seg_a_[0], hi = seg_a_[0];
  for (const auto& p : seg_a_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return AxisBox(lo, hi);
}

double Polygon::diameter() const {
  auto v = vertices();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, (v[i] - v[j]).norm());
  return best;
}

std::vector<Vec2> Polygon::vertices() const {
  std::vector<Vec2> out;
  for (const auto& r : rings_) out.insert(out.end(), r.begin(), r.end());
  return out;
}

}  // namespace rw
