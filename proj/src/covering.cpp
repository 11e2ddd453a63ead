#include "roughweyl/covering.hpp"

#include "roughweyl/constants.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace rw {

const char* piece_kind_name(PieceKind k) {
  switch (k) {
    case PieceKind::P: return "P";
    case PieceKind::V: return "V";
    case PieceKind::M: return "M";
    case PieceKind::W: return "W";
  }
  return "?";
}

bool CoverReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* CoverReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<AxisBox> CoverReport::boxes() const {
  std::vector<AxisBox> out;
  out.reserve(pieces.size());
  for (const auto& p : pieces) out.push_back(p.box);
  return out;
}

namespace {

Check make_check(std::string id, double lhs, double rhs, std::string note = {}) {
  Check c;
  c.id = std::move(id);
  c.margin = rhs - lhs;
  c.pass = lhs <= rhs;
  c.note = std::move(note);
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Range-add / global min-max tree over elementary cells.
class SegTree {
 public:
  explicit SegTree(int n) : n_(n), mn_(4 * n, 0), mx_(4 * n, 0), lz_(4 * n, 0) {}
  void add(int l, int r, int v) {
    if (l < r) add(1, 0, n_, l, r, v);
  }
  int min() const { return mn_[1]; }
  int max() const { return mx_[1]; }
  int argmin() const {
    int node = 1, lo = 0, hi = n_;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      // siblings share every pending add above them
      if (mn_[2 * node] <= mn_[2 * node + 1]) {
        node = 2 * node;
        hi = mid;
      } else {
        node = 2 * node + 1;
        lo = mid;
      }
    }
    return lo;
  }

 private:
  int n_;
  std::vector<int> mn_, mx_, lz_;
  void add(int node, int lo, int hi, int l, int r, int v) {
    if (r <= lo || hi <= l) return;
    if (l <= lo && hi <= r) {
      mn_[node] += v;
      mx_[node] += v;
      lz_[node] += v;
      return;
    }
    int mid = (lo + hi) / 2;
    add(2 * node, lo, mid, l, r, v);
    add(2 * node + 1, mid, hi, l, r, v);
    mn_[node] = std::min(mn_[2 * node], mn_[2 * node + 1]) + lz_[node];
    mx_[node] = std::max(mx_[2 * node], mx_[2 * node + 1]) + lz_[node];
  }
};

std::vector<double> cut_points(const std::vector<const AxisBox*>& act, int axis, double lo, double hi) {
  std::vector<double> xs{lo, hi};
  for (const AxisBox* b : act) {
    if (b->lo(axis) > lo && b->lo(axis) < hi) xs.push_back(b->lo(axis));
    if (b->hi(axis) > lo && b->hi(axis) < hi) xs.push_back(b->hi(axis));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

int index_of(const std::vector<double>& xs, double v) {
  auto it = std::lower_bound(xs.begin(), xs.end(), v);
  return static_cast<int>(it - xs.begin());
}

struct OverlapAcc {
  int min = INT_MAX;
  int max = 0;
  Point witness;
};

void overlap_1d(const std::vector<const AxisBox*>& act, const AxisBox& region, int axis, Point& cur,
                OverlapAcc& acc) {
  auto xs = cut_points(act, axis, region.lo(axis), region.hi(axis));
  int m = static_cast<int>(xs.size()) - 1;
  std::vector<int> diff(m + 1, 0);
  for (const AxisBox* b : act) {
    int l = index_of(xs, std::max(b->lo(axis), region.lo(axis)));
    int r = index_of(xs, std::min(b->hi(axis), region.hi(axis)));
    diff[l] += 1;
    diff[r] -= 1;
  }
  int run = 0;
  for (int i = 0; i < m; ++i) {
    run += diff[i];
    if (run < acc.min) {
      acc.min = run;
      cur[axis] = 0.5 * (xs[i] + xs[i + 1]);
      acc.witness = cur;
    }
    acc.max = std::max(acc.max, run);
  }
}

void overlap_2d(const std::vector<const AxisBox*>& act, const AxisBox& region, int ax, Point& cur,
                OverlapAcc& acc) {
  const int ay = ax + 1;
  auto ys = cut_points(act, ay, region.lo(ay), region.hi(ay));
  auto xs = cut_points(act, ax, region.lo(ax), region.hi(ax));
  int my = static_cast<int>(ys.size()) - 1;
  struct Ev {
    int xi;
    int l, r, v;
  };
  std::vector<Ev> ev;
  ev.reserve(2 * act.size());
  for (const AxisBox* b : act) {
    int l = index_of(ys, std::max(b->lo(ay), region.lo(ay)));
    int r = index_of(ys, std::min(b->hi(ay), region.hi(ay)));
    ev.push_back({index_of(xs, std::max(b->lo(ax), region.lo(ax))), l, r, +1});
    ev.push_back({index_of(xs, std::min(b->hi(ax), region.hi(ax))), l, r, -1});
  }
  std::sort(ev.begin(), ev.end(), [](const Ev& a, const Ev& b) { return a.xi < b.xi; });
  SegTree tree(my);
  std::size_t e = 0;
  for (int j = 0; j + 1 < static_cast<int>(xs.size()); ++j) {
    while (e < ev.size() && ev[e].xi <= j) {
      tree.add(ev[e].l, ev[e].r, ev[e].v);
      ++e;
    }
    if (tree.min() < acc.min) {
      acc.min = tree.min();
      int c = tree.argmin();
      cur[ax] = 0.5 * (xs[j] + xs[j + 1]);
      cur[ay] = 0.5 * (ys[c] + ys[c + 1]);
      acc.witness = cur;
    }
    acc.max = std::max(acc.max, tree.max());
  }
}

void overlap_rec(const std::vector<const AxisBox*>& act, const AxisBox& region, int axis, Point& cur,
                 OverlapAcc& acc) {
  const int left = region.dim() - axis;
  if (left == 1) return overlap_1d(act, region, axis, cur, acc);
  if (left == 2) return overlap_2d(act, region, axis, cur, acc);
  auto xs = cut_points(act, axis, region.lo(axis), region.hi(axis));
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    std::vector<const AxisBox*> sub;
    for (const AxisBox* b : act)
      if (b->lo(axis) <= xs[j] && b->hi(axis) >= xs[j + 1]) sub.push_back(b);
    cur[axis] = 0.5 * (xs[j] + xs[j + 1]);
    overlap_rec(sub, region, axis + 1, cur, acc);
  }
}

}  // namespace

OverlapStats overlap_stats(const std::vector<AxisBox>& boxes, const AxisBox& region) {
  OverlapStats out;
  const int d = region.dim();
  if (region.volume() <= 0) return out;
  std::vector<const AxisBox*> act;
  for (const auto& b : boxes) {
    if (b.dim() != d) throw DomainError("overlap_stats: dimension mismatch");
    if (b.volume() > 0 && b.overlaps(region)) act.push_back(&b);
  }
  OverlapAcc acc;
  Point cur = region.centre();
  acc.witness = cur;
  overlap_rec(act, region, 0, cur, acc);
  out.min = acc.min == INT_MAX ? 0 : acc.min;
  out.max = acc.max;
  out.witness = acc.witness;
  return out;
}

int multiplicity(const std::vector<AxisBox>& boxes) {
  if (boxes.empty()) return 0;
  Point lo = boxes[0].lo(), hi = boxes[0].hi();
  for (const auto& b : boxes) {
    lo = lo.cwiseMin(b.lo());
    hi = hi.cwiseMax(b.hi());
  }
  return overlap_stats(boxes, AxisBox(lo, hi)).max;
}

// ---------------------------------------------------------------- Besicovitch

CoverReport besicovitch_cover(const std::vector<Point>& K, const std::vector<double>& rho) {
  if (K.empty()) throw PreconditionError("besicovitch_cover needs a nonempty point set");
  if (rho.size() != K.size()) throw PreconditionError("one radius per point is required");
  for (double r : rho)
    if (!(r > 0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
  const int n = static_cast<int>(K[0].size());
  std::vector<int> order(K.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rho[a] > rho[b]; });

  auto in_cube = [&](const Point& x, int c) {
    return ((x - K[c]).cwiseAbs().maxCoeff()) < 0.5 * rho[c];
  };
  std::vector<int> Y;
  for (int i : order) {
    bool covered = false;
    for (int s : Y)
      if (in_cube(K[i], s)) {
        covered = true;
        break;
      }
    if (!covered) Y.push_back(i);
  }

  CoverReport rep;
  for (int s : Y) {
    PartitionPiece p;
    p.kind = PieceKind::P;
    p.box = AxisBox::centred(K[s], rho[s]);
    p.scale = rho[s];
    p.mu = Enclosure::exact(p.box.volume());
    rep.pieces.push_back(p);
    rep.radii.push_back(rho[s]);
  }
  // disjoint subfamily, greedy in selection order
  for (std::size_t a = 0; a < rep.pieces.size(); ++a) {
    bool ok = true;
    for (int b : rep.disjoint_subfamily)
      if (rep.pieces[a].box.overlaps(rep.pieces[b].box)) {
        ok = false;
        break;
      }
    if (ok) rep.disjoint_subfamily.push_back(static_cast<int>(a));
  }
  rep.generated = static_cast<long long>(Y.size());

  long long uncovered = 0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    bool hit = false;
    for (int s : Y)
      if (in_cube(K[i], s)) {
        hit = true;
        break;
      }
    if (!hit) {
      ++uncovered;
      rep.coverage_witnesses.push_back(K[i]);
    }
  }
  rep.coverage_ok = uncovered == 0;
  rep.multiplicity = multiplicity(rep.boxes());
  const double Cn = std::ldexp(1.0, n), Chat = std::ldexp(1.0, 2 * n);
  rep.checks.push_back(make_check("cover", static_cast<double>(uncovered), 0.0, "points outside every cube"));
  rep.checks.push_back(make_check("multiplicity", rep.multiplicity, Cn));
  rep.checks.push_back(make_check("disjoint-subfamily", static_cast<double>(Y.size()),
                                  Chat * static_cast<double>(rep.disjoint_subfamily.size())));
  return rep;
}

CoverReport besicovitch_cover(const std::vector<Point>& K, const std::function<double(const Point&)>& rho) {
  std::vector<double> r;
  r.reserve(K.size());
  for (const auto& y : K) r.push_back(rho(y));
  return besicovitch_cover(K, r);
}

// ---------------------------------------------------------------- osc covers

namespace {

AxisBox clip_to(const AxisBox& base, const Point& y, double t) {
  Point lo = (y.array() - 0.5 * t).matrix().cwiseMax(base.lo());
  Point hi = (y.array() + 0.5 * t).matrix().cwiseMin(base.hi());
  return AxisBox(lo, hi);
}

// largest t (up to the bisection tolerance) with certified Osc <= eps on base ∩ Q_t[y]
double osc_radius(const BoundaryFunction& f, const Point& y, double eps) {
  const AxisBox& base = f.base();
  double hi = 2.0 * base.max_edge();
  if (f.osc(clip_to(base, y, hi)).hi <= eps) return hi;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    if (lo > 0 && hi - lo <= std::ldexp(hi, -20)) break;
    double mid = 0.5 * (lo + hi);
    if (f.osc(clip_to(base, y, mid)).hi <= eps) lo = mid;
    else hi = mid;
  }
  if (!(lo > 0)) throw DomainError("oscillation enclosure does not shrink around a sample point");
  return lo;
}

std::vector<AxisBox> besicovitch_osc_cubes(const BoundaryFunction& f, double eps, bool& covered) {
  const AxisBox& base = f.base();
  const int n = base.dim();
  std::vector<Point> K;
  const int g = 4;
  {
    std::vector<int> idx(n, 0);
    while (true) {
      Point y(n);
      for (int i = 0; i < n; ++i) y[i] = base.lo(i) + base.edge(i) * idx[i] / g;
      K.push_back(y);
      int i = n - 1;
      for (; i >= 0; --i) {
        if (++idx[i] <= g) break;
        idx[i] = 0;
      }
      if (i < 0) break;
    }
  }
  std::vector<double> rho;
  for (const auto& y : K) rho.push_back(osc_radius(f, y, eps));
  std::vector<AxisBox> rects;
  covered = false;
  for (int round = 0; round < 4000; ++round) {
    CoverReport sel = besicovitch_cover(K, rho);
    rects.clear();
    for (const auto& p : sel.pieces) rects.push_back(clip_to(base, p.box.centre(), p.scale));
    OverlapStats st = overlap_stats(rects, base);
    if (st.min >= 1) {
      covered = true;
      break;
    }
    K.push_back(st.witness);
    rho.push_back(osc_radius(f, st.witness, eps));
  }
  // each rectangle has side ratio <= 2: cover it by 2^n cubes of its short edge
  std::vector<AxisBox> cubes;
  for (const auto& r : rects) {
    double c = r.min_edge();
    for (int mask = 0; mask < (1 << n); ++mask) {
      Point lo(n);
      for (int i = 0; i < n; ++i) lo[i] = (mask >> i & 1) ? r.hi(i) - c : r.lo(i);
      cubes.push_back(AxisBox::cube(lo, c));
    }
  }
  std::sort(cubes.begin(), cubes.end(), box_less);
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  return cubes;
}

CoverReport cube_family_report(const BoundaryFunction& f, std::vector<AxisBox> cubes) {
  std::sort(cubes.begin(), cubes.end(), box_less);
  CoverReport rep;
  for (const auto& c : cubes) {
    PartitionPiece p;
    p.kind = PieceKind::P;
    p.box = c;
    p.local = c;
    p.scale = c.max_edge();
    p.mu = Enclosure::exact(c.volume());
    rep.pieces.push_back(p);
  }
  rep.generated = static_cast<long long>(cubes.size());
  OverlapStats st = overlap_stats(cubes, f.base());
  rep.multiplicity = st.max;
  rep.coverage_ok = st.min >= 1;
  if (!rep.coverage_ok) rep.coverage_witnesses.push_back(st.witness);
  return rep;
}

}  // namespace

CoverReport osc_cover(const BoundaryFunction& f, double eps) {
  if (!(eps > 0)) throw PreconditionError("osc_cover needs eps > 0");
  const AxisBox& base = f.base();
  const int n = base.dim();
  const ConstantsTable ct = constants(n + 1);
  std::vector<AxisBox> cubes;
  bool covered = true;
  if (f.osc(base).hi <= eps) {
    cubes.push_back(base);
  } else if (n == 1) {
    auto br = greedy_osc_breaks(f, base.lo(0), base.hi(0), eps);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) cubes.emplace_back(Point::Constant(1, br[i]), Point::Constant(1, br[i + 1]));
  } else {
    cubes = besicovitch_osc_cubes(f, eps, covered);
  }
  CoverReport rep = cube_family_report(f, std::move(cubes));
  rep.coverage_ok = rep.coverage_ok && covered;
  double worst = 0.0;
  for (const auto& p : rep.pieces) worst = std::max(worst, f.osc(p.box).hi);
  long long vup = v_count(f, base, eps, 8).upper;
  rep.small_piece_count = static_cast<long long>(rep.pieces.size());
  rep.checks.push_back(make_check("cover", rep.coverage_ok ? 0.0 : 1.0, 0.0, "closures cover the base"));
  rep.checks.push_back(make_check("multiplicity", rep.multiplicity, ct.C[2]));
  rep.checks.push_back(make_check("count", static_cast<double>(rep.pieces.size()), ct.C[3] * static_cast<double>(vup),
                                  "V upper " + std::to_string(vup)));
  rep.checks.push_back(make_check("oscillation", worst, eps));
  return rep;
}

CoverReport refine_partition(const BoundaryFunction& f, double delta, int m) {
  if (!(delta > 0)) throw PreconditionError("refine_partition needs delta > 0");
  if (m < 0) throw PreconditionError("refine_partition needs m >= 0");
  const double eps = std::ldexp(delta, m - 1);
  const int n = f.dim_base();
  const ConstantsTable ct = constants(n + 1);
  CoverReport first = osc_cover(f, eps);
  std::vector<AxisBox> cubes;
  for (const auto& p : first.pieces) {
    const AxisBox& c = p.box;
    if (c.max_edge() > delta) {
      int k = static_cast<int>(std::ceil(c.max_edge() / delta));
      for (auto& s : c.split(k)) cubes.push_back(s);
    } else {
      cubes.push_back(c);
    }
  }
  CoverReport rep = cube_family_report(f, std::move(cubes));
  rep.coverage_ok = rep.coverage_ok && first.coverage_ok;
  double worst_osc = 0.0, worst_edge = 0.0;
  const double small = std::pow(0.5 * delta, n);
  for (const auto& p : rep.pieces) {
    worst_osc = std::max(worst_osc, f.osc(p.box).hi);
    worst_edge = std::max(worst_edge, p.box.max_edge());
    if (p.box.volume() <= small) ++rep.small_piece_count;
  }
  long long vup = v_count(f, f.base(), eps, 8).upper;
  rep.checks.push_back(make_check("cover", rep.coverage_ok ? 0.0 : 1.0, 0.0, "closures cover the base"));
  rep.checks.push_back(make_check("edge", worst_edge, delta));
  rep.checks.push_back(make_check("multiplicity", rep.multiplicity, ct.C[2]));
  rep.checks.push_back(make_check("oscillation", worst_osc, eps));
  rep.checks.push_back(make_check("small-count", static_cast<double>(rep.small_piece_count),
                                  ct.C[3] * static_cast<double>(vup), "V upper " + std::to_string(vup)));
  return rep;
}

// ---------------------------------------------------------------- Whitney

CoverReport whitney(const CompositeDomain& omega, int i_min, int i_max, double residue_threshold) {
  if (i_min > i_max) throw PreconditionError("whitney needs i_min <= i_max");
  const int d = omega.dim();
  const double sd = std::sqrt(static_cast<double>(d));
  const AxisBox& bb = omega.bounding_box();
  double ext = bb.max_edge();
  int i0 = -static_cast<int>(std::ceil(std::log2(ext)));
  AxisBox root;
  for (;; --i0) {
    double E = std::ldexp(1.0, -i0);
    Point lo(d);
    for (int k = 0; k < d; ++k) lo[k] = std::floor(bb.lo(k) / E) * E;
    root = AxisBox::cube(lo, E);
    if (root.contains_box(bb)) break;
  }
  if (i0 > i_max) throw PreconditionError("whitney: i_max is coarser than the domain");

  CoverReport rep;
  struct Item {
    AxisBox box;
    int level;
  };
  std::vector<Item> stack{{root, i0}};
  long long bad = 0;
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    auto cls = omega.classify(it.box);
    if (cls == CompositeDomain::BoxClass::Outside) continue;
    const double s = std::ldexp(1.0, -it.level);
    if (cls == CompositeDomain::BoxClass::Inside && it.level >= i_min) {
      double dmin = omega.box_distance(it.box);
      double dmax = omega.box_max_distance(it.box);
      if (sd * s <= dmin && dmax <= 4 * sd * s) {
        PartitionPiece p;
        p.kind = PieceKind::W;
        p.box = it.box;
        p.scale = s;
        p.level = it.level;
        p.mu = Enclosure::exact(it.box.volume());
        rep.pieces.push_back(p);
        continue;
      }
    }
    if (it.level >= i_max) {
      rep.residue.push_back(it.box);
      rep.residue_measure += omega.clipped_area(it.box);
      continue;
    }
    for (auto& c : it.box.bisect()) stack.push_back({c, it.level + 1});
  }
  std::sort(rep.pieces.begin(), rep.pieces.end(),
            [](const PartitionPiece& a, const PartitionPiece& b) { return box_less(a.box, b.box); });
  std::sort(rep.residue.begin(), rep.residue.end(), box_less);
  rep.generated = static_cast<long long>(rep.pieces.size());
  for (const auto& p : rep.pieces) {
    double dmin = omega.box_distance(p.box), dmax = omega.box_max_distance(p.box);
    if (!(sd * p.scale <= dmin && dmax <= 4 * sd * p.scale)) ++bad;
  }
  rep.multiplicity = multiplicity(rep.boxes());
  double covered = rep.residue_measure;
  for (const auto& p : rep.pieces) covered += p.mu.hi;
  rep.checks.push_back(make_check("disjoint", rep.multiplicity, 1.0));
  rep.checks.push_back(make_check("distance-sandwich", static_cast<double>(bad), 0.0));
  rep.checks.push_back(make_check("measure", std::abs(covered - omega.area()), 1e-9 * std::max(1.0, omega.area()),
                                  "cubes plus residue against the domain measure"));
  rep.checks.push_back(make_check("residue", rep.residue_measure, residue_threshold));
  return rep;
}

// ---------------------------------------------------------------- graph partitions

namespace {

Point with_last(const Point& yp, double t) {
  Point y(yp.size() + 1);
  y.head(yp.size()) = yp;
  y[yp.size()] = t;
  return y;
}

AxisBox lift(const AxisBox& base, double lo, double hi) {
  return AxisBox(with_last(base.lo(), lo), with_last(base.hi(), hi));
}

struct PieceSink {
  const Chart& chart;
  int chart_index;
  const PieceFilter& keep;
  CoverReport& rep;

  void p_piece(const AxisBox& local, double scale, int level) {
    PartitionPiece p;
    p.kind = PieceKind::P;
    p.local = local;
    p.box = chart.map.box_to_global(local);
    p.chart = chart_index;
    p.scale = scale;
    p.level = level;
    p.mu = Enclosure::exact(local.volume());
    push(std::move(p));
  }
  void v_piece(const AxisBox& base, double floor, double scale) {
    const BoundaryFunction& f = chart.f;
    PartitionPiece p;
    p.kind = PieceKind::V;
    p.base = base;
    p.floor = floor;
    Enclosure sup = f.sup(base), inf = f.inf(base);
    p.local = lift(base, floor, sup.hi);
    p.box = chart.map.box_to_global(p.local);
    p.chart = chart_index;
    p.scale = scale;
    if (base.dim() == 1 && f.exact()) {
      double v = f.integral1(base.lo(0), base.hi(0)) - floor * base.edge(0);
      p.mu = Enclosure::exact(v);
    } else {
      p.mu = Enclosure((inf.lo - floor) * base.volume(), (sup.hi - floor) * base.volume(), !f.exact());
    }
    push(std::move(p));
  }
  void push(PartitionPiece p) {
    ++rep.generated;
    if (!keep || keep(p)) rep.pieces.push_back(std::move(p));
  }
};

bool local_contains(const Chart& chart, const PartitionPiece& p, const Point& y) {
  if (p.kind != PieceKind::V) return p.local.closure_contains(y);
  const int n = static_cast<int>(y.size()) - 1;
  Point yp = y.head(n);
  if (!p.base.closure_contains(yp)) return false;
  return y[n] >= p.floor && y[n] <= chart.f(yp);
}

// Uniform bucket index over boxes for closure lookups.
class BoxIndex {
 public:
  BoxIndex(const std::vector<AxisBox>& boxes, const AxisBox& region, double h) : region_(region) {
    d_ = region.dim();
    n_.resize(d_);
    h_ = h;
    std::size_t total = 1;
    for (int i = 0; i < d_; ++i) {
      n_[i] = std::clamp(static_cast<int>(std::ceil(region.edge(i) / h)), 1, 4096);
      total *= static_cast<std::size_t>(n_[i]);
    }
    while (total > (std::size_t{1} << 22)) {
      h_ *= 2;
      total = 1;
      for (int i = 0; i < d_; ++i) {
        n_[i] = std::clamp(static_cast<int>(std::ceil(region.edge(i) / h_)), 1, 4096);
        total *= static_cast<std::size_t>(n_[i]);
      }
    }
    cells_.resize(total);
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      std::vector<int> a(d_), b(d_);
      for (int i = 0; i < d_; ++i) {
        a[i] = cell(boxes[k].lo(i), i);
        b[i] = cell(boxes[k].hi(i), i);
      }
      std::vector<int> idx = a;
      while (true) {
        cells_[flat(idx)].push_back(static_cast<int>(k));
        int i = d_ - 1;
        for (; i >= 0; --i) {
          if (++idx[i] <= b[i]) break;
          idx[i] = a[i];
        }
        if (i < 0) break;
      }
    }
  }
  const std::vector<int>& near(const Point& x) const {
    std::vector<int> idx(d_);
    for (int i = 0; i < d_; ++i) idx[i] = cell(x[i], i);
    return cells_[flat(idx)];
  }

 private:
  AxisBox region_;
  int d_ = 0;
  double h_ = 1;
  std::vector<int> n_;
  std::vector<std::vector<int>> cells_;
  int cell(double v, int i) const {
    int c = static_cast<int>(std::floor((v - region_.lo(i)) / h_));
    return std::clamp(c, 0, n_[i] - 1);
  }
  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int i = 0; i < d_; ++i) f = f * static_cast<std::size_t>(n_[i]) + static_cast<std::size_t>(idx[i]);
    return f;
  }
};

// Points of the closed cells on the boundary of a bucket may be registered in
// a neighbour only, so lookups probe the point and its nudged copies.
template <class Pred>
bool indexed_hit(const BoxIndex& index, const Point& x, double nudge, Pred&& pred) {
  const int d = static_cast<int>(x.size());
  for (int mask = 0; mask < (1 << d); ++mask) {
    for (int sgn : {1, -1}) {
      Point y = x;
      for (int i = 0; i < d; ++i)
        if (mask >> i & 1) y[i] += sgn * nudge;
      for (int k : index.near(y))
        if (pred(k)) return true;
      if (mask == 0) break;
    }
  }
  return false;
}

void graph_partition_2d(const Chart& chart, double delta, PieceSink& sink) {
  const BoundaryFunction& f = chart.f;
  const double lo = f.base().lo(0), hi = f.base().hi(0), a = hi - lo;
  const double b = chart.b;
  CoverReport ref = refine_partition(f, delta, 0);
  struct Seg {
    double x0, x1, level;
  };
  std::vector<Seg> segs;
  for (const auto& p : ref.pieces) {
    double x0 = p.box.lo(0), x1 = p.box.hi(0);
    double c = f.inf1(x0, x1).lo;
    segs.push_back({x0, x1, c - delta});
    sink.v_piece(p.box, c - delta, delta);
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& u, const Seg& v) { return u.x0 < v.x0; });
  const int ncol = a <= delta ? 1 : static_cast<int>(std::ceil(a / delta));
  for (int l = 0; l < ncol; ++l) {
    const double c0 = lo + a * l / ncol;
    const double c1 = (l == ncol - 1) ? hi : lo + a * (l + 1) / ncol;
    std::vector<Seg> in;
    for (const auto& s : segs)
      if (s.x0 < c1 && s.x1 > c0) in.push_back({std::max(s.x0, c0), std::min(s.x1, c1), s.level});
    if (in.empty()) continue;
    std::vector<double> levels;
    for (const auto& s : in) levels.push_back(s.level);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    // staircase between the lowest floor and the step floor
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const double y0 = levels[i], y1 = levels[i + 1];
      std::size_t k = 0;
      while (k < in.size()) {
        if (in[k].level < y1) {
          ++k;
          continue;
        }
        double xa = in[k].x0, xb = in[k].x1;
        while (k + 1 < in.size() && in[k + 1].level >= y1) xb = in[++k].x1;
        ++k;
        int parts = std::max(1, static_cast<int>(std::ceil((y1 - y0) / delta)));
        for (int q = 0; q < parts; ++q) {
          double ya = y0 + (y1 - y0) * q / parts;
          double yb = q == parts - 1 ? y1 : y0 + (y1 - y0) * (q + 1) / parts;
          sink.p_piece(AxisBox(Vec2(xa, ya), Vec2(xb, yb)), delta, 0);
        }
      }
    }
    // full-width rows from the lowest floor down to the chart floor
    const double top = levels.front();
    if (top > b) {
      long long rows = static_cast<long long>(std::ceil((top - b) / delta - 1e-9));
      rows = std::max<long long>(rows, 1);
      for (long long j = 0; j < rows; ++j) {
        double yt = top - static_cast<double>(j) * delta;
        double yb = (j == rows - 1) ? b : top - static_cast<double>(j + 1) * delta;
        sink.p_piece(AxisBox(Vec2(c0, yb), Vec2(c1, yt)), delta, 1);
      }
    }
  }
}

void graph_partition_nd(const Chart& chart, double delta, PieceSink& sink, int& m_delta) {
  const BoundaryFunction& f = chart.f;
  const AxisBox& base = f.base();
  const int n = base.dim();
  const int d = n + 1;
  const double b = chart.b;
  const double osc = f.osc(base).hi;
  m_delta = 0;
  while (std::ldexp(delta, m_delta - 1) < osc) ++m_delta;
  CoverReport k0 = refine_partition(f, delta, 0);
  for (const auto& p : k0.pieces) sink.v_piece(p.box, f.inf(p.box).lo - delta, delta);
  for (int m = 0; m <= m_delta; ++m) {
    CoverReport km = m == 0 ? k0 : refine_partition(f, delta, m);
    for (const auto& p : km.pieces) {
      double c = f.inf(p.box).lo;
      long long n0 = (1LL << m) + 1, n1 = (1LL << m) + (1LL << (m + 1));
      for (long long k = n0; k <= n1; ++k) {
        double top = c - static_cast<double>(k) * delta + delta;
        double bot = c - static_cast<double>(k) * delta;
        if (top <= b) break;
        sink.p_piece(lift(p.box, std::max(bot, b), top), delta, m);
      }
    }
  }
  // filler boxes of diameter <= delta fully inside the subgraph
  const double sd = std::sqrt(static_cast<double>(d));
  std::vector<int> k(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    k[i] = std::max(1, static_cast<int>(std::ceil(base.edge(i) * sd / delta)));
    total *= static_cast<std::size_t>(k[i]);
  }
  const double cv = delta / sd;
  const double top_all = f.sup(base).hi;
  std::vector<int> idx(n, 0);
  for (std::size_t t = 0; t < total; ++t) {
    Point lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = base.lo(i) + base.edge(i) * idx[i] / k[i];
      hi[i] = idx[i] == k[i] - 1 ? base.hi(i) : base.lo(i) + base.edge(i) * (idx[i] + 1) / k[i];
    }
    AxisBox cell(lo, hi);
    const double cap = f.inf(cell).lo;
    for (long long j = 0;; ++j) {
      double y0 = b + static_cast<double>(j) * cv, y1 = b + static_cast<double>(j + 1) * cv;
      if (y1 > cap || y0 >= top_all) break;
      sink.p_piece(lift(cell, y0, y1), delta, -1);
    }
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < k[i]) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

CoverReport graph_partition(const Chart& chart, double delta, const PieceFilter& keep, int chart_index) {
  const BoundaryFunction& f = chart.f;
  const AxisBox& base = f.base();
  const int n = base.dim();
  const int d = n + 1;
  const double sd = std::sqrt(static_cast<double>(d));
  if (!(delta > 0)) throw PreconditionError("graph_partition needs delta > 0");
  if (delta > sd * base.min_edge())
    throw PreconditionError("graph_partition: delta <= sqrt(d) * a violated (delta = " + fmt(delta) + ")");
  const double inf_lo = f.inf(base).lo;
  if (chart.b > inf_lo - 2 * delta)
    throw PreconditionError("graph_partition: b <= inf f - 2 delta violated (b = " + fmt(chart.b) +
                            ", inf f - 2 delta = " + fmt(inf_lo - 2 * delta) + ")");
  const ConstantsTable ct = constants(d);
  CoverReport rep;
  PieceSink sink{chart, chart_index, keep, rep};
  int m_delta = 0;
  if (d == 2) graph_partition_2d(chart, delta, sink);
  else graph_partition_nd(chart, delta, sink, m_delta);

  std::sort(rep.pieces.begin(), rep.pieces.end(), [](const PartitionPiece& u, const PartitionPiece& v) {
    if (u.kind != v.kind) return u.kind < v.kind;
    return box_less(u.local, v.local);
  });
  if (keep) return rep;

  // membership in the piece classes
  const double tol = 1e-12 * std::max(1.0, delta);
  long long bad_p = 0, bad_v = 0, outside = 0;
  std::vector<AxisBox> pb, vb, all;
  for (const auto& p : rep.pieces) {
    all.push_back(p.local);
    if (p.kind == PieceKind::P) {
      pb.push_back(p.local);
      if (p.local.max_edge() > delta + tol) ++bad_p;
      AxisBox pbase(p.local.lo().head(n), p.local.hi().head(n));
      if (p.local.hi(n) > f.inf(pbase).lo + tol || p.local.lo(n) < chart.b - tol) ++outside;
    } else {
      vb.push_back(p.local);
      bool ok = p.base.max_edge() <= delta + tol && f.osc(p.base).hi <= 0.5 * delta + tol &&
                std::abs(f.inf(p.base).lo - delta - p.floor) <= tol && p.floor >= chart.b - tol;
      if (!ok) ++bad_v;
    }
  }
  rep.checks.push_back(make_check("P-class", static_cast<double>(bad_p), 0.0, "max edge <= delta"));
  rep.checks.push_back(make_check("V-class", static_cast<double>(bad_v), 0.0, "edge, floor depth and oscillation"));
  rep.checks.push_back(make_check("inside", static_cast<double>(outside), 0.0, "P pieces inside the subgraph"));

  const int mult_all = multiplicity(all);
  rep.multiplicity = mult_all;
  if (d == 2) {
    rep.checks.push_back(make_check("multiplicity", mult_all, 2.0));
  } else {
    rep.checks.push_back(make_check("multiplicity-P", multiplicity(pb), 3 * ct.C[2] + 1));
    rep.checks.push_back(make_check("multiplicity-V", multiplicity(vb), ct.C[2]));
  }

  // coverage of the subgraph by seeded probes
  {
    AxisBox region = lift(base, chart.b, f.sup(base).hi);
    BoxIndex index(all, region, delta);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    long long miss = 0, got = 0;
    for (int tries = 0; got < 10000 && tries < 400000; ++tries) {
      Point y(d);
      for (int i = 0; i < d; ++i) y[i] = region.lo(i) + region.edge(i) * U(rng);
      if (!(y[n] < f(y.head(n)))) continue;
      ++got;
      bool hit = indexed_hit(index, y, 1e-12, [&](int k) { return local_contains(chart, rep.pieces[k], y); });
      if (!hit) {
        ++miss;
        if (rep.coverage_witnesses.size() < 8) rep.coverage_witnesses.push_back(y);
      }
    }
    rep.coverage_ok = miss == 0;
    rep.checks.push_back(make_check("coverage-probe", static_cast<double>(miss), 0.0,
                                    std::to_string(got) + " probes in the subgraph"));
  }

  // small-piece budgets
  const double a = base.max_edge();
  long long small_v = 0, small_p = 0;
  if (d == 2) {
    for (const auto& p : rep.pieces) {
      if (p.kind == PieceKind::V && p.mu.hi <= 0.5 * delta * delta) ++small_v;
      if (p.kind == PieceKind::P && p.mu.hi <= delta * delta / 8) ++small_p;
    }
    long long vh = v_count(f, base, 0.5 * delta, 8).upper;
    rep.checks.push_back(make_check("small-V", static_cast<double>(small_v), static_cast<double>(vh + 1),
                                    "budget V_{delta/2} upper + 1"));
    rep.checks.push_back(make_check("small-P", static_cast<double>(small_p), 6.0 * static_cast<double>(vh) + 12 * a / delta,
                                    "budget 6 V_{delta/2} + 12 a / delta"));
  } else {
    const double vsmall = std::ldexp(std::pow(delta, d), 1 - d);
    const double psmall = std::pow(delta / (2 * sd), d);
    for (const auto& p : rep.pieces) {
      if (p.kind == PieceKind::V && p.mu.hi <= vsmall) ++small_v;
      if (p.kind == PieceKind::P && p.mu.hi <= psmall) ++small_p;
    }
    long long vh = v_count(f, base, 0.5 * delta, 8).upper;
    double pbudget = 0.0;
    for (int m = 0; m <= m_delta; ++m)
      pbudget += std::ldexp(1.0, m) * static_cast<double>(v_count(f, base, std::ldexp(delta, m - 1), 8).upper);
    rep.checks.push_back(make_check("small-V", static_cast<double>(small_v), ct.C[3] * static_cast<double>(vh)));
    rep.checks.push_back(make_check("small-P", static_cast<double>(small_p), ct.C[3] * pbudget));
  }
  rep.small_piece_count = small_v + small_p;
  return rep;
}

// ---------------------------------------------------------------- M cover

namespace {

Enclosure trimmed_measure(const CompositeDomain& omega, const AxisBox& cell) {
  if (omega.is_polygon()) return omega.polygon().clipped_area(cell);
  return Enclosure::exact(omega.clipped_area(cell));
}

// Probe checks for the inclusions  layer(d0) ⊂ ∪ closures ⊂ layer(d1).
void sandwich_probes(const CompositeDomain& omega, CoverReport& rep, double d0, double d1, int probes,
                     std::uint64_t seed, double h) {
  const AxisBox& bb = omega.bounding_box();
  const int d = omega.dim();
  AxisBox region((bb.lo().array() - h).matrix(), (bb.hi().array() + h).matrix());
  auto boxes = rep.boxes();
  BoxIndex index(boxes, region, h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  long long miss = 0, got = 0;
  for (long long tries = 0; got < probes && tries < 400LL * probes; ++tries) {
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = bb.lo(i) + bb.edge(i) * U(rng);
    if (!omega.inside(x) || !(omega.distance(x) < d0)) continue;
    ++got;
    bool hit = indexed_hit(index, x, 1e-12,
                           [&](int k) { return piece_closure_contains(omega, rep.pieces[k], x); });
    if (!hit) {
      ++miss;
      if (rep.coverage_witnesses.size() < 8) rep.coverage_witnesses.push_back(x);
    }
  }
  rep.coverage_ok = rep.coverage_ok && miss == 0;
  rep.checks.push_back(make_check("inner-layer-covered", static_cast<double>(miss), 0.0,
                                  std::to_string(got) + " probes"));
  long long far = 0;
  got = 0;
  if (!rep.pieces.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, rep.pieces.size() - 1);
    for (long long tries = 0; got < probes && tries < 100LL * probes; ++tries) {
      const auto& p = rep.pieces[pick(rng)];
      Point x(d);
      for (int i = 0; i < d; ++i) x[i] = p.box.lo(i) + p.box.edge(i) * U(rng);
      if (!omega.inside(x) || !piece_closure_contains(omega, p, x)) continue;
      ++got;
      if (omega.distance(x) > d1) ++far;
    }
  }
  rep.checks.push_back(make_check("outer-layer-contains", static_cast<double>(far), 0.0,
                                  std::to_string(got) + " probes"));
}

}  // namespace

CoverReport m_cover(const CompositeDomain& omega, double delta) {
  if (!(delta > 0)) throw PreconditionError("m_cover needs delta > 0");
  const int d = omega.dim();
  const double sd = std::sqrt(static_cast<double>(d));
  const double d0 = delta / sd, d1 = sd * delta + delta / sd;
  const AxisBox& bb = omega.bounding_box();
  Point lo(d);
  for (int i = 0; i < d; ++i) lo[i] = std::floor(bb.lo(i) / delta) * delta;
  int k = 0;
  while (!AxisBox::cube(lo, std::ldexp(delta, k)).contains_box(bb)) ++k;
  CoverReport rep;
  struct Item {
    AxisBox box;
    int k;
  };
  std::vector<Item> stack{{AxisBox::cube(lo, std::ldexp(delta, k)), k}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    auto cls = omega.classify(it.box);
    if (cls == CompositeDomain::BoxClass::Outside) continue;
    double dmin = cls == CompositeDomain::BoxClass::Mixed ? 0.0 : omega.box_distance(it.box);
    if (!(dmin < d0)) continue;
    if (it.k > 0) {
      for (auto& c : it.box.bisect()) stack.push_back({c, it.k - 1});
      continue;
    }
    PartitionPiece p;
    p.kind = PieceKind::M;
    p.box = it.box;
    p.local = it.box;
    p.scale = delta;
    p.mu = trimmed_measure(omega, it.box);
    rep.pieces.push_back(p);
  }
  std::sort(rep.pieces.begin(), rep.pieces.end(),
            [](const PartitionPiece& a, const PartitionPiece& b) { return box_less(a.box, b.box); });
  rep.generated = static_cast<long long>(rep.pieces.size());
  rep.multiplicity = multiplicity(rep.boxes());
  rep.checks.push_back(make_check("multiplicity", rep.multiplicity, 1.0));
  double worst = 0.0;
  for (const auto& p : rep.pieces) worst = std::max(worst, p.box.max_edge());
  rep.checks.push_back(make_check("in-cube", worst, delta));
  sandwich_probes(omega, rep, d0, d1, 4000, 7, delta);
  return rep;
}

// ---------------------------------------------------------------- domain partition

bool piece_closure_contains(const CompositeDomain& omega, const PartitionPiece& p, const Point& x) {
  if (p.kind != PieceKind::V || p.chart < 0) return p.box.closure_contains(x);
  if (!p.box.closure_contains(x)) return false;
  const Chart& c = omega.charts()[static_cast<std::size_t>(p.chart)];
  return local_contains(c, p, c.map.to_local(x));
}

double piece_max_distance(const CompositeDomain& omega, const PartitionPiece& p) {
  double bound = omega.box_max_distance(p.box);
  if (p.kind != PieceKind::V || p.chart < 0) return bound;
  const Chart& c = omega.charts()[static_cast<std::size_t>(p.chart)];
  const BoundaryFunction& f = c.f;
  if (p.base.dim() != 1 || f.kind() != FunctionKind::Polyline) return bound;
  // every point of V sits below a graph point; the graph is a polyline
  const double x0 = p.base.lo(0), x1 = p.base.hi(0);
  std::vector<double> xs{x0};
  for (double v : f.xs())
    if (v > x0 && v < x1) xs.push_back(v);
  xs.push_back(x1);
  auto global = [&](double x) { return c.map.to_global(Vec2(x, f.eval1(x))); };
  double graph = 0.0;
  Point ga = global(xs[0]);
  double da = omega.distance(ga);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    Point gb = global(xs[i]);
    double db = omega.distance(gb);
    graph = std::max(graph, 0.5 * (da + db + (gb - ga).norm()));
    ga = gb;
    da = db;
  }
  double height = f.sup(p.base).hi - p.floor;
  return std::min(bound, graph + height);
}

CoverReport domain_partition(const CompositeDomain& omega, double delta, const PartitionOptions& opt) {
  if (!(delta > 0)) throw PreconditionError("domain_partition needs delta > 0");
  if (delta > omega.delta_omega())
    throw PreconditionError("domain_partition: delta <= delta_Omega violated (delta = " + fmt(delta) +
                            ", delta_Omega = " + fmt(omega.delta_omega()) + ")");
  const int d = omega.dim();
  const double sd = std::sqrt(static_cast<double>(d));
  const double d0 = delta / sd, d1 = sd * delta + delta / sd;
  const ConstantsTable ct = constants(d);
  const double n_omega = omega.n_charts();

  CoverReport rep;
  PieceFilter near = [&](const PartitionPiece& p) { return omega.box_distance(p.box) <= d0; };
  for (int l = 0; l < omega.n_charts(); ++l) {
    CoverReport part = graph_partition(omega.charts()[static_cast<std::size_t>(l)], delta, near, l);
    rep.generated += part.generated;
    for (auto& p : part.pieces) rep.pieces.push_back(std::move(p));
  }
  std::vector<AxisBox> pb, vb, all;
  long long nv = 0, np = 0;
  for (const auto& p : rep.pieces) {
    all.push_back(p.box);
    if (p.kind == PieceKind::V) {
      vb.push_back(p.box);
      ++nv;
    } else {
      pb.push_back(p.box);
      ++np;
    }
  }
  rep.multiplicity = multiplicity(all);
  if (d == 2) {
    rep.checks.push_back(make_check("multiplicity", rep.multiplicity, 2 * n_omega));
  } else {
    rep.checks.push_back(make_check("multiplicity-P", multiplicity(pb), n_omega * (3 * ct.C[2] + 1)));
    rep.checks.push_back(make_check("multiplicity-V", multiplicity(vb), n_omega * ct.C[2]));
  }
  sandwich_probes(omega, rep, d0, d1, opt.probes, opt.seed, delta);

  if (opt.tau) {
    const TauFunction& tau = *opt.tau;
    const double mu1 = boundary_layer_measure(omega, d1, delta / 4).hi;
    const double D = omega.diameter();
    if (d == 2) {
      double kb = opt.c_tau * tau(2 / delta) + 2 * n_omega * mu1 / (delta * delta);
      double jb = 6 * opt.c_tau * tau(2 / delta) + 12 * D / delta + 16 * n_omega * mu1 / (delta * delta);
      rep.checks.push_back(make_check("count-V", static_cast<double>(nv), kb));
      rep.checks.push_back(make_check("count-P", static_cast<double>(np), jb));
    } else {
      double dd = std::pow(delta, -d);
      double kb = ct.C[3] * opt.c_tau * tau(2 / delta) + n_omega * ct.C[2] * std::ldexp(1.0, d - 1) * dd * mu1;
      double jb = 4 * ct.C[3] * opt.c_tau / delta * tau.integral_t2(1 / (2 * D), 4 / delta) +
                  n_omega * (3 * ct.C[2] + 1) * std::pow(2 * sd, d) * dd * mu1;
      rep.checks.push_back(make_check("count-V", static_cast<double>(nv), kb));
      rep.checks.push_back(make_check("count-P", static_cast<double>(np), jb));
    }
  }
  std::sort(rep.pieces.begin(), rep.pieces.end(), [](const PartitionPiece& u, const PartitionPiece& v) {
    if (u.kind != v.kind) return u.kind < v.kind;
    return box_less(u.box, v.box);
  });
  return rep;
}

// ---------------------------------------------------------------- dyadic sums

DyadicSum dyadic_sum_bound(const std::function<double(double)>& h, double a, double b) {
  if (!(a > 0) || !(a <= b)) throw PreconditionError("dyadic_sum_bound needs 0 < a <= b");
  const int grid = 256;
  double prev = -INFINITY;
  for (int i = 0; i <= grid; ++i) {
    double t = a * std::pow(2 * b / a, static_cast<double>(i) / grid);
    double v = t * h(t);
    if (v < prev - 1e-12 * std::abs(prev)) throw PreconditionError("t h(t) is not nondecreasing on the probe grid");
    prev = v;
  }
  DyadicSum out;
  for (int i = static_cast<int>(std::ceil(std::log2(a))) - 1; std::ldexp(1.0, i) <= b; ++i) {
    double t = std::ldexp(1.0, i);
    if (t >= a) out.lhs += h(t);
  }
  // in the log variable the integrand is h(e^u)
  auto g = [&](double u) { return h(std::exp(u)); };
  double err = 0.0;
  out.rhs = 2 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, std::log(a), std::log(2 * b), 15,
                                                                               1e-12, &err);
  return out;
}

}  // namespace rw
