#include "roughweyl/bracket.hpp"

#include "roughweyl/constants.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rw {

double bracket_delta(const CompositeDomain& omega, double lambda) {
  if (!(lambda > 0)) throw PreconditionError("bracket needs lambda > 0");
  const ConstantsTable ct = constants(omega.dim());
  double cap = std::min({omega.delta_omega(), ct.C[7] / (std::sqrt(omega.n_charts()) * lambda), 1.0 / lambda});
  return std::ldexp(1.0, static_cast<int>(std::floor(std::log2(cap))));
}

namespace {

class Tally {
 public:
  void add(const std::string& piece, long long count, const std::string& tag) {
    auto& e = rows_[{piece, tag}];
    e.piece = piece;
    e.tag = tag;
    e.pieces += 1;
    e.contribution += count;
    total_ += count;
  }
  long long total() const { return total_; }
  std::vector<LedgerEntry> entries() const {
    std::vector<LedgerEntry> out;
    for (const auto& [k, v] : rows_) out.push_back(v);
    return out;
  }

 private:
  std::map<std::pair<std::string, std::string>, LedgerEntry> rows_;
  long long total_ = 0;
};

Check check(std::string id, double lhs, double rhs, std::string note = {}) {
  Check c;
  c.id = std::move(id);
  c.margin = rhs - lhs;
  c.pass = lhs <= rhs;
  c.note = std::move(note);
  return c;
}

}  // namespace

BracketResult bracket(const CompositeDomain& omega, double lambda, const BracketOptions& opt) {
  if (!(lambda > 0)) throw PreconditionError("bracket needs lambda > 0");
  const int d = omega.dim();
  const double sd = std::sqrt(static_cast<double>(d));
  BracketResult res;
  res.delta = opt.delta > 0 ? opt.delta : bracket_delta(omega, lambda);
  const double delta = res.delta;
  res.delta0 = delta / sd;
  res.delta1 = sd * delta + delta / sd;
  res.weyl_term = weyl_constant(d) * omega.area() * std::pow(lambda, d);
  res.dirichlet.lambda = res.neumann.lambda = lambda;

  // Whitney scales: interior cubes are I+, a middle band I0, the rest is
  // swallowed by the boundary families.
  res.i_max = static_cast<int>(std::ceil(std::log2(4 * sd / res.delta0)));
  res.i_min = -64;
  CoverReport wh = whitney(omega, res.i_min, res.i_max);
  std::vector<const PartitionPiece*> plus, zero;
  Tally lower;
  for (const auto& w : wh.pieces) {
    LatticeCount n = lattice_count(w.box, lambda, Bc::Dirichlet);
    lower.add("whitney", n.lo, "exact-lattice");
    const double s = sd * w.scale;
    if (s > res.delta1) plus.push_back(&w);
    else if (s > res.delta0 / 4) zero.push_back(&w);
  }
  std::vector<AxisBox> extra;  // interior residue boxes too far from the boundary for the layer families
  long long mixed_far = 0;
  for (const auto& r : wh.residue) {
    auto cls = omega.classify(r);
    double dmax = omega.box_max_distance(r);
    if (cls == CompositeDomain::BoxClass::Inside) {
      lower.add("whitney-residue", lattice_count(r, lambda, Bc::Dirichlet).lo, "exact-lattice");
      if (dmax > res.delta0) extra.push_back(r);
    } else if (dmax > res.delta0) {
      ++mixed_far;
    }
  }
  res.checks.push_back(check("residue-in-layer", static_cast<double>(mixed_far), 0.0,
                             "boundary residue boxes inside the delta0 layer"));
  if (mixed_far > 0)
    for (CountBound* cb : {&res.dirichlet, &res.neumann}) {
      cb->certified = false;
      cb->refusals.push_back(std::to_string(mixed_far) + " boundary residue boxes outside the layer");
    }
  res.dirichlet.lower = res.neumann.lower = lower.total();
  res.dirichlet.lower_ledger = res.neumann.lower_ledger = lower.entries();

  Tally inner;
  for (const auto* w : plus) inner.add("whitney-interior", lattice_count(w->box, lambda, Bc::Neumann).hi, "exact-lattice");

  // ---- Dirichlet: middle cubes, far residue and trimmed cubes at the rescaled lambda
  {
    CountBound& cb = res.dirichlet;
    CoverReport mc = m_cover(omega, delta);
    for (const auto& c : mc.checks)
      if (!c.pass) {
        cb.certified = false;
        cb.refusals.push_back("trimmed-cube cover: " + c.id);
      }
    std::vector<AxisBox> sboxes;
    for (const auto* w : zero) sboxes.push_back(w->box);
    for (const auto& r : extra) sboxes.push_back(r);
    for (const auto& m : mc.pieces) sboxes.push_back(m.box);
    res.kappa_dirichlet = std::max(1, multiplicity(sboxes));
    const double lam = std::sqrt(static_cast<double>(res.kappa_dirichlet)) * lambda;
    Tally up = inner;
    const std::string scale_tag = res.kappa_dirichlet > 1 ? "overlap-rescaling" : "exact-lattice";
    // middle cubes are Whitney cubes, disjoint from the interior family by construction
    for (const auto* w : zero) up.add("whitney-middle", lattice_count(w->box, lam, Bc::Neumann).hi, scale_tag);
    for (const auto& r : extra) up.add("residue-interior", lattice_count(r, lam, Bc::Neumann).hi, scale_tag);
    long long refused = 0, reach = 0;
    for (const auto& m : mc.pieces) {
      if (piece_max_distance(omega, m) > res.delta1) ++reach;
      if (omega.classify(m.box) == CompositeDomain::BoxClass::Inside) {
        up.add("trimmed-cube", lattice_count(m.box, lam, Bc::Neumann).hi, "exact-lattice");
        continue;
      }
      PieceThreshold t = piece_threshold(m, d);
      if (t.zero && lam <= *t.zero) up.add("trimmed-cube", 0, "trimmed-cube-threshold");
      else if (lam <= t.one) up.add("trimmed-cube", 1, "trimmed-cube-threshold");
      else ++refused;
    }
    if (reach > 0) {
      cb.certified = false;
      cb.refusals.push_back(std::to_string(reach) + " trimmed cubes reach the interior family");
    }
    if (refused > 0) {
      cb.certified = false;
      cb.refusals.push_back(std::to_string(refused) + " trimmed cubes above their threshold");
    }
    cb.upper = up.total();
    cb.upper_ledger = up.entries();
  }

  // ---- Neumann: middle cubes, far residue, rectangles and slivers
  {
    CountBound& cb = res.neumann;
    PartitionOptions po;
    po.probes = opt.probes;
    po.seed = opt.seed;
    CoverReport dp;
    try {
      dp = domain_partition(omega, delta, po);
    } catch (const PreconditionError& e) {
      cb.certified = false;
      cb.refusals.push_back(e.what());
    }
    for (const auto& c : dp.checks)
      if (!c.pass) {
        cb.certified = false;
        cb.refusals.push_back("boundary partition: " + c.id);
      }
    std::vector<AxisBox> sboxes;
    for (const auto* w : zero) sboxes.push_back(w->box);
    for (const auto& r : extra) sboxes.push_back(r);
    for (const auto& p : dp.pieces) sboxes.push_back(p.box);
    res.kappa_neumann = std::max(1, multiplicity(sboxes));
    const double lam = std::sqrt(static_cast<double>(res.kappa_neumann)) * lambda;
    const std::string scale_tag = res.kappa_neumann > 1 ? "overlap-rescaling" : "exact-lattice";
    Tally up = inner;
    for (const auto* w : zero) up.add("whitney-middle", lattice_count(w->box, lam, Bc::Neumann).hi, scale_tag);
    for (const auto& r : extra) up.add("residue-interior", lattice_count(r, lam, Bc::Neumann).hi, scale_tag);
    long long refused = 0, reach = 0;
    for (const auto& p : dp.pieces) {
      if (piece_max_distance(omega, p) > res.delta1) ++reach;
      if (p.kind == PieceKind::P) {
        up.add("rectangle", lattice_count(p.local, lam, Bc::Neumann).hi, "exact-lattice");
        continue;
      }
      PieceThreshold t = piece_threshold(p, d);
      if (lam <= t.one) up.add("sliver", 1, "sliver-threshold");
      else ++refused;
    }
    if (reach > 0) {
      cb.certified = false;
      cb.refusals.push_back(std::to_string(reach) + " boundary pieces reach the interior family");
    }
    if (refused > 0) {
      cb.certified = false;
      cb.refusals.push_back(std::to_string(refused) + " slivers above their threshold");
    }
    cb.upper = up.total();
    cb.upper_ledger = up.entries();
  }

  res.checks.push_back(check("dirichlet-order", static_cast<double>(res.dirichlet.lower),
                             static_cast<double>(res.dirichlet.upper)));
  res.checks.push_back(check("neumann-order", static_cast<double>(res.neumann.lower),
                             static_cast<double>(res.neumann.upper)));
  return res;
}

}  // namespace rw
