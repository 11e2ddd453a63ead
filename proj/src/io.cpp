#include "roughweyl/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rw {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const std::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

Point point_from(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("missing array '") + key + "'");
  std::vector<double> v = j[key].get<std::vector<double>>();
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

void check_version(const Json& j) {
  int v = get_or(j, "format_version", kFormatVersion);
  if (v != kFormatVersion) throw InputError("unsupported format_version " + std::to_string(v));
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

BumpSeriesParams bump_params_from_json(const Json& spec) {
  check_version(spec);
  BumpSeriesParams p;
  p.d = get_or(spec, "d", 2);
  p.alpha = get_or(spec, "alpha", 2.0 / 3.0);
  p.p = get_or(spec, "p", 2);
  p.n_max = get_or(spec, "n_max", 3);
  p.base_height = get_or(spec, "base_height", 1.0);
  std::string mode = get_or<std::string>(spec, "mode", "exploration");
  if (mode != "exploration" && mode != "theorem-faithful") throw InputError("mode must be exploration or theorem-faithful");
  p.theorem_faithful = mode == "theorem-faithful";
  p.schedule = get_or<std::string>(spec, "schedule", "constant");
  const int len = p.n_max + 2;
  if (spec.contains("eps")) {
    p.eps = spec["eps"].get<std::vector<double>>();
    p.schedule = "tabulated";
  } else if (p.schedule == "constant") {
    p.eps = constant_schedule(len);
  } else if (p.schedule == "decaying") {
    p.eps = decaying_schedule(get_or(spec, "theta", 0.25), p.alpha, p.p, len);
  } else {
    throw InputError("schedule must be constant, decaying or an explicit eps list");
  }
  return p;
}

Json bump_params_to_json(const BumpSeriesParams& p) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "bump-series";
  j["d"] = p.d;
  j["alpha"] = p.alpha;
  j["p"] = p.p;
  j["n_max"] = p.n_max;
  j["mode"] = p.theorem_faithful ? "theorem-faithful" : "exploration";
  j["schedule"] = p.schedule;
  j["eps"] = p.eps;
  j["base_height"] = p.base_height;
  j["bump"] = "coordinate-min pyramid";
  return j;
}

CompositeDomain domain_from_json(const Json& spec) {
  if (!spec.is_object()) throw InputError("domain spec must be a JSON object");
  check_version(spec);
  std::string kind = get_or<std::string>(spec, "kind", "");
  if (kind == "unit-square") return CompositeDomain::unit_square();
  if (kind == "l-shape") return CompositeDomain::l_shape();
  if (kind == "box") return CompositeDomain::box(AxisBox(point_from(spec, "lo"), point_from(spec, "hi")));
  if (kind == "graph") {
    auto xs = spec.at("xs").get<std::vector<double>>();
    auto ys = spec.at("ys").get<std::vector<double>>();
    return CompositeDomain::graph_domain(BoundaryFunction::polyline(xs, ys), get_or<std::string>(spec, "name", "graph"));
  }
  if (kind == "bump-series") return make_domain(bump_params_from_json(spec));
  throw InputError("unknown domain kind '" + kind + "'");
}

CompositeDomain load_domain(const std::string& path) { return domain_from_json(read_json(path)); }

Json to_json(const Check& c) {
  Json j;
  j["id"] = c.id;
  j["pass"] = c.pass;
  j["margin"] = std::isfinite(c.margin) ? Json(c.margin) : Json(nullptr);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const std::vector<Check>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(to_json(c));
  return a;
}

Json to_json(const AxisBox& b) {
  Json j;
  std::vector<double> lo(b.lo().data(), b.lo().data() + b.dim()), hi(b.hi().data(), b.hi().data() + b.dim());
  j["lo"] = lo;
  j["hi"] = hi;
  return j;
}

Json to_json(const CoverReport& r, bool with_pieces) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["pieces"] = r.pieces.size();
  j["generated"] = r.generated;
  j["multiplicity"] = r.multiplicity;
  j["small_piece_count"] = r.small_piece_count;
  j["coverage_ok"] = r.coverage_ok;
  j["residue_measure"] = r.residue_measure;
  j["residue_boxes"] = r.residue.size();
  j["all_pass"] = r.all_pass();
  j["checks"] = to_json(r.checks);
  if (!r.coverage_witnesses.empty()) {
    Json w = Json::array();
    for (const auto& x : r.coverage_witnesses) w.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    j["coverage_witnesses"] = w;
  }
  if (with_pieces) {
    Json a = Json::array();
    for (const auto& p : r.pieces) {
      Json q;
      q["kind"] = piece_kind_name(p.kind);
      q["box"] = to_json(p.box);
      if (p.chart >= 0) q["chart"] = p.chart;
      q["scale"] = p.scale;
      q["mu"] = {p.mu.lo, p.mu.hi};
      if (p.kind == PieceKind::W) q["level"] = p.level;
      if (p.kind == PieceKind::V) {
        q["base"] = to_json(p.base);
        q["floor"] = p.floor;
      }
      a.push_back(q);
    }
    j["piece_list"] = a;
  }
  return j;
}

Json to_json(const CountBound& b) {
  Json j;
  j["lambda"] = b.lambda;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["certified"] = b.certified;
  auto ledger = [](const std::vector<LedgerEntry>& v) {
    Json a = Json::array();
    for (const auto& e : v)
      a.push_back({{"piece", e.piece}, {"pieces", e.pieces}, {"contribution", e.contribution}, {"tag", e.tag}});
    return a;
  };
  j["lower_ledger"] = ledger(b.lower_ledger);
  j["upper_ledger"] = ledger(b.upper_ledger);
  if (!b.refusals.empty()) {
    Json a = Json::array();
    for (std::size_t i = 0; i < b.refusals.size() && i < 20; ++i) a.push_back(b.refusals[i]);
    j["refusals"] = a;
    j["refusal_count"] = b.refusals.size();
  }
  return j;
}

Json to_json(const BracketResult& r) {
  Json j;
  j["delta"] = r.delta;
  j["delta0"] = r.delta0;
  j["delta1"] = r.delta1;
  j["whitney_level_max"] = r.i_max;
  j["kappa_dirichlet"] = r.kappa_dirichlet;
  j["kappa_neumann"] = r.kappa_neumann;
  j["weyl_term"] = r.weyl_term;
  j["dirichlet"] = to_json(r.dirichlet);
  j["neumann"] = to_json(r.neumann);
  j["checks"] = to_json(r.checks);
  return j;
}

Json to_json(const ConstructionCertificate& c) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["all_pass"] = c.all_pass();
  j["c_psi_p"] = std::isfinite(c.c_psi_p) ? Json(c.c_psi_p) : Json(nullptr);
  j["c_psi_p_alt"] = std::isfinite(c.c_psi_p_alt) ? Json(c.c_psi_p_alt) : Json(nullptr);
  j["checks"] = to_json(c.checks);
  return j;
}

std::string cover_svg(const CompositeDomain& omega, const CoverReport& r, int pixels) {
  if (omega.dim() != 2) throw InputError("SVG output needs a planar domain");
  AxisBox bb = omega.bounding_box();
  double pad = 0.05 * bb.max_edge();
  double x0 = bb.lo(0) - pad, y1 = bb.hi(1) + pad;
  double span = bb.max_edge() + 2 * pad;
  double s = pixels / span;
  auto X = [&](double x) { return num((x - x0) * s); };
  auto Y = [&](double y) { return num((y1 - y) * s); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels << "\">\n";
  if (omega.is_polygon()) {
    for (const auto& ring : omega.polygon().rings()) {
      os << "<polygon fill=\"#eef\" stroke=\"black\" stroke-width=\"1\" points=\"";
      for (const auto& v : ring) os << X(v[0]) << "," << Y(v[1]) << " ";
      os << "\"/>\n";
    }
  } else {
    os << "<rect fill=\"#eef\" stroke=\"black\" x=\"" << X(bb.lo(0)) << "\" y=\"" << Y(bb.hi(1)) << "\" width=\""
       << num(bb.edge(0) * s) << "\" height=\"" << num(bb.edge(1) * s) << "\"/>\n";
  }
  for (const auto& p : r.pieces) {
    const char* colour = p.kind == PieceKind::P ? "#3a6" : p.kind == PieceKind::V ? "#c63" : p.kind == PieceKind::M ? "#36c" : "#888";
    os << "<rect fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"0.5\" x=\"" << X(p.box.lo(0)) << "\" y=\""
       << Y(p.box.hi(1)) << "\" width=\"" << num(p.box.edge(0) * s) << "\" height=\"" << num(p.box.edge(1) * s)
       << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string curve_csv(const CountingCurve& c) {
  std::ostringstream os;
  os << "# format_version=" << kFormatVersion << " bc=" << bc_name(c.bc) << " h=" << num(c.h) << "\n";
  os << "lambda,count,weyl,excess,flags\n";
  for (std::size_t i = 0; i < c.lambdas.size(); ++i)
    os << num(c.lambdas[i]) << "," << c.counts[i] << "," << num(c.weyl[i]) << "," << num(c.excess[i]) << ","
       << c.flags[i] << "\n";
  return os.str();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  auto to_d = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw InputError("bad number '" + s + "'");
      return v;
    } catch (const std::invalid_argument&) {
      throw InputError("bad number '" + s + "'");
    } catch (const std::out_of_range&) {
      throw InputError("number out of range '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InputError("grid must be start:stop:step");
    double a = to_d(parts[0]), b = to_d(parts[1]), st = to_d(parts[2]);
    if (!(st > 0)) throw InputError("grid step must be positive");
    long long n = static_cast<long long>(std::floor((b - a) / st + 1e-9));
    if (n > 1000000) throw InputError("grid too long");
    for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * st);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_d(item));
  return out;
}

}  // namespace rw
