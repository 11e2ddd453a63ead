// Command-line front end. Exit codes: 0 all certified, 1 usage or input
// error, 2 non-certified results present, 3 verification mismatch.

#include "roughweyl/bracket.hpp"
#include "roughweyl/bump_series.hpp"
#include "roughweyl/constants.hpp"
#include "roughweyl/counting.hpp"
#include "roughweyl/covering.hpp"
#include "roughweyl/eigensolver.hpp"
#include "roughweyl/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rw;

namespace {

enum Exit { kOk = 0, kUsage = 1, kUncertified = 2, kMismatch = 3 };

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

fs::path out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

Bc parse_bc(const std::string& s) {
  if (s == "dirichlet") return Bc::Dirichlet;
  if (s == "neumann") return Bc::Neumann;
  throw InputError("bc must be dirichlet or neumann");
}

// tau and its constant for the bound tables: Hölder metadata when the charts
// carry it, otherwise the Lipschitz profile t^{d-1} fitted on a few scales.
std::pair<TauFunction, double> domain_tau(const CompositeDomain& omega) {
  const int d = omega.dim();
  for (const auto& c : omega.charts())
    if (c.f.holder_alpha && c.f.holder_seminorm && *c.f.holder_alpha < 1) {
      TauFunction t = lip_tau(*c.f.holder_alpha, *c.f.holder_seminorm, omega.diameter(), d);
      return {t, 1.0};
    }
  TauFunction t = TauFunction::power_law(1.0, d - 1.0, 1.0);
  std::vector<double> probes;
  for (int k = 2; k <= 8; ++k) probes.push_back(std::ldexp(omega.delta_omega(), -k + 2));
  return {t, std::max(1.0, tau_fit(omega, t, probes, 8).value)};
}

int cmd_partition(const std::string& domain, double delta, const std::string& out, int probes, std::uint64_t seed) {
  CompositeDomain omega = load_domain(domain);
  PartitionOptions opt;
  opt.probes = probes;
  opt.seed = seed;
  auto [tau, ctau] = domain_tau(omega);
  opt.tau = &tau;
  opt.c_tau = ctau;
  CoverReport part = domain_partition(omega, delta, opt);
  CoverReport mc = m_cover(omega, delta);
  fs::path dir = out_dir(out);
  Json j;
  j["format_version"] = kFormatVersion;
  j["domain"] = omega.name();
  j["delta"] = delta;
  j["delta_omega"] = omega.delta_omega();
  j["boundary_partition"] = to_json(part);
  j["trimmed_cubes"] = to_json(mc, false);
  write_text((dir / "partition.json").string(), j.dump(2) + "\n");
  if (omega.dim() == 2) write_text((dir / "partition.svg").string(), cover_svg(omega, part));
  bool ok = part.all_pass() && mc.all_pass();
  std::cout << "pieces " << part.pieces.size() << " multiplicity " << part.multiplicity << " checks "
            << (ok ? "pass" : "FAIL") << "\n";
  return ok ? kOk : kUncertified;
}

int cmd_bound(const std::string& domain, const std::string& grid, const std::string& out, double resolution) {
  CompositeDomain omega = load_domain(domain);
  std::vector<double> lambdas = parse_grid(grid);
  fs::path dir = out_dir(out);
  const double res = resolution > 0 ? resolution : omega.delta_omega() / 64;
  MeasureProfile prof = measure_profile(omega, res);
  auto [tau, ctau] = domain_tau(omega);
  std::ostringstream csv;
  csv << "# format_version=" << kFormatVersion << " domain=" << omega.name() << "\n";
  csv << "lambda,lower,upper,weyl_term,rhs_13,rhs_18,certified,neumann_lower,neumann_upper,neumann_certified\n";
  Json rows = Json::array();
  bool all = true;
  for (double l : lambdas) {
    BracketResult br = bracket(omega, l);
    double r13 = NAN;
    if (l >= 1.0 / omega.delta_omega()) r13 = theorem13_rhs(omega, l, tau, ctau, prof).value;
    double r18 = theorem18_rhs(omega, l, prof);
    csv << num(l) << "," << br.dirichlet.lower << "," << br.dirichlet.upper << "," << num(br.weyl_term) << ","
        << num(r13) << "," << num(r18) << "," << (br.dirichlet.certified ? 1 : 0) << "," << br.neumann.lower << ","
        << br.neumann.upper << "," << (br.neumann.certified ? 1 : 0) << "\n";
    Json row = to_json(br);
    row["lambda"] = l;
    row["rhs_13"] = std::isfinite(r13) ? Json(r13) : Json(nullptr);
    row["rhs_18"] = r18;
    rows.push_back(row);
    all = all && br.dirichlet.certified && br.neumann.certified;
  }
  Json j;
  j["format_version"] = kFormatVersion;
  j["domain"] = omega.name();
  j["bounds"] = rows;
  write_text((dir / "bounds.csv").string(), csv.str());
  write_text((dir / "bounds.json").string(), j.dump(2) + "\n");
  std::cout << csv.str();
  return all ? kOk : kUncertified;
}

int cmd_eigen(const std::string& domain, const std::string& grid, double h, const std::string& bc, const std::string& out) {
  CompositeDomain omega = load_domain(domain);
  CountingCurve c = sweep(omega, parse_grid(grid), h, parse_bc(bc));
  std::string text = curve_csv(c);
  if (!out.empty()) write_text(out, text);
  std::cout << text;
  for (const auto& f : c.flags)
    if (f.find("flagged") != std::string::npos) return kUncertified;
  return kOk;
}

int cmd_generate(BumpSeriesParams prm, const std::string& out) {
  fs::path dir = out_dir(out);
  ConstructionCertificate cert = certify(prm);
  write_text((dir / "certificate.json").string(), to_json(cert).dump(2) + "\n");
  for (const auto& c : cert.checks)
    std::cout << std::left << std::setw(28) << c.id << (c.pass ? "pass " : "FAIL ") << num(c.margin) << "\n";
  std::cout << "c_psi_p " << (std::isfinite(cert.c_psi_p) ? num(cert.c_psi_p) : "undefined") << "\n";
  try {
    validate(prm);
  } catch (const ConstructionError& e) {
    std::cout << "refused: " << e.what() << "\n";
    return kUncertified;
  }
  write_text((dir / "domain.json").string(), bump_params_to_json(prm).dump(2) + "\n");
  return kOk;
}

int cmd_verify(const std::string& domain, const std::string& grid, double h, double slack, const std::string& out) {
  CompositeDomain omega = load_domain(domain);
  std::vector<double> lambdas = parse_grid(grid);
  CountingCurve cd = sweep(omega, lambdas, h, Bc::Dirichlet);
  CountingCurve cn = sweep(omega, lambdas, h, Bc::Neumann);
  std::ostringstream csv;
  csv << "# format_version=" << kFormatVersion << " domain=" << omega.name() << " h=" << num(h) << " slack=" << num(slack)
      << "\n";
  csv << "lambda,bc,lower,count,upper,certified,pass,label\n";
  bool mismatch = false, uncertified = false;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    BracketResult br = bracket(omega, lambdas[i]);
    for (int k = 0; k < 2; ++k) {
      const CountBound& b = k == 0 ? br.dirichlet : br.neumann;
      long long n = k == 0 ? cd.counts[i] : cn.counts[i];
      double s = std::ceil(slack * static_cast<double>(n));
      bool pass = b.lower - s <= n && n <= b.upper + s;
      mismatch = mismatch || !pass;
      uncertified = uncertified || !b.certified;
      csv << num(lambdas[i]) << "," << (k == 0 ? "dirichlet" : "neumann") << "," << b.lower << "," << n << "," << b.upper
          << "," << (b.certified ? 1 : 0) << "," << (pass ? 1 : 0) << "," << (k == 0 ? "discrete" : "staircase-surrogate")
          << "\n";
    }
  }
  if (!out.empty()) write_text(out, csv.str());
  std::cout << csv.str();
  if (mismatch) return kMismatch;
  return uncertified ? kUncertified : kOk;
}

int cmd_sweep_exponent(const std::string& domain, const std::string& grid, double h, const std::string& bc,
                       double lo, double hi, std::uint64_t seed) {
  CompositeDomain omega = load_domain(domain);
  CountingCurve c = sweep(omega, parse_grid(grid), h, parse_bc(bc));
  std::cout << curve_csv(c);
  ExcessFit f = fit_excess(c, lo, hi, seed);
  std::cout << "exponent " << num(f.exponent) << " ci [" << num(f.ci_lo) << ", " << num(f.ci_hi) << "] points "
            << f.points << " (diagnostic only)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified eigenvalue counting bounds for rough planar domains"};
  app.require_subcommand(1);
  // --h is the grid pitch, so help stays long-only
  app.set_help_flag("--help", "print help and exit");

  std::string domain, grid, out, bc = "dirichlet", mode = "exploration", schedule = "constant";
  double delta = 0, h = 0, slack = 0.02, resolution = 0, lo = 0, hi = INFINITY, theta = 0.25;
  int probes = 10000, p = 2, n_max = 3;
  double alpha = 2.0 / 3.0;
  std::uint64_t seed = 1;

  auto* part = app.add_subcommand("partition", "boundary partition of a domain at scale delta");
  part->add_option("--domain", domain, "domain spec JSON")->required();
  part->add_option("--delta", delta, "scale")->required();
  part->add_option("--out", out, "output directory")->required();
  part->add_option("--probes", probes, "coverage probes");
  part->add_option("--seed", seed, "probe seed");

  auto* bound = app.add_subcommand("bound", "certified count bounds and remainder estimates");
  bound->add_option("--domain", domain)->required();
  bound->add_option("--lambdas", grid, "start:stop:step or a,b,c")->required();
  bound->add_option("--out", out)->required();
  bound->add_option("--resolution", resolution, "layer-measure resolution");

  auto* eigen = app.add_subcommand("eigen", "discrete counting curve");
  eigen->add_option("--domain", domain)->required();
  eigen->add_option("--lambdas", grid)->required();
  eigen->add_option("--h", h)->required();
  eigen->add_option("--bc", bc);
  eigen->add_option("--out", out);

  auto* gen = app.add_subcommand("generate", "bump-series domain with its construction certificate");
  gen->add_option("--alpha", alpha);
  gen->add_option("--p", p);
  gen->add_option("--n-max", n_max);
  gen->add_option("--mode", mode);
  gen->add_option("--schedule", schedule);
  gen->add_option("--theta", theta);
  gen->add_option("--out", out)->required();

  auto* ver = app.add_subcommand("verify", "bounds against the discrete counts");
  ver->add_option("--domain", domain)->required();
  ver->add_option("--lambdas", grid)->required();
  ver->add_option("--h", h)->required();
  ver->add_option("--slack", slack, "relative count slack");
  ver->add_option("--out", out);

  auto* sw = app.add_subcommand("sweep-exponent", "fit the growth exponent of the count excess");
  sw->add_option("--domain", domain)->required();
  sw->add_option("--lambdas", grid)->required();
  sw->add_option("--h", h)->required();
  sw->add_option("--bc", bc);
  sw->add_option("--lo", lo);
  sw->add_option("--hi", hi);
  sw->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*part) return cmd_partition(domain, delta, out, probes, seed);
    if (*bound) return cmd_bound(domain, grid, out, resolution);
    if (*eigen) return cmd_eigen(domain, grid, h, bc, out);
    if (*gen) {
      Json spec{{"alpha", alpha}, {"p", p}, {"n_max", n_max}, {"mode", mode}, {"schedule", schedule}, {"theta", theta}};
      return cmd_generate(bump_params_from_json(spec), out);
    }
    if (*ver) return cmd_verify(domain, grid, h, slack, out);
    if (*sw) return cmd_sweep_exponent(domain, grid, h, bc, lo, hi, seed);
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
