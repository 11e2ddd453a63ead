#ifndef ROUGHWEYL_BRACKET_HPP
#define ROUGHWEYL_BRACKET_HPP

#include "roughweyl/counting.hpp"

#include <string>
#include <vector>

namespace rw {

// One aggregated line of a bound: `pieces` pieces of one class contributed
// `contribution` eigenvalues in total, justified by `tag`.
struct LedgerEntry {
  std::string piece;
  long long pieces = 0;
  long long contribution = 0;
  std::string tag;
};

struct CountBound {
  double lambda = 0.0;
  long long lower = 0;
  long long upper = 0;
  bool certified = true;
  std::vector<LedgerEntry> lower_ledger;
  std::vector<LedgerEntry> upper_ledger;
  std::vector<std::string> refusals;  // why certification was withdrawn
};

struct BracketOptions {
  int probes = 2000;
  std::uint64_t seed = 1;
  // override for the chosen scale; 0 picks it from lambda
  double delta = 0.0;
};

struct BracketResult {
  CountBound dirichlet;
  CountBound neumann;
  double delta = 0.0, delta0 = 0.0, delta1 = 0.0;
  int i_min = 0, i_max = 0;
  int kappa_dirichlet = 0;
  int kappa_neumann = 0;
  double weyl_term = 0.0;
  std::vector<Check> checks;
};

// Largest power of two not above min(delta_Omega, C_7 n^{-1/2}/lambda, 1/lambda).
double bracket_delta(const CompositeDomain& omega, double lambda);

BracketResult bracket(const CompositeDomain& omega, double lambda, const BracketOptions& opt = {});

}  // namespace rw

#endif
