#ifndef ROUGHWEYL_IO_HPP
#define ROUGHWEYL_IO_HPP

#include "roughweyl/bracket.hpp"
#include "roughweyl/bump_series.hpp"
#include "roughweyl/covering.hpp"
#include "roughweyl/domain.hpp"
#include "roughweyl/eigensolver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rw {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Domain specs:
//   {"kind": "unit-square"} | {"kind": "l-shape"}
//   {"kind": "box", "lo": [...], "hi": [...]}
//   {"kind": "graph", "xs": [...], "ys": [...]}            unit square topped by a polyline
//   {"kind": "bump-series", "alpha", "p", "n_max", "mode", "schedule", "theta", "base_height"}
CompositeDomain domain_from_json(const Json& spec);
CompositeDomain load_domain(const std::string& path);
Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

BumpSeriesParams bump_params_from_json(const Json& spec);
Json bump_params_to_json(const BumpSeriesParams& prm);

Json to_json(const Check& c);
Json to_json(const std::vector<Check>& cs);
Json to_json(const AxisBox& b);
Json to_json(const CoverReport& r, bool with_pieces = true);
Json to_json(const CountBound& b);
Json to_json(const BracketResult& r);
Json to_json(const ConstructionCertificate& c);

std::string cover_svg(const CompositeDomain& omega, const CoverReport& r, int pixels = 800);
std::string curve_csv(const CountingCurve& c);

// Parses "a:b:step" or "x,y,z".
std::vector<double> parse_grid(const std::string& text);

}  // namespace rw

#endif
