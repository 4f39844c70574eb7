#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "speccoc/hp.hpp"
#include "speccoc/matrix.hpp"
#include "speccoc/rauzy.hpp"
#include "speccoc/sadic.hpp"
#include "speccoc/spectral.hpp"

namespace speccoc {

using Json = nlohmann::json;

struct DirectiveConfig {
  std::string type = "periodic";  // periodic | explicit | rauzy
  std::vector<Substitution> subs;
  // rauzy
  std::vector<int> perm;
  std::vector<double> lambda;
  std::optional<std::uint64_t> random_seed;  // lambda drawn on the simplex
  Acceleration accel = Acceleration::none;
  bool recognizable = false;
};

struct GridConfig {
  RealExpr lo, hi;
  int count = 0;
  bool log_scale = true;
};

struct RunConfig {
  std::string command;
  DirectiveConfig directive;

  // suspension
  bool roof_pf = false;
  std::vector<RealExpr> roof;
  std::size_t level = 0;
  std::string function;  // "" = simple with b = (1, ..., 1)

  // analysis
  std::vector<RealExpr> omegas;  // explicit values or expanded grid
  std::optional<std::vector<RealExpr>> xi;
  std::optional<CVector> vector;
  std::size_t n = 30;
  std::vector<double> R_list;
  std::size_t samples = 64;
  std::optional<std::uint64_t> seed;
  double margin = 0.01;
  bool tail_max = true;
  std::string norm = "row";
  // rauzy
  std::size_t steps = 10;
  bool rauzy_class = false;
  // verify
  std::string suite = "all";
  bool corrupt = false;

  // output
  std::string out;   // primary output, "" = stdout
  std::string csv;   // singularity: table file
};

// "1:12;2:1", a JSON substitution object, or a stock name: fibonacci,
// thue-morse, example3 (the three-letter example 121321/2231/31123).
Substitution parse_substitution(const Json& j);
Substitution stock_substitution(std::string_view name);

// "re+imi" forms: "1", "-0.5", "2i", "1-0.25i".
Complex parse_complex(std::string_view text);
std::vector<std::string> split_csv(std::string_view text);
// "lo:hi:count[:log|linear]".
GridConfig parse_grid(std::string_view text);
std::vector<RealExpr> expand_grid(const GridConfig& g);

// Schema validation; every problem is an ErrorKind::schema error.
RunConfig parse_config(const Json& doc);
Json read_json_file(const std::string& path);

DirectiveSequence build_directive(const DirectiveConfig& d, std::size_t n_needed);
SuspensionSpec build_suspension(const RunConfig& c, const DirectiveSequence& a);
CylFunction build_function(const std::string& spec, int m);

}  // namespace speccoc
