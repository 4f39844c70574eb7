#pragma once

#include <string>

#include "speccoc/config.hpp"

namespace speccoc {

inline constexpr const char* kVersion = "0.1.0";

// Output of one CLI command. `primary` is what goes to --out (stdout by
// default); `table` is the optional side CSV (singularity --csv). Reruns with
// the same config produce identical bytes except for the JSON "wall_time_s".
struct ResultRecord {
  std::string command;
  Json inputs;
  Json report;          // JSON commands; null for CSV-only ones
  std::string primary;
  std::string table;
  int exit_code = 0;    // verify reports failures through this
  double wall_time = 0.0;
  std::vector<std::string> warnings;
};

ResultRecord run(const RunConfig& config);

// CSV helpers shared with the tests.
std::string csv_real(double v);

}  // namespace speccoc
