// speccoc: command-line front end. Every command reads an optional JSON
// config (--config) and applies its flags on top; flags win.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "speccoc/config.hpp"
#include "speccoc/error.hpp"
#include "speccoc/run.hpp"

using namespace speccoc;

namespace {

struct Flags {
  std::optional<std::string> config, out, csv;
  std::vector<std::string> subs;
  std::optional<std::string> directive_json, directive_type;
  std::map<std::string, std::optional<std::string>> analysis;  // key -> raw text
  std::optional<std::string> s, level, function;
  std::optional<std::string> perm, lambda, random, m, accel;
  std::optional<std::string> R_list;
  bool rauzy_class = false, corrupt = false, recognizable = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--out", f.out, "output file (default stdout)");
}

void add_directive(CLI::App* cmd, Flags& f) {
  cmd->add_option("--sub", f.subs, "substitution (\"1:12;2:1\" or fibonacci|thue-morse|example3); repeat for a period");
  cmd->add_option("--directive", f.directive_json, "directive source as inline JSON");
  cmd->add_flag("--recognizable", f.recognizable, "record that recognizability is asserted");
}

void add_analysis(CLI::App* cmd, Flags& f, const std::string& flag, const std::string& key, const std::string& help) {
  cmd->add_option(flag, f.analysis[key], help);
}

void add_suspension(CLI::App* cmd, Flags& f) {
  cmd->add_option("--s", f.s, "roof vector (csv of reals/expressions) or pf");
  cmd->add_option("--level", f.level, "suspension level ell");
}

// Writes the flags into the config document.
Json merge(Json doc, const std::string& command, const Flags& f) {
  if (!doc.is_object()) doc = Json::object();
  doc["command"] = command;
  if (!f.subs.empty()) {
    Json subs = Json::array();
    for (const auto& s : f.subs) subs.push_back(s);
    doc["directive"] = {{"type", f.directive_type.value_or("periodic")}, {"subs", subs}};
  }
  if (f.directive_json) {
    try {
      doc["directive"] = Json::parse(*f.directive_json);
    } catch (const Json::exception& e) {
      fail(ErrorKind::schema, std::string("--directive: ") + e.what());
    }
  }
  if (f.perm || f.lambda || f.random || f.m || f.accel) {
    Json& d = doc["directive"];
    if (!d.is_object()) d = Json::object();
    d["type"] = "rauzy";
    if (f.perm) d["perm"] = *f.perm;
    if (f.lambda) {
      d["lambda"] = *f.lambda;
      d.erase("random");
    }
    if (f.random) {
      d["random"] = *f.random;
      d.erase("lambda");
    }
    if (f.m) d["m"] = *f.m;
    if (f.accel) d["accel"] = *f.accel;
    d.erase("subs");
  }
  if (f.recognizable && doc.contains("directive")) doc["directive"]["recognizable"] = true;
  if (f.s) doc["suspension"]["s"] = *f.s;
  if (f.level) doc["suspension"]["level"] = *f.level;
  if (f.function) doc["function"] = *f.function;
  for (const auto& [key, value] : f.analysis) {
    if (!value) continue;
    Json& a = doc["analysis"];
    if (!a.is_object()) a = Json::object();
    if (key == "omega") a.erase("omega_grid");
    if (key == "omega_grid") a.erase("omega");
    a[key] = *value;
  }
  if (f.R_list) {
    Json& a = doc["analysis"];
    if (!a.is_object()) a = Json::object();
    a.erase("R_list");
    a.erase("R_grid");
    if (f.R_list->find(':') != std::string::npos) a["R_grid"] = *f.R_list;
    else a["R_list"] = *f.R_list;
  }
  if (f.rauzy_class) doc["analysis"]["class"] = true;
  if (f.corrupt) doc["analysis"]["corrupt"] = true;
  if (f.out) doc["output"]["out"] = *f.out;
  if (f.csv) doc["output"]["csv"] = *f.csv;
  return doc;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) fail(ErrorKind::precondition, "cannot write '" + path + "'");
  o << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral cocycle toolkit for substitution and S-adic suspension flows"};
  app.require_subcommand(1);
  Flags f;

  auto* lyap = app.add_subcommand("lyapunov", "cocycle exponent at xi or at xi = omega s");
  add_common(lyap, f);
  add_directive(lyap, f);
  add_suspension(lyap, f);
  add_analysis(lyap, f, "--xi", "xi", "torus point (csv of reals/expressions)");
  add_analysis(lyap, f, "--omega", "omega", "frequency; xi = omega s");
  add_analysis(lyap, f, "--n", "n", "number of steps");
  add_analysis(lyap, f, "--vector", "vector", "vector variant: csv of complex re+imi");
  add_analysis(lyap, f, "--norm", "norm", "row|column");

  auto* dim = app.add_subcommand("dimension", "lower local dimension via the cocycle");
  add_common(dim, f);
  add_directive(dim, f);
  add_suspension(dim, f);
  add_analysis(dim, f, "--omega", "omega", "frequency (csv allowed)");
  add_analysis(dim, f, "--omega-grid", "omega_grid", "lo:hi:count[:log|linear]");
  dim->add_option("--function", f.function, "simple:<csv complex> | lipschitz:<file>");
  add_analysis(dim, f, "--n", "n", "number of steps");
  add_analysis(dim, f, "--chi", "chi", "tail_max|final");

  auto* sing = app.add_subcommand("singularity", "singularity-criterion scan over an omega grid");
  add_common(sing, f);
  add_directive(sing, f);
  add_suspension(sing, f);
  add_analysis(sing, f, "--grid", "omega_grid", "lo:hi:count[:log|linear]");
  add_analysis(sing, f, "--n", "n", "number of steps");
  add_analysis(sing, f, "--margin", "margin", "required gap below log(theta)/2");
  add_analysis(sing, f, "--seed", "seed", "seed of the determinant witness");
  sing->add_option("--csv", f.csv, "write the per-omega table here");

  auto* gr = app.add_subcommand("gr", "Monte Carlo G_R(f, omega)");
  add_common(gr, f);
  add_directive(gr, f);
  add_suspension(gr, f);
  add_analysis(gr, f, "--omega", "omega", "frequency");
  gr->add_option("--function", f.function, "simple:<csv complex> | lipschitz:<file>");
  gr->add_option("--R-list", f.R_list, "csv of R values or lo:hi:count[:log|linear]");
  add_analysis(gr, f, "--samples", "samples", "number of base points");
  add_analysis(gr, f, "--seed", "seed", "master seed (mandatory)");

  auto* rz = app.add_subcommand("rauzy", "Rauzy-Veech induction moves");
  add_common(rz, f);
  rz->add_option("--perm", f.perm, "permutation pi(1),...,pi(m)");
  rz->add_option("--lambda", f.lambda, "lengths (csv)");
  rz->add_option("--random", f.random, "draw lengths on the simplex from this seed");
  rz->add_option("--m", f.m, "alphabet size for a random permutation");
  add_analysis(rz, f, "--steps", "steps", "number of moves");
  rz->add_option("--accel", f.accel, "none|zorich");
  rz->add_flag("--class", f.rauzy_class, "also report the Rauzy class size of the final permutation");

  auto* ver = app.add_subcommand("verify", "run the invariant suites");
  add_common(ver, f);
  add_analysis(ver, f, "--suite", "suite", "identities|oracles|towers|all");
  ver->add_flag("--corrupt", f.corrupt, "negative control: use a corrupted fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorKind::schema);
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    Json doc = f.config ? read_json_file(*f.config) : Json::object();
    if (command == "rauzy" && f.m && !f.perm && !f.random)
      fail(ErrorKind::schema, "--m selects a random permutation and needs --random");
    const RunConfig cfg = parse_config(merge(std::move(doc), command, f));
    const ResultRecord rec = run(cfg);
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
    if (cfg.out.empty()) std::cout << rec.primary;
    else write_file(cfg.out, rec.primary);
    if (!rec.table.empty() && !cfg.csv.empty()) write_file(cfg.csv, rec.table);
    return rec.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::numerical);
  }
}
