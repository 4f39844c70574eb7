#include "speccoc/run.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "speccoc/error.hpp"
#include "speccoc/scan.hpp"
#include "speccoc/verify.hpp"

namespace speccoc {

std::string csv_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_real(v);
}

namespace {

Json real_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    Json r = Json::array();
    for (int j = 0; j < m.dim(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Json expr_list_json(const std::vector<RealExpr>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(e.text());
  return out;
}

Json directive_json(const DirectiveConfig& d) {
  Json j;
  j["type"] = d.type;
  if (d.type == "rauzy") {
    j["perm"] = d.perm;
    if (d.random_seed) j["random"] = *d.random_seed;
    else j["lambda"] = d.lambda;
    j["accel"] = d.accel == Acceleration::zorich ? "zorich" : "none";
  } else {
    Json subs = Json::array();
    for (const auto& s : d.subs) subs.push_back(s.to_string());
    j["subs"] = subs;
  }
  return j;
}

Json suspension_json(const RunConfig& c) {
  Json j;
  j["s"] = c.roof_pf ? Json("pf") : expr_list_json(c.roof);
  j["level"] = c.level;
  return j;
}

CocycleNorm norm_of(const RunConfig& c) {
  return c.norm == "column" ? CocycleNorm::column_sum : CocycleNorm::row_sum;
}

TorusOrbit omega_orbit(const DirectiveSequence& shifted, const SuspensionSpec& spec, const RealExpr& omega,
                       std::size_t n) {
  const std::size_t bits = TorusOrbit::required_bits(shifted, n);
  const auto prec = static_cast<mpfr_prec_t>(bits + 64);
  const BigReal w = omega.evaluate(prec);
  std::vector<BigReal> xi = spec.s_ell_exact(prec);
  for (auto& x : xi) mpfr_mul(x.get(), x.get(), w.get(), MPFR_RNDN);
  return TorusOrbit::exact(shifted, xi, bits);
}

std::size_t directive_depth(const RunConfig& c) { return c.n + c.level; }

void run_lyapunov(const RunConfig& c, ResultRecord& r) {
  const DirectiveSequence a = build_directive(c.directive, directive_depth(c));
  const int m = a.alphabet_size();
  ChiOptions opts;
  opts.norm = norm_of(c);
  if (c.vector) {
    if (static_cast<int>(c.vector->size()) != m) fail(ErrorKind::precondition, "vector has the wrong dimension");
    opts.z = *c.vector;
  }
  std::optional<TorusOrbit> orbit;
  DirectiveSequence shifted = a.shifted(c.level);
  if (c.xi) {
    if (!c.omegas.empty()) fail(ErrorKind::schema, "give either xi or omega, not both");
    if (static_cast<int>(c.xi->size()) != m) fail(ErrorKind::precondition, "xi has the wrong dimension");
    orbit.emplace(TorusOrbit::exact(shifted, *c.xi, c.n));
    r.inputs["xi"] = expr_list_json(*c.xi);
  } else if (c.omegas.size() == 1) {
    const SuspensionSpec spec = build_suspension(c, a);
    orbit.emplace(omega_orbit(shifted, spec, c.omegas.front(), c.n));
    r.inputs["omega"] = c.omegas.front().text();
    r.inputs["suspension"] = suspension_json(c);
  } else {
    fail(ErrorKind::schema, "lyapunov needs --xi or a single --omega");
  }
  const ExponentEstimate e = chi_estimate(std::move(*orbit), c.n, opts);
  Json partials = Json::array();
  for (double p : e.partials) partials.push_back(real_json(p));
  r.report["chi"] = real_json(e.chi);
  r.report["tail_max"] = real_json(e.tail_max);
  r.report["partials"] = partials;
  r.report["lambda_hat"] = real_json(lambda_hat(shifted, c.n));
  r.report["n"] = c.n;
  r.report["variant"] = c.vector ? "vector" : "matrix_norm";
  r.report["norm"] = c.norm;
}

void run_dimension(const RunConfig& c, ResultRecord& r) {
  if (c.omegas.empty()) fail(ErrorKind::schema, "dimension needs --omega or --omega-grid");
  const DirectiveSequence a = build_directive(c.directive, directive_depth(c) + 1);
  const SuspensionSpec spec = build_suspension(c, a);
  const CylFunction f = build_function(c.function, a.alphabet_size());
  DimensionOptions opts;
  opts.use_tail_max = c.tail_max;
  const auto rows = dimension_scan(a, spec, f, c.omegas, c.n, Exec::openmp, opts);
  std::ostringstream out;
  out << "omega,chi,lambda,d,regime\n";
  for (const auto& d : rows) {
    out << csv_real(d.omega.value()) << ',' << csv_real(d.chi_plus) << ',' << csv_real(d.lambda) << ','
        << csv_real(d.d_lower) << ',' << regime_name(d.regime) << '\n';
    for (const auto& flag : d.flags) r.warnings.push_back("omega=" + csv_real(d.omega.value()) + ": " + flag);
    // a degenerate row is a numerical-failure marker; the table is still written
    if (d.regime == Regime::degenerate) r.exit_code = static_cast<int>(ErrorKind::numerical);
  }
  r.primary = out.str();
  r.inputs["omegas"] = expr_list_json(c.omegas);
  r.inputs["suspension"] = suspension_json(c);
  r.inputs["function"] = c.function;
}

void run_singularity(const RunConfig& c, ResultRecord& r) {
  if (c.directive.type != "periodic" || c.directive.subs.size() != 1)
    fail(ErrorKind::precondition, "singularity scan needs a single substitution");
  if (c.omegas.empty()) fail(ErrorKind::schema, "singularity needs --grid");
  const Substitution& zeta = c.directive.subs.front();
  const DirectiveSequence a = DirectiveSequence::periodic({zeta});
  const SuspensionSpec spec = build_suspension(c, a);
  const auto rep = singularity_scan(zeta, spec.roof, c.omegas, c.n, c.margin, Exec::openmp, 0.95,
                                    c.seed.value_or(1));
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "omega,chi,gap,below\n";
  for (const auto& row : rep.rows) {
    const double gap = rep.half_log_theta - row.chi;
    const bool below = row.chi < rep.half_log_theta - rep.margin;
    Json j = {{"omega", row.omega.text()}, {"chi", real_json(row.chi)}, {"gap", real_json(gap)}};
    if (row.vanished) j["vanished"] = true;
    rows.push_back(std::move(j));
    csv << csv_real(row.omega.value()) << ',' << csv_real(row.chi) << ',' << csv_real(gap) << ','
        << (below ? 1 : 0) << '\n';
  }
  r.report["rows"] = rows;
  r.report["excluded_zero"] = rep.excluded;
  r.report["vanished"] = rep.vanished;
  r.report["half_log_theta"] = real_json(rep.half_log_theta);
  r.report["margin"] = rep.margin;
  r.report["fraction_below"] = real_json(rep.fraction_below);
  r.report["fraction_threshold"] = rep.fraction_threshold;
  r.report["gap_quantiles"] = {{"min", real_json(rep.gap_min)}, {"q10", real_json(rep.gap_q10)},
                               {"median", real_json(rep.gap_median)}, {"q90", real_json(rep.gap_q90)},
                               {"max", real_json(rep.gap_max)}};
  r.report["det_witness"] = real_json(rep.det_witness);
  r.report["det_nonvanishing"] = rep.det_nonvanishing;
  r.report["verdict"] = rep.verdict;
  r.report["n"] = c.n;
  r.table = csv.str();
  r.inputs["suspension"] = suspension_json(c);
}

void run_gr(const RunConfig& c, ResultRecord& r) {
  if (!c.seed) fail(ErrorKind::schema, "gr is stochastic: a seed is mandatory");
  if (c.omegas.size() != 1) fail(ErrorKind::schema, "gr needs a single --omega");
  if (c.R_list.empty()) fail(ErrorKind::schema, "gr needs --R-list");
  const DirectiveSequence a = build_directive(c.directive, c.level + 64);
  const SuspensionSpec spec = build_suspension(c, a);
  const CylFunction f = build_function(c.function, a.alphabet_size());
  double R_max = 0.0;
  for (double R : c.R_list) R_max = std::max(R_max, R);
  const GRSampler sampler(a, spec, R_max, c.samples, *c.seed);
  const auto G = sampler.estimate(f, c.omegas.front().value(), c.R_list);
  std::ostringstream out;
  out << "R,G_R\n";
  for (std::size_t i = 0; i < G.size(); ++i) out << csv_real(c.R_list[i]) << ',' << csv_real(G[i]) << '\n';
  r.primary = out.str();
  r.inputs["omega"] = c.omegas.front().text();
  r.inputs["samples"] = c.samples;
  r.inputs["seed"] = *c.seed;
}

void run_rauzy(const RunConfig& c, ResultRecord& r) {
  const auto& d = c.directive;
  if (d.type != "rauzy") fail(ErrorKind::schema, "rauzy needs --perm with --lambda or --random");
  IETState state = [&] {
    if (!d.random_seed) return IETState(d.lambda, Permutation(d.perm));
    Rng rng(task_seed(*d.random_seed, 0));
    IETState s = random_iet_state(static_cast<int>(d.perm.size()), rng);
    if (d.perm.front() != 0) s = IETState(s.lambda, Permutation(d.perm));
    return s;
  }();
  Json start;
  start["perm"] = state.pi.values();
  Json lam = Json::array();
  for (double x : state.lambda) lam.push_back(x);
  start["lambda"] = lam;
  Json moves = Json::array();
  for (std::size_t k = 0; k < c.steps; ++k) {
    RauzyMove mv;
    std::size_t count = 1;
    if (d.accel == Acceleration::zorich) {
      ZorichMove z = zorich_step(state);
      mv = std::move(z.composite);
      count = z.count;
    } else {
      mv = rauzy_step(state);
    }
    if (mv.near_draw) r.warnings.push_back("step " + std::to_string(k + 1) + ": near draw");
    moves.push_back({{"type", std::string(1, move_letter(mv.type))},
                     {"count", count},
                     {"substitution", mv.substitution.to_string()},
                     {"matrix", matrix_json(mv.matrix.entries())},
                     {"perm", mv.new_state.pi.values()},
                     {"near_draw", mv.near_draw}});
    state = mv.new_state;
  }
  r.report["start"] = start;
  r.report["moves"] = moves;
  if (c.rauzy_class) r.report["class_size"] = rauzy_class(state.pi).vertices.size();
  r.inputs["steps"] = c.steps;
}

void run_verify_command(const RunConfig& c, ResultRecord& r) {
  const VerifyReport rep = run_verify(c.suite, c.corrupt);
  Json checks = Json::array();
  for (const auto& ch : rep.checks)
    checks.push_back({{"suite", ch.suite}, {"name", ch.name}, {"ok", ch.ok}, {"detail", ch.detail}});
  r.report["checks"] = checks;
  r.report["ok"] = rep.ok();
  r.exit_code = rep.ok() ? 0 : 4;
  r.inputs["suite"] = c.suite;
  r.inputs["corrupt"] = c.corrupt;
}

}  // namespace

ResultRecord run(const RunConfig& c) {
  ResultRecord r;
  r.command = c.command;
  r.inputs = Json::object();
  r.report = Json::object();
  const auto t0 = std::chrono::steady_clock::now();
  if (c.command != "rauzy" && c.command != "verify") {
    r.inputs["directive"] = directive_json(c.directive);
    r.inputs["n"] = c.n;
  }
  if (c.command == "lyapunov") run_lyapunov(c, r);
  else if (c.command == "dimension") run_dimension(c, r);
  else if (c.command == "singularity") run_singularity(c, r);
  else if (c.command == "gr") run_gr(c, r);
  else if (c.command == "rauzy") {
    r.inputs["directive"] = directive_json(c.directive);
    run_rauzy(c, r);
  } else if (c.command == "verify") run_verify_command(c, r);
  else fail(ErrorKind::schema, "unknown command '" + c.command + "'");
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (r.primary.empty()) {
    Json doc = r.report;
    doc["command"] = r.command;
    doc["inputs"] = r.inputs;
    doc["version"] = kVersion;
    doc["wall_time_s"] = r.wall_time;
    r.primary = doc.dump(2) + "\n";
  }
  return r;
}

}  // namespace speccoc
