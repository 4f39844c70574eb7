#include "speccoc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "speccoc/error.hpp"
#include "speccoc/rng.hpp"

namespace speccoc {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorKind::schema, what); }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    schema(what + ": not a number: '" + t + "'");
  return v;
}

RealExpr to_expr(const Json& j, const std::string& what) {
  if (j.is_number()) return RealExpr(j.get<double>());
  if (j.is_string()) return RealExpr(j.get<std::string>());
  schema(what + " must be a number or an expression string");
}

double to_real(const Json& j, const std::string& what) { return to_expr(j, what).value(); }

std::vector<RealExpr> to_expr_list(const Json& j, const std::string& what) {
  std::vector<RealExpr> out;
  if (j.is_string()) {
    for (const auto& s : split_csv(j.get<std::string>())) out.emplace_back(s);
    return out;
  }
  if (!j.is_array()) schema(what + " must be a list");
  for (const auto& x : j) out.push_back(to_expr(x, what));
  return out;
}

std::vector<double> to_real_list(const Json& j, const std::string& what) {
  std::vector<double> out;
  for (const auto& e : to_expr_list(j, what)) out.push_back(e.value());
  return out;
}

std::uint64_t to_u64(const Json& j, const std::string& what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_string()) {
    const std::string t = trim(j.get<std::string>());
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && p == t.data() + t.size() && !t.empty()) return v;
  }
  schema(what + " must be a nonnegative integer");
}

std::size_t to_count(const Json& j, const std::string& what, std::size_t min, std::size_t max) {
  const std::uint64_t v = to_u64(j, what);
  if (v < min || v > max)
    schema(what + " out of range [" + std::to_string(min) + ", " + std::to_string(max) + "]");
  return static_cast<std::size_t>(v);
}

bool to_bool(const Json& j, const std::string& what) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) {
    const std::string t = j.get<std::string>();
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
  }
  schema(what + " must be a boolean");
}

const Json* find(const Json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) schema(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) schema(where + ": unknown key '" + it.key() + "'");
  }
}

Acceleration parse_accel(const std::string& s) {
  if (s == "none") return Acceleration::none;
  if (s == "zorich") return Acceleration::zorich;
  schema("accel must be none or zorich, got '" + s + "'");
}

GridConfig grid_from_json(const Json& j) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  check_keys(j, {"lo", "hi", "count", "scale"}, "grid");
  GridConfig g;
  if (!find(j, "lo") || !find(j, "hi") || !find(j, "count")) schema("grid needs lo, hi and count");
  g.lo = to_expr(j["lo"], "grid.lo");
  g.hi = to_expr(j["hi"], "grid.hi");
  g.count = static_cast<int>(to_count(j["count"], "grid.count", 1, 1'000'000));
  if (const Json* s = find(j, "scale")) {
    const std::string v = s->get<std::string>();
    if (v != "log" && v != "linear") schema("grid.scale must be log or linear");
    g.log_scale = v == "log";
  }
  return g;
}

}  // namespace

Substitution stock_substitution(std::string_view name) {
  if (name == "fibonacci") return Substitution::parse("1:12;2:1");
  if (name == "thue-morse") return Substitution::parse("1:12;2:21");
  if (name == "example3") return Substitution::parse("1:121321;2:2231;3:31123");
  schema("unknown stock substitution '" + std::string(name) + "'");
}

Substitution parse_substitution(const Json& j) {
  // A malformed substitution is bad input, whatever the constructor calls it.
  try {
    if (j.is_object()) return Substitution::from_json(j.dump());
    if (!j.is_string()) schema("substitution must be a string or an object");
    const std::string s = trim(j.get<std::string>());
    if (s.find(':') == std::string::npos) return stock_substitution(s);
    return Substitution::parse(s);
  } catch (const Error& e) {
    schema(e.what());
  }
}

Complex parse_complex(std::string_view text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) schema("empty complex number");
  if (t.back() != 'i') return Complex(parse_double(t, "complex"), 0.0);
  t.pop_back();
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s, "complex");
  };
  if (split == std::string::npos) return Complex(0.0, imag_part(t));
  return Complex(parse_double(t.substr(0, split), "complex"), imag_part(t.substr(split)));
}

std::vector<std::string> split_csv(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    std::string item = trim(text.substr(start, end - start));
    if (item.empty()) schema("empty item in list '" + std::string(text) + "'");
    out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

GridConfig parse_grid(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t c = text.find(':', start);
    parts.push_back(trim(text.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start)));
    if (c == std::string_view::npos) break;
    start = c + 1;
  }
  if (parts.size() < 3 || parts.size() > 4) schema("grid must be lo:hi:count[:log|linear]");
  GridConfig g;
  g.lo = RealExpr(parts[0]);
  g.hi = RealExpr(parts[1]);
  g.count = static_cast<int>(to_count(Json(parts[2]), "grid count", 1, 1'000'000));
  if (parts.size() == 4) {
    if (parts[3] != "log" && parts[3] != "linear") schema("grid scale must be log or linear");
    g.log_scale = parts[3] == "log";
  }
  return g;
}

std::vector<RealExpr> expand_grid(const GridConfig& g) {
  return g.log_scale ? log_grid(g.lo, g.hi, g.count) : linear_grid(g.lo, g.hi, g.count);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    schema("config '" + path + "': " + e.what());
  }
}

RunConfig parse_config(const Json& doc) {
  try {
    check_keys(doc, {"command", "directive", "suspension", "function", "analysis", "output"}, "config");
    RunConfig c;
    if (const Json* cmd = find(doc, "command")) c.command = cmd->get<std::string>();
    static const std::set<std::string> commands{"lyapunov", "dimension", "singularity", "gr", "rauzy", "verify"};
    if (!commands.contains(c.command)) schema("unknown command '" + c.command + "'");

    if (const Json* d = find(doc, "directive")) {
      check_keys(*d, {"type", "subs", "perm", "lambda", "random", "m", "accel", "recognizable"}, "directive");
      auto& dc = c.directive;
      if (const Json* t = find(*d, "type")) dc.type = t->get<std::string>();
      if (dc.type != "periodic" && dc.type != "explicit" && dc.type != "rauzy")
        schema("directive.type must be periodic, explicit or rauzy");
      if (const Json* s = find(*d, "subs")) {
        if (s->is_array())
          for (const auto& x : *s) dc.subs.push_back(parse_substitution(x));
        else
          dc.subs.push_back(parse_substitution(*s));
      }
      if (const Json* p = find(*d, "perm")) {
        if (p->is_string())
          for (const auto& x : split_csv(p->get<std::string>()))
            dc.perm.push_back(static_cast<int>(to_count(Json(x), "perm", 1, 64)));
        else
          for (const auto& x : *p) dc.perm.push_back(static_cast<int>(to_count(x, "perm", 1, 64)));
      }
      if (const Json* l = find(*d, "lambda")) dc.lambda = to_real_list(*l, "directive.lambda");
      if (const Json* r = find(*d, "random")) dc.random_seed = to_u64(*r, "directive.random");
      if (const Json* m = find(*d, "m")) {
        const auto mm = to_count(*m, "directive.m", 2, 64);
        if (dc.perm.empty()) dc.perm.resize(mm, 0);  // placeholder: random permutation
      }
      if (const Json* a = find(*d, "accel")) dc.accel = parse_accel(a->get<std::string>());
      if (const Json* r = find(*d, "recognizable")) dc.recognizable = to_bool(*r, "directive.recognizable");
      if (dc.type == "rauzy") {
        if (dc.perm.empty()) schema("rauzy directive needs perm (or m with random)");
        if (dc.lambda.empty() && !dc.random_seed) schema("rauzy directive needs lambda or random");
        if (!dc.lambda.empty() && dc.lambda.size() != dc.perm.size())
          schema("rauzy directive: lambda and perm differ in length");
      } else if (dc.subs.empty()) {
        schema("directive needs at least one substitution");
      }
    }

    if (const Json* s = find(doc, "suspension")) {
      check_keys(*s, {"s", "level"}, "suspension");
      if (const Json* r = find(*s, "s")) {
        if (r->is_string() && r->get<std::string>() == "pf")
          c.roof_pf = true;
        else
          c.roof = to_expr_list(*r, "suspension.s");
      }
      if (const Json* l = find(*s, "level")) c.level = to_count(*l, "suspension.level", 0, 64);
    }
    if (const Json* f = find(doc, "function")) c.function = f->get<std::string>();

    if (const Json* a = find(doc, "analysis")) {
      check_keys(*a, {"omega", "omega_grid", "xi", "vector", "n", "R_list", "R_grid", "samples", "seed", "margin",
                      "chi", "norm", "steps", "class", "suite", "corrupt"},
                 "analysis");
      if (const Json* w = find(*a, "omega")) c.omegas = to_expr_list(*w, "analysis.omega");
      if (const Json* g = find(*a, "omega_grid")) {
        if (!c.omegas.empty()) schema("give either analysis.omega or analysis.omega_grid");
        c.omegas = expand_grid(grid_from_json(*g));
      }
      if (const Json* x = find(*a, "xi")) c.xi = to_expr_list(*x, "analysis.xi");
      if (const Json* v = find(*a, "vector")) {
        CVector z;
        if (v->is_string())
          for (const auto& s : split_csv(v->get<std::string>())) z.push_back(parse_complex(s));
        else
          for (const auto& s : *v) z.push_back(s.is_number() ? Complex(s.get<double>(), 0.0)
                                                             : parse_complex(s.get<std::string>()));
        c.vector = std::move(z);
      }
      if (const Json* n = find(*a, "n")) c.n = to_count(*n, "analysis.n", 1, 1'000'000);
      if (const Json* r = find(*a, "R_list")) c.R_list = to_real_list(*r, "analysis.R_list");
      if (const Json* g = find(*a, "R_grid")) {
        if (!c.R_list.empty()) schema("give either analysis.R_list or analysis.R_grid");
        for (const auto& e : expand_grid(grid_from_json(*g))) c.R_list.push_back(e.value());
      }
      for (double R : c.R_list)
        if (!(R > 0.0) || !std::isfinite(R)) schema("R values must be positive");
      if (const Json* s = find(*a, "samples")) c.samples = to_count(*s, "analysis.samples", 1, 100'000'000);
      if (const Json* s = find(*a, "seed")) c.seed = to_u64(*s, "analysis.seed");
      if (const Json* m = find(*a, "margin")) {
        c.margin = to_real(*m, "analysis.margin");
        if (!(c.margin >= 0.0)) schema("analysis.margin must be >= 0");
      }
      if (const Json* x = find(*a, "chi")) {
        const std::string v = x->get<std::string>();
        if (v != "tail_max" && v != "final") schema("analysis.chi must be tail_max or final");
        c.tail_max = v == "tail_max";
      }
      if (const Json* x = find(*a, "norm")) {
        c.norm = x->get<std::string>();
        if (c.norm != "row" && c.norm != "column") schema("analysis.norm must be row or column");
      }
      if (const Json* s = find(*a, "steps")) c.steps = to_count(*s, "analysis.steps", 1, 10'000'000);
      if (const Json* k = find(*a, "class")) c.rauzy_class = to_bool(*k, "analysis.class");
      if (const Json* s = find(*a, "suite")) c.suite = s->get<std::string>();
      if (const Json* k = find(*a, "corrupt")) c.corrupt = to_bool(*k, "analysis.corrupt");
    }

    if (const Json* o = find(doc, "output")) {
      check_keys(*o, {"out", "csv"}, "output");
      if (const Json* p = find(*o, "out")) c.out = p->get<std::string>();
      if (const Json* p = find(*o, "csv")) c.csv = p->get<std::string>();
    }
    return c;
  } catch (const Json::exception& e) {
    schema(std::string("config: ") + e.what());
  }
}

DirectiveSequence build_directive(const DirectiveConfig& d, std::size_t n_needed) {
  if (d.type == "periodic") {
    auto a = DirectiveSequence::periodic(d.subs);
    a.set_recognizability_asserted(d.recognizable);
    return a;
  }
  if (d.type == "explicit") {
    auto a = DirectiveSequence::explicit_list(d.subs);
    a.set_recognizability_asserted(d.recognizable);
    return a;
  }
  const IETState state = [&] {
    if (!d.random_seed) return IETState(d.lambda, Permutation(d.perm));
    Rng rng(task_seed(*d.random_seed, 0));
    IETState r = random_iet_state(static_cast<int>(d.perm.size()), rng);
    if (d.perm.front() != 0) r = IETState(r.lambda, Permutation(d.perm));
    return r;
  }();
  auto a = directive_from_iet(state, n_needed, d.accel);
  a.set_recognizability_asserted(d.recognizable);
  return a;
}

SuspensionSpec build_suspension(const RunConfig& c, const DirectiveSequence& a) {
  Roof roof;
  if (c.roof_pf) {
    if (c.directive.type != "periodic")
      fail(ErrorKind::precondition, "a PF roof needs a periodic directive sequence");
    // Self-similar roof of the whole period S_1 ... S_p.
    IntMatrix s = substitution_matrix(c.directive.subs.front()).entries();
    for (std::size_t k = 1; k < c.directive.subs.size(); ++k)
      s = checked_product(s, substitution_matrix(c.directive.subs[k]).entries());
    roof = Roof::perron_frobenius(SubMatrix(s));
  } else if (c.roof.empty()) {
    roof = Roof::from_exprs(std::vector<RealExpr>(static_cast<std::size_t>(a.alphabet_size()), RealExpr("1")));
  } else {
    roof = Roof::from_exprs(c.roof);
  }
  if (static_cast<int>(roof.values.size()) != a.alphabet_size())
    fail(ErrorKind::precondition, "roof vector has the wrong dimension");
  return SuspensionSpec::make(a, std::move(roof), c.level);
}

CylFunction build_function(const std::string& spec, int m) {
  if (spec.empty()) return CylFunction::simple(CVector(static_cast<std::size_t>(m), Complex(1.0, 0.0)));
  const auto colon = spec.find(':');
  if (colon == std::string::npos) schema("function must be simple:<csv complex> or lipschitz:<file>");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "simple") {
    CVector b;
    for (const auto& s : split_csv(arg)) b.push_back(parse_complex(s));
    return CylFunction::simple(std::move(b));
  }
  if (kind == "lipschitz") return CylFunction::read_profiles_file(arg);
  schema("unknown function kind '" + kind + "'");
}

}  // namespace speccoc
