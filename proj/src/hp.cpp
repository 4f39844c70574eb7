#include "speccoc/hp.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "speccoc/error.hpp"

namespace speccoc {

BigReal::BigReal(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }

BigReal::BigReal(double v, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigReal::BigReal(const BigReal& o) {
  mpfr_init2(v_, o.precision());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& o) noexcept {
  // Steal the limbs; the moved-from object is left dead (clear skipped).
  v_[0] = o.v_[0];
  o.live_ = false;
}

BigReal& BigReal::operator=(const BigReal& o) {
  if (this == &o) return *this;
  if (!live_) {
    mpfr_init2(v_, o.precision());
    live_ = true;
  }
  mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator=(BigReal&& o) noexcept {
  if (this != &o) {
    if (live_) mpfr_clear(v_);
    v_[0] = o.v_[0];
    live_ = true;
    o.live_ = false;
  }
  return *this;
}

BigReal::~BigReal() {
  if (live_) mpfr_clear(v_);
}

BigReal BigReal::frac() const {
  BigReal r(precision());
  mpfr_frac(r.v_, v_, MPFR_RNDN);
  if (mpfr_sgn(r.v_) < 0) mpfr_add_ui(r.v_, r.v_, 1, MPFR_RNDN);
  if (mpfr_cmp_ui(r.v_, 1) >= 0) mpfr_set_zero(r.v_, 1);
  return r;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, mpfr_prec_t prec) : s_(text), prec_(prec) {}

  BigReal parse() {
    BigReal v = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::schema, "real expression '" + std::string(s_) + "': " + msg);
  }

  BigReal expr() {
    BigReal v = term();
    for (;;) {
      if (eat('+')) {
        BigReal r = term();
        mpfr_add(v.get(), v.get(), r.get(), MPFR_RNDN);
      } else if (eat('-')) {
        BigReal r = term();
        mpfr_sub(v.get(), v.get(), r.get(), MPFR_RNDN);
      } else {
        return v;
      }
    }
  }

  BigReal term() {
    BigReal v = unary();
    for (;;) {
      if (eat('*')) {
        BigReal r = unary();
        mpfr_mul(v.get(), v.get(), r.get(), MPFR_RNDN);
      } else if (eat('/')) {
        BigReal r = unary();
        if (mpfr_zero_p(r.get())) error("division by zero");
        mpfr_div(v.get(), v.get(), r.get(), MPFR_RNDN);
      } else {
        return v;
      }
    }
  }

  BigReal unary() {
    if (eat('-')) {
      BigReal v = unary();
      mpfr_neg(v.get(), v.get(), MPFR_RNDN);
      return v;
    }
    if (eat('+')) return unary();
    return power();
  }

  // Right associative; binds tighter than unary minus on its left.
  BigReal power() {
    BigReal base = primary();
    if (!eat('^')) return base;
    BigReal ex = unary();
    BigReal r(prec_);
    if (mpfr_integer_p(ex.get()) && mpfr_fits_slong_p(ex.get(), MPFR_RNDN)) {
      mpfr_pow_si(r.get(), base.get(), mpfr_get_si(ex.get(), MPFR_RNDN), MPFR_RNDN);
    } else {
      if (mpfr_sgn(base.get()) <= 0) error("non-integer power of a nonpositive number");
      mpfr_pow(r.get(), base.get(), ex.get(), MPFR_RNDN);
    }
    return r;
  }

  BigReal primary() {
    skip();
    if (eat('(')) {
      BigReal v = expr();
      if (!eat(')')) error("missing ')'");
      return v;
    }
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      return number();
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) return named();
    error(pos_ < s_.size() ? "unexpected '" + std::string(1, s_[pos_]) + "'" : "unexpected end");
  }

  BigReal number() {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.'))
      ++end;
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) ++e;
      if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
        while (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) ++e;
        end = e;
      }
    }
    const std::string lit(s_.substr(pos_, end - pos_));
    BigReal v(prec_);
    if (mpfr_set_str(v.get(), lit.c_str(), 10, MPFR_RNDN) != 0) error("bad number '" + lit + "'");
    pos_ = end;
    return v;
  }

  BigReal named() {
    std::size_t end = pos_;
    while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
    const std::string name(s_.substr(pos_, end - pos_));
    pos_ = end;
    BigReal v(prec_);
    if (name == "pi") {
      mpfr_const_pi(v.get(), MPFR_RNDN);
      return v;
    }
    if (name == "e") {
      mpfr_set_ui(v.get(), 1, MPFR_RNDN);
      mpfr_exp(v.get(), v.get(), MPFR_RNDN);
      return v;
    }
    if (name == "phi") {
      mpfr_sqrt_ui(v.get(), 5, MPFR_RNDN);
      mpfr_add_ui(v.get(), v.get(), 1, MPFR_RNDN);
      mpfr_div_2ui(v.get(), v.get(), 1, MPFR_RNDN);
      return v;
    }
    using Fn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);
    static constexpr std::array<std::pair<const char*, Fn>, 5> fns{{{"sqrt", mpfr_sqrt},
                                                                    {"exp", mpfr_exp},
                                                                    {"log", mpfr_log},
                                                                    {"sin", mpfr_sin},
                                                                    {"cos", mpfr_cos}}};
    for (const auto& [fname, fn] : fns) {
      if (name != fname) continue;
      if (!eat('(')) error("expected '(' after " + name);
      BigReal arg = expr();
      if (!eat(')')) error("missing ')'");
      if ((name == "sqrt" && mpfr_sgn(arg.get()) < 0) || (name == "log" && mpfr_sgn(arg.get()) <= 0))
        error(name + " of an out-of-domain argument");
      fn(v.get(), arg.get(), MPFR_RNDN);
      return v;
    }
    error("unknown name '" + name + "'");
  }

  std::string_view s_;
  mpfr_prec_t prec_;
  std::size_t pos_ = 0;
};

}  // namespace

RealExpr::RealExpr(std::string text) : text_(std::move(text)) {
  value_ = Parser(text_, 128).parse().to_double();
}

RealExpr::RealExpr(double v) : RealExpr(format_double(v)) {
  if (!std::isfinite(v)) fail(ErrorKind::schema, "non-finite real");
}

BigReal RealExpr::evaluate(mpfr_prec_t prec) const {
  // Guard bits absorb rounding inside the expression tree.
  BigReal raw = Parser(text_, prec + 32).parse();
  BigReal out(prec);
  mpfr_set(out.get(), raw.get(), MPFR_RNDN);
  return out;
}

std::vector<RealExpr> linear_grid(const RealExpr& lo, const RealExpr& hi, int count) {
  if (count < 1) fail(ErrorKind::precondition, "grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<RealExpr> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k)
    out.emplace_back("(" + lo.text() + ")+(" + std::to_string(k) + ")*((" + hi.text() + ")-(" +
                     lo.text() + "))/" + std::to_string(count - 1));
  return out;
}

std::vector<RealExpr> log_grid(const RealExpr& lo, const RealExpr& hi, int count) {
  if (!(lo.value() > 0.0 && hi.value() > lo.value()))
    fail(ErrorKind::precondition, "log grid needs 0 < lo < hi");
  if (count < 1) fail(ErrorKind::precondition, "grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<RealExpr> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k)
    out.emplace_back("(" + lo.text() + ")*((" + hi.text() + ")/(" + lo.text() + "))^(" +
                     std::to_string(k) + "/" + std::to_string(count - 1) + ")");
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), p);
}

}  // namespace speccoc
