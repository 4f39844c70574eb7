#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <mpfr.h>

namespace speccoc {

// Owning MPFR value. Precision is fixed at construction; assignment keeps the
// destination precision (MPFR semantics), construction copies it.
class BigReal {
 public:
  explicit BigReal(mpfr_prec_t prec = 128);
  BigReal(double v, mpfr_prec_t prec);
  BigReal(const BigReal& o);
  BigReal(BigReal&& o) noexcept;
  BigReal& operator=(const BigReal& o);
  BigReal& operator=(BigReal&& o) noexcept;
  ~BigReal();

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // x - floor(x), in [0, 1).
  BigReal frac() const;

 private:
  mpfr_t v_;
  bool live_ = true;
};

// A real number written as an arithmetic expression, e.g. "1/3",
// "phi^2", "0.125*64^(17/255)". Evaluated exactly as written at any
// precision, which is what keeps exact torus orbits meaningful: a double
// like 0.1 would otherwise be taken literally with its binary expansion.
// Grammar: numbers, + - * / ^, parentheses, constants pi e phi, functions
// sqrt exp log sin cos.
class RealExpr {
 public:
  RealExpr() : RealExpr(std::string("0")) {}
  explicit RealExpr(std::string text);
  // Shortest round-trip decimal of v, so 0.1 means one tenth.
  explicit RealExpr(double v);

  const std::string& text() const noexcept { return text_; }
  double value() const noexcept { return value_; }
  BigReal evaluate(mpfr_prec_t prec) const;

  friend bool operator==(const RealExpr& a, const RealExpr& b) { return a.text_ == b.text_; }

 private:
  std::string text_;
  double value_ = 0.0;
};

std::vector<RealExpr> linear_grid(const RealExpr& lo, const RealExpr& hi, int count);
// lo * (hi/lo)^(k/(count-1)), k = 0..count-1; requires 0 < lo < hi.
std::vector<RealExpr> log_grid(const RealExpr& lo, const RealExpr& hi, int count);

// Shortest round-trip decimal form of a double, '.' decimal point.
std::string format_double(double v);
// 17 significant digits, locale independent (CSV output).
std::string format_real(double v);

}  // namespace speccoc
