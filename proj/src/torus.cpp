#include "speccoc/torus.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "speccoc/error.hpp"

namespace speccoc {

double reduce01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // x slightly below an integer can round up to 1
  return r;
}

Complex unit_phase(double turns) {
  const double q = 4.0 * turns;
  if (q == std::floor(q) && std::abs(q) < 0x1p52) {
    switch (static_cast<long long>(q) & 3) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, 1.0};
    }
  }
  const double t = -2.0 * std::numbers::pi * turns;
  return {std::cos(t), std::sin(t)};
}

TorusPoint::TorusPoint(std::vector<double> coords) : xi(std::move(coords)) {
  for (double& x : xi) {
    if (!std::isfinite(x)) fail(ErrorKind::precondition, "torus coordinate is not finite");
    x = reduce01(x);
  }
}

TorusPoint torus_map(const SubMatrix& s, const TorusPoint& xi) {
  const int m = s.dim();
  if (xi.dim() != m) fail(ErrorKind::precondition, "torus point has the wrong dimension");
  std::vector<double> out(m);
  for (int b = 0; b < m; ++b) {
    double acc = 0.0;
    for (int c = 0; c < m; ++c) acc += static_cast<double>(s(c, b)) * xi.xi[c];
    out[b] = acc;
  }
  return TorusPoint(std::move(out));
}

std::pair<DirectiveSequence, TorusPoint> skew_step(const DirectiveSequence& a, const TorusPoint& xi) {
  return {a.shifted(1), torus_map(a.matrix(1), xi)};
}

std::size_t TorusOrbit::required_bits(const DirectiveSequence& a, std::size_t n, std::size_t extra_bits) {
  std::size_t bits = extra_bits;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto len = static_cast<std::uint64_t>(a.matrix(k).norm1());
    // ceil(log2 len): a row of S^t sums to at most len.
    bits += len <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(len - 1));
  }
  return bits;
}

TorusOrbit TorusOrbit::exact(const DirectiveSequence& a, const std::vector<BigReal>& xi0, std::size_t bits) {
  const int m = a.alphabet_size();
  if (static_cast<int>(xi0.size()) != m) fail(ErrorKind::precondition, "torus point has the wrong dimension");
  TorusOrbit o(a, OrbitMode::exact);
  o.bits_ = bits;
  o.fixed_.resize(m);
  for (int b = 0; b < m; ++b) {
    if (!mpfr_number_p(xi0[b].get())) fail(ErrorKind::precondition, "torus coordinate is not finite");
    BigReal f = xi0[b].frac();
    BigReal scaled(static_cast<mpfr_prec_t>(bits + 64));
    mpfr_mul_2ui(scaled.get(), f.get(), static_cast<unsigned long>(bits), MPFR_RNDN);
    mpfr_get_z(o.fixed_[b].get_mpz_t(), scaled.get(), MPFR_RNDD);
    mpz_fdiv_r_2exp(o.fixed_[b].get_mpz_t(), o.fixed_[b].get_mpz_t(), bits);
  }
  o.refresh_point();
  return o;
}

TorusOrbit TorusOrbit::exact(const DirectiveSequence& a, const std::vector<RealExpr>& xi0, std::size_t n) {
  const std::size_t bits = required_bits(a, n);
  std::vector<BigReal> hp;
  hp.reserve(xi0.size());
  for (const auto& e : xi0) hp.push_back(e.evaluate(static_cast<mpfr_prec_t>(bits + 64)));
  return exact(a, hp, bits);
}

TorusOrbit TorusOrbit::exact(const DirectiveSequence& a, const std::vector<double>& xi0, std::size_t n) {
  const std::size_t bits = required_bits(a, n);
  std::vector<BigReal> hp;
  hp.reserve(xi0.size());
  for (double x : xi0) hp.emplace_back(x, 64);
  return exact(a, hp, bits);
}

TorusOrbit TorusOrbit::fp64(const DirectiveSequence& a, const std::vector<double>& xi0) {
  if (static_cast<int>(xi0.size()) != a.alphabet_size())
    fail(ErrorKind::precondition, "torus point has the wrong dimension");
  TorusOrbit o(a, OrbitMode::fp64);
  o.bits_ = 53;
  o.point_ = TorusPoint(xi0);
  return o;
}

void TorusOrbit::refresh_point() {
  const auto m = fixed_.size();
  std::vector<double> xi(m);
  for (std::size_t b = 0; b < m; ++b) {
    if (fixed_[b] == 0) {
      xi[b] = 0.0;
      continue;
    }
    long e = 0;
    const double d = mpz_get_d_2exp(&e, fixed_[b].get_mpz_t());  // truncates
    xi[b] = std::ldexp(d, static_cast<int>(e - static_cast<long>(bits_)));
  }
  point_.xi = std::move(xi);
}

void TorusOrbit::advance() {
  const SubMatrix& s = a_.matrix(k_ + 1);
  ++k_;
  if (mode_ == OrbitMode::fp64) {
    point_ = torus_map(s, point_);
    return;
  }
  const int m = s.dim();
  std::vector<mpz_class> next(m);
  for (int b = 0; b < m; ++b) {
    mpz_class acc = 0;
    for (int c = 0; c < m; ++c)
      if (s(c, b) != 0) acc += fixed_[c] * static_cast<unsigned long>(s(c, b));
    mpz_fdiv_r_2exp(acc.get_mpz_t(), acc.get_mpz_t(), bits_);
    next[b] = std::move(acc);
  }
  fixed_ = std::move(next);
  refresh_point();
}

}  // namespace speccoc
