#include "speccoc/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "speccoc/error.hpp"

namespace speccoc {

namespace {

double log_rate(long exponent, double norm, std::size_t k) {
  return std::log(2.0) * ((static_cast<double>(exponent) + std::log2(norm)) / static_cast<double>(k));
}

}  // namespace

CMatrix fourier_matrix(const Substitution& zeta, const TorusPoint& xi) {
  const int m = zeta.alphabet_size();
  if (xi.dim() != m) fail(ErrorKind::precondition, "torus point has the wrong dimension");
  CMatrix out(m);
  for (int b = 1; b <= m; ++b) {
    double turns = 0.0;  // sum of xi over the strict prefix, mod 1
    for (Letter c : zeta.image(b)) {
      out(b - 1, c - 1) += unit_phase(turns);
      turns = reduce01(turns + xi.xi[c - 1]);
    }
  }
  return out;
}

double det_modulus(const Substitution& zeta, const TorusPoint& xi) {
  return std::abs(determinant(fourier_matrix(zeta, xi)));
}

double cocycle_norm(const CMatrix& a, CocycleNorm norm) {
  return norm == CocycleNorm::row_sum ? row_sum_norm(a) : column_sum_norm(a);
}

double CocycleProduct::log_norm_accum() const { return std::log(2.0) * static_cast<double>(exponent); }

double CocycleProduct::log_norm_rate() const {
  if (n == 0) fail(ErrorKind::precondition, "empty cocycle product");
  return log_rate(exponent, cocycle_norm(rescaled, norm), n);
}

CMatrix CocycleProduct::true_value() const {
  CMatrix r = rescaled;
  if (exponent > 1000 || exponent < -1000)
    fail(ErrorKind::numerical, "cocycle product outside double range");
  scale_pow2(r, static_cast<int>(exponent));
  return r;
}

CocycleProduct cocycle_product(TorusOrbit orbit, std::size_t n, CocycleNorm norm) {
  if (n == 0) fail(ErrorKind::precondition, "cocycle product needs n >= 1");
  const DirectiveSequence& a = orbit.sequence();
  CocycleProduct p;
  p.n = n;
  p.norm = norm;
  p.xi0 = orbit.point();
  p.rescaled = CMatrix::identity(a.alphabet_size());
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) orbit.advance();
    p.rescaled = fourier_matrix(a.term(orbit.index() + 1), orbit.point()) * p.rescaled;
    const int e = binary_exponent(cocycle_norm(p.rescaled, norm));
    scale_pow2(p.rescaled, -e);
    p.exponent += e;
  }
  return p;
}

CocycleProduct cocycle_product(const DirectiveSequence& a, const TorusPoint& xi0, std::size_t n,
                               CocycleNorm norm) {
  return cocycle_product(TorusOrbit::exact(a, xi0.xi, n), n, norm);
}

namespace {

void finish(ExponentEstimate& est, double tail_fraction) {
  const std::size_t n = est.partials.size();
  est.n = n;
  est.chi = est.partials.back();
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
  est.tail_max = *std::max_element(est.partials.end() - static_cast<std::ptrdiff_t>(std::min(tail, n)),
                                   est.partials.end());
}

}  // namespace

ExponentEstimate chi_estimate(TorusOrbit orbit, std::size_t n, const ChiOptions& opts) {
  if (n == 0) fail(ErrorKind::precondition, "chi_estimate needs n >= 1");
  if (!(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0))
    fail(ErrorKind::precondition, "tail fraction must lie in (0, 1]");
  const DirectiveSequence& a = orbit.sequence();
  const int m = a.alphabet_size();
  ExponentEstimate est;
  est.norm = opts.norm;
  est.partials.reserve(n);
  long exponent = 0;

  if (opts.z) {
    est.variant = ExponentVariant::vector;
    CVector w = *opts.z;
    if (static_cast<int>(w.size()) != m) fail(ErrorKind::precondition, "vector z has the wrong dimension");
    if (!(vector_norm1(w) > 0.0)) fail(ErrorKind::precondition, "vector z must be nonzero");
    for (std::size_t k = 1; k <= n; ++k) {
      if (k > 1) orbit.advance();
      w = fourier_matrix(a.term(orbit.index() + 1), orbit.point()) * w;
      const double nw = vector_norm1(w);
      if (!(nw > 0.0))
        fail(ErrorKind::numerical, "cocycle annihilated the vector at step " + std::to_string(k));
      const int e = binary_exponent(nw);
      scale_pow2(w, -e);
      exponent += e;
      est.partials.push_back(log_rate(exponent, vector_norm1(w), k));
    }
  } else {
    est.variant = ExponentVariant::matrix_norm;
    CMatrix p = CMatrix::identity(m);
    for (std::size_t k = 1; k <= n; ++k) {
      if (k > 1) orbit.advance();
      p = fourier_matrix(a.term(orbit.index() + 1), orbit.point()) * p;
      const double np = cocycle_norm(p, opts.norm);
      if (!(np > 0.0))
        fail(ErrorKind::numerical, "cocycle product vanished at step " + std::to_string(k));
      const int e = binary_exponent(np);
      scale_pow2(p, -e);
      exponent += e;
      est.partials.push_back(log_rate(exponent, cocycle_norm(p, opts.norm), k));
    }
  }
  finish(est, opts.tail_fraction);
  return est;
}

ExponentEstimate base_exponent(const DirectiveSequence& a, std::size_t n) {
  if (n == 0) fail(ErrorKind::precondition, "base exponent needs n >= 1");
  ExponentEstimate est;
  est.variant = ExponentVariant::base;
  RealMatrix p = RealMatrix::identity(a.alphabet_size());
  long exponent = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    p = p * to_real(a.matrix(k).entries());
    const int e = binary_exponent(column_sum_norm(p));
    scale_pow2(p, -e);
    exponent += e;
    est.partials.push_back(log_rate(exponent, column_sum_norm(p), k));
  }
  finish(est, 0.2);
  return est;
}

namespace {

using BigMatrix = std::vector<std::vector<BigReal>>;

BigMatrix big_product(const BigMatrix& a, const BigMatrix& b, mpfr_prec_t prec) {
  const auto m = a.size();
  BigMatrix r(m, std::vector<BigReal>(m, BigReal(prec)));
  BigReal t(prec);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      mpfr_set_zero(r[i][j].get(), 1);
      for (std::size_t k = 0; k < m; ++k) {
        mpfr_mul(t.get(), a[i][k].get(), b[k][j].get(), MPFR_RNDN);
        mpfr_add(r[i][j].get(), r[i][j].get(), t.get(), MPFR_RNDN);
      }
    }
  return r;
}

// v / ||v||_1 for a nonnegative vector.
void normalize1(std::vector<BigReal>& v, mpfr_prec_t prec) {
  BigReal sum(prec);
  for (const auto& x : v) mpfr_add(sum.get(), sum.get(), x.get(), MPFR_RNDN);
  for (auto& x : v) mpfr_div(x.get(), x.get(), sum.get(), MPFR_RNDN);
}

}  // namespace

HighPrecisionPF high_precision_pf(const SubMatrix& s, mpfr_prec_t prec) {
  if (!is_primitive(s)) fail(ErrorKind::precondition, "PF data requested for a non-primitive matrix");
  const int m = s.dim();
  const mpfr_prec_t wp = prec + 64;
  BigMatrix at(m, std::vector<BigReal>(m, BigReal(wp)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mpfr_set_si(at[i][j].get(), static_cast<long>(s(j, i)), MPFR_RNDN);

  // Repeated squaring: B = (S^t)^(2^k) / scale, whose columns converge
  // doubly exponentially to the PF direction.
  BigMatrix b = at;
  std::vector<BigReal> v(m, BigReal(wp)), prev(m, BigReal(wp));
  BigReal diff(wp), t(wp), tol(wp);
  mpfr_set_ui_2exp(tol.get(), 1, -static_cast<long>(prec) - 8, MPFR_RNDN);
  bool converged = false;
  for (int it = 0; it < 256 && !converged; ++it) {
    b = big_product(b, b, wp);
    BigReal mx(wp);
    for (auto& row : b)
      for (auto& x : row) mpfr_max(mx.get(), mx.get(), x.get(), MPFR_RNDN);
    for (auto& row : b)
      for (auto& x : row) mpfr_div(x.get(), x.get(), mx.get(), MPFR_RNDN);
    for (int i = 0; i < m; ++i) {
      mpfr_set_zero(v[i].get(), 1);
      for (int j = 0; j < m; ++j) mpfr_add(v[i].get(), v[i].get(), b[i][j].get(), MPFR_RNDN);
    }
    normalize1(v, wp);
    mpfr_set_zero(diff.get(), 1);
    for (int i = 0; i < m; ++i) {
      mpfr_sub(t.get(), v[i].get(), prev[i].get(), MPFR_RNDN);
      mpfr_abs(t.get(), t.get(), MPFR_RNDN);
      mpfr_add(diff.get(), diff.get(), t.get(), MPFR_RNDN);
    }
    converged = it > 0 && mpfr_cmp(diff.get(), tol.get()) <= 0;
    for (int i = 0; i < m; ++i) mpfr_set(prev[i].get(), v[i].get(), MPFR_RNDN);
  }
  if (!converged) fail(ErrorKind::numerical, "high-precision PF iteration did not converge");

  HighPrecisionPF pf{BigReal(prec), {}};
  // theta = ||S^t v||_1 with ||v||_1 = 1.
  BigReal theta(wp);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      mpfr_mul(t.get(), at[i][j].get(), v[j].get(), MPFR_RNDN);
      mpfr_add(theta.get(), theta.get(), t.get(), MPFR_RNDN);
    }
  mpfr_set(pf.theta.get(), theta.get(), MPFR_RNDN);
  for (int i = 0; i < m; ++i) {
    pf.s.emplace_back(prec);
    mpfr_set(pf.s.back().get(), v[i].get(), MPFR_RNDN);
  }
  return pf;
}

CocycleProduct self_similar_product(const Substitution& zeta, const RealExpr& omega, std::size_t n,
                                    CocycleNorm norm) {
  if (n == 0) fail(ErrorKind::precondition, "self-similar product needs n >= 1");
  const SubMatrix s = substitution_matrix(zeta);
  const int m = zeta.alphabet_size();
  const PFData pf = perron_frobenius(s);  // also rejects non-primitive input
  // theta^k omega s must be known to ~64 bits past the binary point.
  const double magnitude = std::log2(std::abs(omega.value()) + 2.0);
  const auto prec = static_cast<mpfr_prec_t>(
      128 + std::ceil(static_cast<double>(n) * std::log2(pf.theta1) + magnitude +
                      std::log2(static_cast<double>(n) + 1.0)));
  const HighPrecisionPF hp = high_precision_pf(s, prec);
  const BigReal w = omega.evaluate(prec);

  std::vector<BigReal> x;
  for (int a = 0; a < m; ++a) {
    x.emplace_back(prec);
    mpfr_mul(x.back().get(), w.get(), hp.s[a].get(), MPFR_RNDN);
  }
  CocycleProduct p;
  p.n = n;
  p.norm = norm;
  p.rescaled = CMatrix::identity(m);
  std::vector<double> xi(m);
  for (std::size_t k = 0; k < n; ++k) {
    for (int a = 0; a < m; ++a) {
      xi[a] = x[a].frac().to_double();
      if (xi[a] >= 1.0) xi[a] = 0.0;
      mpfr_mul(x[a].get(), x[a].get(), hp.theta.get(), MPFR_RNDN);
    }
    const TorusPoint point(xi);
    if (k == 0) p.xi0 = point;
    p.rescaled = fourier_matrix(zeta, point) * p.rescaled;
    const int e = binary_exponent(cocycle_norm(p.rescaled, norm));
    scale_pow2(p.rescaled, -e);
    p.exponent += e;
  }
  return p;
}

IntMatrix fourier_matrix_at_zero(const Substitution& zeta) {
  const int m = zeta.alphabet_size();
  IntMatrix out(m);
  for (int b = 1; b <= m; ++b)
    for (Letter c : zeta.image(b)) out(b - 1, c - 1) += 1;
  return out;
}

IntMatrix cocycle_at_zero_exact(const DirectiveSequence& a, std::size_t n) {
  IntMatrix p = IntMatrix::identity(a.alphabet_size());
  for (std::size_t k = 1; k <= n; ++k) p = checked_product(fourier_matrix_at_zero(a.term(k)), p);
  return p;
}

}  // namespace speccoc
