#include "speccoc/matrix.hpp"

#include <algorithm>
#include <utility>

#include "speccoc/error.hpp"

namespace speccoc {

IntMatrix checked_product(const IntMatrix& a, const IntMatrix& b) {
  const int m = a.dim();
  IntMatrix r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::int64_t acc = 0;
      for (int k = 0; k < m; ++k) {
        std::int64_t term = 0;
        if (__builtin_mul_overflow(a(i, k), b(k, j), &term) ||
            __builtin_add_overflow(acc, term, &acc))
          fail(ErrorKind::numerical, "integer matrix product overflows int64");
      }
      r(i, j) = acc;
    }
  return r;
}

__extension__ using i128 = __int128;

std::int64_t exact_determinant(const IntMatrix& a) {
  const int m = a.dim();
  std::vector<i128> w(a.data().begin(), a.data().end());
  auto at = [&](int i, int j) -> i128& { return w[static_cast<std::size_t>(i) * m + j]; };
  i128 prev = 1;
  int sign = 1;
  for (int k = 0; k < m - 1; ++k) {
    if (at(k, k) == 0) {
      int p = k + 1;
      while (p < m && at(p, k) == 0) ++p;
      if (p == m) return 0;
      for (int j = 0; j < m; ++j) std::swap(at(k, j), at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < m; ++i)
      for (int j = k + 1; j < m; ++j)
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return static_cast<std::int64_t>(sign * at(m - 1, m - 1));
}

RealMatrix to_real(const IntMatrix& a) {
  RealMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) r(i, j) = static_cast<double>(a(i, j));
  return r;
}

CMatrix to_complex(const IntMatrix& a) {
  CMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) r(i, j) = Complex(static_cast<double>(a(i, j)), 0.0);
  return r;
}

namespace {

template <class M>
double col_norm(const M& a) {
  double best = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

template <class M>
double row_norm(const M& a) {
  double best = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.dim(); ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

double column_sum_norm(const CMatrix& a) { return col_norm(a); }
double column_sum_norm(const RealMatrix& a) { return col_norm(a); }
double row_sum_norm(const CMatrix& a) { return row_norm(a); }
double row_sum_norm(const RealMatrix& a) { return row_norm(a); }

double vector_norm1(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::abs(x);
  return s;
}

Complex determinant(CMatrix a) {
  const int m = a.dim();
  Complex det(1.0, 0.0);
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int i = k + 1; i < m; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) == 0.0) return Complex(0.0, 0.0);
    if (piv != k) {
      for (int j = 0; j < m; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < m; ++i) {
      const Complex f = a(i, k) / a(k, k);
      for (int j = k; j < m; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

void scale_pow2(CMatrix& a, int exponent) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      auto& z = a(i, j);
      z = Complex(std::ldexp(z.real(), exponent), std::ldexp(z.imag(), exponent));
    }
}

void scale_pow2(RealMatrix& a, int exponent) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) a(i, j) = std::ldexp(a(i, j), exponent);
}

void scale_pow2(std::span<Complex> v, int exponent) {
  for (auto& z : v) z = Complex(std::ldexp(z.real(), exponent), std::ldexp(z.imag(), exponent));
}

}  // namespace speccoc
