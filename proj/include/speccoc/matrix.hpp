#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace speccoc {

using Complex = std::complex<double>;

// Square row-major matrix. Dimensions here are alphabet sizes, so a flat
// std::vector is all the storage machinery we need.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int m, T fill = T{}) : m_(m), data_(static_cast<std::size_t>(m) * m, fill) {}

  static Matrix identity(int m) {
    Matrix r(m);
    for (int i = 0; i < m; ++i) r(i, i) = T{1};
    return r;
  }

  int dim() const noexcept { return m_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * m_ + j]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * m_ + j]; }

  std::span<const T> data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix r(m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int m_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<std::int64_t>;
using RealMatrix = Matrix<double>;
using CMatrix = Matrix<Complex>;
using CVector = std::vector<Complex>;

// Plain product, k-ascending summation. lambda_hat and the cocycle at xi = 0
// rely on both orientations using the same summation order.
template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  const int m = a.dim();
  Matrix<T> r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      T acc{};
      for (int k = 0; k < m; ++k) acc += a(i, k) * b(k, j);
      r(i, j) = acc;
    }
  return r;
}

template <class T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& v) {
  const int m = a.dim();
  std::vector<T> r(m);
  for (int i = 0; i < m; ++i) {
    T acc{};
    for (int k = 0; k < m; ++k) acc += a(i, k) * v[k];
    r[i] = acc;
  }
  return r;
}

// Integer product that throws ErrorKind::numerical on int64 overflow.
IntMatrix checked_product(const IntMatrix& a, const IntMatrix& b);

// Exact determinant (fraction-free Bareiss elimination in 128-bit).
std::int64_t exact_determinant(const IntMatrix& a);

RealMatrix to_real(const IntMatrix& a);
CMatrix to_complex(const IntMatrix& a);

// Maximal absolute column sum.
double column_sum_norm(const CMatrix& a);
double column_sum_norm(const RealMatrix& a);
// Maximal absolute row sum.
double row_sum_norm(const CMatrix& a);
double row_sum_norm(const RealMatrix& a);

double vector_norm1(std::span<const Complex> v);

// Determinant by LU with partial pivoting.
Complex determinant(CMatrix a);

// Multiplies every entry by 2^exponent (exact in binary floating point).
void scale_pow2(CMatrix& a, int exponent);
void scale_pow2(RealMatrix& a, int exponent);
void scale_pow2(std::span<Complex> v, int exponent);

// Power-of-two exponent e with norm * 2^-e in [1/2, 1); 0 for a zero norm.
inline int binary_exponent(double norm) {
  if (!(norm > 0.0) || !std::isfinite(norm)) return 0;
  int e = 0;
  std::frexp(norm, &e);
  return e;
}

}  // namespace speccoc
