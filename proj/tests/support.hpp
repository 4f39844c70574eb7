#pragma once
// Independent reference implementations used as test oracles. They are
// written directly from the definitions (loops over letters and positions)
// and share no code paths with the library beyond the data types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "speccoc/matrix.hpp"
#include "speccoc/rng.hpp"
#include "speccoc/substitution.hpp"

namespace oracle {

using speccoc::Complex;
using speccoc::Word;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline speccoc::Substitution random_substitution(speccoc::Rng& rng, int m, int max_len) {
  // Every letter appears somewhere (letter a is placed in image a).
  std::vector<Word> images(static_cast<std::size_t>(m));
  for (int b = 1; b <= m; ++b) {
    const auto len = static_cast<int>(rng.integer(1, max_len));
    Word w;
    for (int k = 0; k < len; ++k) w.push_back(static_cast<int>(rng.integer(1, m)));
    w[static_cast<std::size_t>(rng.integer(0, len - 1))] = b;
    images[static_cast<std::size_t>(b - 1)] = w;
  }
  return speccoc::Substitution(m, images);
}

// counts[i][j] = number of letter i+1 in image of j+1.
inline std::vector<std::vector<std::int64_t>> count_matrix(const speccoc::Substitution& z) {
  const int m = z.alphabet_size();
  std::vector<std::vector<std::int64_t>> c(m, std::vector<std::int64_t>(m, 0));
  for (int j = 1; j <= m; ++j)
    for (int x : z.image(j)) ++c[x - 1][j - 1];
  return c;
}

inline std::vector<std::vector<std::int64_t>> int_product(const std::vector<std::vector<std::int64_t>>& a,
                                                          const std::vector<std::vector<std::int64_t>>& b) {
  const auto m = a.size();
  std::vector<std::vector<std::int64_t>> r(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][k] * b[k][j];
  return r;
}

// Entry (b, c): walk zeta(b), accumulating xi of the letters already passed.
inline std::vector<std::vector<Complex>> fourier(const speccoc::Substitution& z, const std::vector<double>& xi) {
  const int m = z.alphabet_size();
  std::vector<std::vector<Complex>> r(m, std::vector<Complex>(m, 0.0));
  for (int b = 1; b <= m; ++b) {
    double phase = 0.0;
    for (int c : z.image(b)) {
      r[b - 1][c - 1] += std::polar(1.0, -kTwoPi * phase);
      phase += xi[c - 1];
    }
  }
  return r;
}

inline std::vector<std::vector<Complex>> cproduct(const std::vector<std::vector<Complex>>& a,
                                                  const std::vector<std::vector<Complex>>& b) {
  const auto m = a.size();
  std::vector<std::vector<Complex>> r(m, std::vector<Complex>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][k] * b[k][j];
  return r;
}

// S^t xi mod 1, in doubles (short orbits only).
inline std::vector<double> torus_step(const speccoc::Substitution& z, const std::vector<double>& xi) {
  const auto c = count_matrix(z);
  const auto m = xi.size();
  std::vector<double> r(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += static_cast<double>(c[i][j]) * xi[i];
    r[j] = acc - std::floor(acc);
  }
  return r;
}

// Direct twisted sum with phases including the current letter.
inline Complex twisted(const Word& v, const std::vector<Complex>& phi, const std::vector<double>& s, double omega) {
  // omega * length in long double, kept mod 1; a plain running length loses
  // ~1e-9 of phase per term on words of 10^4 letters.
  Complex acc = 0.0;
  long double turns = 0.0L;
  for (int x : v) {
    turns += static_cast<long double>(omega) * static_cast<long double>(s[x - 1]);
    turns -= std::floor(turns);
    acc += phi[x - 1] * std::polar(1.0, -kTwoPi * static_cast<double>(turns));
  }
  return acc;
}

inline double max_entry_diff(const speccoc::CMatrix& a, const std::vector<std::vector<Complex>>& b) {
  double worst = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - b[i][j]));
  return worst;
}

}  // namespace oracle
