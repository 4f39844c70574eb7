#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "speccoc/hp.hpp"
#include "speccoc/matrix.hpp"
#include "speccoc/sadic.hpp"
#include "speccoc/torus.hpp"

namespace speccoc {

// M_zeta(xi)(b, c): sum over the positions j of c in zeta(b) of
// exp(-2 pi i (xi_{u_1} + ... + xi_{u_{j-1}})). M_zeta(0) = S^t.
CMatrix fourier_matrix(const Substitution& zeta, const TorusPoint& xi);

// |det M_zeta(xi)|.
double det_modulus(const Substitution& zeta, const TorusPoint& xi);

enum class CocycleNorm {
  row_sum,     // max absolute row sum; equals ||S^[n]||_1 at xi = 0
  column_sum,  // max absolute column sum
};

double cocycle_norm(const CMatrix& a, CocycleNorm norm);

// M_a(xi, n) = M_{zeta_n}(xi_{n-1}) ... M_{zeta_1}(xi_0), carried as
// rescaled * 2^exponent. Rescaling is by powers of two only (exact), with the
// chosen norm of `rescaled` kept in [1/2, 1).
struct CocycleProduct {
  std::size_t n = 0;
  CMatrix rescaled;
  long exponent = 0;
  TorusPoint xi0;
  CocycleNorm norm = CocycleNorm::row_sum;

  double log_norm_accum() const;
  // (1/n) log ||M_a(xi, n)|| in the product's norm.
  double log_norm_rate() const;
  // Unscaled product; overflows for large n.
  CMatrix true_value() const;
};

// Consumes the orbit from its current position.
CocycleProduct cocycle_product(TorusOrbit orbit, std::size_t n, CocycleNorm norm = CocycleNorm::row_sum);
// Exact orbit from a double start point.
CocycleProduct cocycle_product(const DirectiveSequence& a, const TorusPoint& xi0, std::size_t n,
                               CocycleNorm norm = CocycleNorm::row_sum);

enum class ExponentVariant { matrix_norm, vector, base };

struct ExponentEstimate {
  ExponentVariant variant = ExponentVariant::matrix_norm;
  std::size_t n = 0;
  double chi = 0.0;       // partials[n - 1]
  double tail_max = 0.0;  // max of partials over the last 20% of steps
  std::vector<double> partials;  // partials[k - 1] = (1/k) log ||.||, k = 1..n
  CocycleNorm norm = CocycleNorm::row_sum;
};

struct ChiOptions {
  std::optional<CVector> z;  // vector variant when set
  CocycleNorm norm = CocycleNorm::row_sum;
  double tail_fraction = 0.2;
};

// Pointwise upper exponent estimate along the orbit (consumed from its
// current position). Vector variant: (1/n) log ||M_a(xi, n) z||_1.
ExponentEstimate chi_estimate(TorusOrbit orbit, std::size_t n, const ChiOptions& opts = {});

// lambda_hat with partials, as an ExponentEstimate of variant base.
ExponentEstimate base_exponent(const DirectiveSequence& a, std::size_t n);

// Dominant eigen-data refined in MPFR; s is the PF vector of S^t with unit
// 1-norm.
struct HighPrecisionPF {
  BigReal theta;
  std::vector<BigReal> s;
};
HighPrecisionPF high_precision_pf(const SubMatrix& s, mpfr_prec_t prec);

// Product along xi_k = frac(theta^k omega s), s the PF vector of S^t. Since
// S^t s = theta s this is the torus orbit of omega s; here it is computed by
// scalar scaling in MPFR, independently of TorusOrbit.
CocycleProduct self_similar_product(const Substitution& zeta, const RealExpr& omega, std::size_t n,
                                    CocycleNorm norm = CocycleNorm::row_sum);

// Positions-based integer evaluation of M_zeta(0), independent of
// substitution_matrix, and the exact product M_a(0, n).
IntMatrix fourier_matrix_at_zero(const Substitution& zeta);
IntMatrix cocycle_at_zero_exact(const DirectiveSequence& a, std::size_t n);

}  // namespace speccoc
