#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "speccoc/hp.hpp"
#include "speccoc/sadic.hpp"

namespace speccoc {

// x - floor(x) folded into [0, 1); reduce01(reduce01(x)) == reduce01(x).
double reduce01(double x);

// e^{-2 pi i turns}; exact at quarter turns, where exact orbits make the
// true product vanish and a cos/sin residue would fake a growth rate.
Complex unit_phase(double turns);

struct TorusPoint {
  std::vector<double> xi;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);  // reduces every coordinate
  static TorusPoint zero(int m) { return TorusPoint(std::vector<double>(m, 0.0)); }
  int dim() const noexcept { return static_cast<int>(xi.size()); }
};

// S^t xi mod Z^m in double arithmetic.
TorusPoint torus_map(const SubMatrix& s, const TorusPoint& xi);

// G(a, xi) = (sigma a, S^t_{zeta_1} xi mod Z^m).
std::pair<DirectiveSequence, TorusPoint> skew_step(const DirectiveSequence& a, const TorusPoint& xi);

enum class OrbitMode {
  exact,  // B-bit fixed point (GMP), one truncation at the start
  fp64,   // one rounding per step; fine for short orbits only
};

// The base orbit xi_k = S^t_{zeta^[k]} xi_0 mod Z^m, k = 0, 1, ...
//
// In exact mode every coordinate is an integer X in [0, 2^B) standing for
// X / 2^B. Each step multiplies by an integer matrix and reduces mod 2^B, so
// the only error is the initial truncation, amplified by at most the max
// image length per step. B is chosen so ~64 bits survive n steps. This
// matters for expanding endomorphisms: in doubles the Thue-Morse orbit hits
// 0 after about 53 steps.
class TorusOrbit {
 public:
  // Exactly B bits: extra_bits + sum_k ceil(log2 max_b |zeta_k(b)|) over k <= n.
  static std::size_t required_bits(const DirectiveSequence& a, std::size_t n, std::size_t extra_bits = 64);

  // xi0 given at (at least) `bits` precision.
  static TorusOrbit exact(const DirectiveSequence& a, const std::vector<BigReal>& xi0, std::size_t bits);
  // Convenience: evaluates both expressions and sets B = required_bits(a, n).
  static TorusOrbit exact(const DirectiveSequence& a, const std::vector<RealExpr>& xi0, std::size_t n);
  // The doubles' exact binary values.
  static TorusOrbit exact(const DirectiveSequence& a, const std::vector<double>& xi0, std::size_t n);
  static TorusOrbit fp64(const DirectiveSequence& a, const std::vector<double>& xi0);

  OrbitMode mode() const noexcept { return mode_; }
  std::size_t bits() const noexcept { return bits_; }
  // Steps taken so far; point() is xi_{index()}.
  std::size_t index() const noexcept { return k_; }
  const TorusPoint& point() const noexcept { return point_; }
  const DirectiveSequence& sequence() const noexcept { return a_; }

  void advance();

 private:
  TorusOrbit(DirectiveSequence a, OrbitMode mode) : a_(std::move(a)), mode_(mode) {}
  void refresh_point();

  DirectiveSequence a_;
  OrbitMode mode_;
  std::size_t bits_ = 0;
  std::size_t k_ = 0;
  std::vector<mpz_class> fixed_;
  TorusPoint point_;
};

}  // namespace speccoc
