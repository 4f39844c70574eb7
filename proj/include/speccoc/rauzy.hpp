#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "speccoc/matrix.hpp"
#include "speccoc/rng.hpp"
#include "speccoc/sadic.hpp"
#include "speccoc/substitution.hpp"

namespace speccoc {

// pi(i) is the position of the top interval I_i after the exchange.
class Permutation {
 public:
  Permutation() = default;
  // values[i - 1] = pi(i); must be a bijection of {1..m}, m >= 2.
  explicit Permutation(std::vector<int> values);

  int size() const noexcept { return static_cast<int>(pi_.size()); }
  int operator()(int i) const { return pi_[static_cast<std::size_t>(i - 1)]; }
  int inverse(int j) const;
  // pi{1..k} != {1..k} for every k < m.
  bool irreducible() const;
  const std::vector<int>& values() const noexcept { return pi_; }
  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> pi_;
};

struct IETState {
  std::vector<double> lambda;  // > 0
  Permutation pi;              // irreducible

  IETState() = default;
  IETState(std::vector<double> lambda, Permutation pi);
  int size() const noexcept { return pi.size(); }
  double total() const;
};

// 1-based index of the top interval containing x in [0, |lambda|).
int interval_of(const IETState& s, double x);
// x + sum_{pi(j) < pi(i)} lambda_j - sum_{j < i} lambda_j for x in I_i.
double iet_apply(const IETState& s, double x);

enum class MoveType { a, b };
char move_letter(MoveType t);

// Relative gap below which lambda_m and lambda_{pi^-1(m)} count as a draw,
// and below which a warning is raised.
inline constexpr double kDrawTolerance = 1e-14;
inline constexpr double kNearDrawTolerance = 1e-12;

struct RauzyMove {
  MoveType type = MoveType::a;
  IETState new_state;               // lengths rescaled by `scale`
  std::vector<double> lambda_raw;   // induced lengths in the input's scale
  double scale = 1.0;               // power of two; new_state.lambda = scale * lambda_raw
  Substitution substitution;        // floors bottom to top = image left to right
  SubMatrix matrix;                 // lambda = matrix * lambda_raw
  bool near_draw = false;
};

// The lambda-independent parts of a move.
Permutation rauzy_permutation(const Permutation& pi, MoveType t);
Substitution rauzy_substitution(const Permutation& pi, MoveType t);

// Type a iff lambda_m < lambda_{pi^-1(m)}. Throws on a draw.
RauzyMove rauzy_step(const IETState& s);

struct ZorichMove {
  RauzyMove composite;  // substitution zeta_1 o ... o zeta_count, matrix the product
  std::size_t count = 0;
};
// Consecutive moves of one type, stopping before the first switch.
ZorichMove zorich_step(const IETState& s, std::size_t cap = 1'000'000);

struct RauzyGraph {
  struct Edge {
    int from = 0;
    int to = 0;
    MoveType type = MoveType::a;
  };
  std::vector<Permutation> vertices;  // BFS order from the seed
  std::vector<Edge> edges;
  int index_of(const Permutation& p) const;  // -1 when absent
};
RauzyGraph rauzy_class(const Permutation& pi);

enum class Acceleration { none, zorich };

struct InductionRecord {
  MoveType type = MoveType::a;
  std::size_t count = 1;  // Rauzy moves folded into this term
  bool near_draw = false;
};

// Directive sequence emitted by induction from `state`. The first n terms
// are generated eagerly (draws surface here); later terms are produced on
// demand. `records`, when given, receives the first n records.
DirectiveSequence directive_from_iet(const IETState& state, std::size_t n, Acceleration accel,
                                     std::vector<InductionRecord>* records = nullptr);

// A(a, n) = S^t_{zeta_n} ... S^t_{zeta_1}, exact.
IntMatrix rauzy_veech_cocycle(const DirectiveSequence& a, std::size_t n);

struct TowerReport {
  bool ok = true;
  std::string failure;
  std::size_t points = 0;
};
// Samples points of every induced interval J_i and follows the original IET:
// f^k(x) must lie in I_{n(i,k)} for k < r_i, stay outside J for 0 < k < r_i,
// and f^{r_i}(x) must equal the induced map. Also checks that exactly one
// return time equals 2.
TowerReport verify_tower(const IETState& before, const RauzyMove& move, std::size_t samples_per_interval,
                         Rng& rng, double slack = 1e-12);

// Irreducible permutation (rejection sampling) and lengths uniform on the simplex.
IETState random_iet_state(int m, Rng& rng);

}  // namespace speccoc
