#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "speccoc/substitution.hpp"

namespace speccoc {

// A sequence of substitutions zeta_1, zeta_2, ... over a common alphabet.
// Terms are generated on demand and memoized; copies and shifted views share
// the cache, which is guarded by a mutex (single writer, concurrent readers).
class DirectiveSequence {
 public:
  enum class Kind { periodic, explicit_list, generated };
  // Produces the next term on each call; may throw speccoc::Error.
  using Generator = std::function<Substitution()>;

  static DirectiveSequence periodic(std::vector<Substitution> period);
  static DirectiveSequence explicit_list(std::vector<Substitution> terms);
  static DirectiveSequence generated(int m, Generator gen, std::string description);

  // 1-based. Explicit sequences throw past their end.
  const Substitution& term(std::size_t n) const;
  const SubMatrix& matrix(std::size_t n) const;

  // sigma^k a.
  DirectiveSequence shifted(std::size_t k) const;
  std::size_t offset() const noexcept { return offset_; }

  int alphabet_size() const;
  Kind kind() const;
  std::string description() const;
  // Number of available terms for explicit sequences.
  std::optional<std::size_t> size() const;

  // Recognizability is never verified, only recorded.
  bool recognizability_asserted() const noexcept { return recognizable_; }
  void set_recognizability_asserted(bool v) noexcept { recognizable_ = v; }

 private:
  struct Source;
  explicit DirectiveSequence(std::shared_ptr<Source> src) : src_(std::move(src)) {}

  std::shared_ptr<Source> src_;
  std::size_t offset_ = 0;
  bool recognizable_ = false;
};

// zeta^[n] = zeta_1 o ... o zeta_n together with S^[n] = S_1 ... S_n.
struct Telescope {
  std::size_t n = 0;
  Substitution zeta;
  SubMatrix matrix;
};

Telescope telescope(const DirectiveSequence& a, std::size_t n, std::size_t cap = kDefaultLengthCap);
// One more composition: telescope(n) -> telescope(n + 1).
Telescope extend(const Telescope& t, const DirectiveSequence& a, std::size_t cap = kDefaultLengthCap);

// (1/n) log ||S^[n]||_1, from a power-of-two rescaled floating product.
double lambda_hat(const DirectiveSequence& a, std::size_t n);

// Does the block q occur inside zeta_{floor(n(1-eps))+1} ... zeta_n?
bool check_A1prime(const DirectiveSequence& a, const std::vector<Substitution>& q, std::size_t n,
                   double eps);

// (1/n) log(1 + ||S_n||_1).
double check_A3(const DirectiveSequence& a, std::size_t n);

struct MeasureVector {
  std::size_t level = 0;
  std::vector<double> mu;          // normalized so that ||S^[n] mu||_1 = 1
  double consistency_residual = 0; // ||mu_n - S_{n+1} mu_{n+1}||_1
};

// mu_n proportional to S_{n+1} ... S_{n+depth} (1,...,1)^t. Throws
// ErrorKind::numerical when that block product is not strictly positive.
MeasureVector measure_vectors(const DirectiveSequence& a, std::size_t n, std::size_t depth = 40);

// zeta^[n](b).
Word expand(const DirectiveSequence& a, std::size_t n, Letter b, std::size_t cap = kDefaultLengthCap);

// Lengths |zeta^[j](c)| for j = 0..n (row j, column c-1).
std::vector<std::vector<std::int64_t>> image_lengths(const DirectiveSequence& a, std::size_t n);

// Prefix of zeta^[n](b) of length k written as
//   zeta^[n](v_n) zeta^[n-1](v_{n-1}) ... zeta_1(v_1) v_0,
// v_j a proper prefix of zeta_{j+1}(anchor_j) for j < n, and v_n either empty
// or the single letter b (the whole word).
struct PrefixSuffixPath {
  std::size_t depth = 0;
  Letter anchor = 0;
  std::size_t length = 0;
  std::vector<Word> v;          // v[j], j = 0..depth
  std::vector<Letter> anchors;  // anchors[j] for j < depth
};

PrefixSuffixPath prefix_path(const DirectiveSequence& a, std::size_t n, Letter b, std::size_t k);
Word reassemble(const DirectiveSequence& a, const PrefixSuffixPath& path,
                std::size_t cap = kDefaultLengthCap);

// min_b |zeta^[n](b)| <= N <= 2 max_b |zeta^[n+1](b)|.
bool check_Ncond(const DirectiveSequence& a, std::size_t n, std::int64_t N);

}  // namespace speccoc
