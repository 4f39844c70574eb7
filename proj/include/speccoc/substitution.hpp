#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "speccoc/matrix.hpp"

namespace speccoc {

// Letters are 1-based indices into the alphabet {1, ..., m}.
using Letter = int;
using Word = std::vector<Letter>;

// Cap on the length of any word produced by composition or expansion.
inline constexpr std::size_t kDefaultLengthCap = 10'000'000;

// Substitution matrix: S(i, j) counts letter i in the image of j.
class SubMatrix {
 public:
  SubMatrix() = default;
  explicit SubMatrix(IntMatrix entries);

  int dim() const noexcept { return entries_.dim(); }
  std::int64_t operator()(int i, int j) const { return entries_(i, j); }
  const IntMatrix& entries() const noexcept { return entries_; }

  // Column sums (= image lengths), and the 1-norm (= max image length).
  std::int64_t column_sum(int j) const;
  std::int64_t norm1() const;

  friend bool operator==(const SubMatrix&, const SubMatrix&) = default;

 private:
  IntMatrix entries_;
};

class Substitution {
 public:
  Substitution() = default;
  // images[b - 1] is the image of letter b. Every image is nonempty and uses
  // letters of {1..m}; m >= 2.
  Substitution(int m, std::vector<Word> images);

  static Substitution identity(int m);
  // Text form "1:121321;2:2231;3:31123". Images may be comma separated
  // ("10:1,10,2") when the alphabet has more than nine letters.
  static Substitution parse(std::string_view text);
  // JSON form {"m":3,"images":[[1,2,1,3,2,1],[2,2,3,1],[3,1,1,2,3]]}.
  static Substitution from_json(std::string_view json);

  int alphabet_size() const noexcept { return m_; }
  const Word& image(Letter b) const { return images_[static_cast<std::size_t>(b - 1)]; }
  const std::vector<Word>& images() const noexcept { return images_; }
  std::size_t max_image_length() const;

  // Letterwise application, refusing results longer than `cap`.
  Word apply(const Word& w, std::size_t cap = kDefaultLengthCap) const;

  // Class-A membership: every letter occurs in some image and some image
  // has length > 1. Not enforced on construction.
  bool in_class_A() const;

  std::string to_string() const;
  std::string to_json() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  int m_ = 0;
  std::vector<Word> images_;
};

// Dominant eigen-data of a primitive substitution matrix.
struct PFData {
  double theta1 = 0.0;
  std::vector<double> right_vec;  // S v = theta1 v, ||v||_1 = 1
  std::vector<double> left_vec;   // S^t u = theta1 u, ||u||_1 = 1
  int iterations = 0;
};

SubMatrix substitution_matrix(const Substitution& zeta);

// (zeta1 o zeta2)(a) = zeta1(zeta2(a)).
Substitution compose(const Substitution& zeta1, const Substitution& zeta2,
                     std::size_t cap = kDefaultLengthCap);

std::vector<std::int64_t> population_vector(const Word& v, int m);

double tiling_length(const Word& v, std::span<const double> s);

// Power iteration from the all-ones vector, relative tolerance 1e-12.
PFData perron_frobenius(const SubMatrix& s, double tol = 1e-12, int max_iter = 100'000);

// Wielandt bound m^2 - 2m + 2 when max_power <= 0.
bool is_primitive(const SubMatrix& s, int max_power = 0);
bool is_primitive(const Substitution& zeta, int max_power = 0);

std::string word_to_string(const Word& w);

}  // namespace speccoc
