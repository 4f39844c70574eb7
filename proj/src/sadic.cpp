#include "speccoc/sadic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <numeric>

#include "speccoc/error.hpp"

namespace speccoc {

struct DirectiveSequence::Source {
  Kind kind;
  int m = 0;
  std::string description;
  Generator generator;

  mutable std::mutex mutex;
  std::deque<Substitution> terms;  // deque: references stay valid on growth
  std::deque<SubMatrix> matrices;
  mutable std::optional<Error> failure;
};

namespace {

int common_alphabet(const std::vector<Substitution>& subs) {
  if (subs.empty()) fail(ErrorKind::precondition, "directive sequence needs at least one substitution");
  const int m = subs.front().alphabet_size();
  for (const auto& z : subs)
    if (z.alphabet_size() != m)
      fail(ErrorKind::precondition, "all substitutions of a directive sequence share one alphabet");
  return m;
}

}  // namespace

DirectiveSequence DirectiveSequence::periodic(std::vector<Substitution> period) {
  auto src = std::make_shared<Source>();
  src->kind = Kind::periodic;
  src->m = common_alphabet(period);
  src->description = "periodic(" + std::to_string(period.size()) + ")";
  for (auto& z : period) {
    src->matrices.push_back(substitution_matrix(z));
    src->terms.push_back(std::move(z));
  }
  return DirectiveSequence(std::move(src));
}

DirectiveSequence DirectiveSequence::explicit_list(std::vector<Substitution> terms) {
  auto src = std::make_shared<Source>();
  src->kind = Kind::explicit_list;
  src->m = common_alphabet(terms);
  src->description = "explicit(" + std::to_string(terms.size()) + ")";
  for (auto& z : terms) {
    src->matrices.push_back(substitution_matrix(z));
    src->terms.push_back(std::move(z));
  }
  return DirectiveSequence(std::move(src));
}

DirectiveSequence DirectiveSequence::generated(int m, Generator gen, std::string description) {
  auto src = std::make_shared<Source>();
  src->kind = Kind::generated;
  src->m = m;
  src->generator = std::move(gen);
  src->description = std::move(description);
  return DirectiveSequence(std::move(src));
}

const Substitution& DirectiveSequence::term(std::size_t n) const {
  if (n == 0) fail(ErrorKind::precondition, "directive terms are 1-based");
  const std::size_t idx = n - 1 + offset_;
  Source& s = *src_;
  switch (s.kind) {
    case Kind::periodic:
      return s.terms[idx % s.terms.size()];
    case Kind::explicit_list:
      if (idx >= s.terms.size())
        fail(ErrorKind::precondition, "explicit directive sequence exhausted at term " +
                                          std::to_string(idx + 1) + " (length " +
                                          std::to_string(s.terms.size()) + ")");
      return s.terms[idx];
    case Kind::generated: {
      std::lock_guard lock(s.mutex);
      while (s.terms.size() <= idx) {
        if (s.failure) throw *s.failure;
        try {
          Substitution z = s.generator();
          if (z.alphabet_size() != s.m)
            fail(ErrorKind::precondition, "generator changed alphabet size");
          s.matrices.push_back(substitution_matrix(z));
          s.terms.push_back(std::move(z));
        } catch (const Error& e) {
          s.failure = e;
          throw;
        }
      }
      return s.terms[idx];
    }
  }
  fail(ErrorKind::precondition, "unknown directive kind");
}

const SubMatrix& DirectiveSequence::matrix(std::size_t n) const {
  term(n);
  const std::size_t idx = n - 1 + offset_;
  Source& s = *src_;
  if (s.kind == Kind::periodic) return s.matrices[idx % s.matrices.size()];
  if (s.kind == Kind::generated) {
    std::lock_guard lock(s.mutex);
    return s.matrices[idx];
  }
  return s.matrices[idx];
}

DirectiveSequence DirectiveSequence::shifted(std::size_t k) const {
  DirectiveSequence r = *this;
  r.offset_ += k;
  return r;
}

int DirectiveSequence::alphabet_size() const { return src_->m; }
DirectiveSequence::Kind DirectiveSequence::kind() const { return src_->kind; }

std::string DirectiveSequence::description() const {
  if (offset_ == 0) return src_->description;
  return "shift^" + std::to_string(offset_) + " " + src_->description;
}

std::optional<std::size_t> DirectiveSequence::size() const {
  if (src_->kind != Kind::explicit_list) return std::nullopt;
  return src_->terms.size() > offset_ ? src_->terms.size() - offset_ : 0;
}

Telescope telescope(const DirectiveSequence& a, std::size_t n, std::size_t cap) {
  if (n == 0) fail(ErrorKind::precondition, "telescope depth must be >= 1");
  Telescope t{1, a.term(1), a.matrix(1)};
  while (t.n < n) t = extend(t, a, cap);
  return t;
}

Telescope extend(const Telescope& t, const DirectiveSequence& a, std::size_t cap) {
  const std::size_t next = t.n + 1;
  return Telescope{next, compose(t.zeta, a.term(next), cap),
                   SubMatrix(checked_product(t.matrix.entries(), a.matrix(next).entries()))};
}

double lambda_hat(const DirectiveSequence& a, std::size_t n) {
  if (n == 0) fail(ErrorKind::precondition, "lambda_hat needs n >= 1");
  const int m = a.alphabet_size();
  RealMatrix p = RealMatrix::identity(m);
  long exponent = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    p = p * to_real(a.matrix(k).entries());
    const int e = binary_exponent(column_sum_norm(p));
    scale_pow2(p, -e);
    exponent += e;
  }
  // ln 2 * (log2 ||P|| / n): exact for powers of two (Thue-Morse gives log 2).
  return std::log(2.0) * ((static_cast<double>(exponent) + std::log2(column_sum_norm(p))) /
                          static_cast<double>(n));
}

namespace {

using Pattern = Matrix<std::uint8_t>;

Pattern positivity(const SubMatrix& s) {
  Pattern p(s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) p(i, j) = s(i, j) > 0;
  return p;
}

Pattern pattern_product(const Pattern& a, const Pattern& b) {
  const int m = a.dim();
  Pattern r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::uint8_t any = 0;
      for (int k = 0; k < m && !any; ++k) any = a(i, k) && b(k, j);
      r(i, j) = any;
    }
  return r;
}

bool all_positive(const Pattern& p) {
  return std::all_of(p.data().begin(), p.data().end(), [](std::uint8_t x) { return x != 0; });
}

}  // namespace

bool check_A1prime(const DirectiveSequence& a, const std::vector<Substitution>& q, std::size_t n,
                   double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::precondition, "eps must lie in (0, 1)");
  if (q.empty()) fail(ErrorKind::precondition, "the block q must be nonempty");
  Pattern block = positivity(substitution_matrix(q.front()));
  for (std::size_t i = 1; i < q.size(); ++i)
    block = pattern_product(block, positivity(substitution_matrix(q[i])));
  if (!all_positive(block)) fail(ErrorKind::precondition, "S_q is not strictly positive");

  const auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - eps))) + 1;
  if (n < q.size()) return false;
  for (std::size_t start = lo; start + q.size() - 1 <= n; ++start) {
    bool match = true;
    for (std::size_t i = 0; i < q.size() && match; ++i) match = a.term(start + i) == q[i];
    if (match) return true;
  }
  return false;
}

double check_A3(const DirectiveSequence& a, std::size_t n) {
  if (n == 0) fail(ErrorKind::precondition, "check_A3 needs n >= 1");
  return std::log1p(static_cast<double>(a.matrix(n).norm1())) / static_cast<double>(n);
}

namespace {

// v <- S v, kept at unit 1-norm; returns the exponent of the discarded scale.
void apply_normalized(const SubMatrix& s, std::vector<double>& v) {
  v = to_real(s.entries()) * v;
  const double norm = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= norm;
}

std::vector<double> measure_at(const DirectiveSequence& a, std::size_t n, std::size_t depth) {
  const int m = a.alphabet_size();
  Pattern block = Pattern::identity(m);
  std::vector<double> v(m, 1.0);
  for (std::size_t k = n + depth; k > n; --k) {
    apply_normalized(a.matrix(k), v);
    block = pattern_product(positivity(a.matrix(k)), block);
  }
  if (!all_positive(block))
    fail(ErrorKind::numerical, "no strictly positive block in S_" + std::to_string(n + 1) +
                                   " ... S_" + std::to_string(n + depth) +
                                   "; cone contraction not certified");
  // Scale so that ||S^[n] mu||_1 = 1, tracking the size of S^[n] v in log2.
  std::vector<double> w = v;
  double log2_norm = 0.0;
  for (std::size_t k = n; k >= 1; --k) {
    w = to_real(a.matrix(k).entries()) * w;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    log2_norm += std::log2(s);
    for (double& x : w) x /= s;
  }
  const double scale = std::exp2(-log2_norm);
  for (double& x : v) x *= scale;
  return v;
}

}  // namespace

MeasureVector measure_vectors(const DirectiveSequence& a, std::size_t n, std::size_t depth) {
  if (depth == 0) fail(ErrorKind::precondition, "measure depth must be >= 1");
  MeasureVector mv;
  mv.level = n;
  mv.mu = measure_at(a, n, depth);
  const std::vector<double> next = measure_at(a, n + 1, depth);
  const std::vector<double> pushed = to_real(a.matrix(n + 1).entries()) * next;
  for (std::size_t i = 0; i < pushed.size(); ++i)
    mv.consistency_residual += std::abs(mv.mu[i] - pushed[i]);
  return mv;
}

Word expand(const DirectiveSequence& a, std::size_t n, Letter b, std::size_t cap) {
  const int m = a.alphabet_size();
  if (b < 1 || b > m) fail(ErrorKind::precondition, "anchor letter outside alphabet");
  Word w{b};
  for (std::size_t k = n; k >= 1; --k) w = a.term(k).apply(w, cap);
  return w;
}

std::vector<std::vector<std::int64_t>> image_lengths(const DirectiveSequence& a, std::size_t n) {
  const int m = a.alphabet_size();
  std::vector<std::vector<std::int64_t>> len(n + 1, std::vector<std::int64_t>(m, 1));
  for (std::size_t j = 1; j <= n; ++j) {
    const Substitution& z = a.term(j);
    for (int c = 1; c <= m; ++c) {
      std::int64_t total = 0;
      for (Letter d : z.image(c))
        if (__builtin_add_overflow(total, len[j - 1][d - 1], &total))
          fail(ErrorKind::numerical, "image length overflows int64");
      len[j][c - 1] = total;
    }
  }
  return len;
}

PrefixSuffixPath prefix_path(const DirectiveSequence& a, std::size_t n, Letter b, std::size_t k) {
  const int m = a.alphabet_size();
  if (b < 1 || b > m) fail(ErrorKind::precondition, "anchor letter outside alphabet");
  const auto len = image_lengths(a, n);
  const auto total = static_cast<std::size_t>(len[n][b - 1]);
  if (k > total)
    fail(ErrorKind::precondition,
         "prefix length " + std::to_string(k) + " exceeds |zeta^[n](b)| = " + std::to_string(total));

  PrefixSuffixPath path;
  path.depth = n;
  path.anchor = b;
  path.length = k;
  path.v.assign(n + 1, Word{});
  path.anchors.assign(n, 0);
  if (k == total) {
    path.v[n] = Word{b};
    return path;
  }
  Letter cur = b;
  auto rest = static_cast<std::int64_t>(k);
  for (std::size_t j = n; j >= 1; --j) {
    const Word& image = a.term(j).image(cur);
    path.anchors[j - 1] = cur;
    std::size_t t = 0;
    while (t < image.size() && len[j - 1][image[t] - 1] <= rest) {
      rest -= len[j - 1][image[t] - 1];
      ++t;
    }
    path.v[j - 1].assign(image.begin(), image.begin() + static_cast<std::ptrdiff_t>(t));
    if (t == image.size()) break;  // only reachable when rest was the full length
    cur = image[t];
  }
  return path;
}

Word reassemble(const DirectiveSequence& a, const PrefixSuffixPath& path, std::size_t cap) {
  Word out;
  for (std::size_t j = path.depth + 1; j-- > 0;) {
    Word piece = path.v[j];
    for (std::size_t k = j; k >= 1; --k) piece = a.term(k).apply(piece, cap);
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return out;
}

bool check_Ncond(const DirectiveSequence& a, std::size_t n, std::int64_t N) {
  const auto len = image_lengths(a, n + 1);
  const auto lo = *std::min_element(len[n].begin(), len[n].end());
  const auto hi = *std::max_element(len[n + 1].begin(), len[n + 1].end());
  return lo <= N && N <= 2 * hi;
}

}  // namespace speccoc
