#include "speccoc/substitution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "speccoc/error.hpp"

namespace speccoc {

SubMatrix::SubMatrix(IntMatrix entries) : entries_(std::move(entries)) {
  for (auto x : entries_.data())
    if (x < 0) fail(ErrorKind::precondition, "substitution matrix has a negative entry");
}

std::int64_t SubMatrix::column_sum(int j) const {
  std::int64_t s = 0;
  for (int i = 0; i < dim(); ++i) s += entries_(i, j);
  return s;
}

std::int64_t SubMatrix::norm1() const {
  std::int64_t best = 0;
  for (int j = 0; j < dim(); ++j) best = std::max(best, column_sum(j));
  return best;
}

Substitution::Substitution(int m, std::vector<Word> images) : m_(m), images_(std::move(images)) {
  if (m_ < 2) fail(ErrorKind::precondition, "alphabet must have at least two letters");
  if (static_cast<int>(images_.size()) != m_)
    fail(ErrorKind::precondition, "substitution needs exactly one image per letter");
  for (int b = 1; b <= m_; ++b) {
    const Word& w = images_[b - 1];
    if (w.empty()) fail(ErrorKind::precondition, "image of letter " + std::to_string(b) + " is empty");
    for (Letter c : w)
      if (c < 1 || c > m_)
        fail(ErrorKind::precondition, "letter " + std::to_string(c) + " outside alphabet {1.." +
                                          std::to_string(m_) + "}");
  }
}

Substitution Substitution::identity(int m) {
  std::vector<Word> images;
  for (int b = 1; b <= m; ++b) images.push_back({b});
  return Substitution(m, std::move(images));
}

namespace {

int parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    fail(ErrorKind::schema, "not an integer: '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Substitution Substitution::parse(std::string_view text) {
  std::vector<std::pair<int, Word>> rules;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view rule = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (rule.empty()) continue;
    const auto colon = rule.find(':');
    if (colon == std::string_view::npos)
      fail(ErrorKind::schema, "substitution rule without ':' in '" + std::string(rule) + "'");
    const int letter = parse_int(trim(rule.substr(0, colon)));
    std::string_view body = trim(rule.substr(colon + 1));
    Word w;
    if (body.find(',') != std::string_view::npos) {
      std::size_t q = 0;
      while (q <= body.size()) {
        std::size_t e = body.find(',', q);
        if (e == std::string_view::npos) e = body.size();
        w.push_back(parse_int(trim(body.substr(q, e - q))));
        q = e + 1;
      }
    } else {
      for (char ch : body) {
        if (ch < '0' || ch > '9') fail(ErrorKind::schema, "bad letter '" + std::string(1, ch) + "'");
        w.push_back(ch - '0');
      }
    }
    rules.emplace_back(letter, std::move(w));
  }
  const int m = static_cast<int>(rules.size());
  std::vector<Word> images(m);
  std::vector<bool> seen(m, false);
  for (auto& [letter, w] : rules) {
    if (letter < 1 || letter > m || seen[letter - 1])
      fail(ErrorKind::schema, "rules must define letters 1.." + std::to_string(m) + " once each");
    seen[letter - 1] = true;
    images[letter - 1] = std::move(w);
  }
  return Substitution(m, std::move(images));
}

Substitution Substitution::from_json(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
    const int m = doc.at("m").get<int>();
    auto images = doc.at("images").get<std::vector<Word>>();
    return Substitution(m, std::move(images));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::schema, std::string("substitution JSON: ") + e.what());
  }
}

std::size_t Substitution::max_image_length() const {
  std::size_t best = 0;
  for (const auto& w : images_) best = std::max(best, w.size());
  return best;
}

Word Substitution::apply(const Word& w, std::size_t cap) const {
  std::size_t len = 0;
  for (Letter c : w) len += image(c).size();
  if (len > cap)
    fail(ErrorKind::precondition,
         "word length " + std::to_string(len) + " exceeds cap " + std::to_string(cap));
  Word out;
  out.reserve(len);
  for (Letter c : w) {
    const Word& im = image(c);
    out.insert(out.end(), im.begin(), im.end());
  }
  return out;
}

bool Substitution::in_class_A() const {
  std::vector<bool> seen(m_, false);
  bool long_image = false;
  for (const auto& w : images_) {
    long_image = long_image || w.size() > 1;
    for (Letter c : w) seen[c - 1] = true;
  }
  return long_image && std::all_of(seen.begin(), seen.end(), [](bool x) { return x; });
}

std::string word_to_string(const Word& w) {
  const bool wide = std::any_of(w.begin(), w.end(), [](Letter c) { return c > 9; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (wide && i > 0) out += ',';
    out += std::to_string(w[i]);
  }
  return out;
}

std::string Substitution::to_string() const {
  std::string out;
  for (int b = 1; b <= m_; ++b) {
    if (b > 1) out += ';';
    out += std::to_string(b) + ':' + word_to_string(image(b));
  }
  return out;
}

std::string Substitution::to_json() const {
  nlohmann::json doc{{"m", m_}, {"images", images_}};
  return doc.dump();
}

SubMatrix substitution_matrix(const Substitution& zeta) {
  const int m = zeta.alphabet_size();
  IntMatrix s(m);
  for (int j = 1; j <= m; ++j)
    for (Letter i : zeta.image(j)) s(i - 1, j - 1) += 1;
  return SubMatrix(std::move(s));
}

Substitution compose(const Substitution& zeta1, const Substitution& zeta2, std::size_t cap) {
  if (zeta1.alphabet_size() != zeta2.alphabet_size())
    fail(ErrorKind::precondition, "cannot compose substitutions over different alphabets");
  std::vector<Word> images;
  images.reserve(zeta2.alphabet_size());
  for (int a = 1; a <= zeta2.alphabet_size(); ++a) images.push_back(zeta1.apply(zeta2.image(a), cap));
  return Substitution(zeta1.alphabet_size(), std::move(images));
}

std::vector<std::int64_t> population_vector(const Word& v, int m) {
  std::vector<std::int64_t> counts(m, 0);
  for (Letter c : v) {
    if (c < 1 || c > m) fail(ErrorKind::precondition, "letter outside alphabet");
    ++counts[c - 1];
  }
  return counts;
}

double tiling_length(const Word& v, std::span<const double> s) {
  for (double x : s)
    if (!(x > 0.0)) fail(ErrorKind::precondition, "roof vector entries must be positive");
  double len = 0.0;
  for (Letter c : v) len += s[c - 1];
  return len;
}

namespace {

std::vector<double> power_iterate(const RealMatrix& a, double tol, int max_iter, double& theta,
                                  int& iters) {
  const int m = a.dim();
  std::vector<double> v(m, 1.0 / m);
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> w = a * v;
    const double norm = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(norm > 0.0)) fail(ErrorKind::numerical, "power iteration collapsed to zero");
    double diff = 0.0;
    for (int i = 0; i < m; ++i) {
      w[i] /= norm;
      diff += std::abs(w[i] - v[i]);
    }
    v = std::move(w);
    theta = norm;
    if (diff <= tol) {
      iters = it;
      return v;
    }
  }
  fail(ErrorKind::numerical,
       "power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

}  // namespace

PFData perron_frobenius(const SubMatrix& s, double tol, int max_iter) {
  if (!is_primitive(s))
    fail(ErrorKind::precondition, "Perron-Frobenius data requested for a non-primitive matrix");
  PFData pf;
  const RealMatrix a = to_real(s.entries());
  int it_right = 0, it_left = 0;
  double theta_left = 0.0;
  pf.right_vec = power_iterate(a, tol, max_iter, pf.theta1, it_right);
  pf.left_vec = power_iterate(a.transpose(), tol, max_iter, theta_left, it_left);
  pf.iterations = std::max(it_right, it_left);
  return pf;
}

bool is_primitive(const SubMatrix& s, int max_power) {
  const int m = s.dim();
  if (max_power <= 0) max_power = m * m - 2 * m + 2;
  Matrix<std::uint8_t> pattern(m), power(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) pattern(i, j) = power(i, j) = s(i, j) > 0;
  for (int k = 1; k <= max_power; ++k) {
    bool positive = true;
    for (auto x : power.data()) positive = positive && x;
    if (positive) return true;
    Matrix<std::uint8_t> next(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::uint8_t any = 0;
        for (int l = 0; l < m && !any; ++l) any = power(i, l) && pattern(l, j);
        next(i, j) = any;
      }
    power = std::move(next);
  }
  return false;
}

bool is_primitive(const Substitution& zeta, int max_power) {
  return is_primitive(substitution_matrix(zeta), max_power);
}

}  // namespace speccoc
