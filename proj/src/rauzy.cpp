#include "speccoc/rauzy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <numeric>

#include "speccoc/error.hpp"

namespace speccoc {

Permutation::Permutation(std::vector<int> values) : pi_(std::move(values)) {
  const int m = size();
  if (m < 2) fail(ErrorKind::precondition, "permutation needs at least two symbols");
  std::vector<bool> seen(m, false);
  for (int v : pi_) {
    if (v < 1 || v > m || seen[v - 1])
      fail(ErrorKind::precondition, "not a permutation of {1.." + std::to_string(m) + "}");
    seen[v - 1] = true;
  }
}

int Permutation::inverse(int j) const {
  const auto it = std::find(pi_.begin(), pi_.end(), j);
  if (it == pi_.end()) fail(ErrorKind::precondition, "value outside permutation range");
  return static_cast<int>(it - pi_.begin()) + 1;
}

bool Permutation::irreducible() const {
  int hi = 0;
  for (int k = 1; k < size(); ++k) {
    hi = std::max(hi, pi_[k - 1]);
    if (hi == k) return false;
  }
  return true;
}

std::string Permutation::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < pi_.size(); ++i) out += (i ? "," : "") + std::to_string(pi_[i]);
  return out + ")";
}

IETState::IETState(std::vector<double> lengths, Permutation p) : lambda(std::move(lengths)), pi(std::move(p)) {
  if (static_cast<int>(lambda.size()) != pi.size())
    fail(ErrorKind::precondition, "length vector and permutation differ in size");
  for (double x : lambda)
    if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::precondition, "IET lengths must be positive");
  if (!pi.irreducible()) fail(ErrorKind::precondition, "permutation " + pi.to_string() + " is reducible");
}

double IETState::total() const { return std::accumulate(lambda.begin(), lambda.end(), 0.0); }

int interval_of(const IETState& s, double x) {
  if (!(x >= 0.0 && x < s.total())) fail(ErrorKind::precondition, "point outside [0, |lambda|)");
  double left = 0.0;
  for (int i = 1; i <= s.size(); ++i) {
    left += s.lambda[i - 1];
    if (x < left) return i;
  }
  return s.size();  // rounding at the right end
}

double iet_apply(const IETState& s, double x) {
  const int i = interval_of(s, x);
  double before_top = 0.0, before_bottom = 0.0;
  for (int j = 1; j <= s.size(); ++j) {
    if (j < i) before_top += s.lambda[j - 1];
    if (s.pi(j) < s.pi(i)) before_bottom += s.lambda[j - 1];
  }
  return x + before_bottom - before_top;
}

char move_letter(MoveType t) { return t == MoveType::a ? 'a' : 'b'; }

Permutation rauzy_permutation(const Permutation& pi, MoveType t) {
  const int m = pi.size();
  const int k = pi.inverse(m);
  std::vector<int> out(m);
  if (t == MoveType::a) {
    for (int i = 1; i <= m; ++i) {
      if (i <= k) out[i - 1] = pi(i);
      else if (i == k + 1) out[i - 1] = pi(m);
      else out[i - 1] = pi(i - 1);
    }
  } else {
    const int pm = pi(m);
    for (int j = 1; j <= m; ++j) {
      if (j == m) out[j - 1] = pm;
      else if (j == k) out[j - 1] = pm + 1;
      else out[j - 1] = pi(j) <= pm ? pi(j) : pi(j) + 1;
    }
  }
  return Permutation(std::move(out));
}

Substitution rauzy_substitution(const Permutation& pi, MoveType t) {
  const int m = pi.size();
  const int k = pi.inverse(m);
  std::vector<Word> images(m);
  for (int i = 1; i <= m; ++i) {
    if (t == MoveType::a) {
      if (i <= k) images[i - 1] = {i};
      else if (i == k + 1) images[i - 1] = {k, m};
      else images[i - 1] = {i - 1};
    } else {
      images[i - 1] = i == k ? Word{k, m} : Word{i};
    }
  }
  return Substitution(m, std::move(images));
}

RauzyMove rauzy_step(const IETState& s) {
  const int m = s.size();
  const int k = s.pi.inverse(m);
  const double lm = s.lambda[m - 1], lk = s.lambda[k - 1];
  const double gap = std::abs(lm - lk) / std::max(lm, lk);
  if (gap <= kDrawTolerance)
    fail(ErrorKind::precondition, "Rauzy-Veech draw: lambda_" + std::to_string(m) + " = lambda_" +
                                      std::to_string(k) + " (induction undefined)");
  RauzyMove mv;
  mv.type = lm < lk ? MoveType::a : MoveType::b;
  mv.near_draw = gap < kNearDrawTolerance;

  std::vector<double> raw(m);
  if (mv.type == MoveType::a) {
    for (int i = 1; i <= m; ++i) {
      if (i < k) raw[i - 1] = s.lambda[i - 1];
      else if (i == k) raw[i - 1] = lk - lm;
      else if (i == k + 1) raw[i - 1] = lm;
      else raw[i - 1] = s.lambda[i - 2];
    }
  } else {
    raw = s.lambda;
    raw[m - 1] = lm - lk;
  }
  // Power-of-two renormalization keeps sums in [1/2, 1) and never rounds.
  const int e = binary_exponent(std::accumulate(raw.begin(), raw.end(), 0.0));
  mv.scale = std::ldexp(1.0, -e);
  std::vector<double> scaled(raw);
  for (double& x : scaled) x = std::ldexp(x, -e);
  mv.lambda_raw = std::move(raw);
  mv.new_state = IETState(std::move(scaled), rauzy_permutation(s.pi, mv.type));
  mv.substitution = rauzy_substitution(s.pi, mv.type);
  mv.matrix = substitution_matrix(mv.substitution);
  return mv;
}

ZorichMove zorich_step(const IETState& s, std::size_t cap) {
  ZorichMove z{rauzy_step(s), 1};
  RauzyMove& c = z.composite;
  for (;;) {
    RauzyMove next;
    try {
      next = rauzy_step(c.new_state);
    } catch (const Error&) {
      break;  // a draw right after the run; the caller meets it on the next step
    }
    if (next.type != c.type) break;
    if (++z.count > cap)
      fail(ErrorKind::numerical, "Zorich run longer than " + std::to_string(cap) + " moves (near-draw?)");
    c.substitution = compose(c.substitution, next.substitution);
    c.matrix = SubMatrix(checked_product(c.matrix.entries(), next.matrix.entries()));
    for (std::size_t i = 0; i < next.lambda_raw.size(); ++i) c.lambda_raw[i] = next.lambda_raw[i] / c.scale;
    c.scale *= next.scale;
    c.new_state = std::move(next.new_state);
    c.near_draw = c.near_draw || next.near_draw;
  }
  return z;
}

int RauzyGraph::index_of(const Permutation& p) const {
  const auto it = std::find(vertices.begin(), vertices.end(), p);
  return it == vertices.end() ? -1 : static_cast<int>(it - vertices.begin());
}

RauzyGraph rauzy_class(const Permutation& pi) {
  if (!pi.irreducible()) fail(ErrorKind::precondition, "permutation " + pi.to_string() + " is reducible");
  RauzyGraph g;
  std::map<Permutation, int> index;
  std::deque<int> queue;
  index.emplace(pi, 0);
  g.vertices.push_back(pi);
  queue.push_back(0);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (MoveType t : {MoveType::a, MoveType::b}) {
      Permutation w = rauzy_permutation(g.vertices[v], t);
      auto [it, fresh] = index.emplace(w, static_cast<int>(g.vertices.size()));
      if (fresh) {
        g.vertices.push_back(std::move(w));
        queue.push_back(it->second);
      }
      g.edges.push_back({v, it->second, t});
    }
  }
  return g;
}

namespace {

struct Induction {
  IETState state;
  Acceleration accel;
  std::vector<InductionRecord> log;

  Substitution next() {
    if (accel == Acceleration::zorich) {
      ZorichMove z = zorich_step(state);
      log.push_back({z.composite.type, z.count, z.composite.near_draw});
      state = z.composite.new_state;
      return z.composite.substitution;
    }
    RauzyMove mv = rauzy_step(state);
    log.push_back({mv.type, 1, mv.near_draw});
    state = mv.new_state;
    return mv.substitution;
  }
};

}  // namespace

DirectiveSequence directive_from_iet(const IETState& state, std::size_t n, Acceleration accel,
                                     std::vector<InductionRecord>* records) {
  auto ind = std::make_shared<Induction>(Induction{state, accel, {}});
  std::string desc = "rauzy(" + state.pi.to_string() + (accel == Acceleration::zorich ? ", zorich)" : ")");
  DirectiveSequence a = DirectiveSequence::generated(state.size(), [ind] { return ind->next(); }, desc);
  if (n > 0) a.term(n);
  if (records) records->assign(ind->log.begin(), ind->log.begin() + static_cast<std::ptrdiff_t>(n));
  return a;
}

IntMatrix rauzy_veech_cocycle(const DirectiveSequence& a, std::size_t n) {
  IntMatrix p = IntMatrix::identity(a.alphabet_size());
  for (std::size_t k = 1; k <= n; ++k) p = checked_product(a.matrix(k).entries().transpose(), p);
  return p;
}

TowerReport verify_tower(const IETState& before, const RauzyMove& move, std::size_t samples, Rng& rng,
                         double slack) {
  TowerReport rep;
  const int m = before.size();
  auto failed = [&](std::string why) {
    rep.ok = false;
    rep.failure = std::move(why);
    return rep;
  };

  int twos = 0;
  for (int i = 1; i <= m; ++i) {
    const auto r = move.substitution.image(i).size();
    if (r == 2) ++twos;
    else if (r != 1) return failed("return time " + std::to_string(r) + " for J_" + std::to_string(i));
  }
  if (twos != 1) return failed(std::to_string(twos) + " return times equal 2 (expected exactly one)");

  // Lengths are reproduced by the abelianized tower: lambda = S lambda'.
  const std::vector<double> back = to_real(move.matrix.entries()) * move.lambda_raw;
  for (int i = 0; i < m; ++i)
    if (std::abs(back[i] - before.lambda[i]) > slack * before.total())
      return failed("lambda != S lambda' at coordinate " + std::to_string(i + 1));

  const IETState induced(move.lambda_raw, move.new_state.pi);
  const double top_j = induced.total();
  std::vector<double> left(m + 1, 0.0), jleft(m + 1, 0.0);
  for (int i = 1; i <= m; ++i) {
    left[i] = left[i - 1] + before.lambda[i - 1];
    jleft[i] = jleft[i - 1] + move.lambda_raw[i - 1];
  }
  const double tol = slack * before.total();
  for (int i = 1; i <= m; ++i) {
    const Word& floors = move.substitution.image(i);
    const double w = move.lambda_raw[i - 1];
    for (std::size_t t = 0; t < samples; ++t) {
      const double x = jleft[i - 1] + w * (0.001 + 0.998 * rng.uniform());
      double y = x;
      for (std::size_t k = 0; k < floors.size(); ++k) {
        const int want = floors[k];
        if (y < left[want - 1] - tol || y > left[want] + tol)
          return failed("f^" + std::to_string(k) + "(x) for x in J_" + std::to_string(i) + " left I_" +
                        std::to_string(want));
        if (k > 0 && y < top_j - tol)
          return failed("early return to J from J_" + std::to_string(i) + " at floor " + std::to_string(k));
        y = iet_apply(before, y);
      }
      if (y >= top_j + tol) return failed("no return to J after r_" + std::to_string(i) + " steps");
      if (std::abs(y - iet_apply(induced, x)) > tol)
        return failed("first return of J_" + std::to_string(i) + " disagrees with the induced IET");
      ++rep.points;
    }
  }
  return rep;
}

IETState random_iet_state(int m, Rng& rng) {
  if (m < 2) fail(ErrorKind::precondition, "IET needs m >= 2");
  std::vector<int> p(m);
  do {
    std::iota(p.begin(), p.end(), 1);
    for (int i = m - 1; i > 0; --i) std::swap(p[i], p[rng.integer(0, i)]);
  } while (!Permutation(p).irreducible());
  std::vector<double> lambda(m);
  double sum = 0.0;
  for (double& x : lambda) {
    x = -std::log(1.0 - rng.uniform());  // exponential: normalized gives the uniform simplex
    if (x < 1e-300) x = 1e-300;
    sum += x;
  }
  for (double& x : lambda) x /= sum;
  return IETState(std::move(lambda), Permutation(std::move(p)));
}

}  // namespace speccoc
