#include "speccoc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "speccoc/cocycle.hpp"
#include "speccoc/error.hpp"
#include "speccoc/rauzy.hpp"
#include "speccoc/rng.hpp"
#include "speccoc/spectral.hpp"

namespace speccoc {

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok; });
}

namespace {

struct Fixture {
  std::string name;
  Substitution zeta;
  IntMatrix matrix;  // expected substitution matrix
};

IntMatrix make_matrix(int m, std::initializer_list<std::int64_t> entries) {
  IntMatrix r(m);
  auto it = entries.begin();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = *it++;
  return r;
}

std::vector<Fixture> fixtures(bool corrupt) {
  std::vector<Fixture> f = {
      {"fibonacci", Substitution::parse("1:12;2:1"), make_matrix(2, {1, 1, 1, 0})},
      {"thue-morse", Substitution::parse("1:12;2:21"), make_matrix(2, {1, 1, 1, 1})},
      {"example3", Substitution::parse("1:121321;2:2231;3:31123"), make_matrix(3, {3, 1, 2, 2, 2, 1, 1, 1, 2})},
  };
  // Negative control: one letter of an image changed, recorded matrix kept.
  if (corrupt) f[2].zeta = Substitution::parse("1:121321;2:2231;3:31122");
  return f;
}

Substitution random_substitution(Rng& rng, int m, int max_len) {
  std::vector<Word> images(m);
  for (auto& w : images) {
    const auto len = rng.integer(1, max_len);
    for (std::int64_t k = 0; k < len; ++k) w.push_back(static_cast<Letter>(rng.integer(1, m)));
  }
  return Substitution(m, std::move(images));
}

std::vector<double> random_point(Rng& rng, int m) {
  std::vector<double> xi(m);
  for (double& x : xi) x = rng.uniform();
  return xi;
}

double max_entry_diff(const CMatrix& a, const CMatrix& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(3);
  o << v;
  return o.str();
}

class Suite {
 public:
  Suite(std::string name, VerifyReport& rep) : name_(std::move(name)), rep_(rep) {}

  // Runs one check; exceptions count as failures with their message.
  template <class F>
  void check(const std::string& invariant, F&& body) {
    CheckResult r{name_, invariant, true, ""};
    try {
      r.ok = body(r.detail);
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail = std::string("exception: ") + e.what();
    }
    rep_.checks.push_back(std::move(r));
  }

 private:
  std::string name_;
  VerifyReport& rep_;
};

void identities(VerifyReport& rep, bool corrupt) {
  Suite s("identities", rep);
  const auto fx = fixtures(corrupt);

  for (const auto& f : fx) {
    s.check("substitution_matrix matches fixture " + f.name, [&](std::string& d) {
      const IntMatrix got = substitution_matrix(f.zeta).entries();
      if (got != f.matrix) d = "matrix differs from the recorded fixture";
      return got == f.matrix;
    });
    s.check("M(0) = S^t for " + f.name, [&](std::string& d) {
      const CMatrix m0 = fourier_matrix(f.zeta, TorusPoint::zero(f.zeta.alphabet_size()));
      const double e = max_entry_diff(m0, to_complex(f.matrix.transpose()));
      d = "max error " + num(e);
      return e == 0.0;
    });
  }

  s.check("matrix homomorphism S(z1 o z2) = S(z1) S(z2)", [&](std::string& d) {
    Rng rng(task_seed(11, 0));
    for (int t = 0; t < 100; ++t) {
      const int m = static_cast<int>(rng.integer(2, 4));
      const auto z1 = random_substitution(rng, m, 6), z2 = random_substitution(rng, m, 6);
      if (substitution_matrix(compose(z1, z2)).entries() !=
          checked_product(substitution_matrix(z1).entries(), substitution_matrix(z2).entries())) {
        d = "pair " + std::to_string(t);
        return false;
      }
    }
    return true;
  });

  s.check("abelianization l(zeta(v)) = S l(v)", [&](std::string& d) {
    Rng rng(task_seed(11, 1));
    for (int t = 0; t < 100; ++t) {
      const int m = static_cast<int>(rng.integer(2, 4));
      const auto z = random_substitution(rng, m, 6);
      Word v(static_cast<std::size_t>(rng.integer(0, 40)));
      for (auto& c : v) c = static_cast<Letter>(rng.integer(1, m));
      const auto lv = population_vector(v, m);
      const auto lz = population_vector(z.apply(v), m);
      const auto& S = substitution_matrix(z);
      for (int i = 0; i < m; ++i) {
        std::int64_t acc = 0;
        for (int j = 0; j < m; ++j) acc += S(i, j) * lv[j];
        if (acc != lz[i]) {
          d = "word " + std::to_string(t);
          return false;
        }
      }
    }
    return true;
  });

  s.check("cocycle identity M_{z1 o z2}(xi) = M_{z2}(S^t_{z1} xi) M_{z1}(xi)", [&](std::string& d) {
    Rng rng(task_seed(11, 2));
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int m = static_cast<int>(rng.integer(2, 4));
      const auto z1 = random_substitution(rng, m, 8), z2 = random_substitution(rng, m, 8);
      const auto comp = compose(z1, z2);
      for (int k = 0; k < 10; ++k) {
        const TorusPoint xi(random_point(rng, m));
        const CMatrix lhs = fourier_matrix(comp, xi);
        const CMatrix rhs = fourier_matrix(z2, torus_map(substitution_matrix(z1), xi)) * fourier_matrix(z1, xi);
        worst = std::max(worst, max_entry_diff(lhs, rhs));
      }
    }
    d = "max entry error " + num(worst);
    return worst < 1e-10;
  });

  s.check("extension M_a(0, n) = (S^[n])^t", [&](std::string& d) {
    for (const auto& f : fx) {
      const auto a = DirectiveSequence::periodic({f.zeta});
      const std::size_t n = f.zeta.alphabet_size() == 3 ? 12 : 30;
      IntMatrix S = IntMatrix::identity(f.zeta.alphabet_size());
      for (std::size_t k = 0; k < n; ++k) S = checked_product(S, f.matrix);
      if (cocycle_at_zero_exact(a, n) != S.transpose()) {
        d = f.name + ": integer replay differs";
        return false;
      }
    }
    return true;
  });

  s.check("telescope S^[n] = S^[n-1] S_n", [&](std::string& d) {
    const auto a = DirectiveSequence::periodic(
        {Substitution::parse("1:12;2:1"), Substitution::parse("1:21;2:2"), Substitution::parse("1:1;2:211")});
    Telescope t = telescope(a, 1);
    for (std::size_t n = 2; n <= 12; ++n) {
      Telescope next = extend(t, a);
      if (next.matrix.entries() != checked_product(t.matrix.entries(), a.matrix(n).entries())) {
        d = "n = " + std::to_string(n);
        return false;
      }
      t = std::move(next);
    }
    return true;
  });

  s.check("concatenation Phi(uv) = Phi(u) + e^{-2 pi i omega |u|_s} Phi(v)", [&](std::string& d) {
    Rng rng(task_seed(11, 3));
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int m = static_cast<int>(rng.integer(2, 4));
      Word u(static_cast<std::size_t>(rng.integer(0, 30))), v(static_cast<std::size_t>(rng.integer(0, 30)));
      for (auto& c : u) c = static_cast<Letter>(rng.integer(1, m));
      for (auto& c : v) c = static_cast<Letter>(rng.integer(1, m));
      std::vector<double> sv(m);
      CVector phi(m);
      for (int a = 0; a < m; ++a) {
        sv[a] = rng.uniform(0.2, 2.0);
        phi[a] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
      const double w = rng.uniform(-2, 2);
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      const Complex lhs = twisted_sum(uv, phi, sv, w).value;
      const double len = tiling_length(u, sv);
      const Complex rhs = twisted_sum(u, phi, sv, w).value +
                          std::polar(1.0, -2 * std::numbers::pi * w * len) * twisted_sum(v, phi, sv, w).value;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    d = "max error " + num(worst);
    return worst < 1e-12;
  });

  s.check("prefix-suffix reassembly", [&](std::string& d) {
    Rng rng(task_seed(11, 4));
    const auto a = DirectiveSequence::periodic({fx[0].zeta});
    for (int t = 0; t < 300; ++t) {
      const auto n = static_cast<std::size_t>(rng.integer(1, 12));
      const auto b = static_cast<Letter>(rng.integer(1, 2));
      const Word full = expand(a, n, b);
      const auto k = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(full.size())));
      const Word got = reassemble(a, prefix_path(a, n, b, k));
      if (!std::equal(got.begin(), got.end(), full.begin()) || got.size() != k) {
        d = "n=" + std::to_string(n) + " k=" + std::to_string(k);
        return false;
      }
    }
    return true;
  });
}

void oracles(VerifyReport& rep) {
  Suite s("oracles", rep);
  const auto fx = fixtures(false);

  s.check("twisted_sum_fast = direct Phi on expanded words", [&](std::string& d) {
    Rng rng(task_seed(12, 0));
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto& f = fx[static_cast<std::size_t>(t % 3)];
      const int m = f.zeta.alphabet_size();
      const auto a = DirectiveSequence::periodic({f.zeta});
      const std::size_t n = m == 3 ? 5 : static_cast<std::size_t>(rng.integer(1, 12));
      std::vector<double> sv(m);
      CVector phi(m);
      for (int c = 0; c < m; ++c) {
        sv[c] = rng.uniform(0.2, 2.0);
        phi[c] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
      const double w = rng.uniform(-3, 3);
      const CVector fast = twisted_sum_fast(a, n, phi, sv, w);
      for (Letter b = 1; b <= m; ++b) {
        const Word v = expand(a, n, b);
        const double err = std::abs(fast[b - 1] - twisted_sum(v, phi, sv, w).value);
        worst = std::max(worst, err / static_cast<double>(v.size()));
      }
    }
    d = "max error / N " + num(worst);
    return worst < 1e-9;
  });

  s.check("Perron-Frobenius eigenvalues", [&](std::string& d) {
    const double phi = (1 + std::sqrt(5.0)) / 2;
    const double t_fib = perron_frobenius(substitution_matrix(fx[0].zeta)).theta1;
    const double t_tm = perron_frobenius(substitution_matrix(fx[1].zeta)).theta1;
    d = "fibonacci " + num(t_fib - phi) + ", thue-morse " + num(t_tm - 2.0);
    return std::abs(t_fib - phi) < 1e-10 && t_tm == 2.0;
  });

  s.check("lambda_hat(40) -> log theta", [&](std::string& d) {
    double worst = 0.0;
    for (const auto& f : fx) {
      const auto a = DirectiveSequence::periodic({f.zeta});
      const double th = perron_frobenius(substitution_matrix(f.zeta)).theta1;
      worst = std::max(worst, std::abs(lambda_hat(a, 40) - std::log(th)));
    }
    const auto tm = DirectiveSequence::periodic({fx[1].zeta});
    bool exact = true;
    for (std::size_t n = 1; n <= 60; ++n) exact = exact && lambda_hat(tm, n) == std::log(2.0);
    d = "max gap " + num(worst) + (exact ? "" : ", thue-morse not exactly log 2");
    return worst < 2e-2 && exact;
  });

  s.check("measure vectors consistency", [&](std::string& d) {
    const auto a = DirectiveSequence::periodic({fx[0].zeta});
    const auto mv = measure_vectors(a, 0, 40);
    const double phi = (1 + std::sqrt(5.0)) / 2;
    const double e = std::abs(mv.mu[0] - 1 / phi) + std::abs(mv.mu[1] - 1 / (phi * phi));
    d = "frequency error " + num(e) + ", residual " + num(mv.consistency_residual);
    return e < 1e-6 && mv.consistency_residual <= 1e-8;
  });

  s.check("self-similar product = torus-orbit product", [&](std::string& d) {
    double worst = 0.0;
    for (const auto& f : fx) {
      const SubMatrix S = substitution_matrix(f.zeta);
      const auto a = DirectiveSequence::periodic({f.zeta});
      for (const char* w : {"0.37", "1/3", "2.5"}) {
        const std::size_t n = 200;
        const CocycleProduct p1 = self_similar_product(f.zeta, RealExpr(w), n);
        const Roof roof = Roof::perron_frobenius(S);
        const std::size_t bits = TorusOrbit::required_bits(a, n);
        const auto prec = static_cast<mpfr_prec_t>(bits + 64);
        const BigReal ww = RealExpr(w).evaluate(prec);
        auto xi = roof.exact(prec);
        for (auto& x : xi) mpfr_mul(x.get(), x.get(), ww.get(), MPFR_RNDN);
        const CocycleProduct p2 = cocycle_product(TorusOrbit::exact(a, xi, bits), n);
        worst = std::max(worst, std::abs(p1.log_norm_rate() - p2.log_norm_rate()));
      }
    }
    d = "max exponent gap " + num(worst);
    return worst < 1e-9;
  });

  s.check("Fejer kernel constants", [&](std::string& d) {
    const double pi = std::numbers::pi;
    double worst = 0.0;
    for (double R : {0.5, 1.0, 10.0, 1234.5}) {
      worst = std::max(worst, std::abs(fejer_kernel(R, 0.0) - R) / R);
      worst = std::max(worst, std::abs(fejer_kernel(R, 1 / (2 * R)) - 4 * R / (pi * pi)) / R);
    }
    d = "max relative error " + num(worst);
    return worst < 1e-14;
  });
}

void towers(VerifyReport& rep) {
  Suite s("towers", rep);
  s.check("unimodularity and Rokhlin towers over random steps", [&](std::string& d) {
    Rng rng(task_seed(13, 0));
    std::size_t steps = 0;
    for (int m = 2; m <= 5; ++m) {
      for (int run = 0; run < 25; ++run) {
        IETState st = random_iet_state(m, rng);
        for (int k = 0; k < 10; ++k, ++steps) {
          const RauzyMove mv = rauzy_step(st);
          const auto det = exact_determinant(mv.matrix.entries());
          if (det != 1 && det != -1) {
            d = "det " + std::to_string(det) + " at m=" + std::to_string(m);
            return false;
          }
          const TowerReport tr = verify_tower(st, mv, 10, rng);
          if (!tr.ok) {
            d = tr.failure;
            return false;
          }
          st = mv.new_state;
        }
      }
    }
    d = std::to_string(steps) + " steps";
    return true;
  });
  s.check("Zorich composite = composition of steps", [&](std::string& d) {
    Rng rng(task_seed(13, 1));
    for (int t = 0; t < 100; ++t) {
      const IETState st = random_iet_state(static_cast<int>(rng.integer(2, 5)), rng);
      const ZorichMove z = zorich_step(st);
      IETState cur = st;
      Substitution comp = Substitution::identity(st.size());
      for (std::size_t k = 0; k < z.count; ++k) {
        const RauzyMove mv = rauzy_step(cur);
        comp = compose(comp, mv.substitution);
        cur = mv.new_state;
      }
      if (!(comp == z.composite.substitution)) {
        d = "case " + std::to_string(t);
        return false;
      }
    }
    return true;
  });
  s.check("Rauzy class vertices irreducible", [&](std::string& d) {
    const RauzyGraph g = rauzy_class(Permutation({5, 4, 3, 2, 1}));
    d = "class size " + std::to_string(g.vertices.size());
    return std::all_of(g.vertices.begin(), g.vertices.end(), [](const Permutation& p) { return p.irreducible(); });
  });
}

}  // namespace

VerifyReport run_verify(const std::string& suite, bool corrupt) {
  VerifyReport rep;
  const bool all = suite == "all";
  if (!all && suite != "identities" && suite != "oracles" && suite != "towers")
    fail(ErrorKind::schema, "unknown verify suite '" + suite + "'");
  if (all || suite == "identities") identities(rep, corrupt);
  if (all || suite == "oracles") oracles(rep);
  if (all || suite == "towers") towers(rep);
  return rep;
}

}  // namespace speccoc
