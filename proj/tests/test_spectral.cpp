#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "speccoc/config.hpp"
#include "speccoc/error.hpp"
#include "speccoc/sadic.hpp"
#include "speccoc/spectral.hpp"
#include "support.hpp"

using namespace speccoc;

namespace {

constexpr double kPi = std::numbers::pi;

DirectiveSequence stock(const char* name) { return DirectiveSequence::periodic({stock_substitution(name)}); }

CVector cv(std::initializer_list<double> re) {
  CVector v;
  for (double x : re) v.emplace_back(x, 0.0);
  return v;
}

struct Flow {
  DirectiveSequence a;
  SuspensionSpec spec;
};

Flow unit_roof(const char* name) {
  auto a = stock(name);
  auto spec = SuspensionSpec::make(a, Roof::from_exprs(std::vector<RealExpr>(a.alphabet_size(), RealExpr("1"))));
  return {a, spec};
}

// Brute-force S_R^y: midpoint rule over the flow, walking tiles of `word`.
Complex riemann_SR(const Word& word, const std::vector<double>& s, const CVector& b, double y, double R,
                   double omega, std::size_t steps) {
  std::vector<double> start(word.size() + 1, 0.0);
  for (std::size_t j = 0; j < word.size(); ++j) start[j + 1] = start[j] + s[word[j] - 1];
  Complex acc = 0.0;
  const double h = R / static_cast<double>(steps);
  std::size_t j = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    while (start[j + 1] <= y + t) ++j;
    acc += b[word[j] - 1] * std::polar(1.0, -2 * kPi * omega * t);
  }
  return acc * h;
}

}  // namespace

TEST_CASE("direct twisted sums") {
  const std::vector<double> s{1.0, 1.0};
  const auto ts = twisted_sum({1, 2}, cv({1, 1}), s, 0.5);
  CHECK(std::abs(ts.value) < 1e-15);
  CHECK(ts.length == 2);
  const Word v{1, 2, 2, 1, 1, 2, 1};
  const auto z = twisted_sum(v, cv({0.5, -2}), s, 0.0);
  CHECK(z.value.real() == doctest::Approx(4 * 0.5 - 3 * 2.0));
  // concatenation: Phi(uw) = Phi(u) + e^{-2 pi i omega |u|_s} Phi(w)
  Rng rng(51);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    Word u, w;
    for (auto len = rng.integer(0, 30); len > 0; --len) u.push_back(static_cast<int>(rng.integer(1, 3)));
    for (auto len = rng.integer(0, 30); len > 0; --len) w.push_back(static_cast<int>(rng.integer(1, 3)));
    const std::vector<double> s3{rng.uniform(0.2, 2), rng.uniform(0.2, 2), rng.uniform(0.2, 2)};
    const CVector phi{Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), Complex(rng.uniform(-1, 1), 0),
                      Complex(0, rng.uniform(-1, 1))};
    const double om = rng.uniform(-2, 2);
    Word uw = u;
    uw.insert(uw.end(), w.begin(), w.end());
    const Complex lhs = twisted_sum(uw, phi, s3, om).value;
    const Complex rhs = twisted_sum(u, phi, s3, om).value +
                        std::polar(1.0, -2 * kPi * om * tiling_length(u, s3)) * twisted_sum(w, phi, s3, om).value;
    worst = std::max(worst, std::abs(lhs - rhs));
    // triangle bound
    double bound = 0.0;
    for (int x : uw) bound += std::abs(phi[x - 1]);
    CHECK(std::abs(lhs) <= bound + 1e-12);
    CHECK(std::abs(lhs - oracle::twisted(uw, phi, s3, om)) < 1e-12);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("fast twisted sums through the cocycle") {
  const auto fib = stock("fibonacci");
  const std::vector<double> s{std::numbers::phi, 1.0};
  const auto phi = cv({1, 0});
  for (double om : {0.1, 0.37, 1.3}) {
    const auto fast = twisted_sum_fast(fib, 10, phi, s, om);
    for (Letter b = 1; b <= 2; ++b) {
      const auto w = expand(fib, 10, b);
      CHECK(std::abs(fast[b - 1] - oracle::twisted(w, phi, s, om)) < 1e-9 * static_cast<double>(w.size()));
    }
  }
  // omega = 0: (S^[n])^t phi
  const auto zero = twisted_sum_fast(fib, 10, cv({2, -1}), s, 0.0);
  const auto S = telescope(fib, 10).matrix;
  for (int b = 0; b < 2; ++b) CHECK(zero[b].real() == doctest::Approx(2.0 * S(0, b) - 1.0 * S(1, b)));

  const auto ex3 = stock("example3");
  const std::vector<double> s3{0.7, 1.1, 1.9};
  const CVector phi3{Complex(1, 0.5), Complex(-0.3, 0), Complex(0.2, -1)};
  const auto f3 = twisted_sum_fast(ex3, 6, phi3, s3, 0.731);
  for (Letter b = 1; b <= 3; ++b)
    CHECK(std::abs(f3[b - 1] - oracle::twisted(expand(ex3, 6, b), phi3, s3, 0.731)) < 1e-8);
}

TEST_CASE("Gamma and Fourier coefficients") {
  const std::vector<double> s{1.3, 0.6};
  const auto b = cv({1, -2});
  CHECK(gamma_omega(b, 0.0, s) == b);
  for (double om : {0.05, 0.4, 3.0, -1.7}) {
    const auto g = gamma_omega(b, om, s);
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(g[a]) <= std::abs(b[a]) / (kPi * std::abs(om)) + 1e-15);
      // against a midpoint-rule integral of b_a e^{-2 pi i omega t} over [0, s_a]
      Complex acc = 0;
      const int N = 20000;
      for (int k = 0; k < N; ++k) acc += std::polar(1.0, -2 * kPi * om * (k + 0.5) * s[a] / N);
      CHECK(std::abs(g[a] - b[a] * acc * (s[a] / N)) < 1e-7);
    }
    // linearity
    const auto g2 = gamma_omega(cv({2, 3}), om, s);
    const auto g3 = gamma_omega(cv({3, 1}), om, s);
    const auto g1 = gamma_omega(cv({1, 2}), om, s);
    for (int a = 0; a < 2; ++a) CHECK(std::abs(g3[a] - (g1[a] + g2[a]) + gamma_omega(cv({0, 4}), om, s)[a]) < 1e-14);
  }
  const auto f = CylFunction::simple(b);
  CHECK(f.fourier(0.4, s) == gamma_omega(b, 0.4, s));
  // whole periods integrate to exactly zero
  const std::vector<double> unit{1.0, 0.3};
  const auto whole = gamma_omega(cv({1, 1}), 2.0, unit);
  CHECK(whole[0] == Complex(0.0, 0.0));
  CHECK(whole[1] != Complex(0.0, 0.0));
}

TEST_CASE("Lipschitz profiles") {
  std::istringstream in("letter,1\n0,0\n0.5,1\n1.3,0\nletter,2\n0,2\n0.6,2\n");
  const auto f = CylFunction::read_profiles(in);
  CHECK_FALSE(f.is_simple());
  CHECK(f.dim() == 2);
  CHECK(f.sup_norm() == 2.0);
  const std::vector<double> s{1.3, 0.6};
  CHECK_NOTHROW(f.check_roof(s));
  CHECK_THROWS_AS(f.check_roof(std::vector<double>{1.0, 0.6}), Error);
  auto psi1 = [](double t) { return t < 0.5 ? 2 * t : (1.3 - t) / 0.8; };
  for (double om : {0.0, 0.3, 2.5}) {
    const auto z = f.fourier(om, s);
    Complex acc = 0;
    const int N = 100000;
    for (int k = 0; k < N; ++k) {
      const double t = (k + 0.5) * 1.3 / N;
      acc += psi1(t) * std::polar(1.0, -2 * kPi * om * t);
    }
    CHECK(std::abs(z[0] - acc * (1.3 / N)) < 1e-9);
    // constant profile behaves like the simple function (away from omega = 0,
    // where Gamma_0 b = b is a direction, not an integral)
    if (om != 0.0) CHECK(std::abs(z[1] - gamma_omega(cv({0, 2}), om, s)[1]) < 1e-12);
    else CHECK(z[1].real() == doctest::Approx(1.2));
  }
  std::istringstream bad("letter,1\n0.1,0\n1,1\nletter,2\n0,1\n1,1\n");
  CHECK_THROWS_AS(CylFunction::read_profiles(bad), Error);
}

TEST_CASE("Fejer kernel") {
  for (double R : {1.0, 7.5, 100.0, 12345.0}) {
    CHECK(fejer_kernel(R, 0.0) == R);
    CHECK(fejer_kernel(R, 1.0 / (2 * R)) == doctest::Approx(4 * R / (kPi * kPi)).epsilon(1e-15));
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(fejer_kernel(R, k / R)) < 1e-20 * R + 1e-25);
    const double lo = fejer_kernel(R, 0.999e-12), hi = fejer_kernel(R, 1.001e-12);
    CHECK(std::abs(lo - hi) < 1e-12 * R);
    CHECK(fejer_kernel(R, 1e-13) == doctest::Approx(R).epsilon(1e-12));
    CHECK(fejer_kernel(R, 0.3) == fejer_kernel(R, -0.3));
  }
  CHECK_THROWS_AS(fejer_kernel(0.0, 0.1), Error);
}

TEST_CASE("G_R against brute-force integration") {
  const auto fib = stock("fibonacci");
  const auto spec = SuspensionSpec::make(fib, Roof::perron_frobenius(substitution_matrix(fib.term(1))));
  const GRSampler sampler(fib, spec, 200.0, 8, 77);
  const auto word = expand(fib, sampler.depth(), 1);
  CHECK(word.size() == sampler.word_length());
  const CVector b{Complex(1, 0), Complex(-0.5, 0.25)};
  const auto f = CylFunction::simple(b);
  for (double om : {0.0, 0.21, 1.7}) {
    for (double R : {spec.s_max(), 13.0, 200.0}) {
      double mean = 0.0;
      for (double y : sampler.base_points())
        mean += std::norm(riemann_SR(word, spec.s_ell, b, y, R, om, 200000));
      mean /= static_cast<double>(sampler.base_points().size()) * R;
      CHECK(sampler.estimate(f, om, R) == doctest::Approx(mean).epsilon(1e-4));
    }
  }
}

TEST_CASE("G_R point masses") {
  const auto ones = unit_roof("thue-morse");
  const GRSampler s1(ones.a, ones.spec, 1000.0, 64, 5);
  CHECK(s1.estimate(CylFunction::simple(cv({1, 1})), 0.0, 1000.0) / 1000.0 == doctest::Approx(1.0));
  CHECK(s1.estimate(CylFunction::simple(cv({1, -1})), 0.0, 1000.0) / 1000.0 < 0.05);

  const auto fib = stock("fibonacci");
  const auto spec = SuspensionSpec::make(fib, Roof::perron_frobenius(substitution_matrix(fib.term(1))));
  const auto mu = measure_vectors(fib, 0, 40).mu;
  const double mean = mu[0] * spec.s_ell[0] / (mu[0] * spec.s_ell[0] + mu[1] * spec.s_ell[1]);
  const GRSampler s2(fib, spec, 1e4, 64, 9);
  CHECK(s2.estimate(CylFunction::simple(cv({1, 0})), 0.0, 1e4) / 1e4 == doctest::Approx(mean * mean).epsilon(0.05));
}

TEST_CASE("G_R determinism and preconditions") {
  const auto ones = unit_roof("fibonacci");
  const auto f = CylFunction::simple(cv({1, 0}));
  const double a = G_R_estimate(ones.a, ones.spec, f, 0.3, 1.0, 1, 42);
  CHECK(a == G_R_estimate(ones.a, ones.spec, f, 0.3, 1.0, 1, 42));
  CHECK(G_R_estimate(ones.a, ones.spec, f, 0.3, 50.0, 16, 42) != G_R_estimate(ones.a, ones.spec, f, 0.3, 50.0, 16, 43));
  CHECK_THROWS_AS(G_R_estimate(ones.a, ones.spec, f, 0.3, 0.5, 1, 42), Error);
  CHECK_THROWS_AS(G_R_estimate(ones.a, ones.spec, f, 0.3, 10.0, 0, 42), Error);
}

TEST_CASE("dimension via the cocycle: branches") {
  const auto tm = unit_roof("thue-morse");
  const auto atom = dim_via_cocycle(tm.a, tm.spec, CylFunction::simple(cv({1, 1})), RealExpr("0"), 30);
  CHECK(atom.d_lower == 0.0);
  CHECK(atom.regime == Regime::formula);
  CHECK(atom.chi_plus == atom.lambda);
  CHECK_FALSE(atom.flags.empty());

  // omega = 1/3: period-two orbit with |1 + z| = 1, so chi = 0
  const auto flat = dim_via_cocycle(tm.a, tm.spec, CylFunction::simple(cv({0.3, 0.3})), RealExpr("1/3"), 30);
  CHECK(flat.regime == Regime::clamped_ge_2);
  CHECK(flat.d_lower == 2.0);
  CHECK(flat.chi_plus <= 1e-12);

  const auto none = dim_via_cocycle(tm.a, tm.spec, CylFunction::simple(cv({0, 0})), RealExpr("0.4"), 30);
  CHECK(none.regime == Regime::degenerate);
  CHECK(std::isnan(none.d_lower));

  const auto fib = unit_roof("fibonacci");
  const auto gen = dim_via_cocycle(fib.a, fib.spec, CylFunction::simple(cv({1, 0})), RealExpr("0.377"), 30);
  CHECK(gen.regime == Regime::formula);
  CHECK(gen.d_lower == doctest::Approx(2.0 - 2.0 * gen.chi_plus / gen.lambda));
  CHECK(gen.chi_tail_max >= gen.chi_final);
  DimensionOptions fin;
  fin.use_tail_max = false;
  const auto g2 = dim_via_cocycle(fib.a, fib.spec, CylFunction::simple(cv({1, 0})), RealExpr("0.377"), 30, fin);
  CHECK(g2.chi_plus == gen.chi_final);
  CHECK(regime_name(Regime::clamped_ge_2) == "clamped_ge_2");
}

TEST_CASE("dimension via G_R") {
  const auto ones = unit_roof("thue-morse");
  std::vector<double> R;
  for (int k = 0; k <= 12; ++k) R.push_back(10.0 * std::pow(100.0, k / 12.0));
  const auto g = dim_via_GR(ones.a, ones.spec, CylFunction::simple(cv({1, 1})), 0.0, R, 16, 3);
  REQUIRE(g.ok);
  CHECK(std::abs(g.d_hat) < 1e-9);
  // synthetic power laws
  std::vector<double> G;
  for (double r : R) G.push_back(3.0 * std::pow(r, 0.25));
  const auto syn = dim_from_samples(R, G);
  CHECK(syn.slope == doctest::Approx(0.25));
  CHECK(syn.d_hat == doctest::Approx(0.75));
  G[3] = 0.0;
  CHECK_FALSE(dim_from_samples(R, G).ok);
}

TEST_CASE("Holder and G_R bound calculators") {
  const auto h = holder_from_GR(1.0, 1.0, 0.5);
  CHECK(h.r == 1.0);
  CHECK(h.bound == doctest::Approx(2 * kPi * kPi));
  CHECK(holder_from_GR(3.0, 0.0, 17.0).bound == doctest::Approx(3 * kPi * kPi));

  const auto b1 = GR_from_holder(1.0, 1.0, 0.5, 100.0, 0.0);
  CHECK(b1.constant == doctest::Approx(1 + 2 / (kPi * kPi)));
  CHECK(b1.bound == doctest::Approx(b1.constant));
  CHECK(b1.hypotheses_met);

  const double R = std::exp(4.0);
  const auto b2 = GR_from_holder(1.0, 2.0, 0.5, R, 0.0);
  CHECK(b2.threshold == doctest::Approx(R));
  CHECK(b2.constant == doctest::Approx(1 + 2 / (kPi * kPi)));
  CHECK(b2.bound == doctest::Approx(b2.constant * std::exp(-4.0) * 4.0));
  CHECK_FALSE(b2.hypotheses_met);  // the borderline case assumes r0 < 1/e
  CHECK(GR_from_holder(1.0, 2.0, 0.3, 1e6, 0.0).hypotheses_met);

  CHECK_THROWS_AS(GR_from_holder(1.0, 1.0, 0.5, 3.0, 0.0), Error);
  CHECK_THROWS_AS(GR_from_holder(1.0, 2.5, 0.5, 100.0, 0.0), Error);
}
