#include <doctest.h>

#include <cmath>
#include <numbers>

#include "speccoc/cocycle.hpp"
#include "speccoc/config.hpp"
#include "speccoc/error.hpp"
#include "speccoc/rauzy.hpp"
#include "speccoc/sadic.hpp"
#include "support.hpp"

using namespace speccoc;

namespace {

Complex zexp(double x) { return std::polar(1.0, -oracle::kTwoPi * x); }

std::vector<double> random_xi(Rng& rng, int m) {
  std::vector<double> xi(m);
  for (auto& x : xi) x = rng.uniform();
  return xi;
}

}  // namespace

TEST_CASE("fourier matrix entries") {
  const auto ex3 = stock_substitution("example3");
  const std::vector<double> xi{0.137, 0.291, 0.613};
  const auto M = fourier_matrix(ex3, TorusPoint(xi));
  const Complex z1 = zexp(xi[0]), z2 = zexp(xi[1]), z3 = zexp(xi[2]);
  // positions of 3 in 121321: one, after 1,2,1
  CHECK(std::abs(M(0, 2) - z1 * z1 * z2) < 1e-14);
  // positions of 1 in 121321: 1, 3, 6
  CHECK(std::abs(M(0, 0) - (1.0 + z1 * z2 + z1 * z1 * z2 * z2 * z3)) < 1e-14);
  CHECK(oracle::max_entry_diff(M, oracle::fourier(ex3, xi)) < 1e-14);

  const auto tm = stock_substitution("thue-morse");
  const std::vector<double> x2{0.3, 0.7};
  const auto T = fourier_matrix(tm, TorusPoint(x2));
  CHECK(std::abs(T(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(T(0, 1) - zexp(0.3)) < 1e-15);
  CHECK(std::abs(T(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(T(1, 0) - zexp(0.7)) < 1e-15);
}

TEST_CASE("M(0) is S transposed for random substitutions") {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const int m = static_cast<int>(rng.integer(2, 5));
    const auto z = oracle::random_substitution(rng, m, 8);
    const auto M = fourier_matrix(z, TorusPoint::zero(m));
    const auto S = substitution_matrix(z);
    const auto Z = fourier_matrix_at_zero(z);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        REQUIRE(M(i, j) == Complex(static_cast<double>(S(j, i)), 0.0));
        REQUIRE(Z(i, j) == S(j, i));
      }
  }
}

TEST_CASE("torus map and skew step") {
  const auto fib = DirectiveSequence::periodic({stock_substitution("fibonacci")});
  const auto [next, xi] = skew_step(fib, TorusPoint({0.25, 0.5}));
  CHECK(xi.xi[0] == 0.75);
  CHECK(xi.xi[1] == 0.25);
  CHECK(next.offset() == 1);
  const auto z = skew_step(fib, TorusPoint::zero(2)).second;
  CHECK(z.xi == std::vector<double>{0.0, 0.0});

  // denominators never grow: 7 xi stays integral along the exact orbit
  auto orbit = TorusOrbit::exact(fib, std::vector<RealExpr>{RealExpr("3/7"), RealExpr("5/7")}, 200);
  for (int k = 0; k < 200; ++k) {
    for (double x : orbit.point().xi) {
      const double y = 7 * x;
      REQUIRE(std::abs(y - std::round(y)) < 1e-9);
    }
    orbit.advance();
  }
}

TEST_CASE("exact and fp64 orbits agree for short runs") {
  const auto ex3 = DirectiveSequence::periodic({stock_substitution("example3")});
  const std::vector<double> x0{0.1234, 0.5678, 0.9012};
  auto e = TorusOrbit::exact(ex3, x0, 10);
  auto f = TorusOrbit::fp64(ex3, x0);
  for (int k = 0; k < 10; ++k) {
    for (int i = 0; i < 3; ++i) {
      const double d = std::abs(e.point().xi[i] - f.point().xi[i]);
      REQUIRE(std::min(d, 1 - d) < 1e-7);
    }
    e.advance();
    f.advance();
  }
  // Thue-Morse in doubles collapses to 0; the exact orbit does not.
  const auto tm = DirectiveSequence::periodic({stock_substitution("thue-morse")});
  // the doubles 0.3, 0.1 are dyadic, so their exact orbit also dies; use
  // the decimal values
  const std::vector<double> y0{0.3, 0.1};
  auto te = TorusOrbit::exact(tm, std::vector<RealExpr>{RealExpr("3/10"), RealExpr("1/10")}, 100);
  auto tf = TorusOrbit::fp64(tm, y0);
  for (int k = 0; k < 80; ++k) {
    te.advance();
    tf.advance();
  }
  CHECK(tf.point().xi == std::vector<double>{0.0, 0.0});
  CHECK(te.point().xi[0] + te.point().xi[1] > 0.0);
}

TEST_CASE("cocycle identity on random pairs") {
  Rng rng(42);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int m = static_cast<int>(rng.integer(2, 4));
    const auto z1 = oracle::random_substitution(rng, m, 8);
    const auto z2 = oracle::random_substitution(rng, m, 8);
    const auto c = compose(z1, z2);
    for (int r = 0; r < 10; ++r) {
      const auto xi = random_xi(rng, m);
      const auto lhs = fourier_matrix(c, TorusPoint(xi));
      const auto rhs = oracle::cproduct(oracle::fourier(z2, oracle::torus_step(z1, xi)), oracle::fourier(z1, xi));
      worst = std::max(worst, oracle::max_entry_diff(lhs, rhs));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("cocycle product") {
  Rng rng(43);
  const auto z1 = oracle::random_substitution(rng, 3, 4);
  const auto z2 = oracle::random_substitution(rng, 3, 4);
  const auto a = DirectiveSequence::periodic({z1, z2});
  const auto xi = random_xi(rng, 3);
  const auto p1 = cocycle_product(a, TorusPoint(xi), 1);
  CHECK(oracle::max_entry_diff(p1.true_value(), oracle::fourier(z1, xi)) < 1e-13);
  // two steps of (z1, z2) equal one step of z1 o z2
  const auto p2 = cocycle_product(a, TorusPoint(xi), 2);
  CHECK(oracle::max_entry_diff(p2.true_value(), oracle::fourier(compose(z1, z2), xi)) < 1e-10);
  CHECK_THROWS_AS(cocycle_product(a, TorusPoint(xi), 0), Error);
}

TEST_CASE("extension property at xi = 0") {
  for (const char* name : {"fibonacci", "thue-morse", "example3"}) {
    const auto z = stock_substitution(name);
    const auto a = DirectiveSequence::periodic({z});
    const int m = a.alphabet_size();
    const auto c = oracle::count_matrix(z);
    // (S^n)^t in long double, built as repeated products of S^t.
    std::vector<std::vector<long double>> pw(m, std::vector<long double>(m, 0.0L));
    for (int i = 0; i < m; ++i) pw[i][i] = 1.0L;
    for (std::size_t n = 1; n <= 30; ++n) {
      std::vector<std::vector<long double>> nx(m, std::vector<long double>(m, 0.0L));
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k)
          for (int j = 0; j < m; ++j) nx[i][j] += static_cast<long double>(c[k][i]) * pw[k][j];
      pw = nx;
      const auto v = cocycle_product(a, TorusPoint::zero(m), n).true_value();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const double s = static_cast<double>(pw[i][j]);
          REQUIRE(std::abs(v(i, j).real() - s) <= 1e-9 * s);
          REQUIRE(v(i, j).imag() == 0.0);
        }
    }
  }
}

TEST_CASE("exact integer replay at xi = 0") {
  for (const char* name : {"fibonacci", "thue-morse", "example3"}) {
    const auto a = DirectiveSequence::periodic({stock_substitution(name)});
    const int m = a.alphabet_size();
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto exact = cocycle_at_zero_exact(a, n);
      const auto s = telescope(a, n).matrix;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) REQUIRE(exact(i, j) == s(j, i));
    }
  }
}

TEST_CASE("rescaled products match unscaled ones") {
  Rng rng(44);
  const auto a = DirectiveSequence::periodic({stock_substitution("example3")});
  for (int t = 0; t < 10; ++t) {
    const auto xi = random_xi(rng, 3);
    auto orbit = TorusOrbit::fp64(a, xi);
    auto direct = oracle::fourier(a.term(1), orbit.point().xi);
    for (int k = 1; k < 10; ++k) {
      orbit.advance();
      direct = oracle::cproduct(oracle::fourier(a.term(1), orbit.point().xi), direct);
    }
    const auto p = cocycle_product(TorusOrbit::fp64(a, xi), 10);
    const auto v = p.true_value();
    double scale = 0.0;
    for (const auto& row : direct)
      for (const auto& x : row) scale = std::max(scale, std::abs(x));
    CHECK(oracle::max_entry_diff(v, direct) < 1e-10 * scale);
  }
}

TEST_CASE("chi at xi = 0 equals lambda_hat exactly") {
  for (const char* name : {"fibonacci", "thue-morse", "example3"}) {
    const auto a = DirectiveSequence::periodic({stock_substitution(name)});
    for (std::size_t n : {1, 5, 30, 200}) {
      const auto e = chi_estimate(TorusOrbit::exact(a, std::vector<double>(a.alphabet_size(), 0.0), n), n);
      CHECK(e.chi == lambda_hat(a, n));
      CHECK(e.partials.size() == n);
    }
  }
}

TEST_CASE("chi bounds and norm choice") {
  const auto tm = DirectiveSequence::periodic({stock_substitution("thue-morse")});
  const auto one = chi_estimate(TorusOrbit::exact(tm, std::vector<double>{0.5, 0.5}, 1), 1);
  CHECK(one.chi == doctest::Approx(std::log(2.0)));
  // M(0) M(1/2, 1/2) = 0 exactly, quarter-turn phases carry no rounding
  const auto half = fourier_matrix(stock_substitution("thue-morse"), TorusPoint({0.5, 0.5}));
  CHECK(half(0, 1) == Complex(-1.0, 0.0));
  try {
    (void)chi_estimate(TorusOrbit::exact(tm, std::vector<double>{0.5, 0.5}, 2), 2);
    FAIL("vanishing product did not raise");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
  }

  Rng rng(45);
  const auto ex3 = DirectiveSequence::periodic({stock_substitution("example3")});
  const double theta = perron_frobenius(substitution_matrix(stock_substitution("example3"))).theta1;
  for (int t = 0; t < 20; ++t) {
    const auto xi = random_xi(rng, 3);
    const std::size_t n = 60;
    ChiOptions row, col;
    col.norm = CocycleNorm::column_sum;
    const auto er = chi_estimate(TorusOrbit::exact(ex3, xi, n), n, row);
    const auto ec = chi_estimate(TorusOrbit::exact(ex3, xi, n), n, col);
    CHECK(std::abs(er.chi - ec.chi) <= std::log(3.0) / n + 1e-12);
    CHECK(er.chi <= lambda_hat(ex3, n) + 1e-12);
    CHECK(er.tail_max >= er.chi);
    CHECK(er.chi <= std::log(theta) + std::log(3.0) / n);
    // vector variant is bounded by the matrix norm
    ChiOptions vec;
    vec.z = CVector{Complex(1, 0), Complex(0.5, -1), Complex(-0.25, 0.1)};
    vec.norm = CocycleNorm::column_sum;
    const auto ev = chi_estimate(TorusOrbit::exact(ex3, xi, n), n, vec);
    CHECK(ev.chi <= ec.chi + std::log(vector_norm1(*vec.z)) / n + 1e-9);
  }
  ChiOptions zero;
  zero.z = CVector(3, Complex(0, 0));
  CHECK_THROWS_AS(chi_estimate(TorusOrbit::exact(ex3, std::vector<double>{0.1, 0.2, 0.3}, 5), 5, zero), Error);
}

TEST_CASE("determinant modulus") {
  CHECK(det_modulus(stock_substitution("thue-morse"), TorusPoint::zero(2)) == doctest::Approx(0.0));
  CHECK(det_modulus(stock_substitution("fibonacci"), TorusPoint::zero(2)) == doctest::Approx(1.0));
  Rng rng(46);
  for (int t = 0; t < 20; ++t) {
    const auto st = random_iet_state(static_cast<int>(rng.integer(2, 5)), rng);
    const auto move = rauzy_step(st);
    for (int r = 0; r < 100; ++r) {
      const auto xi = random_xi(rng, st.size());
      REQUIRE(std::abs(det_modulus(move.substitution, TorusPoint(xi)) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("domination by the transposed substitution matrix") {
  Rng rng(47);
  for (int t = 0; t < 30; ++t) {
    const int m = static_cast<int>(rng.integer(2, 4));
    const auto z1 = oracle::random_substitution(rng, m, 4);
    const auto z2 = oracle::random_substitution(rng, m, 4);
    const auto a = DirectiveSequence::periodic({z1, z2});
    const auto xi = random_xi(rng, m);
    const std::size_t n = 8;
    const auto v = cocycle_product(a, TorusPoint(xi), n).true_value();
    const auto s = telescope(a, n).matrix;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) REQUIRE(std::abs(v(i, j)) <= static_cast<double>(s(j, i)) + 1e-9);
  }
}

TEST_CASE("Rauzy-generated exponents are nonnegative") {
  Rng rng(48);
  for (int t = 0; t < 10; ++t) {
    const auto st = random_iet_state(static_cast<int>(rng.integer(2, 5)), rng);
    const std::size_t n = 200;
    const auto a = directive_from_iet(st, n, Acceleration::none);
    const auto e = chi_estimate(TorusOrbit::exact(a, random_xi(rng, st.size()), n), n);
    CHECK(e.chi >= -1e-6);
  }
}

TEST_CASE("self-similar products") {
  const auto fib = stock_substitution("fibonacci");
  const auto zero = self_similar_product(fib, RealExpr("0"), 10);
  const auto tel = telescope(DirectiveSequence::periodic({fib}), 10).matrix;
  const auto v = zero.true_value();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(v(i, j).real() == static_cast<double>(tel(j, i)));

  const auto hp = high_precision_pf(substitution_matrix(fib), 256);
  std::vector<double> s{hp.s[0].to_double(), hp.s[1].to_double()};
  CHECK(s[0] + s[1] == doctest::Approx(1.0));
  const auto ss = self_similar_product(fib, RealExpr("1"), 20);
  auto orbit = TorusOrbit::exact(DirectiveSequence::periodic({fib}), hp.s, 256);
  const auto op = cocycle_product(std::move(orbit), 20);
  CHECK(oracle::max_entry_diff(ss.true_value(), [&] {
          const auto w = op.true_value();
          std::vector<std::vector<Complex>> r(2, std::vector<Complex>(2));
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r[i][j] = w(i, j);
          return r;
        }()) < 1e-9);
  CHECK(ss.log_norm_rate() <= std::log(std::numbers::phi) + std::log(2.0) / 20 + 1e-9);
}
