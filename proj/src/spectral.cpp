#include "speccoc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "speccoc/error.hpp"
#include "speccoc/rng.hpp"

namespace speccoc {

namespace {

constexpr double kPi = std::numbers::pi;

// int_lo^hi e^{-2 pi i omega t} dt, written to stay accurate for small omega.
Complex exp_integral(double omega, double lo, double hi) {
  const double w = hi - lo;
  if (omega == 0.0) return {w, 0.0};
  const double k = omega * w;
  if (k == std::round(k)) return {0.0, 0.0};  // whole periods
  const double x = kPi * k;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return w * sinc * unit_phase(omega * (lo + hi) / 2.0);
}

void require_positive(std::span<const double> s) {
  if (s.empty()) fail(ErrorKind::precondition, "empty roof vector");
  for (double x : s)
    if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::precondition, "roof entries must be positive");
}

}  // namespace

Roof Roof::from_exprs(std::vector<RealExpr> s) {
  Roof r;
  for (const auto& e : s) r.values.push_back(e.value());
  r.exact = [s = std::move(s)](mpfr_prec_t prec) {
    std::vector<BigReal> out;
    for (const auto& e : s) out.push_back(e.evaluate(prec));
    return out;
  };
  require_positive(r.values);
  return r;
}

Roof Roof::from_doubles(const std::vector<double>& s) {
  std::vector<RealExpr> e;
  for (double x : s) e.emplace_back(x);
  return from_exprs(std::move(e));
}

Roof Roof::perron_frobenius(const SubMatrix& s) {
  Roof r;
  for (const auto& x : high_precision_pf(s, 64).s) r.values.push_back(x.to_double());
  r.exact = [s](mpfr_prec_t prec) { return high_precision_pf(s, prec).s; };
  return r;
}

SuspensionSpec SuspensionSpec::make(const DirectiveSequence& a, Roof roof, std::size_t level) {
  const int m = a.alphabet_size();
  if (static_cast<int>(roof.values.size()) != m) fail(ErrorKind::precondition, "roof has the wrong dimension");
  require_positive(roof.values);
  SuspensionSpec spec;
  spec.level = level;
  IntMatrix p = IntMatrix::identity(m);
  for (std::size_t k = 1; k <= level; ++k) p = checked_product(p, a.matrix(k).entries());
  spec.transform = p.transpose();
  spec.s_ell.assign(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) spec.s_ell[i] += static_cast<double>(spec.transform(i, j)) * roof.values[j];
  spec.roof = std::move(roof);
  return spec;
}

std::vector<BigReal> SuspensionSpec::s_ell_exact(mpfr_prec_t prec) const {
  const std::vector<BigReal> s = roof.exact(prec);
  const int m = transform.dim();
  std::vector<BigReal> out;
  BigReal t(prec);
  for (int i = 0; i < m; ++i) {
    out.emplace_back(prec);
    for (int j = 0; j < m; ++j) {
      if (transform(i, j) == 0) continue;
      mpfr_mul_si(t.get(), s[j].get(), static_cast<long>(transform(i, j)), MPFR_RNDN);
      mpfr_add(out.back().get(), out.back().get(), t.get(), MPFR_RNDN);
    }
  }
  return out;
}

double SuspensionSpec::s_max() const { return *std::max_element(s_ell.begin(), s_ell.end()); }
double SuspensionSpec::s_min() const { return *std::min_element(s_ell.begin(), s_ell.end()); }

CVector gamma_omega(const CVector& b, double omega, std::span<const double> s) {
  if (b.size() != s.size()) fail(ErrorKind::precondition, "b and s differ in dimension");
  CVector z(b.size());
  for (std::size_t a = 0; a < b.size(); ++a) z[a] = omega == 0.0 ? b[a] : b[a] * exp_integral(omega, 0.0, s[a]);
  return z;
}

CylFunction CylFunction::simple(CVector b) {
  if (b.size() < 2) fail(ErrorKind::precondition, "cylindrical function needs m >= 2 coefficients");
  CylFunction f;
  f.simple_ = true;
  f.b_ = std::move(b);
  return f;
}

CylFunction CylFunction::lipschitz(std::vector<Profile> profiles) {
  if (profiles.size() < 2) fail(ErrorKind::precondition, "cylindrical function needs m >= 2 profiles");
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    const Profile& p = profiles[a];
    const std::string who = "profile of letter " + std::to_string(a + 1);
    if (p.t.size() < 2 || p.t.size() != p.v.size()) fail(ErrorKind::schema, who + " needs >= 2 (t, value) pairs");
    if (p.t.front() != 0.0) fail(ErrorKind::schema, who + " must start at t = 0");
    for (std::size_t i = 1; i < p.t.size(); ++i)
      if (!(p.t[i] > p.t[i - 1])) fail(ErrorKind::schema, who + " has non-increasing t");
    for (double v : p.v)
      if (!std::isfinite(v)) fail(ErrorKind::schema, who + " has a non-finite value");
  }
  CylFunction f;
  f.simple_ = false;
  f.profiles_ = std::move(profiles);
  return f;
}

CylFunction CylFunction::read_profiles(std::istream& in) {
  std::vector<std::pair<int, Profile>> sections;
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::schema, "profile line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) bad("expected two comma separated fields");
    std::string key = line.substr(first, comma - first);
    std::string val = line.substr(comma + 1);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    if (key == "letter") {
      sections.push_back({static_cast<int>(RealExpr(val).value()), {}});
      continue;
    }
    if (key == "t") continue;  // header row
    if (sections.empty()) bad("data row before any 'letter,<a>' header");
    sections.back().second.t.push_back(RealExpr(key).value());
    sections.back().second.v.push_back(RealExpr(val).value());
  }
  const int m = static_cast<int>(sections.size());
  std::vector<Profile> profiles(m);
  std::vector<bool> seen(m, false);
  for (auto& [a, p] : sections) {
    if (a < 1 || a > m || seen[a - 1]) fail(ErrorKind::schema, "profile sections must cover letters 1..m once");
    seen[a - 1] = true;
    profiles[a - 1] = std::move(p);
  }
  return lipschitz(std::move(profiles));
}

CylFunction CylFunction::read_profiles_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::schema, "cannot open profile file " + path);
  return read_profiles(in);
}

int CylFunction::dim() const noexcept {
  return static_cast<int>(simple_ ? b_.size() : profiles_.size());
}

void CylFunction::check_roof(std::span<const double> s) const {
  if (static_cast<int>(s.size()) != dim()) fail(ErrorKind::precondition, "function and roof differ in dimension");
  if (simple_) return;
  for (std::size_t a = 0; a < s.size(); ++a)
    if (std::abs(profiles_[a].t.back() - s[a]) > 1e-9 * s[a])
      fail(ErrorKind::precondition, "profile of letter " + std::to_string(a + 1) + " ends at " +
                                        format_double(profiles_[a].t.back()) + ", roof is " + format_double(s[a]));
}

namespace {

// int_0^w u e^{-2 pi i omega u} du; series near kappa w = 0 where the closed
// form cancels.
Complex ramp_integral(double omega, double w) {
  const double k = 2.0 * kPi * omega;
  const double x = k * w;
  if (std::abs(x) < 0.5) {
    Complex acc = 0.0, term = 1.0;  // term = (-i x)^n / n!
    for (int n = 0; n < 24; ++n) {
      acc += term / static_cast<double>(n + 2);
      term *= Complex(0.0, -x) / static_cast<double>(n + 1);
    }
    return acc * w * w;
  }
  const Complex e = unit_phase(omega * w);
  return (e * Complex(1.0, x) - 1.0) / (k * k);
}

// Exact integral of the piecewise-linear interpolant times the phase.
Complex linear_integral(const CylFunction::Profile& p, double lo, double hi, double omega) {
  Complex acc = 0.0;
  if (hi <= lo) return acc;
  for (std::size_t i = 1; i < p.t.size(); ++i) {
    const double a = std::max(lo, p.t[i - 1]), b = std::min(hi, p.t[i]);
    if (b <= a) continue;
    const double slope = (p.v[i] - p.v[i - 1]) / (p.t[i] - p.t[i - 1]);
    const double va = p.v[i - 1] + slope * (a - p.t[i - 1]);
    acc += va * exp_integral(omega, a, b) + slope * unit_phase(omega * a) * ramp_integral(omega, b - a);
  }
  return acc;
}

}  // namespace

CVector CylFunction::fourier(double omega, std::span<const double> s) const {
  check_roof(s);
  if (simple_) return gamma_omega(b_, omega, s);
  CVector z(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) z[a] = linear_integral(profiles_[a], 0.0, s[a], omega);
  return z;
}

Complex CylFunction::partial_integral(int letter, double lo, double hi, double omega,
                                      std::span<const double> s) const {
  const auto a = static_cast<std::size_t>(letter - 1);
  if (simple_) return b_[a] * exp_integral(omega, lo, hi);
  (void)s;
  return linear_integral(profiles_[a], lo, hi, omega);
}

double CylFunction::sup_norm() const {
  double best = 0.0;
  if (simple_)
    for (const auto& x : b_) best = std::max(best, std::abs(x));
  else
    for (const auto& p : profiles_)
      for (double v : p.v) best = std::max(best, std::abs(v));
  return best;
}

TorusPoint phase_point(double omega, std::span<const double> s) {
  std::vector<double> xi(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) xi[a] = omega * s[a];
  return TorusPoint(std::move(xi));
}

TwistedSum twisted_sum(const Word& v, const CVector& phi, std::span<const double> s, double omega) {
  require_positive(s);
  if (phi.size() != s.size()) fail(ErrorKind::precondition, "phi and s differ in dimension");
  const TorusPoint f = phase_point(omega, s);
  TwistedSum out;
  out.length = v.size();
  out.omega = omega;
  double turns = 0.0;
  for (Letter c : v) {
    turns = reduce01(turns + f.xi[c - 1]);  // the phase includes the current letter
    out.value += phi[c - 1] * unit_phase(turns);
  }
  return out;
}

CVector twisted_sum_fast(const DirectiveSequence& a, std::size_t n, const CVector& phi,
                         std::span<const double> s, double omega) {
  require_positive(s);
  const int m = a.alphabet_size();
  if (static_cast<int>(phi.size()) != m || static_cast<int>(s.size()) != m)
    fail(ErrorKind::precondition, "phi and s must have one entry per letter");
  if (n == 0) fail(ErrorKind::precondition, "twisted_sum_fast needs n >= 1");
  const TorusPoint xi0 = phase_point(omega, s);
  CVector w(m);
  for (int c = 0; c < m; ++c) w[c] = unit_phase(xi0.xi[c]) * phi[c];
  TorusOrbit orbit = TorusOrbit::exact(a, xi0.xi, n);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) orbit.advance();
    w = fourier_matrix(a.term(k), orbit.point()) * w;
  }
  return w;
}

double fejer_kernel(double R, double y) {
  if (!(R > 0.0)) fail(ErrorKind::precondition, "Fejer kernel needs R > 0");
  const double x = kPi * R * y;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return R * (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0);
  }
  const double q = std::sin(x) / (kPi * y);
  return q * q / R;
}

GRSampler::GRSampler(const DirectiveSequence& a, const SuspensionSpec& spec, double R_max, std::size_t samples,
                     std::uint64_t seed, std::size_t cap)
    : s_(spec.s_ell), R_max_(R_max) {
  if (samples == 0) fail(ErrorKind::precondition, "G_R needs at least one sample");
  if (!(R_max >= spec.s_max()))
    fail(ErrorKind::precondition, "R = " + format_double(R_max) + " is below the max roof height " +
                                      format_double(spec.s_max()));
  const DirectiveSequence shifted = a.shifted(spec.level);
  const int m = shifted.alphabet_size();
  const double target = 50.0 * R_max / spec.s_min();
  std::vector<double> len(m, 1.0);
  while (len[0] < target) {
    ++n_big_;
    const Substitution& z = shifted.term(n_big_);
    std::vector<double> next(m, 0.0);
    for (int c = 1; c <= m; ++c)
      for (Letter d : z.image(c)) next[c - 1] += len[d - 1];
    len = std::move(next);
    if (len[0] > static_cast<double>(cap))
      fail(ErrorKind::precondition, "sampling word for R = " + format_double(R_max) + " exceeds the length cap");
    if (n_big_ > 100000) fail(ErrorKind::precondition, "sampling word does not grow");
  }
  word_ = n_big_ == 0 ? Word{1} : expand(shifted, n_big_, 1, cap);
  prefix_.resize(word_.size() + 1, 0.0);
  for (std::size_t j = 0; j < word_.size(); ++j) prefix_[j + 1] = prefix_[j] + s_[word_[j] - 1];
  const double span = prefix_.back() - R_max;
  Rng rng(task_seed(seed, 0));
  base_.resize(samples);
  for (double& u : base_) u = span * rng.uniform();
}

std::vector<double> GRSampler::estimate(const CylFunction& f, double omega, std::span<const double> R_list) const {
  std::vector<std::size_t> order(R_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return R_list[i] < R_list[j]; });
  const double s_max = *std::max_element(s_.begin(), s_.end());
  for (double R : R_list)
    if (!(R >= s_max && R <= R_max_))
      fail(ErrorKind::precondition, "R = " + format_double(R) + " outside [s_max, R_max]");

  // Full-tile integrals. Not f.fourier: for simple f that is Gamma_0 b = b at
  // omega = 0, a direction rather than the integral.
  CVector z(s_.size());
  for (std::size_t a = 0; a < s_.size(); ++a) z[a] = f.partial_integral(static_cast<int>(a + 1), 0.0, s_[a], omega, s_);
  const TorusPoint step = phase_point(omega, s_);
  std::vector<double> out(R_list.size(), 0.0);
  for (double u : base_) {
    auto j = static_cast<std::size_t>(std::upper_bound(prefix_.begin(), prefix_.end(), u) - prefix_.begin()) - 1;
    const std::size_t j0 = j;
    const double offset0 = u - prefix_[j0];
    double turns = reduce01(-omega * offset0);  // phase of the start of tile j, relative to u
    Complex running{0.0, 0.0};
    for (std::size_t idx : order) {
      const double R = R_list[idx];
      while (j + 1 < word_.size() && prefix_[j + 1] - u <= R) {
        const Letter c = word_[j];
        running += (j == j0 ? f.partial_integral(c, offset0, s_[c - 1], omega, s_) : z[c - 1]) * unit_phase(turns);
        turns = reduce01(turns + step.xi[c - 1]);
        ++j;
      }
      const Letter c = word_[j];
      const double lo = j == j0 ? offset0 : 0.0;
      const double hi = std::min(s_[c - 1], R - (prefix_[j] - u));
      const Complex sr = running + f.partial_integral(c, lo, std::max(lo, hi), omega, s_) * unit_phase(turns);
      out[idx] += std::norm(sr) / R;
    }
  }
  for (double& g : out) g /= static_cast<double>(base_.size());
  return out;
}

double GRSampler::estimate(const CylFunction& f, double omega, double R) const {
  const double r[1] = {R};
  return estimate(f, omega, std::span<const double>(r, 1)).front();
}

double G_R_estimate(const DirectiveSequence& a, const SuspensionSpec& spec, const CylFunction& f, double omega,
                    double R, std::size_t samples, std::uint64_t seed) {
  return GRSampler(a, spec, R, samples, seed).estimate(f, omega, R);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::formula: return "formula";
    case Regime::clamped_ge_2: return "clamped_ge_2";
    case Regime::degenerate: return "degenerate";
  }
  return "unknown";
}

DimensionReport dim_via_cocycle(const DirectiveSequence& a, const SuspensionSpec& spec, const CylFunction& f,
                                const RealExpr& omega, std::size_t n, const DimensionOptions& opts) {
  if (n == 0) fail(ErrorKind::precondition, "dimension estimate needs n >= 1");
  DimensionReport rep;
  rep.omega = omega;
  rep.n = n;
  const DirectiveSequence shifted = a.shifted(spec.level);
  const CVector z = f.fourier(omega.value(), spec.s_ell);
  rep.lambda = lambda_hat(shifted, n);

  if (!(vector_norm1(z) > 0.0)) {
    rep.regime = Regime::degenerate;
    rep.d_lower = std::nan("");
    rep.flags.push_back("zero Fourier vector z: no dimension claim");
    return rep;
  }

  const std::size_t bits = TorusOrbit::required_bits(shifted, n);
  const auto prec = static_cast<mpfr_prec_t>(bits + 64);
  const BigReal w = omega.evaluate(prec);
  std::vector<BigReal> xi0 = spec.s_ell_exact(prec);
  for (auto& x : xi0) mpfr_mul(x.get(), x.get(), w.get(), MPFR_RNDN);

  try {
    const ExponentEstimate est = chi_estimate(TorusOrbit::exact(shifted, xi0, bits), n, ChiOptions{z});
    rep.chi_final = est.chi;
    rep.chi_tail_max = est.tail_max;
    rep.chi_plus = opts.use_tail_max ? est.tail_max : est.chi;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numerical) throw;
    rep.chi_final = rep.chi_tail_max = rep.chi_plus = -HUGE_VAL;
    rep.flags.push_back(e.what());
  }

  if (mpfr_zero_p(w.get())) {
    // At omega = 0 the product is (S^[n])^t z, whose growth rate is lambda
    // as soon as z is not orthogonal to the frequency vector.
    try {
      const MeasureVector mu = measure_vectors(shifted, 0, opts.measure_depth);
      Complex ip{0.0, 0.0};
      double scale = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        ip += mu.mu[i] * z[i];
        scale += mu.mu[i] * std::abs(z[i]);
      }
      if (std::abs(ip) > 1e-12 * scale) {
        rep.chi_plus = rep.lambda;
        rep.d_lower = 0.0;
        rep.regime = Regime::formula;
        rep.flags.push_back("omega = 0 with <mu_0, z> != 0: chi^+ = lambda (atom at zero)");
        return rep;
      }
    } catch (const Error& e) {
      rep.flags.push_back(std::string("omega = 0 identity unavailable: ") + e.what());
    }
  }

  if (!(rep.chi_plus > 0.0)) {
    rep.regime = Regime::clamped_ge_2;
    rep.d_lower = 2.0;
    return rep;
  }
  rep.regime = Regime::formula;
  rep.d_lower = 2.0 - 2.0 * rep.chi_plus / rep.lambda;
  if (rep.d_lower < 0.0) {
    rep.d_lower = 0.0;
    rep.flags.push_back("chi exceeds lambda: estimator inconsistency");
  }
  return rep;
}

GRDimension dim_from_samples(std::span<const double> R_list, std::span<const double> G) {
  GRDimension out;
  out.R.assign(R_list.begin(), R_list.end());
  out.G.assign(G.begin(), G.end());
  if (R_list.size() < 3 || R_list.size() != G.size()) {
    out.failure = "need at least three (R, G_R) pairs";
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto k = static_cast<double>(R_list.size());
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(G[i] > 0.0) || !std::isfinite(G[i])) {
      out.failure = "nonpositive G_R at R = " + format_double(R_list[i]);
      return out;
    }
    if (i > 0 && !(R_list[i] > R_list[i - 1])) {
      out.failure = "R list must be increasing";
      return out;
    }
    const double x = std::log(R_list[i]), y = std::log(G[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  out.d_hat = 1.0 - out.slope;
  out.ok = true;
  return out;
}

GRDimension dim_via_GR(const GRSampler& sampler, const CylFunction& f, double omega,
                       std::span<const double> R_list) {
  const std::vector<double> g = sampler.estimate(f, omega, R_list);
  return dim_from_samples(R_list, g);
}

GRDimension dim_via_GR(const DirectiveSequence& a, const SuspensionSpec& spec, const CylFunction& f, double omega,
                       std::span<const double> R_list, std::size_t samples, std::uint64_t seed) {
  if (R_list.empty()) fail(ErrorKind::precondition, "empty R list");
  const GRSampler sampler(a, spec, *std::max_element(R_list.begin(), R_list.end()), samples, seed);
  return dim_via_GR(sampler, f, omega, R_list);
}

HolderBound holder_from_GR(double C1, double alpha, double R) {
  if (alpha < 0.0) fail(ErrorKind::precondition, "alpha must be nonnegative");
  if (!(R > 0.0)) fail(ErrorKind::precondition, "R must be positive");
  const double r = 1.0 / (2.0 * R);
  return {r, C1 * kPi * kPi * std::pow(2.0, alpha) * std::pow(r, alpha)};
}

GRBound GR_from_holder(double C2, double alpha, double r0, double R, double f_norm2) {
  if (!(r0 > 0.0 && r0 < 1.0)) fail(ErrorKind::precondition, "r0 must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha <= 2.0)) fail(ErrorKind::precondition, "alpha must lie in (0, 2]");
  const double pi2 = kPi * kPi;
  GRBound out;
  if (alpha < 2.0) {
    out.threshold = std::pow(r0, -2.0 / (2.0 - alpha));
    out.constant = C2 * (1.0 + 2.0 / (pi2 * (2.0 - alpha))) + f_norm2 * f_norm2 / pi2;
  } else {
    out.threshold = std::max(1.0 / r0, std::exp(1.0 / (r0 * r0)));
    out.constant = C2 * (1.0 + 2.0 / pi2) + f_norm2 * f_norm2 / pi2;
    if (!(r0 < std::exp(-1.0))) {
      out.hypotheses_met = false;
      out.note = "borderline case assumes r0 < 1/e";
    }
  }
  if (R < out.threshold * (1.0 - 1e-12))
    fail(ErrorKind::precondition, "R = " + format_double(R) + " below the validity threshold " +
                                      format_double(out.threshold));
  out.bound = alpha < 2.0 ? out.constant * std::pow(R, 1.0 - alpha) : out.constant * std::log(R) / R;
  return out;
}

}  // namespace speccoc
