#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speccoc/cocycle.hpp"
#include "speccoc/hp.hpp"
#include "speccoc/sadic.hpp"

namespace speccoc {

// Roof vector with a high-precision view (needed for exact orbits of
// omega * s when s is irrational, e.g. a PF vector).
struct Roof {
  std::vector<double> values;
  std::function<std::vector<BigReal>(mpfr_prec_t)> exact;

  static Roof from_exprs(std::vector<RealExpr> s);
  static Roof from_doubles(const std::vector<double>& s);  // decimal semantics, see RealExpr
  // PF eigenvector of S^t with unit 1-norm.
  static Roof perron_frobenius(const SubMatrix& s);
};

struct SuspensionSpec {
  Roof roof;
  std::size_t level = 0;
  IntMatrix transform;         // (S^[level])^t; identity at level 0
  std::vector<double> s_ell;   // transform * s

  // Requires positive roof entries.
  static SuspensionSpec make(const DirectiveSequence& a, Roof roof, std::size_t level = 0);
  std::vector<BigReal> s_ell_exact(mpfr_prec_t prec) const;
  double s_max() const;
  double s_min() const;
};

// Gamma_omega b: b_a (1 - e^{-2 pi i omega s_a}) / (2 pi i omega), and b at omega = 0.
CVector gamma_omega(const CVector& b, double omega, std::span<const double> s);

// f(x, t) = psi_{x_0}(t) on the level-ell suspension. Simple functions have
// psi_a = b_a on [0, s_a]; Lipschitz ones are piecewise-linear interpolants
// of sampled profiles (t_0 = 0 < ... < t_K = s_a).
class CylFunction {
 public:
  struct Profile {
    std::vector<double> t;
    std::vector<double> v;
  };

  static CylFunction simple(CVector b);
  static CylFunction lipschitz(std::vector<Profile> profiles);
  // CSV sections "letter,<a>" followed by "t,value" rows.
  static CylFunction read_profiles(std::istream& in);
  static CylFunction read_profiles_file(const std::string& path);

  bool is_simple() const noexcept { return simple_; }
  int dim() const noexcept;
  const CVector& coefficients() const { return b_; }
  const std::vector<Profile>& profiles() const { return profiles_; }

  // z_a = int_0^{s_a} psi_a(t) e^{-2 pi i omega t} dt, exact segment by segment
  // for Lipschitz profiles.
  CVector fourier(double omega, std::span<const double> s) const;
  // int_lo^hi psi_a(t) e^{-2 pi i omega t} dt, 0 <= lo <= hi <= s_a.
  Complex partial_integral(int letter, double lo, double hi, double omega, std::span<const double> s) const;
  double sup_norm() const;
  // Checks profile end points against the roof.
  void check_roof(std::span<const double> s) const;

 private:
  bool simple_ = true;
  CVector b_;
  std::vector<Profile> profiles_;
};

struct TwistedSum {
  Complex value;
  std::size_t length = 0;
  double omega = 0.0;
};

// (frac(omega s_a))_a, the torus point used by both twisted-sum paths.
TorusPoint phase_point(double omega, std::span<const double> s);

// sum_j phi(v_j) exp(-2 pi i omega |v_0 ... v_j|_s).
TwistedSum twisted_sum(const Word& v, const CVector& phi, std::span<const double> s, double omega);

// All b at once: Phi(zeta^[n](b)) = (M_a(omega s, n) D phi)_b with
// D = diag(e^{-2 pi i omega s_a}) (the phase in Phi includes the current
// letter, the cocycle's does not).
CVector twisted_sum_fast(const DirectiveSequence& a, std::size_t n, const CVector& phi,
                         std::span<const double> s, double omega);

// Fejer kernel R^{-1} (sin(pi R y) / (pi y))^2, K_R(0) = R.
double fejer_kernel(double R, double y);

// Monte Carlo G_R(f, omega) = R^{-1} E|S_R^y(f, omega)|^2 over base points
// uniform (in flow time) along a long word zeta^[n_big](1) of the shifted
// sequence. Base points are drawn once and shared by every R, so slopes in
// R are not polluted by resampling noise. Read-only after construction.
class GRSampler {
 public:
  GRSampler(const DirectiveSequence& a, const SuspensionSpec& spec, double R_max, std::size_t samples,
            std::uint64_t seed, std::size_t cap = kDefaultLengthCap);

  // One value per R (ascending or not), each R in [s_max, R_max].
  std::vector<double> estimate(const CylFunction& f, double omega, std::span<const double> R_list) const;
  double estimate(const CylFunction& f, double omega, double R) const;

  std::size_t depth() const noexcept { return n_big_; }
  std::size_t word_length() const noexcept { return word_.size(); }
  const std::vector<double>& base_points() const noexcept { return base_; }

 private:
  std::vector<double> s_;
  Word word_;
  std::vector<double> prefix_;  // prefix_[j] = |word_0 ... word_{j-1}|_s
  std::vector<double> base_;
  double R_max_ = 0.0;
  std::size_t n_big_ = 0;
};

double G_R_estimate(const DirectiveSequence& a, const SuspensionSpec& spec, const CylFunction& f,
                    double omega, double R, std::size_t samples, std::uint64_t seed);

enum class Regime { formula, clamped_ge_2, degenerate };
std::string regime_name(Regime r);

struct DimensionReport {
  RealExpr omega;
  double chi_plus = 0.0;     // value fed into the formula
  double chi_final = 0.0;    // partial at n
  double chi_tail_max = 0.0; // max over the last 20% of steps
  double lambda = 0.0;
  double d_lower = 0.0;
  Regime regime = Regime::formula;
  std::vector<std::string> flags;
  std::size_t n = 0;
};

struct DimensionOptions {
  bool use_tail_max = true;  // chi^+ is a limsup
  std::size_t measure_depth = 40;
};

// d = 2 - 2 chi / lambda on sigma^ell a with xi = omega s^(ell), z = f.fourier(omega).
DimensionReport dim_via_cocycle(const DirectiveSequence& a, const SuspensionSpec& spec, const CylFunction& f,
                                const RealExpr& omega, std::size_t n, const DimensionOptions& opts = {});

struct GRDimension {
  bool ok = false;
  double slope = 0.0;  // least squares slope of log G_R against log R
  double d_hat = 0.0;  // 1 - slope
  std::vector<double> R;
  std::vector<double> G;
  std::string failure;
};

GRDimension dim_from_samples(std::span<const double> R_list, std::span<const double> G);
GRDimension dim_via_GR(const GRSampler& sampler, const CylFunction& f, double omega,
                       std::span<const double> R_list);
GRDimension dim_via_GR(const DirectiveSequence& a, const SuspensionSpec& spec, const CylFunction& f,
                       double omega, std::span<const double> R_list, std::size_t samples, std::uint64_t seed);

struct HolderBound {
  double r = 0.0;
  double bound = 0.0;
};
// G_R <= C1 R^{1 - alpha} at this R gives sigma(B_r) <= C1 pi^2 2^alpha r^alpha, r = 1/(2R).
HolderBound holder_from_GR(double C1, double alpha, double R);

struct GRBound {
  double constant = 0.0;   // C3, or C3~ in the alpha = 2 case
  double bound = 0.0;
  double threshold = 0.0;  // smallest admissible R
  bool hypotheses_met = true;
  std::string note;
};
// sigma(B_r) <= C2 r^alpha on (0, r0) gives G_R <= C3 R^{1-alpha} for
// alpha in (0, 2), and G_R <= C3~ R^{-1} ln R for alpha = 2.
GRBound GR_from_holder(double C2, double alpha, double r0, double R, double f_norm2);

}  // namespace speccoc
