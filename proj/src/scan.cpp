#include "speccoc/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>

#include <omp.h>

#include "speccoc/error.hpp"
#include "speccoc/rng.hpp"

namespace speccoc {

int thread_count() {
  if (const char* env = std::getenv("SPECCOC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return omp_get_max_threads();
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body, Exec exec) {
  std::exception_ptr first;
  std::size_t first_index = count;
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(mutex);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

namespace {

// Exact orbit of omega * s for `n` steps.
TorusOrbit omega_orbit(const DirectiveSequence& a, const std::function<std::vector<BigReal>(mpfr_prec_t)>& s,
                       const RealExpr& omega, std::size_t n) {
  const std::size_t bits = TorusOrbit::required_bits(a, n);
  const auto prec = static_cast<mpfr_prec_t>(bits + 64);
  const BigReal w = omega.evaluate(prec);
  std::vector<BigReal> xi = s(prec);
  for (auto& x : xi) mpfr_mul(x.get(), x.get(), w.get(), MPFR_RNDN);
  return TorusOrbit::exact(a, xi, bits);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

SingularityReport singularity_scan(const Substitution& zeta, const Roof& s, const std::vector<RealExpr>& omegas,
                                   std::size_t n, double margin, Exec exec, double fraction_threshold,
                                   std::uint64_t seed) {
  if (!is_primitive(zeta)) fail(ErrorKind::precondition, "singularity scan needs a primitive substitution");
  const DirectiveSequence a = DirectiveSequence::periodic({zeta});
  if (static_cast<int>(s.values.size()) != a.alphabet_size())
    fail(ErrorKind::precondition, "roof has the wrong dimension");
  SingularityReport rep;
  rep.margin = margin;
  rep.fraction_threshold = fraction_threshold;
  rep.half_log_theta = 0.5 * std::log(perron_frobenius(substitution_matrix(zeta)).theta1);

  std::vector<RealExpr> grid;
  for (const auto& w : omegas) {
    if (mpfr_zero_p(w.evaluate(64).get())) ++rep.excluded;
    else grid.push_back(w);
  }
  rep.rows = map_indices<ChiRow>(
      grid.size(),
      [&](std::size_t i) {
        try {
          const ExponentEstimate e = chi_estimate(omega_orbit(a, s.exact, grid[i], n), n);
          return ChiRow{grid[i], e.chi, e.tail_max};
        } catch (const Error& e) {
          // the exact product vanished: chi = -inf, which meets the criterion
          if (e.kind() != ErrorKind::numerical) throw;
          return ChiRow{grid[i], -HUGE_VAL, -HUGE_VAL, true};
        }
      },
      exec);

  std::vector<double> gaps;
  std::size_t below = 0;
  for (const auto& r : rep.rows) {
    gaps.push_back(rep.half_log_theta - r.chi);
    if (r.vanished) ++rep.vanished;
    if (r.chi < rep.half_log_theta - margin) ++below;
  }
  rep.fraction_below = rep.rows.empty() ? 0.0 : static_cast<double>(below) / static_cast<double>(rep.rows.size());
  if (!gaps.empty()) {
    rep.gap_min = *std::min_element(gaps.begin(), gaps.end());
    rep.gap_max = *std::max_element(gaps.begin(), gaps.end());
    rep.gap_q10 = quantile(gaps, 0.1);
    rep.gap_median = quantile(gaps, 0.5);
    rep.gap_q90 = quantile(gaps, 0.9);
  }

  Rng rng(task_seed(seed, 0));
  for (int t = 0; t < 16; ++t) {
    std::vector<double> xi(a.alphabet_size());
    for (double& x : xi) x = rng.uniform();
    rep.det_witness = std::max(rep.det_witness, det_modulus(zeta, TorusPoint(xi)));
  }
  rep.det_nonvanishing = rep.det_witness > 1e-8;

  if (!rep.det_nonvanishing)
    rep.verdict = "inconclusive: det M(xi) vanishes at every sampled xi";
  else if (rep.fraction_below >= fraction_threshold)
    rep.verdict = "consistent with purely singular spectrum (finite-n evidence, advisory)";
  else
    rep.verdict = "not consistent with singular spectrum via this criterion (advisory)";
  return rep;
}

VectorScanReport generic_vector_scan(const DirectiveSequence& a, const SuspensionSpec& spec, const RealExpr& omega,
                                     int j, const CVector& b, const CVector& c_grid, std::size_t n,
                                     double tolerance, Exec exec) {
  const int m = a.alphabet_size();
  if (j < 1 || j > m) fail(ErrorKind::precondition, "coordinate index j outside alphabet");
  if (static_cast<int>(b.size()) != m) fail(ErrorKind::precondition, "b has the wrong dimension");
  const double w = omega.value();
  for (double s : spec.s_ell) {
    const double x = w * s;
    if (std::abs(x - std::round(x)) < 1e-12 * std::max(1.0, std::abs(x)))
      fail(ErrorKind::precondition, "resonant omega: omega * s_a is an integer");
  }
  const DirectiveSequence shifted = a.shifted(spec.level);
  auto s_exact = [&spec](mpfr_prec_t prec) { return spec.s_ell_exact(prec); };

  VectorScanReport rep;
  rep.tolerance = tolerance;
  rep.chi_matrix = chi_estimate(omega_orbit(shifted, s_exact, omega, n), n).chi;
  rep.rows = map_indices<VectorScanRow>(
      c_grid.size(),
      [&](std::size_t i) {
        CVector v = b;
        v[j - 1] += c_grid[i];
        const CVector z = gamma_omega(v, w, spec.s_ell);
        VectorScanRow row{c_grid[i], 0.0, false};
        if (!(vector_norm1(z) > 0.0)) {
          row.chi = -HUGE_VAL;
        } else {
          try {
            row.chi = chi_estimate(omega_orbit(shifted, s_exact, omega, n), n, ChiOptions{z}).chi;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            row.chi = -HUGE_VAL;
          }
        }
        row.depressed = row.chi < rep.chi_matrix - tolerance;
        return row;
      },
      exec);
  bool in_run = false;
  for (const auto& r : rep.rows) {
    if (r.depressed) {
      ++rep.depressed;
      if (!in_run) ++rep.clusters;
    }
    in_run = r.depressed;
  }
  return rep;
}

std::vector<DimensionReport> dimension_scan(const DirectiveSequence& a, const SuspensionSpec& spec,
                                            const CylFunction& f, const std::vector<RealExpr>& omegas,
                                            std::size_t n, Exec exec, const DimensionOptions& opts) {
  return map_indices<DimensionReport>(
      omegas.size(), [&](std::size_t i) { return dim_via_cocycle(a, spec, f, omegas[i], n, opts); }, exec);
}

std::vector<GRDimension> gr_dimension_scan(const GRSampler& sampler, const CylFunction& f,
                                           const std::vector<double>& omegas, const std::vector<double>& R_list,
                                           Exec exec) {
  return map_indices<GRDimension>(
      omegas.size(), [&](std::size_t i) { return dim_via_GR(sampler, f, omegas[i], R_list); }, exec);
}

}  // namespace speccoc
