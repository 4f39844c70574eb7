#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speccoc/cocycle.hpp"
#include "speccoc/spectral.hpp"

namespace speccoc {

// Every scan has a serial reference path and an OpenMP path; results are
// indexed by grid position, so both produce identical output.
enum class Exec { serial, openmp };

// SPECCOC_THREADS when set (>= 1), else the OpenMP default.
int thread_count();

// Runs body(i) for i in [0, count). The exception of the lowest failing
// index is rethrown after the loop.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body, Exec exec);

template <class T, class F>
std::vector<T> map_indices(std::size_t count, F&& fn, Exec exec) {
  std::vector<std::optional<T>> slots(count);
  for_each_index(count, [&](std::size_t i) { slots[i].emplace(fn(i)); }, exec);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct ChiRow {
  RealExpr omega;
  double chi = 0.0;
  double tail_max = 0.0;
  bool vanished = false;  // product exactly zero at some step
};

struct SingularityReport {
  std::vector<ChiRow> rows;      // omega = 0 excluded
  std::size_t excluded = 0;      // grid points dropped because omega == 0
  std::size_t vanished = 0;      // rows whose product vanished (chi = -inf)
  double half_log_theta = 0.0;
  double margin = 0.0;
  double fraction_below = 0.0;   // chi < half_log_theta - margin
  double fraction_threshold = 0.95;
  // Distribution of half_log_theta - chi.
  double gap_min = 0.0, gap_q10 = 0.0, gap_median = 0.0, gap_q90 = 0.0, gap_max = 0.0;
  double det_witness = 0.0;      // max |det M(xi)| over random xi
  bool det_nonvanishing = false;
  std::string verdict;           // advisory only
};

SingularityReport singularity_scan(const Substitution& zeta, const Roof& s, const std::vector<RealExpr>& omegas,
                                   std::size_t n, double margin, Exec exec, double fraction_threshold = 0.95,
                                   std::uint64_t seed = 1);

struct VectorScanRow {
  Complex c;
  double chi = 0.0;
  bool depressed = false;
};

struct VectorScanReport {
  std::vector<VectorScanRow> rows;
  double chi_matrix = 0.0;
  double tolerance = 0.0;
  std::size_t depressed = 0;
  std::size_t clusters = 0;  // maximal runs of consecutive depressed grid points
};

// chi for z = Gamma_omega(b + c e_j) against the matrix-norm exponent.
VectorScanReport generic_vector_scan(const DirectiveSequence& a, const SuspensionSpec& spec, const RealExpr& omega,
                                     int j, const CVector& b, const CVector& c_grid, std::size_t n,
                                     double tolerance, Exec exec);

std::vector<DimensionReport> dimension_scan(const DirectiveSequence& a, const SuspensionSpec& spec,
                                            const CylFunction& f, const std::vector<RealExpr>& omegas,
                                            std::size_t n, Exec exec, const DimensionOptions& opts = {});

std::vector<GRDimension> gr_dimension_scan(const GRSampler& sampler, const CylFunction& f,
                                           const std::vector<double>& omegas, const std::vector<double>& R_list,
                                           Exec exec);

}  // namespace speccoc
