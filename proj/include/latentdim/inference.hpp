#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentdim/dataset.hpp"
#include "latentdim/network.hpp"
#include "latentdim/observable_map.hpp"
#include "latentdim/parameters.hpp"

namespace latentdim {

/// Counts aligned with ParameterLayout::cpt of a model.
struct CountTable {
  ParameterLayout layout;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[layout.index(i, j, k)]; }
  double row_total(std::size_t i, std::size_t j) const;
  double variable_total(std::size_t i) const;
};

/// N_ijk, possibly fractional (expected counts), plus the case count N.
struct SufficientStatistics : CountTable {
  double cases = 0.0;
  std::string model_fingerprint;
};

/// Direct tabulation. Throws InputError on a missing value.
SufficientStatistics complete_counts(const Dataset& data, const NetworkModel& model);

/// Local CPT entries for a Discrete or Sigmoid point.
std::vector<double> local_cpt(const NetworkModel& model, const ParameterPoint<double>& point);

/// log p(D | theta), hidden and missing values summed out by enumeration.
/// A case with zero probability yields -infinity.
double loglik(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& point,
              std::uint64_t cap = default_state_cap());

struct EStep {
  SufficientStatistics counts;
  double loglik = 0.0;
};

/// Expected counts E[N_ijk | D, theta] together with log p(D | theta).
EStep e_step(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& point,
             std::uint64_t cap = default_state_cap());

SufficientStatistics expected_counts(const Dataset& data, const NetworkModel& model,
                                     const ParameterPoint<double>& point, std::uint64_t cap = default_state_cap());

struct EmOptions {
  int restarts = 5;
  double tolerance = 1e-8;
  int max_iterations = 500;
  std::uint64_t seed = 0;
  std::uint64_t state_cap = default_state_cap();
};

struct EmRun {
  std::uint64_t seed = 0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool zero_row = false;
  std::vector<double> trace;
};

struct EmResult {
  ParameterPoint<double> point;
  double loglik = 0.0;
  /// loglik of the best run, one entry per evaluated iterate.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  /// Some row had zero expected mass and kept its previous value.
  bool zero_row = false;
  std::vector<EmRun> runs;
};

/// Maximum likelihood by EM: E-step expected counts, M-step row normalization,
/// until the loglik gain drops below `tolerance`. Best of `restarts` runs, each
/// started from sample_parameters.
EmResult em_fit(const Dataset& data, const NetworkModel& model, const EmOptions& options = {});

/// D_c: the expected sufficient statistics at the EM estimate.
SufficientStatistics completed_statistics(const Dataset& data, const NetworkModel& model,
                                          const ParameterPoint<double>& estimate,
                                          std::uint64_t cap = default_state_cap());

/// Ancestral sampling; hidden columns are generated then masked.
Dataset sample_data(const NetworkModel& model, const ParameterPoint<double>& point, std::size_t n, std::uint64_t seed);

/// Sample including hidden columns (for tests and diagnostics).
std::vector<std::vector<int>> sample_full_cases(const NetworkModel& model, const ParameterPoint<double>& point,
                                                std::size_t n, std::uint64_t seed);

}  // namespace latentdim
