#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "latentdim/matrix.hpp"
#include "latentdim/network.hpp"
#include "latentdim/observable_map.hpp"
#include "latentdim/parameters.hpp"
#include "latentdim/rational.hpp"

namespace latentdim {

/// Exact rank by fraction-free (Bareiss) elimination after clearing
/// denominators row by row.
std::size_t rank_exact(const Matrix<Rational>& matrix);

struct NumericRank {
  std::size_t rank = 0;
  std::vector<double> singular_values;  // descending
  double threshold = 0.0;
  /// Smallest retained over largest discarded singular value. With nothing
  /// discarded, the round-off floor eps * sigma_max * max(rows, cols) stands
  /// in for the discarded side.
  double gap = 0.0;
  bool low_confidence = false;
};

inline constexpr double kDefaultRankTolerance = 1e-9;
inline constexpr double kMinimumSpectralGap = 1e3;

/// Singular values above tolerance * sigma_max * max(rows, cols) count.
NumericRank numeric_rank(const Matrix<double>& matrix, double tolerance = kDefaultRankTolerance);

inline std::size_t rank_numeric(const Matrix<double>& matrix, double tolerance = kDefaultRankTolerance) {
  return numeric_rank(matrix, tolerance).rank;
}

enum class RankMethod { ExactRational, NumericTolerance };

std::string_view to_string(RankMethod method);

struct TrialRank {
  std::uint64_t seed = 0;
  std::size_t rank = 0;
  bool low_confidence = false;
};

struct RegularRankReport {
  std::string model_fingerprint;
  Family family = Family::Discrete;
  std::vector<TrialRank> trials;
  std::size_t d = 0;
  std::size_t d_prime = 0;
  std::size_t observable_dof = 0;
  RankMethod method = RankMethod::ExactRational;
  std::optional<double> tolerance;

  std::size_t min_trial_rank() const;
  bool low_confidence() const;
};

nlohmann::json report_to_json(const RegularRankReport& report);

struct RankOptions {
  int trials = 10;
  std::uint64_t seed = 0;
  /// Exact for Discrete/LinearGaussian, numeric for Sigmoid unless forced.
  std::optional<RankMethod> method;
  double tolerance = kDefaultRankTolerance;
  int max_retries = 8;
  /// Run trials on separate threads; aggregation is order-independent.
  bool parallel = false;
  std::uint64_t state_cap = default_state_cap();
  SamplingScheme scheme{};
};

/// Seed used for trial `t` under base seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

/// Randomized regular rank: sample a point per trial, take the Jacobian rank,
/// report the maximum.
RegularRankReport regular_rank(const NetworkModel& model, const RankOptions& options = {});

/// 2n <= d <= 2n + 1 for a naive Bayes model with a binary hidden root and n > 2 binary leaves.
bool check_naive_bayes_bounds(const RegularRankReport& report, int n);

/// Central differences on the free coordinates. Throws DomainError when the
/// point is within 2 * step of the parameter-space boundary.
Matrix<double> finite_difference_jacobian(const NetworkModel& model, const ParameterPoint<double>& point, double step,
                                          std::uint64_t cap = default_state_cap());

}  // namespace latentdim
