#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "latentdim/dataset.hpp"
#include "latentdim/inference.hpp"
#include "latentdim/matrix.hpp"
#include "latentdim/network.hpp"
#include "latentdim/parameters.hpp"
#include "latentdim/rank.hpp"

namespace latentdim {

/// Dirichlet prior from a fully observed prior network q and an equivalent
/// sample size alpha: alpha_ijk = alpha * q(X_i = k, Pa_i = j).
struct PriorSpec {
  double alpha = 1.0;
  NetworkModel network;
  ParameterPoint<double> point;

  /// Prior network with no edges and uniform CPTs over the model's variables.
  static PriorSpec uniform(const NetworkModel& model, double alpha = 1.0);
};

/// Marginalizes the prior network's joint onto each family {X_i} u Pa_i of `model`.
CountTable prior_counts(const PriorSpec& prior, const NetworkModel& model, std::uint64_t cap = default_state_cap());

/// log of the Cooper-Herskovits marginal likelihood; fractional counts allowed.
double ch_marginal_loglik(const CountTable& stats, const CountTable& alpha);

/// H(S, D) from complete-data counts; -N * H is the maximized loglik.
double projected_entropy(const SufficientStatistics& stats);

struct ScoreReport {
  std::string score;
  double value = 0.0;
  double loglik_term = 0.0;
  double penalty_term = 0.0;
  std::optional<std::size_t> d_used;
  std::size_t d_prime = 0;
  double cases = 0.0;
  std::string model_fingerprint;
  /// Score-specific named terms.
  std::map<std::string, double> components;
};

nlohmann::json score_to_json(const ScoreReport& report);

/// log p(D | S) by the Cooper-Herskovits formula on complete data.
ScoreReport ch_score(const Dataset& data, const NetworkModel& model, const PriorSpec& prior);

/// -N * H(S, D) - (d'/2) log N.
ScoreReport bic_complete(const Dataset& data, const NetworkModel& model);

/// log p(D | theta_hat) - (d/2) log N with d the regular rank.
ScoreReport bic_latent(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& estimate,
                       const RegularRankReport& rank);

/// log p(D_c | S) + log p(D | theta_hat) - log p(D_c | theta_hat).
ScoreReport cs_score(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& estimate,
                     const PriorSpec& prior);

/// cs_score + ((d' - d) / 2) log N.
ScoreReport cs_corrected(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& estimate,
                         const PriorSpec& prior, const RegularRankReport& rank);

/// -f'' of the multinomial loglik at the ML point w_k = counts_k / N, over
/// the first r - 1 coordinates: N * (diag(1 / w_k) + 1 / w_r). Throws
/// DomainError on a zero count, or if the result is not positive definite.
Matrix<double> multinomial_hessian(const std::vector<long long>& counts);

/// Leading principal minors, by fraction-free elimination on doubles.
std::vector<double> leading_principal_minors(const Matrix<double>& m);

}  // namespace latentdim
