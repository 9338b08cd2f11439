#include "latentdim/rank.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "latentdim/rng.hpp"

namespace latentdim {

std::size_t rank_exact(const Matrix<Rational>& matrix) {
  const std::size_t rows = matrix.rows();
  const std::size_t cols = matrix.cols();
  std::vector<std::vector<mpz_class>> m(rows, std::vector<mpz_class>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    mpz_class scale = 1;
    for (const auto& v : matrix.row(r)) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), v.get_den_mpz_t());
    for (std::size_t c = 0; c < cols; ++c) {
      const Rational& v = matrix(r, c);
      m[r][c] = v.get_num() * (scale / v.get_den());
    }
  }

  // Bareiss: every entry after step k is a (k+1)-minor, so the division by
  // the previous pivot is exact.
  std::size_t rank = 0;
  mpz_class previous = 1;
  mpz_class scratch;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    const mpz_class& p = m[rank][col];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const mpz_class factor = m[r][col];
      for (std::size_t c = col + 1; c < cols; ++c) {
        scratch = p * m[r][c] - factor * m[rank][c];
        mpz_divexact(m[r][c].get_mpz_t(), scratch.get_mpz_t(), previous.get_mpz_t());
      }
      m[r][col] = 0;
    }
    previous = m[rank][col];
    ++rank;
  }
  return rank;
}

NumericRank numeric_rank(const Matrix<double>& matrix, double tolerance) {
  NumericRank out;
  if (matrix.rows() == 0 || matrix.cols() == 0) return out;
  Eigen::MatrixXd m(matrix.rows(), matrix.cols());
  for (std::size_t r = 0; r < matrix.rows(); ++r)
    for (std::size_t c = 0; c < matrix.cols(); ++c) m(r, c) = matrix(r, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());

  const double sigma_max = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  out.threshold = tolerance * sigma_max * static_cast<double>(std::max(matrix.rows(), matrix.cols()));
  for (double s : out.singular_values)
    if (s > out.threshold) ++out.rank;

  const double inf = std::numeric_limits<double>::infinity();
  if (sigma_max == 0.0) {
    out.gap = inf;
  } else if (out.rank == out.singular_values.size()) {
    // nothing discarded: compare against the round-off floor instead
    const double floor = std::numeric_limits<double>::epsilon() * sigma_max *
                         static_cast<double>(std::max(matrix.rows(), matrix.cols()));
    out.gap = out.singular_values.back() / floor;
  } else {
    const double discarded = out.singular_values[out.rank];
    out.gap = discarded == 0.0 ? inf : out.singular_values[out.rank - 1] / discarded;
  }
  out.low_confidence = out.gap < kMinimumSpectralGap;
  return out;
}

std::string_view to_string(RankMethod method) {
  return method == RankMethod::ExactRational ? "exact-rational" : "numeric-tolerance";
}

std::size_t RegularRankReport::min_trial_rank() const {
  std::size_t out = trials.empty() ? 0 : trials.front().rank;
  for (const auto& t : trials) out = std::min(out, t.rank);
  return out;
}

bool RegularRankReport::low_confidence() const {
  return std::any_of(trials.begin(), trials.end(), [](const TrialRank& t) { return t.low_confidence; });
}

nlohmann::json report_to_json(const RegularRankReport& report) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : report.trials) {
    nlohmann::json entry = {{"seed", t.seed}, {"rank", t.rank}};
    if (report.method == RankMethod::NumericTolerance) entry["low_confidence"] = t.low_confidence;
    trials.push_back(std::move(entry));
  }
  return {{"model_fingerprint", report.model_fingerprint},
          {"family", std::string(to_string(report.family))},
          {"trials", trials},
          {"d", report.d},
          {"d_prime", report.d_prime},
          {"observable_dof", report.observable_dof},
          {"method", std::string(to_string(report.method))},
          {"tolerance", report.tolerance ? nlohmann::json(*report.tolerance) : nlohmann::json(nullptr)}};
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) { return derive_seed(seed, static_cast<std::uint64_t>(trial)); }

namespace {

TrialRank run_trial(const NetworkModel& model, const RankOptions& options, RankMethod method, int trial) {
  const std::uint64_t base = trial_seed(options.seed, trial);
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? base : derive_seed(base, 1000 + static_cast<std::uint64_t>(attempt));
    auto point = sample_parameters(model, seed, options.scheme);
    if (!check_point(model, point).empty()) continue;
    TrialRank out;
    out.seed = seed;
    if (method == RankMethod::ExactRational) {
      out.rank = rank_exact(jacobian(model, point, options.state_cap));
    } else {
      auto numeric = numeric_rank(jacobian(model, to_real(point), options.state_cap), options.tolerance);
      out.rank = numeric.rank;
      out.low_confidence = numeric.low_confidence;
    }
    return out;
  }
  throw DomainError("could not sample a valid parameter point for trial " + std::to_string(trial));
}

}  // namespace

RegularRankReport regular_rank(const NetworkModel& model, const RankOptions& options) {
  require_valid(model);
  if (options.trials < 1) throw InputError("at least one rank trial is required");
  RankMethod method = options.method.value_or(model.family() == Family::Sigmoid ? RankMethod::NumericTolerance
                                                                                 : RankMethod::ExactRational);
  if (method == RankMethod::ExactRational && model.family() == Family::Sigmoid)
    throw InputError("sigmoid networks only support the numeric rank path");

  RegularRankReport report;
  report.model_fingerprint = model.fingerprint();
  report.family = model.family();
  report.d_prime = parameter_count(model);
  report.observable_dof = observable_parameter_count(model);
  report.method = method;
  if (method == RankMethod::NumericTolerance) report.tolerance = options.tolerance;

  if (options.parallel) {
    std::vector<std::future<TrialRank>> futures;
    for (int t = 0; t < options.trials; ++t)
      futures.push_back(std::async(std::launch::async, run_trial, std::cref(model), std::cref(options), method, t));
    for (auto& f : futures) report.trials.push_back(f.get());
  } else {
    for (int t = 0; t < options.trials; ++t) report.trials.push_back(run_trial(model, options, method, t));
  }
  for (const auto& t : report.trials) report.d = std::max(report.d, t.rank);
  return report;
}

bool check_naive_bayes_bounds(const RegularRankReport& report, int n) {
  if (n <= 2) throw InputError("the rank bounds apply to naive Bayes models with n > 2 leaves");
  const auto lo = static_cast<std::size_t>(2 * n);
  return report.d >= lo && report.d <= lo + 1;
}

Matrix<double> finite_difference_jacobian(const NetworkModel& model, const ParameterPoint<double>& point, double step,
                                          std::uint64_t cap) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  const auto& layout = point.layout();
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.family() == Family::Discrete) {
      for (std::size_t j = 0; j < layout.rows[i]; ++j)
        for (std::size_t k = 0; k < layout.width[i]; ++k) {
          double v = point.theta(i, j, k);
          if (v < 2 * step || v > 1.0 - 2 * step) throw DomainError("point is within 2*step of the simplex boundary");
        }
    } else if (model.family() == Family::LinearGaussian && point.variance(i) < 2 * step) {
      throw DomainError("variance is within 2*step of zero");
    }
  }

  const auto base = point.free_values();
  Matrix<double> out;
  for (std::size_t c = 0; c < base.size(); ++c) {
    auto plus = base;
    auto minus = base;
    plus[c] += step;
    minus[c] -= step;
    auto w_plus = observable_map(model, from_free_values<double>(model, plus), cap).free_coordinates();
    auto w_minus = observable_map(model, from_free_values<double>(model, minus), cap).free_coordinates();
    if (c == 0) out = Matrix<double>(w_plus.size(), base.size());
    for (std::size_t r = 0; r < w_plus.size(); ++r) out(r, c) = (w_plus[r] - w_minus[r]) / (2 * step);
  }
  return out;
}

}  // namespace latentdim
