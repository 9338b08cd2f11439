#include "latentdim/scoring.hpp"

#include <cmath>

namespace latentdim {

PriorSpec PriorSpec::uniform(const NetworkModel& model, double alpha) {
  std::vector<Variable> vars = model.variables();
  for (auto& v : vars) v.hidden = false;
  NetworkModel network(Family::Discrete, std::move(vars), std::vector<std::vector<int>>(model.size()));
  auto point = to_real(uniform_parameters(network));
  return PriorSpec{alpha, std::move(network), std::move(point)};
}

CountTable prior_counts(const PriorSpec& prior, const NetworkModel& model, std::uint64_t cap) {
  if (!(prior.alpha > 0.0)) throw DomainError("equivalent sample size must be positive");
  require_valid(prior.network);
  if (prior.network.family() != Family::Discrete || !prior.network.fully_observed())
    throw InputError("prior network must be a fully observed discrete network");
  if (prior.network.size() != model.size()) throw InputError("prior network has a different variable set");

  // model index -> prior index
  std::vector<std::size_t> to_prior(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    auto idx = prior.network.index_of(model.variable(i).name);
    if (!idx || prior.network.variable(*idx).states != model.variable(i).states)
      throw InputError("prior network does not match variable '" + model.variable(i).name + "'");
    to_prior[i] = *idx;
  }

  const auto joint = discrete_joint(prior.network, prior.point, cap).joint;
  StateIndexer indexer([&] {
    std::vector<int> cards;
    for (const auto& v : prior.network.variables()) cards.push_back(v.states);
    return cards;
  }());

  CountTable out;
  out.layout = ParameterLayout::cpt(model);
  out.values.assign(out.layout.total, 0.0);
  std::vector<int> prior_config(prior.network.size());
  std::vector<int> config(model.size());
  for (std::uint64_t s = 0; s < joint.size(); ++s) {
    indexer.decode(s, prior_config);
    for (std::size_t i = 0; i < model.size(); ++i) config[i] = prior_config[to_prior[i]];
    for (std::size_t i = 0; i < model.size(); ++i) {
      std::size_t j = 0;
      for (int p : model.parents(i)) j = j * static_cast<std::size_t>(model.variable(p).states) + config[p];
      out.values[out.layout.index(i, j, config[i])] += prior.alpha * joint[s];
    }
  }
  return out;
}

double ch_marginal_loglik(const CountTable& stats, const CountTable& alpha) {
  if (!(stats.layout == alpha.layout)) throw InputError("prior counts and statistics have different layouts");
  const auto& layout = stats.layout;
  double total = 0.0;
  for (std::size_t i = 0; i < layout.offset.size(); ++i) {
    for (std::size_t j = 0; j < layout.rows[i]; ++j) {
      double alpha_row = 0.0;
      double count_row = 0.0;
      for (std::size_t k = 0; k < layout.width[i]; ++k) {
        const double a = alpha.at(i, j, k);
        const double n = stats.at(i, j, k);
        if (!(a > 0.0)) throw DomainError("Dirichlet pseudo-counts must be positive");
        if (n < 0.0) throw DomainError("counts must be nonnegative");
        total += std::lgamma(a + n) - std::lgamma(a);
        alpha_row += a;
        count_row += n;
      }
      total += std::lgamma(alpha_row) - std::lgamma(alpha_row + count_row);
    }
  }
  return total;
}

double projected_entropy(const SufficientStatistics& stats) {
  if (!(stats.cases > 0.0)) throw DomainError("entropy needs at least one case");
  const auto& layout = stats.layout;
  double h = 0.0;
  for (std::size_t i = 0; i < layout.offset.size(); ++i) {
    for (std::size_t j = 0; j < layout.rows[i]; ++j) {
      const double row = stats.row_total(i, j);
      if (row <= 0.0) continue;
      for (std::size_t k = 0; k < layout.width[i]; ++k) {
        const double n = stats.at(i, j, k);
        if (n > 0.0) h -= (n / stats.cases) * std::log(n / row);
      }
    }
  }
  return h;
}

nlohmann::json score_to_json(const ScoreReport& report) {
  nlohmann::json out = {{"score", report.score},
                        {"value_nats", report.value},
                        {"loglik_term", report.loglik_term},
                        {"penalty_term", report.penalty_term},
                        {"d_used", report.d_used ? nlohmann::json(*report.d_used) : nlohmann::json(nullptr)},
                        {"d_prime", report.d_prime},
                        {"N", report.cases},
                        {"model_fingerprint", report.model_fingerprint}};
  if (!report.components.empty()) out["components"] = report.components;
  return out;
}

namespace {

ScoreReport base_report(std::string name, const Dataset& data, const NetworkModel& model) {
  if (data.model_fingerprint() != model.fingerprint()) throw InputError("dataset was built for a different model");
  ScoreReport out;
  out.score = std::move(name);
  out.d_prime = parameter_count(model);
  out.cases = static_cast<double>(data.size());
  out.model_fingerprint = model.fingerprint();
  return out;
}

void require_cases(const Dataset& data) {
  if (data.empty()) throw DomainError("scoring needs at least one case");
}

void require_estimate(const NetworkModel& model, const ParameterPoint<double>& estimate) {
  if (estimate.fingerprint() != model.fingerprint()) throw InputError("estimate belongs to a different model");
}

void require_rank(const NetworkModel& model, const RegularRankReport& rank) {
  if (rank.model_fingerprint != model.fingerprint()) throw InputError("rank report belongs to a different model");
}

}  // namespace

ScoreReport ch_score(const Dataset& data, const NetworkModel& model, const PriorSpec& prior) {
  auto out = base_report("ch", data, model);
  const auto stats = complete_counts(data, model);
  out.value = ch_marginal_loglik(stats, prior_counts(prior, model));
  out.loglik_term = out.value;
  out.components["alpha"] = prior.alpha;
  return out;
}

ScoreReport bic_complete(const Dataset& data, const NetworkModel& model) {
  auto out = base_report("bic", data, model);
  require_cases(data);
  const auto stats = complete_counts(data, model);
  const double n = out.cases;
  out.loglik_term = -n * projected_entropy(stats);
  out.penalty_term = -0.5 * static_cast<double>(out.d_prime) * std::log(n);
  out.value = out.loglik_term + out.penalty_term;
  out.d_used = out.d_prime;
  return out;
}

ScoreReport bic_latent(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& estimate,
                       const RegularRankReport& rank) {
  auto out = base_report("bic-latent", data, model);
  require_cases(data);
  require_estimate(model, estimate);
  require_rank(model, rank);
  out.loglik_term = loglik(data, model, estimate);
  out.penalty_term = -0.5 * static_cast<double>(rank.d) * std::log(out.cases);
  out.value = out.loglik_term + out.penalty_term;
  out.d_used = rank.d;
  return out;
}

ScoreReport cs_score(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& estimate,
                     const PriorSpec& prior) {
  auto out = base_report("cs", data, model);
  require_cases(data);
  require_estimate(model, estimate);
  const auto completed = completed_statistics(data, model, estimate);
  const double ch_completed = ch_marginal_loglik(completed, prior_counts(prior, model));
  const double ll = loglik(data, model, estimate);
  double ll_completed = 0.0;
  for (std::size_t c = 0; c < completed.values.size(); ++c) {
    const double n = completed.values[c];
    if (n > 0.0) ll_completed += n * std::log(estimate[c]);
  }
  out.loglik_term = ll;
  out.penalty_term = ch_completed - ll_completed;
  out.value = ch_completed + ll - ll_completed;
  out.components = {{"ch_completed", ch_completed}, {"loglik_completed", ll_completed}, {"alpha", prior.alpha}};
  return out;
}

ScoreReport cs_corrected(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& estimate,
                         const PriorSpec& prior, const RegularRankReport& rank) {
  require_rank(model, rank);
  auto out = cs_score(data, model, estimate, prior);
  out.score = "cs-corrected";
  const double correction = 0.5 * (static_cast<double>(out.d_prime) - static_cast<double>(rank.d)) * std::log(out.cases);
  out.value += correction;
  out.penalty_term += correction;
  out.d_used = rank.d;
  out.components["correction"] = correction;
  return out;
}

std::vector<double> leading_principal_minors(const Matrix<double>& m) {
  std::vector<double> out;
  const std::size_t n = std::min(m.rows(), m.cols());
  for (std::size_t size = 1; size <= n; ++size) {
    Matrix<double> a(size, size);
    for (std::size_t r = 0; r < size; ++r)
      for (std::size_t c = 0; c < size; ++c) a(r, c) = m(r, c);
    double det = 1.0;
    for (std::size_t col = 0; col < size; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < size; ++r)
        if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
      if (a(pivot, col) == 0.0) {
        det = 0.0;
        break;
      }
      if (pivot != col) {
        for (std::size_t c = 0; c < size; ++c) std::swap(a(pivot, c), a(col, c));
        det = -det;
      }
      det *= a(col, col);
      for (std::size_t r = col + 1; r < size; ++r) {
        const double f = a(r, col) / a(col, col);
        for (std::size_t c = col; c < size; ++c) a(r, c) -= f * a(col, c);
      }
    }
    out.push_back(det);
  }
  return out;
}

Matrix<double> multinomial_hessian(const std::vector<long long>& counts) {
  if (counts.size() < 2) throw DomainError("a multinomial needs at least two states");
  long long total = 0;
  for (long long c : counts) {
    if (c <= 0) throw DomainError("zero count: the ML point lies on the simplex boundary");
    total += c;
  }
  const double n = static_cast<double>(total);
  const std::size_t r = counts.size();
  const double last = static_cast<double>(counts.back()) / n;
  Matrix<double> h(r - 1, r - 1);
  for (std::size_t a = 0; a + 1 < r; ++a) {
    const double w = static_cast<double>(counts[a]) / n;
    for (std::size_t b = 0; b + 1 < r; ++b) h(a, b) = n * ((a == b ? 1.0 / w : 0.0) + 1.0 / last);
  }
  for (double minor : leading_principal_minors(h))
    if (!(minor > 0.0)) throw DomainError("multinomial Hessian is not positive definite");
  return h;
}

}  // namespace latentdim
