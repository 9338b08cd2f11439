#include "latentdim/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "latentdim/rng.hpp"

namespace latentdim {

double CountTable::row_total(std::size_t i, std::size_t j) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < layout.width[i]; ++k) sum += at(i, j, k);
  return sum;
}

double CountTable::variable_total(std::size_t i) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < layout.rows[i]; ++j) sum += row_total(i, j);
  return sum;
}

namespace {

void require_compatible(const Dataset& data, const NetworkModel& model) {
  if (data.model_fingerprint() != model.fingerprint()) throw InputError("dataset was built for a different model");
}

SufficientStatistics empty_stats(const NetworkModel& model, double cases) {
  SufficientStatistics out;
  out.layout = ParameterLayout::cpt(model);
  out.values.assign(out.layout.total, 0.0);
  out.cases = cases;
  out.model_fingerprint = model.fingerprint();
  return out;
}

/// Distinct case patterns with multiplicities.
std::vector<std::pair<std::vector<int>, double>> group_cases(const Dataset& data) {
  std::map<std::vector<int>, double> counts;
  for (const auto& row : data.cases()) counts[row] += 1.0;
  return {counts.begin(), counts.end()};
}

std::size_t family_row(const NetworkModel& model, std::size_t i, const std::vector<int>& config) {
  std::size_t j = 0;
  for (int p : model.parents(i)) j = j * static_cast<std::size_t>(model.variable(p).states) + config[p];
  return j;
}

/// Accumulates the posterior over the unobserved entries of one case pattern.
/// Returns log p(observed part); adds weight * posterior to `counts` when given.
double enumerate_case(const NetworkModel& model, const ParameterLayout& layout, const std::vector<double>& cpt,
                      const std::vector<int>& pattern, double weight, std::vector<double>* counts, std::uint64_t cap) {
  const std::size_t n = model.size();
  std::vector<std::size_t> free;
  std::vector<int> free_cards;
  std::uint64_t configs = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (pattern[i] != kMissing) continue;
    free.push_back(i);
    free_cards.push_back(model.variable(i).states);
    configs *= static_cast<std::uint64_t>(model.variable(i).states);
    if (configs > cap) throw StateCapExceeded("hidden configuration count exceeds the state cap");
  }

  std::vector<int> config = pattern;
  for (auto i : free) config[i] = 0;
  std::vector<int> digits(free.size(), 0);
  std::vector<double> probs(configs);
  double total = 0.0;
  for (std::uint64_t s = 0; s < configs; ++s) {
    double p = 1.0;
    for (std::size_t i = 0; i < n && p != 0.0; ++i) p *= cpt[layout.index(i, family_row(model, i, config), config[i])];
    probs[s] = p;
    total += p;
    next_config(digits, free_cards);
    for (std::size_t f = 0; f < free.size(); ++f) config[free[f]] = digits[f];
  }
  if (!(total > 0.0)) return -std::numeric_limits<double>::infinity();

  if (counts) {
    for (std::uint64_t s = 0; s < configs; ++s) {
      const double w = weight * probs[s] / total;
      if (w != 0.0)
        for (std::size_t i = 0; i < n; ++i) (*counts)[layout.index(i, family_row(model, i, config), config[i])] += w;
      next_config(digits, free_cards);
      for (std::size_t f = 0; f < free.size(); ++f) config[free[f]] = digits[f];
    }
  }
  return std::log(total);
}

struct Prepared {
  ParameterLayout layout;
  std::vector<std::pair<std::vector<int>, double>> patterns;
};

EStep run_e_step(const NetworkModel& model, const Prepared& prepared, const std::vector<double>& cpt, double cases,
                 std::uint64_t cap) {
  EStep out{empty_stats(model, cases), 0.0};
  for (const auto& [pattern, weight] : prepared.patterns) {
    double ll = enumerate_case(model, prepared.layout, cpt, pattern, weight, &out.counts.values, cap);
    out.loglik += weight * ll;
  }
  return out;
}

}  // namespace

SufficientStatistics complete_counts(const Dataset& data, const NetworkModel& model) {
  require_compatible(data, model);
  auto out = empty_stats(model, static_cast<double>(data.size()));
  for (std::size_t c = 0; c < data.size(); ++c) {
    const auto& row = data[c];
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (row[i] == kMissing) throw InputError("complete_counts: case " + std::to_string(c) + " has a missing value");
    }
    for (std::size_t i = 0; i < model.size(); ++i) out.values[out.layout.index(i, family_row(model, i, row), row[i])] += 1.0;
  }
  return out;
}

std::vector<double> local_cpt(const NetworkModel& model, const ParameterPoint<double>& point) {
  if (point.fingerprint() != model.fingerprint()) throw InputError("parameter point belongs to a different model");
  switch (model.family()) {
    case Family::Discrete:
      return point.values();
    case Family::Sigmoid:
      return sigmoid_cpt(model, point);
    case Family::LinearGaussian:
      break;
  }
  throw InputError("discrete inference does not apply to linear-gaussian networks");
}

EStep e_step(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& point, std::uint64_t cap) {
  require_compatible(data, model);
  Prepared prepared{ParameterLayout::cpt(model), group_cases(data)};
  return run_e_step(model, prepared, local_cpt(model, point), static_cast<double>(data.size()), cap);
}

double loglik(const Dataset& data, const NetworkModel& model, const ParameterPoint<double>& point, std::uint64_t cap) {
  require_compatible(data, model);
  const auto layout = ParameterLayout::cpt(model);
  const auto cpt = local_cpt(model, point);
  double total = 0.0;
  for (const auto& [pattern, weight] : group_cases(data))
    total += weight * enumerate_case(model, layout, cpt, pattern, weight, nullptr, cap);
  return total;
}

SufficientStatistics expected_counts(const Dataset& data, const NetworkModel& model,
                                     const ParameterPoint<double>& point, std::uint64_t cap) {
  return e_step(data, model, point, cap).counts;
}

EmResult em_fit(const Dataset& data, const NetworkModel& model, const EmOptions& options) {
  require_valid(model);
  require_compatible(data, model);
  if (model.family() != Family::Discrete) throw InputError("em_fit supports the Discrete family");
  if (options.restarts < 1) throw InputError("em_fit needs at least one restart");
  for (const auto& row : data.cases())
    if (std::none_of(row.begin(), row.end(), [](int v) { return v != kMissing; }))
      throw InputError("em_fit: every case needs at least one observed value");

  Prepared prepared{ParameterLayout::cpt(model), group_cases(data)};
  const double cases = static_cast<double>(data.size());
  const auto& layout = prepared.layout;

  EmResult best;
  bool have_best = false;
  for (int restart = 0; restart < options.restarts; ++restart) {
    EmRun run;
    run.seed = derive_seed(options.seed, static_cast<std::uint64_t>(restart));
    std::vector<double> theta = to_real(sample_parameters(model, run.seed)).values();
    EStep current = run_e_step(model, prepared, theta, cases, options.state_cap);
    run.trace.push_back(current.loglik);

    while (run.iterations < options.max_iterations) {
      std::vector<double> next = theta;
      for (std::size_t i = 0; i < model.size(); ++i) {
        for (std::size_t j = 0; j < layout.rows[i]; ++j) {
          double row = current.counts.row_total(i, j);
          if (!(row > 0.0)) {
            run.zero_row = true;
            continue;
          }
          for (std::size_t k = 0; k < layout.width[i]; ++k) next[layout.index(i, j, k)] = current.counts.at(i, j, k) / row;
        }
      }
      EStep updated = run_e_step(model, prepared, next, cases, options.state_cap);
      ++run.iterations;
      run.trace.push_back(updated.loglik);
      const double gain = updated.loglik - current.loglik;
      theta = std::move(next);
      current = std::move(updated);
      if (gain < options.tolerance) {
        run.converged = true;
        break;
      }
    }
    run.loglik = current.loglik;

    if (!have_best || run.loglik > best.loglik) {
      best.point = ParameterPoint<double>(layout, model.fingerprint(), theta);
      best.loglik = run.loglik;
      best.trace = run.trace;
      best.iterations = run.iterations;
      best.converged = run.converged;
      best.zero_row = run.zero_row;
      have_best = true;
    }
    best.runs.push_back(std::move(run));
  }
  return best;
}

SufficientStatistics completed_statistics(const Dataset& data, const NetworkModel& model,
                                          const ParameterPoint<double>& estimate, std::uint64_t cap) {
  return expected_counts(data, model, estimate, cap);
}

std::vector<std::vector<int>> sample_full_cases(const NetworkModel& model, const ParameterPoint<double>& point,
                                                std::size_t n, std::uint64_t seed) {
  require_valid(model);
  if (model.family() == Family::LinearGaussian) throw InputError("sample_data supports Discrete and Sigmoid networks");
  const auto layout = ParameterLayout::cpt(model);
  const auto cpt = local_cpt(model, point);
  const auto order = model.topological_order();
  Rng rng(seed);
  std::vector<std::vector<int>> out(n, std::vector<int>(model.size(), 0));
  for (auto& row : out) {
    for (std::size_t i : order) {
      const std::size_t j = family_row(model, i, row);
      double u = rng.uniform01();
      const std::size_t r = layout.width[i];
      std::size_t k = 0;
      for (; k + 1 < r; ++k) {
        u -= cpt[layout.index(i, j, k)];
        if (u < 0.0) break;
      }
      row[i] = static_cast<int>(k);
    }
  }
  return out;
}

Dataset sample_data(const NetworkModel& model, const ParameterPoint<double>& point, std::size_t n, std::uint64_t seed) {
  auto cases = sample_full_cases(model, point, n, seed);
  for (auto h : model.hidden())
    for (auto& row : cases) row[h] = kMissing;
  return Dataset(model, std::move(cases));
}

}  // namespace latentdim
