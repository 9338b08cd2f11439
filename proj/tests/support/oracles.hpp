#pragma once

// Test-only reference computations. Nothing here calls the library code
// paths it is used to check.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "latentdim/dataset.hpp"
#include "latentdim/matrix.hpp"
#include "latentdim/network.hpp"
#include "latentdim/parameters.hpp"
#include "latentdim/rational.hpp"
#include "latentdim/rng.hpp"

namespace oracle {

using latentdim::Matrix;
using latentdim::NetworkModel;
using latentdim::Rational;

/// Canonical p/q (mpq_class does not reduce on construction).
inline Rational frac(long p, long q) {
  Rational out(p, q);
  out.canonicalize();
  return out;
}

/// Reduced row echelon form over the rationals; returns the number of pivots.
inline std::size_t rref_rank(Matrix<Rational> m) {
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < m.cols() && pivot_row < m.rows(); ++col) {
    std::size_t r = pivot_row;
    while (r < m.rows() && m(r, col) == 0) ++r;
    if (r == m.rows()) continue;
    for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(r, c), m(pivot_row, c));
    Rational inv = 1 / m(pivot_row, col);
    for (std::size_t c = 0; c < m.cols(); ++c) m(pivot_row, c) *= inv;
    for (std::size_t other = 0; other < m.rows(); ++other) {
      if (other == pivot_row || m(other, col) == 0) continue;
      Rational f = m(other, col);
      for (std::size_t c = 0; c < m.cols(); ++c) m(other, c) -= f * m(pivot_row, c);
    }
    ++pivot_row;
  }
  return pivot_row;
}

/// Rational determinant by plain elimination.
inline Rational determinant(Matrix<Rational> m) {
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t r = col;
    while (r < n && m(r, col) == 0) ++r;
    if (r == n) return 0;
    if (r != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(r, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t o = col + 1; o < n; ++o) {
      Rational f = m(o, col) / m(col, col);
      for (std::size_t c = col; c < n; ++c) m(o, c) -= f * m(col, c);
    }
  }
  return det;
}

inline std::vector<Rational> leading_minors(const Matrix<Rational>& m) {
  std::vector<Rational> out;
  for (std::size_t k = 1; k <= m.rows(); ++k) {
    Matrix<Rational> sub(k, k);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) sub(r, c) = m(r, c);
    out.push_back(determinant(sub));
  }
  return out;
}

/// Probability of one full configuration from the CPT values of a discrete point.
template <class T>
T config_probability(const NetworkModel& model, const std::vector<T>& cpt, const std::vector<int>& config) {
  // independent re-derivation of the flat offsets
  T p(1);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    std::size_t j = 0;
    std::size_t q = 1;
    for (int parent : model.parents(i)) {
      j = j * model.variable(parent).states + config[parent];
      q *= model.variable(parent).states;
    }
    p *= cpt[offset + j * model.variable(i).states + config[i]];
    offset += q * model.variable(i).states;
  }
  return p;
}

/// Calls f(config) for every full configuration, first variable slowest.
inline void for_each_config(const std::vector<int>& cards, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> config(cards.size(), 0);
  while (true) {
    f(config);
    std::size_t i = cards.size();
    while (i > 0) {
      --i;
      if (++config[i] < cards[i]) break;
      config[i] = 0;
      if (i == 0) return;
    }
    if (cards.empty()) return;
  }
}

inline std::vector<int> cards_of(const NetworkModel& model) {
  std::vector<int> out;
  for (const auto& v : model.variables()) out.push_back(v.states);
  return out;
}

/// Full joint over all variables as a map from configuration to probability.
template <class T>
std::map<std::vector<int>, T> full_joint(const NetworkModel& model, const std::vector<T>& cpt) {
  std::map<std::vector<int>, T> out;
  for_each_config(cards_of(model), [&](const std::vector<int>& c) { out[c] = config_probability(model, cpt, c); });
  return out;
}

/// log p(D | theta) via the explicit full joint: each case sums the joint
/// entries consistent with its observed values.
inline double loglik_full_joint(const latentdim::Dataset& data, const NetworkModel& model, const std::vector<double>& cpt) {
  auto joint = full_joint(model, cpt);
  double total = 0.0;
  for (const auto& row : data.cases()) {
    double p = 0.0;
    for (const auto& [config, prob] : joint) {
      bool match = true;
      for (std::size_t i = 0; i < row.size() && match; ++i) match = row[i] == latentdim::kMissing || row[i] == config[i];
      if (match) p += prob;
    }
    total += std::log(p);
  }
  return total;
}

/// Sum over directed paths from `from` to `to` of the product of edge
/// coefficients (1 for the trivial path).
inline Rational path_sum(const NetworkModel& model, const latentdim::ParameterPoint<Rational>& point, std::size_t from,
                         std::size_t to) {
  if (from == to) return 1;
  Rational total = 0;
  const auto& parents = model.parents(to);
  for (std::size_t p = 0; p < parents.size(); ++p)
    total += point.coefficient(to, p) * path_sum(model, point, from, static_cast<std::size_t>(parents[p]));
  return total;
}

/// Trek rule: cov(i, j) = sum over trek tops s of v_s * paths(s -> i) * paths(s -> j).
inline Rational trek_covariance(const NetworkModel& model, const latentdim::ParameterPoint<Rational>& point,
                                std::size_t i, std::size_t j) {
  Rational total = 0;
  for (std::size_t s = 0; s < model.size(); ++s)
    total += point.variance(s) * path_sum(model, point, s, i) * path_sum(model, point, s, j);
  return total;
}

/// log p(D) as the product of sequential Dirichlet-posterior predictives:
/// p(x_i = k | pa = j, previous cases) = (alpha_ijk + n_ijk) / (alpha_ij + n_ij).
inline double sequential_predictive(const NetworkModel& model, const latentdim::Dataset& data,
                                    const std::vector<double>& alpha) {
  std::vector<double> seen(alpha.size(), 0.0);
  double total = 0.0;
  for (const auto& row : data.cases()) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < model.size(); ++i) {
      std::size_t j = 0;
      std::size_t q = 1;
      for (int parent : model.parents(i)) {
        j = j * model.variable(parent).states + row[parent];
        q *= model.variable(parent).states;
      }
      const std::size_t r = model.variable(i).states;
      double alpha_row = 0.0;
      double seen_row = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        alpha_row += alpha[offset + j * r + k];
        seen_row += seen[offset + j * r + k];
      }
      const std::size_t cell = offset + j * r + row[i];
      total += std::log((alpha[cell] + seen[cell]) / (alpha_row + seen_row));
      seen[cell] += 1.0;
      offset += q * r;
    }
  }
  return total;
}

/// Best log p(D | theta) over `points` random CPT assignments (each row a
/// normalized vector of uniform draws). Enumerates full configurations once
/// and groups identical cases.
inline double random_search_loglik(const NetworkModel& model, const latentdim::Dataset& data, int points,
                                   std::uint64_t seed) {
  std::vector<std::vector<int>> configs;
  for_each_config(cards_of(model), [&](const std::vector<int>& c) { configs.push_back(c); });
  std::map<std::vector<int>, double> patterns;
  for (const auto& row : data.cases()) patterns[row] += 1.0;
  std::vector<std::pair<double, std::vector<std::size_t>>> matches;
  for (const auto& [row, count] : patterns) {
    std::vector<std::size_t> hit;
    for (std::size_t c = 0; c < configs.size(); ++c) {
      bool ok = true;
      for (std::size_t i = 0; i < row.size() && ok; ++i) ok = row[i] == latentdim::kMissing || row[i] == configs[c][i];
      if (ok) hit.push_back(c);
    }
    matches.emplace_back(count, std::move(hit));
  }
  // row layout: variable i has q_i rows of r_i entries
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i < model.size(); ++i)
    for (std::uint64_t j = 0; j < model.parent_states(i); ++j) widths.push_back(model.variable(i).states);

  latentdim::Rng rng(seed);
  std::vector<double> cpt;
  std::vector<double> prob(configs.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < points; ++s) {
    cpt.clear();
    for (std::size_t w : widths) {
      double total = 0.0;
      const std::size_t start = cpt.size();
      for (std::size_t k = 0; k < w; ++k) {
        cpt.push_back(rng.uniform01() + 1e-12);
        total += cpt.back();
      }
      for (std::size_t k = start; k < cpt.size(); ++k) cpt[k] /= total;
    }
    for (std::size_t c = 0; c < configs.size(); ++c) prob[c] = config_probability(model, cpt, configs[c]);
    double ll = 0.0;
    for (const auto& [count, hit] : matches) {
      double p = 0.0;
      for (std::size_t c : hit) p += prob[c];
      ll += count * std::log(p);
    }
    best = std::max(best, ll);
  }
  return best;
}

}  // namespace oracle
