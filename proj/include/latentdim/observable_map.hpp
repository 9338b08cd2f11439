#pragma once

#include <cstdint>
#include <type_traits>
#include <vector>

#include "latentdim/dual.hpp"
#include "latentdim/error.hpp"
#include "latentdim/matrix.hpp"
#include "latentdim/network.hpp"
#include "latentdim/parameters.hpp"
#include "latentdim/state_indexer.hpp"

namespace latentdim {

/// 2^24 unless the LATENTDIM_STATE_CAP environment variable overrides it.
std::uint64_t default_state_cap();

/// Product of all variable cardinalities; throws StateCapExceeded above `cap`.
std::uint64_t checked_joint_size(const NetworkModel& model, std::uint64_t cap);

/// Parameters W of the distribution over the observed variables.
///
/// Discrete/Sigmoid: the full joint table, indexed by StateIndexer over the
/// observed variables in declaration order.
/// LinearGaussian: mean vector and covariance over the observed variables.
template <class T>
struct ObservableParameters {
  Family family = Family::Discrete;
  std::vector<std::size_t> observed;
  std::vector<T> joint;
  std::vector<T> mean;
  Matrix<T> covariance;

  /// Jacobian row coordinates. Discrete/Sigmoid: every joint cell except the
  /// last (all-last-state) cell. LinearGaussian: means, then variances, then
  /// covariances (i < j) in row-major order.
  std::vector<T> free_coordinates() const {
    std::vector<T> out;
    if (family == Family::LinearGaussian) {
      const std::size_t m = mean.size();
      for (std::size_t i = 0; i < m; ++i) out.push_back(mean[i]);
      for (std::size_t i = 0; i < m; ++i) out.push_back(covariance(i, i));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) out.push_back(covariance(i, j));
    } else {
      out.assign(joint.begin(), joint.end() - (joint.empty() ? 0 : 1));
    }
    return out;
  }
};

namespace detail {

template <class T>
std::vector<T> marginalize_cpts(const NetworkModel& model, const ParameterLayout& layout, const std::vector<T>& cpt,
                                std::uint64_t cap) {
  const std::size_t n = model.size();
  const std::uint64_t total = checked_joint_size(model, cap);
  std::vector<int> cards(n);
  for (std::size_t i = 0; i < n; ++i) cards[i] = model.variable(i).states;

  const auto observed = model.observed();
  std::vector<int> observed_cards;
  for (auto o : observed) observed_cards.push_back(cards[o]);
  StateIndexer observed_index(observed_cards);

  std::vector<T> joint(observed_index.size(), T(0));
  std::vector<int> config(n, 0);
  std::vector<int> observed_config(observed.size());
  for (std::uint64_t step = 0; step < total; ++step) {
    T p(1);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = 0;
      for (int parent : model.parents(i)) j = j * static_cast<std::size_t>(cards[parent]) + config[parent];
      p *= cpt[layout.index(i, j, static_cast<std::size_t>(config[i]))];
    }
    for (std::size_t o = 0; o < observed.size(); ++o) observed_config[o] = config[observed[o]];
    joint[observed_index.index(observed_config)] += p;
    next_config(config, cards);
  }
  return joint;
}

}  // namespace detail

/// w_o = sum over hidden configurations of prod_i theta_{i, j(pa_i), k(x_i)}.
template <class T>
ObservableParameters<T> discrete_joint(const NetworkModel& model, const ParameterPoint<T>& point,
                                       std::uint64_t cap = default_state_cap()) {
  if (model.family() != Family::Discrete) throw InputError("discrete_joint requires the Discrete family");
  ObservableParameters<T> out;
  out.family = Family::Discrete;
  out.observed = model.observed();
  out.joint = detail::marginalize_cpts(model, point.layout(), point.values(), cap);
  return out;
}

/// CPT entries p(x_i = k | pa_i = j) of a sigmoid network, in ParameterLayout::cpt order.
/// State index 1 is x = 1.
template <class T>
std::vector<T> sigmoid_cpt(const NetworkModel& model, const ParameterPoint<T>& point) {
  ParameterLayout layout = ParameterLayout::cpt(model);
  std::vector<T> cpt(layout.total, T(0));
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& parents = model.parents(i);
    for (std::size_t j = 0; j < layout.rows[i]; ++j) {
      T activation = point.bias(i);
      for (std::size_t p = 0; p < parents.size(); ++p) {
        // last parent is the least significant bit of j
        bool on = (j >> (parents.size() - 1 - p)) & 1U;
        if (on) activation += point.weight(i, p);
      }
      T on_prob = logistic(activation);
      cpt[layout.index(i, j, 1)] = on_prob;
      cpt[layout.index(i, j, 0)] = T(1) - on_prob;
    }
  }
  return cpt;
}

/// Like discrete_joint with p(x_i = 1 | pa_i) = Sig(a_i + sum_j b_ji x_j). Floating point only.
template <class T>
ObservableParameters<T> sigmoid_joint(const NetworkModel& model, const ParameterPoint<T>& point,
                                      std::uint64_t cap = default_state_cap()) {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, Dual<double>>,
                "sigmoid maps are analytic, not polynomial: use double");
  if (model.family() != Family::Sigmoid) throw InputError("sigmoid_joint requires the Sigmoid family");
  ObservableParameters<T> out;
  out.family = Family::Sigmoid;
  out.observed = model.observed();
  out.joint = detail::marginalize_cpts(model, ParameterLayout::cpt(model), sigmoid_cpt(model, point), cap);
  return out;
}

/// Implied means and covariance of a linear-Gaussian network, restricted to
/// the observed variables. Solved in topological order:
///   mu_i = m_i + sum_p b_pi mu_p
///   cov(i, j) = sum_p b_pi cov(p, j)          (j earlier than i)
///   var(i) = v_i + sum_p b_pi cov(p, i)
template <class T>
ObservableParameters<T> gaussian_moments(const NetworkModel& model, const ParameterPoint<T>& point) {
  if (model.family() != Family::LinearGaussian) throw InputError("gaussian_moments requires the LinearGaussian family");
  const std::size_t n = model.size();
  std::vector<T> mu(n, T(0));
  Matrix<T> cov(n, n);
  std::vector<std::size_t> done;
  for (std::size_t i : model.topological_order()) {
    const auto& parents = model.parents(i);
    T m = point.mean(i);
    for (std::size_t p = 0; p < parents.size(); ++p) m += point.coefficient(i, p) * mu[parents[p]];
    mu[i] = m;
    for (std::size_t j : done) {
      T c(0);
      for (std::size_t p = 0; p < parents.size(); ++p) c += point.coefficient(i, p) * cov(parents[p], j);
      cov(i, j) = c;
      cov(j, i) = c;
    }
    T v = point.variance(i);
    for (std::size_t p = 0; p < parents.size(); ++p) v += point.coefficient(i, p) * cov(parents[p], i);
    cov(i, i) = v;
    done.push_back(i);
  }

  ObservableParameters<T> out;
  out.family = Family::LinearGaussian;
  out.observed = model.observed();
  const std::size_t m = out.observed.size();
  out.covariance = Matrix<T>(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    out.mean.push_back(mu[out.observed[a]]);
    for (std::size_t b = 0; b < m; ++b) out.covariance(a, b) = cov(out.observed[a], out.observed[b]);
  }
  return out;
}

/// g: theta -> W for any family.
template <class T>
ObservableParameters<T> observable_map(const NetworkModel& model, const ParameterPoint<T>& point,
                                       std::uint64_t cap = default_state_cap()) {
  switch (model.family()) {
    case Family::Discrete:
      return discrete_joint(model, point, cap);
    case Family::LinearGaussian:
      return gaussian_moments(model, point);
    case Family::Sigmoid:
      if constexpr (std::is_same_v<T, double> || std::is_same_v<T, Dual<double>>) {
        return sigmoid_joint(model, point, cap);
      } else {
        throw InputError("sigmoid networks have no exact rational map");
      }
  }
  throw InputError("unknown family");
}

/// Lifts a point to dual numbers seeded on its free coordinates. Discrete rows
/// get their last entry as 1 - sum(free entries), so its partials are -1.
template <class T>
ParameterPoint<Dual<T>> seed_duals(const ParameterPoint<T>& point) {
  const ParameterLayout& layout = point.layout();
  const std::size_t dim = layout.free_count();
  std::vector<Dual<T>> values(layout.total);
  for (std::size_t c = 0; c < dim; ++c) {
    values[layout.free_coordinates[c]] = Dual<T>::variable(point[layout.free_coordinates[c]], dim, c);
  }
  if (layout.family == Family::Discrete) {
    for (std::size_t i = 0; i < layout.offset.size(); ++i) {
      for (std::size_t j = 0; j < layout.rows[i]; ++j) {
        Dual<T> last(T(1));
        for (std::size_t k = 0; k + 1 < layout.width[i]; ++k) last -= values[layout.index(i, j, k)];
        values[layout.index(i, j, layout.width[i] - 1)] = last;
      }
    }
  }
  return ParameterPoint<Dual<T>>(layout, point.fingerprint(), std::move(values));
}

/// dW/dtheta: rows follow ObservableParameters::free_coordinates, columns the
/// free parameter coordinates of ParameterLayout.
template <class T>
Matrix<T> jacobian(const NetworkModel& model, const ParameterPoint<T>& point, std::uint64_t cap = default_state_cap()) {
  if (point.fingerprint() != model.fingerprint()) throw InputError("parameter point belongs to a different model");
  auto w = observable_map(model, seed_duals(point), cap).free_coordinates();
  const std::size_t cols = point.layout().free_count();
  Matrix<T> out(w.size(), cols);
  for (std::size_t r = 0; r < w.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = w[r].partial(c);
  return out;
}

}  // namespace latentdim
