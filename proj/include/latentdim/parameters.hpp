#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "latentdim/error.hpp"
#include "latentdim/network.hpp"
#include "latentdim/rational.hpp"

namespace latentdim {

/// Flat storage layout of a parameter vector.
///
/// Discrete:        block i holds q_i rows of r_i entries, theta(i, j, k) at
///                  offset[i] + j * r_i + k.
/// LinearGaussian:  block i is [m_i, v_i, b_{p_1 i}, b_{p_2 i}, ...].
/// Sigmoid:         block i is [a_i, b_{p_1 i}, b_{p_2 i}, ...].
///
/// Free coordinates (the Jacobian columns) are every entry in declaration
/// order, except that discrete rows drop their last entry, which is
/// 1 - (sum of the others).
struct ParameterLayout {
  Family family = Family::Discrete;
  std::vector<std::size_t> offset;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> width;
  std::vector<std::size_t> free_coordinates;
  std::size_t total = 0;

  static ParameterLayout for_model(const NetworkModel& model);
  /// CPT layout for a model whose variables are all discrete (Discrete or Sigmoid family).
  static ParameterLayout cpt(const NetworkModel& model);

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return offset[i] + j * width[i] + k; }
  std::size_t free_count() const { return free_coordinates.size(); }

  bool operator==(const ParameterLayout&) const = default;
};

/// One concrete parameter vector for a model, over scalar T
/// (Rational for exact work, double for estimation, Dual<...> for derivatives).
template <class T>
class ParameterPoint {
 public:
  ParameterPoint() = default;
  ParameterPoint(const NetworkModel& model, std::vector<T> values)
      : ParameterPoint(ParameterLayout::for_model(model), model.fingerprint(), std::move(values)) {}
  ParameterPoint(ParameterLayout layout, std::string fingerprint, std::vector<T> values)
      : layout_(std::move(layout)), fingerprint_(std::move(fingerprint)), values_(std::move(values)) {
    if (values_.size() != layout_.total) {
      throw InputError("parameter vector has " + std::to_string(values_.size()) + " entries, layout expects " +
                       std::to_string(layout_.total));
    }
  }

  Family family() const { return layout_.family; }
  const std::string& fingerprint() const { return fingerprint_; }
  const ParameterLayout& layout() const { return layout_; }
  const std::vector<T>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t index) const { return values_[index]; }

  const T& theta(std::size_t i, std::size_t j, std::size_t k) const { return values_[layout_.index(i, j, k)]; }
  const T& mean(std::size_t i) const { return values_[layout_.offset[i]]; }
  const T& variance(std::size_t i) const { return values_[layout_.offset[i] + 1]; }
  const T& coefficient(std::size_t i, std::size_t p) const { return values_[layout_.offset[i] + 2 + p]; }
  const T& bias(std::size_t i) const { return values_[layout_.offset[i]]; }
  const T& weight(std::size_t i, std::size_t p) const { return values_[layout_.offset[i] + 1 + p]; }

  std::vector<T> free_values() const {
    std::vector<T> out;
    out.reserve(layout_.free_count());
    for (std::size_t c : layout_.free_coordinates) out.push_back(values_[c]);
    return out;
  }

  template <class U, class F>
  ParameterPoint<U> transform(F&& f) const {
    std::vector<U> out;
    out.reserve(values_.size());
    for (const T& v : values_) out.push_back(f(v));
    return ParameterPoint<U>(layout_, fingerprint_, std::move(out));
  }

 private:
  ParameterLayout layout_;
  std::string fingerprint_;
  std::vector<T> values_;
};

/// Rebuilds a full point from its free coordinates.
template <class T>
ParameterPoint<T> from_free_values(const NetworkModel& model, std::span<const T> free) {
  ParameterLayout layout = ParameterLayout::for_model(model);
  if (free.size() != layout.free_count()) throw InputError("wrong number of free coordinates");
  std::vector<T> values(layout.total, T(0));
  for (std::size_t c = 0; c < free.size(); ++c) values[layout.free_coordinates[c]] = free[c];
  if (layout.family == Family::Discrete) {
    for (std::size_t i = 0; i < layout.offset.size(); ++i) {
      for (std::size_t j = 0; j < layout.rows[i]; ++j) {
        T last(1);
        for (std::size_t k = 0; k + 1 < layout.width[i]; ++k) last -= values[layout.index(i, j, k)];
        values[layout.index(i, j, layout.width[i] - 1)] = last;
      }
    }
  }
  return ParameterPoint<T>(std::move(layout), model.fingerprint(), std::move(values));
}

ParameterPoint<double> to_real(const ParameterPoint<Rational>& point);

/// Invariant violations of a point against its model (empty when valid).
/// Rational points are checked exactly; double points with `tolerance` on row sums.
std::vector<std::string> check_point(const NetworkModel& model, const ParameterPoint<Rational>& point);
std::vector<std::string> check_point(const NetworkModel& model, const ParameterPoint<double>& point,
                                     double tolerance = 1e-9);

/// Values are drawn on the grid {1, ..., grid-1} / grid.
///   Discrete: each CPT row is r_i grid integers normalized by their sum.
///   LinearGaussian: m_i, b_ji in +-{1..grid-1}/grid, v_i in {1..grid-1}/grid.
///   Sigmoid: a_i, b_ji in +-{1..2*grid-1}/grid.
struct SamplingScheme {
  std::int64_t grid = 1000;
};

ParameterPoint<Rational> sample_parameters(const NetworkModel& model, std::uint64_t seed, SamplingScheme scheme = {});

/// Uniform CPTs (Discrete family only).
ParameterPoint<Rational> uniform_parameters(const NetworkModel& model);

/// {"family", "model_fingerprint", "values": ["p/q", ...]}
nlohmann::json point_to_json(const ParameterPoint<Rational>& point);
nlohmann::json point_to_json(const ParameterPoint<double>& point);
/// Accepts numbers or rational strings. Checks the fingerprint when present.
ParameterPoint<Rational> point_from_json(const NetworkModel& model, const nlohmann::json& doc);

}  // namespace latentdim
