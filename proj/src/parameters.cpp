#include "latentdim/parameters.hpp"

#include <cmath>

#include "latentdim/rng.hpp"

namespace latentdim {

using nlohmann::json;

ParameterLayout ParameterLayout::cpt(const NetworkModel& model) {
  ParameterLayout layout;
  layout.family = Family::Discrete;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& v = model.variable(i);
    if (v.continuous()) throw InputError("CPT layout needs discrete variables; '" + v.name + "' is continuous");
    layout.offset.push_back(layout.total);
    layout.rows.push_back(model.parent_states(i));
    layout.width.push_back(static_cast<std::size_t>(v.states));
    for (std::size_t j = 0; j < layout.rows.back(); ++j)
      for (std::size_t k = 0; k + 1 < layout.width.back(); ++k) layout.free_coordinates.push_back(layout.total + j * v.states + k);
    layout.total += layout.rows.back() * layout.width.back();
  }
  return layout;
}

ParameterLayout ParameterLayout::for_model(const NetworkModel& model) {
  if (model.family() == Family::Discrete) return cpt(model);
  ParameterLayout layout;
  layout.family = model.family();
  const std::size_t fixed = model.family() == Family::LinearGaussian ? 2 : 1;
  for (std::size_t i = 0; i < model.size(); ++i) {
    layout.offset.push_back(layout.total);
    layout.rows.push_back(1);
    layout.width.push_back(fixed + model.parents(i).size());
    for (std::size_t k = 0; k < layout.width.back(); ++k) layout.free_coordinates.push_back(layout.total + k);
    layout.total += layout.width.back();
  }
  return layout;
}

ParameterPoint<double> to_real(const ParameterPoint<Rational>& point) {
  return point.transform<double>([](const Rational& v) { return v.get_d(); });
}

namespace {

template <class T, class RowCheck, class Positive>
std::vector<std::string> check_generic(const NetworkModel& model, const ParameterPoint<T>& point, RowCheck row_ok,
                                       Positive positive) {
  std::vector<std::string> out;
  if (point.fingerprint() != model.fingerprint()) out.push_back("parameter point belongs to a different model");
  if (!(point.layout() == ParameterLayout::for_model(model))) {
    out.push_back("parameter layout does not match the model");
    return out;
  }
  const auto& layout = point.layout();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& name = model.variable(i).name;
    if (model.family() == Family::Discrete) {
      for (std::size_t j = 0; j < layout.rows[i]; ++j) {
        T sum(0);
        for (std::size_t k = 0; k < layout.width[i]; ++k) {
          if (!positive(point.theta(i, j, k)))
            out.push_back("theta for '" + name + "' row " + std::to_string(j) + " has a nonpositive entry");
          sum += point.theta(i, j, k);
        }
        if (!row_ok(sum)) out.push_back("theta row " + std::to_string(j) + " of '" + name + "' does not sum to 1");
      }
    } else if (model.family() == Family::LinearGaussian) {
      if (!positive(point.variance(i))) out.push_back("variance of '" + name + "' is not positive");
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> check_point(const NetworkModel& model, const ParameterPoint<Rational>& point) {
  return check_generic(
      model, point, [](const Rational& s) { return s == 1; }, [](const Rational& v) { return sgn(v) > 0; });
}

std::vector<std::string> check_point(const NetworkModel& model, const ParameterPoint<double>& point, double tolerance) {
  auto out = check_generic(
      model, point, [&](double s) { return std::abs(s - 1.0) <= tolerance; },
      [](double v) { return v > 0.0 && std::isfinite(v); });
  for (double v : point.values())
    if (!std::isfinite(v)) {
      out.push_back("non-finite parameter value");
      break;
    }
  return out;
}

ParameterPoint<Rational> sample_parameters(const NetworkModel& model, std::uint64_t seed, SamplingScheme scheme) {
  require_valid(model);
  if (scheme.grid < 2) throw InputError("sampling grid must be at least 2");
  const std::int64_t grid = scheme.grid;
  ParameterLayout layout = ParameterLayout::for_model(model);
  std::vector<Rational> values(layout.total);
  Rng rng(seed);
  auto signed_draw = [&](std::int64_t hi) {
    std::int64_t magnitude = rng.uniform_int(1, hi);
    bool negative = rng.uniform_int(0, 1) == 1;
    Rational out(negative ? -magnitude : magnitude, grid);
    out.canonicalize();
    return out;
  };

  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::size_t off = layout.offset[i];
    switch (model.family()) {
      case Family::Discrete:
        for (std::size_t j = 0; j < layout.rows[i]; ++j) {
          std::vector<std::int64_t> weights(layout.width[i]);
          std::int64_t sum = 0;
          for (auto& w : weights) sum += (w = rng.uniform_int(1, grid - 1));
          for (std::size_t k = 0; k < weights.size(); ++k) {
            Rational v(weights[k], sum);
            v.canonicalize();
            values[layout.index(i, j, k)] = v;
          }
        }
        break;
      case Family::LinearGaussian: {
        values[off] = signed_draw(grid - 1);
        Rational v(rng.uniform_int(1, grid - 1), grid);
        v.canonicalize();
        values[off + 1] = v;
        for (std::size_t p = 0; p < model.parents(i).size(); ++p) values[off + 2 + p] = signed_draw(grid - 1);
        break;
      }
      case Family::Sigmoid:
        for (std::size_t k = 0; k < layout.width[i]; ++k) values[off + k] = signed_draw(2 * grid - 1);
        break;
    }
  }
  return ParameterPoint<Rational>(std::move(layout), model.fingerprint(), std::move(values));
}

ParameterPoint<Rational> uniform_parameters(const NetworkModel& model) {
  if (model.family() != Family::Discrete) throw InputError("uniform parameters are defined for discrete networks");
  ParameterLayout layout = ParameterLayout::for_model(model);
  std::vector<Rational> values(layout.total);
  for (std::size_t i = 0; i < model.size(); ++i)
    for (std::size_t j = 0; j < layout.rows[i]; ++j)
      for (std::size_t k = 0; k < layout.width[i]; ++k) values[layout.index(i, j, k)] = Rational(1, layout.width[i]);
  return ParameterPoint<Rational>(std::move(layout), model.fingerprint(), std::move(values));
}

json point_to_json(const ParameterPoint<Rational>& point) {
  json values = json::array();
  for (const auto& v : point.values()) values.push_back(to_string(v));
  return {{"family", std::string(to_string(point.family()))}, {"model_fingerprint", point.fingerprint()}, {"values", values}};
}

json point_to_json(const ParameterPoint<double>& point) {
  return {{"family", std::string(to_string(point.family()))},
          {"model_fingerprint", point.fingerprint()},
          {"values", point.values()}};
}

ParameterPoint<Rational> point_from_json(const NetworkModel& model, const json& doc) {
  try {
    if (doc.contains("model_fingerprint") && doc.at("model_fingerprint").get<std::string>() != model.fingerprint())
      throw InputError("parameter file was written for a different model");
    if (doc.contains("family") && family_from_string(doc.at("family").get<std::string>()) != model.family())
      throw InputError("parameter file family does not match the model");
    std::vector<Rational> values;
    for (const auto& v : doc.at("values")) {
      if (v.is_string()) {
        values.push_back(parse_rational(v.get<std::string>()));
      } else if (v.is_number_integer()) {
        values.emplace_back(v.get<long>());
      } else if (v.is_number()) {
        values.emplace_back(v.get<double>());
      } else {
        throw InputError("parameter values must be numbers or rational strings");
      }
    }
    return ParameterPoint<Rational>(model, std::move(values));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed parameter file: ") + e.what());
  }
}

}  // namespace latentdim
