#include "latentdim/models.hpp"

#include <charconv>
#include <map>

#include "latentdim/error.hpp"

namespace latentdim::models {

namespace {

// Embedded model specs, in the same format `latentdim dim` reads.
const std::map<std::string, std::string, std::less<>>& embedded() {
  static const std::map<std::string, std::string, std::less<>> specs = {
      {"w-structure", R"({
  "edges": [["A", "C"], ["H", "C"], ["B", "D"], ["H", "D"]],
  "family": "discrete",
  "variables": [
    {"hidden": false, "name": "A", "states": 2},
    {"hidden": false, "name": "B", "states": 2},
    {"hidden": true, "name": "H", "states": 2},
    {"hidden": false, "name": "C", "states": 2},
    {"hidden": false, "name": "D", "states": 2}
  ]
})"},
      {"autoclass", R"({
  "edges": [["H", "X1"], ["H", "X2"], ["H", "X3"], ["H", "X4"]],
  "family": "discrete",
  "variables": [
    {"hidden": true, "name": "H", "states": 3},
    {"hidden": false, "name": "X1", "states": 2},
    {"hidden": false, "name": "X2", "states": 2},
    {"hidden": false, "name": "X3", "states": 2},
    {"hidden": false, "name": "X4", "states": 2}
  ]
})"},
      {"gaussian-naive-bayes", R"({
  "edges": [["H", "X1"], ["H", "X2"], ["H", "X3"], ["H", "X4"]],
  "family": "linear-gaussian",
  "variables": [
    {"continuous": true, "hidden": true, "name": "H"},
    {"continuous": true, "hidden": false, "name": "X1"},
    {"continuous": true, "hidden": false, "name": "X2"},
    {"continuous": true, "hidden": false, "name": "X3"},
    {"continuous": true, "hidden": false, "name": "X4"}
  ]
})"},
      {"gaussian-w", R"({
  "edges": [["A", "C"], ["H", "C"], ["B", "D"], ["H", "D"]],
  "family": "linear-gaussian",
  "variables": [
    {"continuous": true, "hidden": false, "name": "A"},
    {"continuous": true, "hidden": false, "name": "B"},
    {"continuous": true, "hidden": true, "name": "H"},
    {"continuous": true, "hidden": false, "name": "C"},
    {"continuous": true, "hidden": false, "name": "D"}
  ]
})"},
      {"sigmoid-two-level", R"({
  "edges": [["H1", "X1"], ["H2", "X1"], ["H1", "X2"], ["H2", "X2"],
            ["H1", "X3"], ["H2", "X3"], ["H1", "X4"], ["H2", "X4"]],
  "family": "sigmoid",
  "variables": [
    {"hidden": true, "name": "H1", "states": 2},
    {"hidden": true, "name": "H2", "states": 2},
    {"hidden": false, "name": "X1", "states": 2},
    {"hidden": false, "name": "X2", "states": 2},
    {"hidden": false, "name": "X3", "states": 2},
    {"hidden": false, "name": "X4", "states": 2}
  ]
})"},
      {"sigmoid-three-level", R"({
  "edges": [["T", "H1"], ["T", "H2"],
            ["H1", "X1"], ["H2", "X1"], ["H1", "X2"], ["H2", "X2"],
            ["H1", "X3"], ["H2", "X3"], ["H1", "X4"], ["H2", "X4"]],
  "family": "sigmoid",
  "variables": [
    {"hidden": true, "name": "T", "states": 2},
    {"hidden": true, "name": "H1", "states": 2},
    {"hidden": true, "name": "H2", "states": 2},
    {"hidden": false, "name": "X1", "states": 2},
    {"hidden": false, "name": "X2", "states": 2},
    {"hidden": false, "name": "X3", "states": 2},
    {"hidden": false, "name": "X4", "states": 2}
  ]
})"},
  };
  return specs;
}

std::optional<int> suffix_number(std::string_view name, std::string_view prefix) {
  if (!name.starts_with(prefix)) return std::nullopt;
  name.remove_prefix(prefix.size());
  int value = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), value);
  if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
  return value;
}

}  // namespace

NetworkModel naive_bayes(int features, int classes, int states, Family family) {
  ModelBuilder b(family);
  if (family == Family::LinearGaussian) {
    b.continuous("H", true);
    for (int f = 1; f <= features; ++f) b.continuous("X" + std::to_string(f));
  } else {
    b.discrete("H", classes, true);
    for (int f = 1; f <= features; ++f) b.discrete("X" + std::to_string(f), states);
  }
  for (int f = 1; f <= features; ++f) b.edge("H", "X" + std::to_string(f));
  return b.build();
}

NetworkModel w_structure(int hidden_states) {
  return ModelBuilder(Family::Discrete)
      .discrete("A", 2)
      .discrete("B", 2)
      .discrete("H", hidden_states, true)
      .discrete("C", 2)
      .discrete("D", 2)
      .edge("A", "C")
      .edge("H", "C")
      .edge("B", "D")
      .edge("H", "D")
      .build();
}

NetworkModel gaussian_naive_bayes(int features) { return naive_bayes(features, 0, 0, Family::LinearGaussian); }

NetworkModel gaussian_w_structure() {
  return ModelBuilder(Family::LinearGaussian)
      .continuous("A")
      .continuous("B")
      .continuous("H", true)
      .continuous("C")
      .continuous("D")
      .edge("A", "C")
      .edge("H", "C")
      .edge("B", "D")
      .edge("H", "D")
      .build();
}

NetworkModel sigmoid_two_level() {
  ModelBuilder b(Family::Sigmoid);
  b.discrete("H1", 2, true).discrete("H2", 2, true);
  for (int f = 1; f <= 4; ++f) b.discrete("X" + std::to_string(f), 2);
  for (int f = 1; f <= 4; ++f) b.edge("H1", "X" + std::to_string(f)).edge("H2", "X" + std::to_string(f));
  return b.build();
}

NetworkModel sigmoid_three_level() {
  ModelBuilder b(Family::Sigmoid);
  b.discrete("T", 2, true).discrete("H1", 2, true).discrete("H2", 2, true);
  for (int f = 1; f <= 4; ++f) b.discrete("X" + std::to_string(f), 2);
  b.edge("T", "H1").edge("T", "H2");
  for (int f = 1; f <= 4; ++f) b.edge("H1", "X" + std::to_string(f)).edge("H2", "X" + std::to_string(f));
  return b.build();
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (int n = 1; n <= 8; ++n) out.push_back("naive-bayes-" + std::to_string(n));
  for (int k = 2; k <= 5; ++k) out.push_back("w-structure-" + std::to_string(k));
  for (const auto& [name, spec] : embedded()) out.push_back(name);
  return out;
}

std::string builtin_spec(std::string_view name) {
  if (auto it = embedded().find(name); it != embedded().end()) return it->second;
  if (auto n = suffix_number(name, "naive-bayes-"); n && *n >= 1) return save_model(naive_bayes(*n));
  if (auto k = suffix_number(name, "w-structure-"); k && *k >= 2) return save_model(w_structure(*k));
  throw InputError("unknown built-in model '" + std::string(name) + "'");
}

NetworkModel builtin(std::string_view name) { return load_model(builtin_spec(name)); }

}  // namespace latentdim::models
