#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace latentdim {

enum class Family { Discrete, LinearGaussian, Sigmoid };

std::string_view to_string(Family family);
Family family_from_string(std::string_view text);

struct Variable {
  std::string name;
  int states = 0;  // 0 marks a continuous variable
  bool hidden = false;

  bool continuous() const { return states == 0; }
  bool operator==(const Variable&) const = default;
};

/// A DAG over named variables plus the parametric family of its local
/// distributions. Parent lists are ordered; that order fixes the parent
/// configuration index j (lexicographic, last parent varies fastest).
///
/// Construction does not validate: call validate() or require_valid().
class NetworkModel {
 public:
  NetworkModel() = default;
  NetworkModel(Family family, std::vector<Variable> variables, std::vector<std::vector<int>> parents);

  Family family() const { return family_; }
  std::size_t size() const { return variables_.size(); }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<int>& parents(std::size_t i) const { return parents_.at(i); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::size_t> observed() const;
  std::vector<std::size_t> hidden() const;
  bool fully_observed() const { return hidden().empty(); }

  /// q_i: number of joint parent configurations (1 for roots).
  std::uint64_t parent_states(std::size_t i) const;

  /// Throws InvalidModel when the parent relation has a cycle.
  std::vector<std::size_t> topological_order() const;

  /// Stable hex digest of the canonical JSON form.
  std::string fingerprint() const;

  /// Same structure with every variable observed.
  NetworkModel fully_observed_copy() const;

  bool operator==(const NetworkModel&) const = default;

 private:
  Family family_ = Family::Discrete;
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> parents_;
};

class ModelBuilder {
 public:
  explicit ModelBuilder(Family family) : family_(family) {}

  ModelBuilder& discrete(std::string name, int states, bool hidden = false);
  ModelBuilder& continuous(std::string name, bool hidden = false);
  ModelBuilder& edge(std::string_view parent, std::string_view child);

  NetworkModel build() const { return NetworkModel(family_, variables_, parents_); }

 private:
  std::size_t lookup(std::string_view name) const;

  Family family_;
  std::vector<Variable> variables_;
  std::vector<std::vector<int>> parents_;
};

enum class ViolationKind {
  Cycle,
  FamilyMismatch,
  DanglingParent,
  DuplicateParent,
  DuplicateName,
  NoObservedVariable,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

std::vector<Violation> validate(const NetworkModel& model);

/// Throws InvalidModel listing every violation.
void require_valid(const NetworkModel& model);

/// d': number of free network parameters.
std::size_t parameter_count(const NetworkModel& model);

/// Degrees of freedom of the observable distribution.
std::size_t observable_parameter_count(const NetworkModel& model);

nlohmann::json model_to_json(const NetworkModel& model);
/// Throws InputError on malformed documents; structural problems are left to validate().
NetworkModel model_from_json(const nlohmann::json& doc);

std::string save_model(const NetworkModel& model);
NetworkModel load_model(std::string_view text);
NetworkModel load_model_file(const std::filesystem::path& path);

}  // namespace latentdim
