#include "latentdim/network.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "latentdim/error.hpp"

namespace latentdim {

using nlohmann::json;

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Discrete:
      return "discrete";
    case Family::LinearGaussian:
      return "linear-gaussian";
    case Family::Sigmoid:
      return "sigmoid";
  }
  return "unknown";
}

Family family_from_string(std::string_view text) {
  if (text == "discrete") return Family::Discrete;
  if (text == "linear-gaussian" || text == "gaussian") return Family::LinearGaussian;
  if (text == "sigmoid") return Family::Sigmoid;
  throw InputError("unknown family '" + std::string(text) + "'");
}

NetworkModel::NetworkModel(Family family, std::vector<Variable> variables, std::vector<std::vector<int>> parents)
    : family_(family), variables_(std::move(variables)), parents_(std::move(parents)) {
  if (parents_.size() != variables_.size()) throw InvalidModel("one parent list per variable required");
}

std::optional<std::size_t> NetworkModel::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::size_t> NetworkModel::observed() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (!variables_[i].hidden) out.push_back(i);
  return out;
}

std::vector<std::size_t> NetworkModel::hidden() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].hidden) out.push_back(i);
  return out;
}

std::uint64_t NetworkModel::parent_states(std::size_t i) const {
  std::uint64_t q = 1;
  for (int p : parents_.at(i)) q *= static_cast<std::uint64_t>(std::max(variables_.at(p).states, 1));
  return q;
}

std::vector<std::size_t> NetworkModel::topological_order() const {
  const std::size_t n = variables_.size();
  std::vector<std::size_t> pending(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int p : parents_[i]) {
      if (p < 0 || static_cast<std::size_t>(p) >= n) throw InvalidModel("dangling parent index");
      children[p].push_back(i);
      ++pending[i];
    }
  }
  // smallest ready index first keeps the order deterministic
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (pending[i] == 0) ready.insert(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (std::size_t c : children[i])
      if (--pending[c] == 0) ready.insert(c);
  }
  if (order.size() != n) throw InvalidModel("parent relation has a cycle");
  return order;
}

std::string NetworkModel::fingerprint() const {
  const std::string text = model_to_json(*this).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << hash;
  return out.str();
}

NetworkModel NetworkModel::fully_observed_copy() const {
  auto vars = variables_;
  for (auto& v : vars) v.hidden = false;
  return NetworkModel(family_, std::move(vars), parents_);
}

ModelBuilder& ModelBuilder::discrete(std::string name, int states, bool hidden) {
  variables_.push_back({std::move(name), states, hidden});
  parents_.emplace_back();
  return *this;
}

ModelBuilder& ModelBuilder::continuous(std::string name, bool hidden) {
  variables_.push_back({std::move(name), 0, hidden});
  parents_.emplace_back();
  return *this;
}

ModelBuilder& ModelBuilder::edge(std::string_view parent, std::string_view child) {
  parents_[lookup(child)].push_back(static_cast<int>(lookup(parent)));
  return *this;
}

std::size_t ModelBuilder::lookup(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  throw InputError("unknown variable '" + std::string(name) + "'");
}

std::vector<Violation> validate(const NetworkModel& model) {
  std::vector<Violation> out;
  const std::size_t n = model.size();

  std::set<std::string> names;
  for (const auto& v : model.variables())
    if (!names.insert(v.name).second) out.push_back({ViolationKind::DuplicateName, "duplicate variable '" + v.name + "'"});

  bool dangling = false;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<int> seen;
    for (int p : model.parents(i)) {
      if (p < 0 || static_cast<std::size_t>(p) >= n) {
        dangling = true;
        out.push_back({ViolationKind::DanglingParent,
                       "variable '" + model.variable(i).name + "' has dangling parent index " + std::to_string(p)});
      } else if (!seen.insert(p).second) {
        out.push_back({ViolationKind::DuplicateParent, "variable '" + model.variable(i).name + "' lists parent '" +
                                                           model.variable(p).name + "' twice"});
      }
    }
  }

  for (const auto& v : model.variables()) {
    switch (model.family()) {
      case Family::Discrete:
        if (v.continuous() || v.states < 2)
          out.push_back({ViolationKind::FamilyMismatch, "discrete family needs '" + v.name + "' discrete with >= 2 states"});
        break;
      case Family::Sigmoid:
        if (v.states != 2)
          out.push_back({ViolationKind::FamilyMismatch, "sigmoid family needs '" + v.name + "' binary"});
        break;
      case Family::LinearGaussian:
        if (!v.continuous())
          out.push_back({ViolationKind::FamilyMismatch, "linear-gaussian family needs '" + v.name + "' continuous"});
        break;
    }
  }

  if (!dangling) {
    try {
      (void)model.topological_order();
    } catch (const InvalidModel&) {
      out.push_back({ViolationKind::Cycle, "parent relation has a cycle"});
    }
  }

  if (model.observed().empty()) out.push_back({ViolationKind::NoObservedVariable, "no observed variable"});
  return out;
}

void require_valid(const NetworkModel& model) {
  auto violations = validate(model);
  if (violations.empty()) return;
  std::string message = "invalid model:";
  for (const auto& v : violations) message += " " + v.message + ";";
  throw InvalidModel(message);
}

std::size_t parameter_count(const NetworkModel& model) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    switch (model.family()) {
      case Family::Discrete:
        d += static_cast<std::size_t>(model.variable(i).states - 1) * model.parent_states(i);
        break;
      case Family::LinearGaussian:
        d += 2 + model.parents(i).size();
        break;
      case Family::Sigmoid:
        d += 1 + model.parents(i).size();
        break;
    }
  }
  return d;
}

std::size_t observable_parameter_count(const NetworkModel& model) {
  const auto observed = model.observed();
  if (model.family() == Family::LinearGaussian) {
    const std::size_t m = observed.size();
    return m * (m + 3) / 2;
  }
  std::size_t cells = 1;
  for (auto o : observed) cells *= static_cast<std::size_t>(model.variable(o).states);
  return cells - 1;
}

json model_to_json(const NetworkModel& model) {
  json vars = json::array();
  for (const auto& v : model.variables()) {
    json entry = {{"name", v.name}, {"hidden", v.hidden}};
    if (v.continuous()) {
      entry["continuous"] = true;
    } else {
      entry["states"] = v.states;
    }
    vars.push_back(std::move(entry));
  }
  json edges = json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (int p : model.parents(i)) {
      if (p >= 0 && static_cast<std::size_t>(p) < model.size()) {
        edges.push_back({model.variable(p).name, model.variable(i).name});
      } else {
        edges.push_back({p, model.variable(i).name});
      }
    }
  }
  return {{"family", std::string(to_string(model.family()))}, {"variables", vars}, {"edges", edges}};
}

NetworkModel model_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw InputError("model spec must be a JSON object");
    Family family = family_from_string(doc.at("family").get<std::string>());
    std::vector<Variable> vars;
    for (const auto& entry : doc.at("variables")) {
      Variable v;
      v.name = entry.at("name").get<std::string>();
      v.hidden = entry.value("hidden", false);
      if (entry.value("continuous", false)) {
        if (entry.contains("states")) throw InputError("variable '" + v.name + "' has both states and continuous");
        v.states = 0;
      } else {
        v.states = entry.at("states").get<int>();
        if (v.states < 1) throw InputError("variable '" + v.name + "' needs a positive state count");
      }
      vars.push_back(std::move(v));
    }
    std::vector<std::vector<int>> parents(vars.size());
    auto resolve = [&](const json& ref) -> int {
      if (ref.is_number_integer()) return ref.get<int>();
      const auto name = ref.get<std::string>();
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name) return static_cast<int>(i);
      throw InputError("edge references unknown variable '" + name + "'");
    };
    if (doc.contains("edges")) {
      for (const auto& edge : doc.at("edges")) {
        if (!edge.is_array() || edge.size() != 2) throw InputError("edges must be [parent, child] pairs");
        int child = resolve(edge[1]);
        if (child < 0 || static_cast<std::size_t>(child) >= vars.size()) throw InputError("edge child out of range");
        parents[child].push_back(resolve(edge[0]));
      }
    }
    return NetworkModel(family, std::move(vars), std::move(parents));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model spec: ") + e.what());
  }
}

std::string save_model(const NetworkModel& model) { return model_to_json(model).dump(2) + "\n"; }

NetworkModel load_model(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw InputError("model spec is not valid JSON");
  return model_from_json(doc);
}

NetworkModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

}  // namespace latentdim
