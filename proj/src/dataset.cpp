#include "latentdim/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "latentdim/error.hpp"

namespace latentdim {

Dataset::Dataset(const NetworkModel& model, std::vector<std::vector<int>> cases)
    : cases_(std::move(cases)), fingerprint_(model.fingerprint()) {
  for (const auto& v : model.variables()) cards_.push_back(v.states);
  for (std::size_t c = 0; c < cases_.size(); ++c) {
    const auto& row = cases_[c];
    if (row.size() != cards_.size())
      throw InputError("case " + std::to_string(c) + " has " + std::to_string(row.size()) + " entries, expected " +
                       std::to_string(cards_.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] == kMissing) continue;
      const auto& var = model.variable(i);
      if (var.hidden) throw InputError("hidden variable '" + var.name + "' is observed in case " + std::to_string(c));
      if (var.continuous()) throw InputError("datasets hold discrete states only");
      if (row[i] < 0 || row[i] >= var.states)
        throw InputError("state " + std::to_string(row[i]) + " out of range for '" + var.name + "' in case " +
                         std::to_string(c));
    }
  }
}

bool Dataset::complete() const {
  for (const auto& row : cases_)
    for (int v : row)
      if (v == kMissing) return false;
  return true;
}

Dataset Dataset::head(std::size_t n) const {
  Dataset out(*this);
  if (n < out.cases_.size()) out.cases_.resize(n);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Dataset read_csv(std::istream& in, const NetworkModel& model) {
  std::string line;
  std::vector<int> column_to_var;
  bool have_header = false;
  std::vector<std::vector<int>> cases;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split(view);
    if (!have_header) {
      std::vector<bool> seen(model.size(), false);
      for (auto name : fields) {
        auto index = model.index_of(name);
        if (!index) throw InputError("CSV column '" + std::string(name) + "' is not a model variable");
        if (seen[*index]) throw InputError("CSV column '" + std::string(name) + "' appears twice");
        seen[*index] = true;
        column_to_var.push_back(static_cast<int>(*index));
      }
      for (auto o : model.observed())
        if (!seen[o]) throw InputError("CSV lacks a column for observed variable '" + model.variable(o).name + "'");
      have_header = true;
      continue;
    }
    if (fields.size() != column_to_var.size())
      throw InputError("CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) + " fields");
    std::vector<int> row(model.size(), kMissing);
    for (std::size_t f = 0; f < fields.size(); ++f) {
      auto text = fields[f];
      if (text == "?") continue;
      int state = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), state);
      if (ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("CSV line " + std::to_string(line_no) + ": bad state '" + std::string(text) + "'");
      row[column_to_var[f]] = state;
    }
    cases.push_back(std::move(row));
  }
  if (!have_header) throw InputError("CSV has no header row");
  return Dataset(model, std::move(cases));
}

Dataset read_csv_file(const std::filesystem::path& path, const NetworkModel& model) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file " + path.string());
  return read_csv(in, model);
}

void write_csv(std::ostream& out, const Dataset& data, const NetworkModel& model, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  const auto observed = model.observed();
  for (std::size_t o = 0; o < observed.size(); ++o) out << (o ? "," : "") << model.variable(observed[o]).name;
  out << '\n';
  for (const auto& row : data.cases()) {
    for (std::size_t o = 0; o < observed.size(); ++o) {
      if (o) out << ',';
      int v = row[observed[o]];
      if (v == kMissing) {
        out << '?';
      } else {
        out << v;
      }
    }
    out << '\n';
  }
}

}  // namespace latentdim
