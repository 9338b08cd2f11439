#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "latentdim/network.hpp"

namespace latentdim {

inline constexpr int kMissing = -1;

/// Cases over the variables of one model (model declaration order). Each
/// entry is a state index or kMissing; hidden variables are always missing.
class Dataset {
 public:
  Dataset() = default;
  /// Throws InputError when a state is out of range or a hidden variable is observed.
  Dataset(const NetworkModel& model, std::vector<std::vector<int>> cases);

  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  std::size_t width() const { return cards_.size(); }
  const std::vector<int>& operator[](std::size_t c) const { return cases_[c]; }
  const std::vector<std::vector<int>>& cases() const { return cases_; }
  const std::string& model_fingerprint() const { return fingerprint_; }
  bool complete() const;

  /// First `n` cases.
  Dataset head(std::size_t n) const;

 private:
  std::vector<int> cards_;
  std::vector<std::vector<int>> cases_;
  std::string fingerprint_;
};

/// CSV with a header row of variable names and one row per case; states are
/// integer indices, `?` is missing, lines starting with '#' are comments.
/// Columns for hidden variables may be omitted; unknown columns are an error.
Dataset read_csv(std::istream& in, const NetworkModel& model);
Dataset read_csv_file(const std::filesystem::path& path, const NetworkModel& model);

/// Writes observed columns only. `comment`, when non-empty, becomes a leading '#' line.
void write_csv(std::ostream& out, const Dataset& data, const NetworkModel& model, const std::string& comment = {});

}  // namespace latentdim
