#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace latentdim {

enum class ReproTable { Dims, AutoClass, Gaussian, Sigmoid, All };

ReproTable repro_table_from_string(std::string_view text);

struct ReproRow {
  std::string table;
  std::string model;
  std::size_t d_prime = 0;
  std::size_t d = 0;
  std::size_t expected_d_prime = 0;
  std::size_t expected_d = 0;
  std::size_t min_trial_rank = 0;
  bool pass = false;
};

/// Recomputes the reference dimension results for the built-in models.
std::vector<ReproRow> reproduce(ReproTable table, int trials = 10, std::uint64_t seed = 0);

nlohmann::json rows_to_json(const std::vector<ReproRow>& rows);

}  // namespace latentdim
