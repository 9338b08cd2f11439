#include "latentdim/reproduce.hpp"

#include "latentdim/error.hpp"
#include "latentdim/models.hpp"
#include "latentdim/rank.hpp"

namespace latentdim {

ReproTable repro_table_from_string(std::string_view text) {
  if (text == "dims") return ReproTable::Dims;
  if (text == "autoclass") return ReproTable::AutoClass;
  if (text == "gaussian") return ReproTable::Gaussian;
  if (text == "sigmoid") return ReproTable::Sigmoid;
  if (text == "all") return ReproTable::All;
  throw InputError("unknown table '" + std::string(text) + "'");
}

namespace {

struct Expectation {
  std::string table;
  std::string model;
  std::size_t d_prime;
  std::size_t d;
};

std::vector<Expectation> expectations(ReproTable table) {
  std::vector<Expectation> out;
  const bool all = table == ReproTable::All;
  if (all || table == ReproTable::Dims) {
    for (std::size_t n = 1; n <= 7; ++n) {
      std::size_t d = n == 1 ? 1 : (n == 2 ? 3 : 1 + 2 * n);
      out.push_back({"dims", "naive-bayes-" + std::to_string(n), 1 + 2 * n, d});
    }
    const std::size_t w_dims[] = {9, 10, 10, 11};
    for (std::size_t k = 2; k <= 5; ++k) out.push_back({"dims", "w-structure-" + std::to_string(k), 5 * k + 1, w_dims[k - 2]});
  }
  if (all || table == ReproTable::AutoClass) out.push_back({"autoclass", "autoclass", 14, 13});
  if (all || table == ReproTable::Gaussian) {
    out.push_back({"gaussian", "gaussian-naive-bayes", 14, 12});
    out.push_back({"gaussian", "gaussian-w", 14, 12});
  }
  if (all || table == ReproTable::Sigmoid) {
    out.push_back({"sigmoid", "sigmoid-two-level", 14, 14});
    out.push_back({"sigmoid", "sigmoid-three-level", 17, 15});
  }
  return out;
}

}  // namespace

std::vector<ReproRow> reproduce(ReproTable table, int trials, std::uint64_t seed) {
  std::vector<ReproRow> rows;
  for (const auto& e : expectations(table)) {
    const auto model = models::builtin(e.model);
    RankOptions options;
    options.trials = trials;
    options.seed = seed;
    const auto report = regular_rank(model, options);
    ReproRow row;
    row.table = e.table;
    row.model = e.model;
    row.d_prime = report.d_prime;
    row.d = report.d;
    row.expected_d_prime = e.d_prime;
    row.expected_d = e.d;
    row.min_trial_rank = report.min_trial_rank();
    row.pass = row.d == e.d && row.d_prime == e.d_prime && row.min_trial_rank == row.d;
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json rows_to_json(const std::vector<ReproRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"table", r.table},
                   {"model", r.model},
                   {"d_prime", r.d_prime},
                   {"d", r.d},
                   {"expected_d_prime", r.expected_d_prime},
                   {"expected_d", r.expected_d},
                   {"min_trial_rank", r.min_trial_rank},
                   {"pass", r.pass}});
  }
  return out;
}

}  // namespace latentdim
