#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "latentdim/error.hpp"
#include "latentdim/inference.hpp"
#include "latentdim/models.hpp"
#include "latentdim/rng.hpp"
#include "oracles.hpp"

using namespace latentdim;

namespace {

NetworkModel chain_ab() {
  return ModelBuilder(Family::Discrete).discrete("A", 2).discrete("B", 2).edge("A", "B").build();
}

/// Random binary DAG with the first `hidden` variables hidden.
NetworkModel random_binary_dag(std::uint64_t seed, int n, int hidden) {
  Rng rng(seed);
  ModelBuilder b(Family::Discrete);
  for (int i = 0; i < n; ++i) b.discrete("V" + std::to_string(i), 2, i < hidden);
  for (int child = 1; child < n; ++child) {
    int added = 0;
    for (int parent = 0; parent < child && added < 3; ++parent)
      if (rng.uniform_int(0, 2) == 0) {
        b.edge("V" + std::to_string(parent), "V" + std::to_string(child));
        ++added;
      }
  }
  return b.build();
}

/// Masks each observed entry with probability 1/5.
Dataset with_missing(const NetworkModel& m, const Dataset& d, std::uint64_t seed) {
  Rng rng(seed);
  auto cases = d.cases();
  for (auto& row : cases) {
    for (auto& v : row)
      if (v != kMissing && rng.uniform_int(0, 4) == 0) v = kMissing;
    bool any = false;
    for (std::size_t i = 0; i < row.size(); ++i) any = any || row[i] != kMissing;
    if (!any) row = d.cases().front();
  }
  return Dataset(m, cases);
}

/// Best loglik over uniformly random naive Bayes parameters (binary root,
/// binary leaves), evaluated on grouped patterns.
double random_search_naive_bayes(const Dataset& data, int leaves, int points, std::uint64_t seed) {
  std::map<std::vector<int>, double> patterns;
  for (const auto& row : data.cases()) patterns[row] += 1.0;
  Rng rng(seed);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> t(1 + 2 * leaves);
  for (int s = 0; s < points; ++s) {
    for (auto& v : t) v = rng.uniform01();
    double ll = 0.0;
    for (const auto& [row, count] : patterns) {
      double p0 = t[0];
      double p1 = 1 - t[0];
      for (int l = 0; l < leaves; ++l) {
        const double a = t[1 + 2 * l];
        const double b = t[2 + 2 * l];
        const int x = row[1 + l];
        p0 *= x == 0 ? a : 1 - a;
        p1 *= x == 0 ? b : 1 - b;
      }
      ll += count * std::log(p0 + p1);
    }
    best = std::max(best, ll);
  }
  return best;
}

}  // namespace

TEST_CASE("complete counts") {
  auto m = chain_ab();
  auto empty = complete_counts(Dataset(m, {}), m);
  for (double v : empty.values) CHECK(v == 0.0);
  CHECK(empty.cases == 0.0);

  // a = state 0, b = state 0
  Dataset d(m, {{0, 0}, {0, 1}, {1, 0}});
  auto c = complete_counts(d, m);
  CHECK(c.at(1, 0, 0) == 1.0);
  CHECK(c.at(1, 0, 1) == 1.0);
  CHECK(c.at(1, 1, 0) == 1.0);
  CHECK(c.at(1, 1, 1) == 0.0);
  CHECK(c.at(0, 0, 0) == 2.0);
  CHECK(c.variable_total(0) == 3.0);

  Dataset missing(m, {{0, kMissing}});
  CHECK_THROWS_AS(complete_counts(missing, m), InputError);
}

TEST_CASE("empirical conditionals approach the sampling parameters") {
  auto m = models::w_structure(2).fully_observed_copy();
  auto p = to_real(sample_parameters(m, 4));
  auto data = sample_data(m, p, 1000, 8);
  auto c = complete_counts(data, m);
  const auto& layout = c.layout;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < layout.rows[i]; ++j) {
      const double row = c.row_total(i, j);
      if (row < 50) continue;
      for (std::size_t k = 0; k < layout.width[i]; ++k) CHECK(std::abs(c.at(i, j, k) / row - p.theta(i, j, k)) <= 0.05);
    }
}

TEST_CASE("dataset rejects bad cases") {
  auto m = models::naive_bayes(2);
  CHECK_THROWS_AS(Dataset(m, {{0, 0, 0}}), InputError);           // hidden observed
  CHECK_THROWS_AS(Dataset(m, {{kMissing, 2, 0}}), InputError);    // state out of range
  CHECK_THROWS_AS(Dataset(m, {{kMissing, 0}}), InputError);       // wrong width
  CHECK_NOTHROW(Dataset(m, {{kMissing, 1, kMissing}}));
}

TEST_CASE("complete-data loglik is the count-weighted log theta") {
  auto m = chain_ab();
  auto p = to_real(sample_parameters(m, 2));
  Dataset d(m, {{0, 0}, {0, 1}, {1, 0}, {1, 0}});
  auto c = complete_counts(d, m);
  double expected = 0.0;
  for (std::size_t idx = 0; idx < c.values.size(); ++idx)
    if (c.values[idx] > 0) expected += c.values[idx] * std::log(p[idx]);
  CHECK(loglik(d, m, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("single H->X case has loglik log w") {
  auto m = models::naive_bayes(1);
  auto p = to_real(sample_parameters(m, 6));
  const double w = p.theta(0, 0, 0) * p.theta(1, 0, 0) + p.theta(0, 0, 1) * p.theta(1, 1, 0);
  CHECK(loglik(Dataset(m, {{kMissing, 0}}), m, p) == doctest::Approx(std::log(w)).epsilon(1e-14));
  CHECK(loglik(Dataset(m, {{kMissing, 1}}), m, p) == doctest::Approx(std::log(1 - w)).epsilon(1e-14));
}

TEST_CASE("latent loglik matches the full-joint oracle") {
  auto m = models::w_structure(3);
  auto p = to_real(sample_parameters(m, 10));
  auto data = sample_data(m, p, 50, 3);
  CHECK(std::abs(loglik(data, m, p) - oracle::loglik_full_joint(data, m, p.values())) <= 1e-10);
}

TEST_CASE("local-factor loglik equals the full-joint loglik on random networks") {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const int n = 4 + static_cast<int>(s % 9);  // 4..12 variables
    auto m = random_binary_dag(s, n, static_cast<int>(s % 3));
    REQUIRE(validate(m).empty());
    auto p = to_real(sample_parameters(m, s));
    auto data = with_missing(m, sample_data(m, p, 30, s + 1), s + 2);
    CAPTURE(n);
    CHECK(std::abs(loglik(data, m, p) - oracle::loglik_full_joint(data, m, p.values())) <= 1e-10);
  }
}

TEST_CASE("zero-probability case gives -infinity") {
  auto m = chain_ab();
  ParameterPoint<double> p(m, {1.0, 0.0, 0.5, 0.5, 0.5, 0.5});
  CHECK(std::isinf(loglik(Dataset(m, {{1, 0}}), m, p)));
  CHECK(loglik(Dataset(m, {{1, 0}}), m, p) < 0);
}

TEST_CASE("expected counts on complete data equal the counts") {
  auto m = models::builtin("autoclass").fully_observed_copy();
  auto p = to_real(sample_parameters(m, 1));
  auto data = sample_data(m, p, 100, 2);
  auto e = expected_counts(data, m, p);
  auto c = complete_counts(data, m);
  REQUIRE(e.values.size() == c.values.size());
  for (std::size_t i = 0; i < c.values.size(); ++i) CHECK(e.values[i] == c.values[i]);
}

TEST_CASE("symmetric H->X splits every case evenly") {
  auto m = models::naive_bayes(1);
  ParameterPoint<double> p(m, {0.5, 0.5, 0.3, 0.7, 0.3, 0.7});
  Dataset d(m, {{kMissing, 0}, {kMissing, 1}, {kMissing, 1}});
  auto e = expected_counts(d, m, p);
  CHECK(e.at(0, 0, 0) == doctest::Approx(1.5));
  CHECK(e.at(0, 0, 1) == doctest::Approx(1.5));
  CHECK(e.at(1, 0, 0) == doctest::Approx(0.5));
  CHECK(e.at(1, 1, 0) == doctest::Approx(0.5));
  CHECK(e.at(1, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("expected counts conserve mass") {
  for (const auto& name : {"w-structure", "autoclass", "naive-bayes-4"}) {
    auto m = models::builtin(name);
    auto p = to_real(sample_parameters(m, 3));
    auto data = sample_data(m, p, 20, 4);
    auto e = expected_counts(data, m, to_real(sample_parameters(m, 99)));
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(e.variable_total(i) - 20.0) <= 1e-10);
    for (double v : e.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("EM on complete data lands on the frequencies in one step") {
  auto m = models::w_structure(2).fully_observed_copy();
  auto data = sample_data(m, to_real(sample_parameters(m, 1)), 300, 2);
  auto c = complete_counts(data, m);
  auto fit = em_fit(data, m);
  CHECK(fit.converged);
  CHECK(fit.iterations <= 2);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < c.layout.rows[i]; ++j)
      for (std::size_t k = 0; k < c.layout.width[i]; ++k)
        CHECK(std::abs(fit.point.theta(i, j, k) - c.at(i, j, k) / c.row_total(i, j)) <= 1e-12);
  for (const auto& run : fit.runs) CHECK(run.trace[1] == doctest::Approx(fit.loglik).epsilon(1e-14));
}

TEST_CASE("complete-data estimate solves the likelihood equations") {
  auto m = chain_ab();
  ParameterPoint<double> truth(m, {0.4, 0.6, 0.3, 0.7, 0.6, 0.4});
  auto data = sample_data(m, truth, 400, 6);
  auto fit = em_fit(data, m);
  for (double v : complete_counts(data, m).values) REQUIRE(v > 0);
  const auto free = fit.point.free_values();
  const double h = 1e-4;
  for (std::size_t c = 0; c < free.size(); ++c) {
    auto up = free;
    auto down = free;
    up[c] += h;
    down[c] -= h;
    const double grad = (loglik(data, m, from_free_values<double>(m, up)) -
                         loglik(data, m, from_free_values<double>(m, down))) / (2 * h);
    CHECK(std::abs(grad) <= 1e-3);
  }
  // away from the estimate the gradient is not small
  auto off = free;
  off[0] = std::min(0.95, off[0] + 0.2);
  auto up = off;
  up[0] += h;
  auto down = off;
  down[0] -= h;
  const double grad = (loglik(data, m, from_free_values<double>(m, up)) -
                       loglik(data, m, from_free_values<double>(m, down))) / (2 * h);
  CHECK(std::abs(grad) > 1.0);
}

TEST_CASE("H->X fit reproduces the empirical frequency") {
  auto m = models::naive_bayes(1);
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto data = sample_data(m, to_real(sample_parameters(m, s)), 250, s + 40);
    double ones = 0;
    for (const auto& row : data.cases()) ones += row[1] == 0 ? 1 : 0;
    auto fit = em_fit(data, m);
    const auto& t = fit.point;
    const double w = t.theta(0, 0, 0) * t.theta(1, 0, 0) + t.theta(0, 0, 1) * t.theta(1, 1, 0);
    CHECK(std::abs(w - ones / 250.0) <= 1e-8);
  }
}

TEST_CASE("EM traces never decrease") {
  for (const auto& name : {"naive-bayes-3", "w-structure", "autoclass"}) {
    auto m = models::builtin(name);
    auto data = sample_data(m, to_real(sample_parameters(m, 7)), 200, 8);
    auto fit = em_fit(data, m);
    CHECK(fit.runs.size() == 5);
    for (const auto& run : fit.runs) {
      CHECK(run.trace.size() == static_cast<std::size_t>(run.iterations) + 1);
      for (std::size_t t = 1; t < run.trace.size(); ++t) CHECK(run.trace[t] >= run.trace[t - 1] - 1e-12);
      CHECK(run.loglik <= fit.loglik);
    }
    CHECK(fit.loglik == doctest::Approx(loglik(data, m, fit.point)).epsilon(1e-12));
  }
}

TEST_CASE("EM beats a random-search baseline") {
  auto m = models::naive_bayes(3);
  auto data = sample_data(m, to_real(sample_parameters(m, 11)), 500, 12);
  auto fit = em_fit(data, m);
  const double baseline = random_search_naive_bayes(data, 3, 1000000, 5);
  CHECK(fit.loglik >= baseline - 1e-6);
}

TEST_CASE("a row with no mass keeps its value and is flagged") {
  auto m = chain_ab();
  Dataset d(m, {{0, 0}, {0, 1}, {0, 0}});
  EmOptions o;
  o.restarts = 1;
  auto fit = em_fit(d, m, o);
  CHECK(fit.zero_row);
  auto start = to_real(sample_parameters(m, derive_seed(0, 0)));
  CHECK(fit.point.theta(1, 1, 0) == start.theta(1, 1, 0));
  CHECK(fit.point.theta(1, 1, 1) == start.theta(1, 1, 1));
}

TEST_CASE("iteration cap leaves the run unconverged") {
  auto m = models::builtin("autoclass");
  auto data = sample_data(m, to_real(sample_parameters(m, 1)), 200, 2);
  EmOptions o;
  o.max_iterations = 1;
  auto fit = em_fit(data, m, o);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
}

TEST_CASE("completed statistics") {
  auto full = models::naive_bayes(3).fully_observed_copy();
  auto cd = sample_data(full, to_real(sample_parameters(full, 1)), 80, 2);
  auto dc = completed_statistics(cd, full, em_fit(cd, full).point);
  auto counts = complete_counts(cd, full);
  for (std::size_t i = 0; i < counts.values.size(); ++i) CHECK(dc.values[i] == doctest::Approx(counts.values[i]));

  auto m = models::builtin("autoclass");
  auto data = sample_data(m, to_real(sample_parameters(m, 3)), 200, 4);
  auto fit = em_fit(data, m);
  auto stats = completed_statistics(data, m, fit.point);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(stats.variable_total(i) - 200.0) <= 1e-9);
  // feature marginals of D_c are the observed marginals
  for (std::size_t i = 1; i < m.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      double observed = 0;
      for (const auto& row : data.cases()) observed += row[i] == k ? 1 : 0;
      double completed = 0;
      for (std::size_t j = 0; j < 3; ++j) completed += stats.at(i, j, k);
      CHECK(std::abs(completed - observed) <= 1e-9);
    }
  }
}

TEST_CASE("sampler") {
  auto m = models::naive_bayes(1);
  auto p = to_real(sample_parameters(m, 2));
  CHECK(sample_data(m, p, 0, 1).empty());

  auto a = sample_data(m, p, 100, 9);
  auto b = sample_data(m, p, 100, 9);
  CHECK(a.cases() == b.cases());
  for (const auto& row : a.cases()) CHECK(row[0] == kMissing);

  const double eps = 1e-9;
  ParameterPoint<double> det(m, {1 - eps, eps, eps, 1 - eps, 1 - eps, eps});
  auto same = sample_full_cases(m, det, 200, 3);
  for (const auto& row : same) CHECK(row == same.front());

  auto big = sample_data(m, p, 10000, 5);
  double zeros = 0;
  for (const auto& row : big.cases()) zeros += row[1] == 0 ? 1 : 0;
  const double w = p.theta(0, 0, 0) * p.theta(1, 0, 0) + p.theta(0, 0, 1) * p.theta(1, 1, 0);
  CHECK(std::abs(zeros / 10000 - w) <= 0.02);
}

TEST_CASE("sigmoid networks sample and score") {
  auto m = models::sigmoid_two_level();
  auto p = to_real(sample_parameters(m, 1));
  auto data = sample_data(m, p, 40, 2);
  CHECK(std::abs(loglik(data, m, p) - oracle::loglik_full_joint(data, m, local_cpt(m, p))) <= 1e-10);
}

TEST_CASE("CSV round trip") {
  auto m = models::w_structure(2);
  auto data = with_missing(m, sample_data(m, to_real(sample_parameters(m, 1)), 25, 2), 3);
  std::stringstream io;
  write_csv(io, data, m, "generated");
  const std::string text = io.str();
  CHECK(text.rfind("# generated\nA,B,C,D\n", 0) == 0);
  auto back = read_csv(io, m);
  CHECK(back.cases() == data.cases());
}

TEST_CASE("CSV parsing rules") {
  auto m = models::w_structure(2);
  std::istringstream with_hidden("A,B,H,C,D\n0,1,?,1,?\n");
  CHECK(read_csv(with_hidden, m)[0] == std::vector<int>{0, 1, kMissing, 1, kMissing});
  std::istringstream reordered("# note\nD,C,B,A\n1,0,1,0\n");
  CHECK(read_csv(reordered, m)[0] == std::vector<int>{0, 1, kMissing, 0, 1});

  std::istringstream unknown("A,B,C,D,E\n0,0,0,0,0\n");
  CHECK_THROWS_AS(read_csv(unknown, m), InputError);
  std::istringstream absent("A,B,C\n0,0,0\n");
  CHECK_THROWS_AS(read_csv(absent, m), InputError);
  std::istringstream range("A,B,C,D\n0,0,0,2\n");
  CHECK_THROWS_AS(read_csv(range, m), InputError);
  std::istringstream hidden_value("A,B,H,C,D\n0,0,1,0,0\n");
  CHECK_THROWS_AS(read_csv(hidden_value, m), InputError);
  std::istringstream ragged("A,B,C,D\n0,0,0\n");
  CHECK_THROWS_AS(read_csv(ragged, m), InputError);
}
