#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "latentdim/dataset.hpp"
#include "latentdim/inference.hpp"
#include "latentdim/models.hpp"
#include "latentdim/scoring.hpp"
#include "oracles.hpp"

using namespace latentdim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string model_path(const std::string& name) { return (fs::path(LATENTDIM_MODELS_DIR) / (name + ".json")).string(); }

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("latentdim-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("shipped model files match the built-in specs") {
  for (const auto& name : {"w-structure", "autoclass", "gaussian-naive-bayes", "gaussian-w", "sigmoid-two-level",
                           "sigmoid-three-level", "naive-bayes-7"}) {
    CAPTURE(name);
    CHECK(slurp(model_path(name)) == save_model(models::builtin(name)));
  }
  CHECK(slurp(model_path("hidden-x")) == save_model(models::builtin("naive-bayes-1")));
}

TEST_CASE("dim on the W structure file") {
  auto r = run({"dim", model_path("w-structure"), "--json"});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["d"] == 9);
  CHECK(doc["d_prime"] == 11);
  CHECK(doc["observable_dof"] == 15);
  CHECK(doc["trials"].size() == 10);
  CHECK(doc["manifest"]["command"] == "dim");
  CHECK(doc["manifest"]["timestamp"].is_null());

  auto text = run({"dim", model_path("w-structure")});
  CHECK(text.code == 0);
  CHECK(text.out.find("trial ranks     9 9 9") != std::string::npos);
}

TEST_CASE("dim on a fully observed chain") {
  auto doc = json::parse(run({"dim", model_path("chain"), "--json"}).out);
  CHECK(doc["d"] == doc["d_prime"]);
  CHECK(doc["d"] == 1 + 2 * 2 + 3);
}

TEST_CASE("dim on naive Bayes with seven leaves is fast") {
  const auto start = std::chrono::steady_clock::now();
  auto r = run({"dim", model_path("naive-bayes-7"), "--json"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["d"] == 15);
  CHECK(seconds < 10.0);
}

TEST_CASE("dim reports are byte-identical across runs") {
  auto a = run({"dim", "--builtin", "sigmoid-two-level", "--json", "--seed", "3"});
  auto b = run({"dim", "--builtin", "sigmoid-two-level", "--json", "--seed", "3", "--parallel"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("dim error exit codes") {
  auto bad = scratch() / "cycle.json";
  std::ofstream(bad) << R"({"family": "discrete", "edges": [["A", "B"], ["B", "A"]],
    "variables": [{"name": "A", "states": 2}, {"name": "B", "states": 2}]})";
  CHECK(run({"dim", bad.string()}).code == cli::kInputError);
  CHECK(run({"dim", (scratch() / "missing.json").string()}).code == cli::kInputError);
  CHECK(run({"dim"}).code == cli::kInputError);
  CHECK(run({"dim", "--builtin", "no-such-model"}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);

  ::setenv("LATENTDIM_STATE_CAP", "16", 1);
  auto capped = run({"dim", model_path("w-structure")});
  ::unsetenv("LATENTDIM_STATE_CAP");
  CHECK(capped.code == cli::kResourceCap);
}

TEST_CASE("gen writes deterministic CSV") {
  auto a = scratch() / "a.csv";
  CHECK(run({"gen", model_path("w-structure"), "--seed-params", "4", "-N", "50", "--seed", "9", "-o", a.string()}).code == 0);
  const auto text = slurp(a);
  CHECK(run({"gen", model_path("w-structure"), "--seed-params", "4", "-N", "50", "--seed", "9", "-o", a.string()}).code == 0);
  CHECK(slurp(a) == text);
  CHECK(run({"gen", model_path("w-structure"), "--seed-params", "4", "-N", "50", "--seed", "10", "-o", a.string()}).code == 0);
  CHECK(slurp(a) != text);
  CHECK(text.rfind("# manifest ", 0) == 0);
  CHECK(text.find("\nA,B,C,D\n") != std::string::npos);

  auto empty = run({"gen", model_path("w-structure"), "--seed-params", "4", "-N", "0"});
  CHECK(empty.code == 0);
  std::istringstream lines(empty.out);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 2);
  CHECK(all[1] == "A,B,C,D");

  CHECK(run({"gen", model_path("gaussian-w"), "--seed-params", "1", "-N", "5"}).code == cli::kInputError);
}

TEST_CASE("gen from H->X matches the model marginal") {
  auto params = scratch() / "hx-params.json";
  std::ofstream(params) << R"({"values": ["3/5", "2/5", "1/4", "3/4", "9/10", "1/10"]})";
  auto out = scratch() / "hx.csv";
  REQUIRE(run({"gen", model_path("hidden-x"), "--params", params.string(), "-N", "10000", "--seed", "2", "-o",
               out.string()}).code == 0);
  auto m = load_model_file(model_path("hidden-x"));
  auto data = read_csv_file(out, m);
  REQUIRE(data.size() == 10000);
  double zeros = 0;
  for (const auto& row : data.cases()) zeros += row[1] == 0 ? 1 : 0;
  const double w = 0.6 * 0.25 + 0.4 * 0.9;
  CHECK(std::abs(zeros / 10000 - w) <= 0.02);
}

TEST_CASE("score ch on complete data matches sequential prediction") {
  auto data_file = scratch() / "chain.csv";
  REQUIRE(run({"gen", model_path("chain"), "--seed-params", "2", "-N", "80", "--seed", "3", "-o", data_file.string()}).code == 0);
  auto r = run({"score", model_path("chain"), data_file.string(), "--score", "ch", "--json"});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  REQUIRE(doc["scores"].size() == 1);
  CHECK(doc["scores"][0]["score"] == "ch");
  auto m = load_model_file(model_path("chain"));
  auto data = read_csv_file(data_file, m);
  auto alpha = prior_counts(PriorSpec::uniform(m, 1.0), m);
  CHECK(std::abs(doc["scores"][0]["value_nats"].get<double>() - oracle::sequential_predictive(m, data, alpha.values)) <= 1e-10);
}

TEST_CASE("score all on latent data") {
  auto data_file = scratch() / "hx-all.csv";
  REQUIRE(run({"gen", model_path("hidden-x"), "--seed-params", "1", "-N", "300", "--seed", "2", "-o",
               data_file.string()}).code == 0);
  auto r = run({"score", model_path("hidden-x"), data_file.string(), "--json"});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  double cs = 0;
  double corrected = 0;
  for (const auto& s : doc["scores"]) {
    if (s["score"] == "cs") cs = s["value_nats"];
    if (s["score"] == "cs-corrected") corrected = s["value_nats"];
  }
  CHECK(doc["rank"]["d"] == 1);
  CHECK(doc["rank"]["d_prime"] == 3);
  CHECK(std::abs(corrected - cs - std::log(300.0)) <= 1e-9);
  CHECK(doc["notes"].size() == 2);
  CHECK(doc["em"]["converged"] == true);

  // iteration cap forces a convergence warning but still reports
  auto ac_file = scratch() / "autoclass.csv";
  REQUIRE(run({"gen", model_path("autoclass"), "--seed-params", "1", "-N", "300", "--seed", "2", "-o",
               ac_file.string()}).code == 0);
  auto capped = run({"score", model_path("autoclass"), ac_file.string(), "--score", "cs", "--max-iter", "1", "--json"});
  CHECK(capped.code == cli::kConvergenceWarning);
  CHECK(json::parse(capped.out)["scores"].size() == 1);
  CHECK(json::parse(capped.out)["em"]["converged"] == false);
}

TEST_CASE("score bic-latent on H->X uses d = 1") {
  auto data_file = scratch() / "hx-small.csv";
  REQUIRE(run({"gen", "--builtin", "naive-bayes-1", "--seed-params", "1", "-N", "100", "-o", data_file.string()}).code == 0);
  auto r = run({"score", model_path("hidden-x"), data_file.string(), "--score", "bic-latent"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("(d=1)") != std::string::npos);
  auto j = run({"score", "--builtin", "naive-bayes-1", data_file.string(), "--score", "bic-latent", "--json"});
  CHECK(json::parse(j.out)["scores"][0]["d_used"] == 1);
}

TEST_CASE("score input errors") {
  auto data_file = scratch() / "bad.csv";
  std::ofstream(data_file) << "A,B,C\n0,5,0\n";
  CHECK(run({"score", model_path("chain"), data_file.string()}).code == cli::kInputError);
  CHECK(run({"score", model_path("chain"), (scratch() / "nope.csv").string()}).code == cli::kInputError);
  CHECK(run({"score", model_path("gaussian-w"), data_file.string()}).code == cli::kInputError);
}

TEST_CASE("reproduce tables") {
  auto ac = run({"reproduce", "--table", "autoclass", "--json"});
  CHECK(ac.code == 0);
  auto rows = json::parse(ac.out)["rows"];
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["d_prime"] == 14);
  CHECK(rows[0]["d"] == 13);

  CHECK(run({"reproduce", "--table", "sigmoid"}).code == 0);

  auto dims = json::parse(run({"reproduce", "--table", "dims", "--json"}).out)["rows"];
  int naive = 0;
  int w = 0;
  for (const auto& row : dims) {
    const std::string name = row["model"];
    if (name.rfind("naive-bayes", 0) == 0) {
      ++naive;
      CHECK(row["pass"] == true);
    }
    if (name.rfind("w-structure", 0) == 0) ++w;
  }
  CHECK(naive == 7);
  CHECK(w == 4);
}

TEST_CASE("timestamps come only from the flag or SOURCE_DATE_EPOCH") {
  auto fixed = json::parse(run({"--timestamp", "2024-01-02T03:04:05Z", "dim", "--builtin", "naive-bayes-2", "--json"}).out);
  CHECK(fixed["manifest"]["timestamp"] == "2024-01-02T03:04:05Z");
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  auto epoch = json::parse(run({"dim", "--builtin", "naive-bayes-2", "--json"}).out);
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(epoch["manifest"]["timestamp"] == "1970-01-01T00:00:00Z");
}
