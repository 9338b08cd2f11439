#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "latentdim/dataset.hpp"
#include "latentdim/error.hpp"
#include "latentdim/inference.hpp"
#include "latentdim/models.hpp"
#include "latentdim/network.hpp"
#include "latentdim/rank.hpp"
#include "latentdim/reproduce.hpp"
#include "latentdim/scoring.hpp"

#ifndef LATENTDIM_VERSION
#define LATENTDIM_VERSION "0.0.0"
#endif

namespace latentdim::cli {

using nlohmann::json;

namespace {

/// Everything needed to reconstruct a run.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  int trials = 0;
  json tolerances = json::object();
  std::string output;
  std::string timestamp;

  json to_json() const {
    return {{"command", command},
            {"inputs", inputs},
            {"seed", seed},
            {"trials", trials},
            {"tolerances", tolerances},
            {"output", output.empty() ? json(nullptr) : json(output)},
            {"timestamp", timestamp.empty() ? json(nullptr) : json(timestamp)},
            {"version", LATENTDIM_VERSION}};
  }
};

std::string iso_time(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// Unset by default so repeated runs stay byte-identical.
std::string resolve_timestamp(const std::string& flag) {
  if (flag == "now") return iso_time(std::time(nullptr));
  if (!flag.empty()) return flag;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return iso_time(static_cast<std::time_t>(std::stoll(epoch)));
    } catch (const std::exception&) {
      throw InputError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  return {};
}

struct Sink {
  std::ostream& stdout_stream;
  std::string path;
  std::ostringstream buffer;

  std::ostream& stream() { return path.empty() ? stdout_stream : static_cast<std::ostream&>(buffer); }

  void flush() {
    if (path.empty()) return;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot write " + path);
    file << buffer.str();
  }
};

NetworkModel load_model_arg(const std::string& file, const std::string& builtin) {
  NetworkModel model = builtin.empty() ? load_model_file(file) : models::builtin(builtin);
  require_valid(model);
  return model;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

// ---------------------------------------------------------------- dim

struct DimArgs {
  std::string model_file;
  std::string builtin;
  int trials = 10;
  std::uint64_t seed = 0;
  bool json_output = false;
  std::string method;
  double tolerance = kDefaultRankTolerance;
  bool parallel = false;
  std::string output;
  std::string timestamp;
};

int cmd_dim(const DimArgs& a, std::ostream& out) {
  if (a.model_file.empty() == a.builtin.empty()) throw InputError("give exactly one of a model file or --builtin");
  const auto model = load_model_arg(a.model_file, a.builtin);
  RankOptions options;
  options.trials = a.trials;
  options.seed = a.seed;
  options.tolerance = a.tolerance;
  options.parallel = a.parallel;
  if (a.method == "exact") options.method = RankMethod::ExactRational;
  if (a.method == "numeric") options.method = RankMethod::NumericTolerance;
  const auto report = regular_rank(model, options);

  RunManifest manifest{"dim", {a.builtin.empty() ? a.model_file : "builtin:" + a.builtin}, a.seed, a.trials};
  manifest.tolerances = {{"rank", report.tolerance ? json(*report.tolerance) : json(nullptr)}};
  manifest.output = a.output;
  manifest.timestamp = a.timestamp;

  Sink sink{out, a.output, {}};
  auto& s = sink.stream();
  if (a.json_output) {
    json doc = report_to_json(report);
    doc["manifest"] = manifest.to_json();
    s << doc.dump(2) << '\n';
  } else {
    s << "# manifest " << manifest.to_json().dump() << '\n';
    s << "model           " << report.model_fingerprint << " (" << to_string(report.family) << ")\n";
    s << "d               " << report.d << '\n';
    s << "d'              " << report.d_prime << '\n';
    s << "observable dof  " << report.observable_dof << '\n';
    s << "method          " << to_string(report.method);
    if (report.tolerance) s << " (tol " << *report.tolerance << ")";
    s << '\n' << "trial ranks    ";
    for (const auto& t : report.trials) s << ' ' << t.rank << (t.low_confidence ? "?" : "");
    s << '\n';
    if (report.low_confidence()) s << "warning: ill-separated singular values in some trials ('?')\n";
  }
  sink.flush();
  return kSuccess;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::vector<std::string> inputs;
  std::string model_file;
  std::string builtin;
  std::string data_file;
  std::string score = "all";
  double alpha = 0.0;
  std::string prior_file;
  std::uint64_t seed = 0;
  int trials = 10;
  int restarts = 5;
  double em_tolerance = 1e-8;
  int max_iterations = 500;
  bool json_output = false;
  std::string output;
  std::string timestamp;
};

PriorSpec load_prior(const ScoreArgs& a, const NetworkModel& model) {
  PriorSpec prior;
  if (a.prior_file.empty()) {
    prior = PriorSpec::uniform(model, 1.0);
  } else {
    std::ifstream in(a.prior_file);
    if (!in) throw InputError("cannot open prior file " + a.prior_file);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw InputError("prior file is not a JSON object");
    try {
      prior.network = model_from_json(doc.at("network"));
      require_valid(prior.network);
      prior.point = to_real(point_from_json(prior.network, doc.at("parameters")));
      prior.alpha = doc.value("alpha", 1.0);
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed prior file: ") + e.what());
    }
    auto problems = check_point(prior.network, prior.point);
    if (!problems.empty()) throw InputError("prior parameters: " + problems.front());
  }
  if (a.alpha > 0.0) prior.alpha = a.alpha;
  return prior;
}

int cmd_score(ScoreArgs a, std::ostream& out, std::ostream& err) {
  // positionals are [model] data
  if (a.inputs.size() == 2) {
    a.model_file = a.inputs[0];
    a.data_file = a.inputs[1];
  } else if (a.inputs.size() == 1) {
    a.data_file = a.inputs[0];
  }
  if (a.data_file.empty()) throw InputError("a data file is required");
  if (a.model_file.empty() == a.builtin.empty()) throw InputError("give exactly one of a model file or --builtin");
  const auto model = load_model_arg(a.model_file, a.builtin);
  if (model.family() == Family::LinearGaussian) throw InputError("scores need a discrete network");
  const auto data = read_csv_file(a.data_file, model);
  const auto prior = load_prior(a, model);

  const std::vector<std::string> all = {"ch", "bic", "bic-latent", "cs", "cs-corrected"};
  std::vector<std::string> wanted;
  if (a.score == "all") {
    wanted = all;
  } else if (std::find(all.begin(), all.end(), a.score) != all.end()) {
    wanted = {a.score};
  } else {
    throw InputError("unknown score '" + a.score + "'");
  }
  std::vector<std::string> notes;
  if (!data.complete()) {
    for (const char* s : {"ch", "bic"}) {
      auto it = std::find(wanted.begin(), wanted.end(), s);
      if (it == wanted.end()) continue;
      if (a.score != "all") throw InputError(std::string(s) + " needs complete data");
      notes.push_back(std::string("skipped ") + s + ": data has hidden or missing values");
      wanted.erase(it);
    }
  }

  const bool needs_em = std::any_of(wanted.begin(), wanted.end(), [](const std::string& s) {
    return s == "bic-latent" || s == "cs" || s == "cs-corrected";
  });
  if (needs_em && model.family() != Family::Discrete) throw InputError("EM-based scores need the discrete family");
  std::optional<EmResult> em;
  std::optional<RegularRankReport> rank;
  if (needs_em) {
    EmOptions eo;
    eo.restarts = a.restarts;
    eo.tolerance = a.em_tolerance;
    eo.max_iterations = a.max_iterations;
    eo.seed = a.seed;
    em = em_fit(data, model, eo);
    RankOptions ro;
    ro.trials = a.trials;
    ro.seed = a.seed;
    rank = regular_rank(model, ro);
  }

  std::vector<ScoreReport> reports;
  for (const auto& s : wanted) {
    if (s == "ch") reports.push_back(ch_score(data, model, prior));
    if (s == "bic") reports.push_back(bic_complete(data, model));
    if (s == "bic-latent") reports.push_back(bic_latent(data, model, em->point, *rank));
    if (s == "cs") reports.push_back(cs_score(data, model, em->point, prior));
    if (s == "cs-corrected") reports.push_back(cs_corrected(data, model, em->point, prior, *rank));
  }

  RunManifest manifest{"score",
                       {a.builtin.empty() ? a.model_file : "builtin:" + a.builtin, a.data_file},
                       a.seed,
                       a.trials};
  if (!a.prior_file.empty()) manifest.inputs.push_back(a.prior_file);
  manifest.tolerances = {{"em", a.em_tolerance}, {"em_max_iterations", a.max_iterations}, {"em_restarts", a.restarts},
                         {"alpha", prior.alpha}};
  manifest.output = a.output;
  manifest.timestamp = a.timestamp;

  Sink sink{out, a.output, {}};
  auto& s = sink.stream();
  if (a.json_output) {
    json doc = {{"manifest", manifest.to_json()}, {"scores", json::array()}};
    for (const auto& r : reports) doc["scores"].push_back(score_to_json(r));
    if (em) {
      json runs = json::array();
      for (const auto& run : em->runs)
        runs.push_back({{"seed", run.seed},
                        {"loglik", run.loglik},
                        {"iterations", run.iterations},
                        {"converged", run.converged},
                        {"zero_row", run.zero_row}});
      doc["em"] = {{"loglik", em->loglik},
                   {"iterations", em->iterations},
                   {"converged", em->converged},
                   {"zero_row", em->zero_row},
                   {"runs", runs}};
      doc["rank"] = report_to_json(*rank);
    }
    if (!notes.empty()) doc["notes"] = notes;
    s << doc.dump(2) << '\n';
  } else {
    s << "# manifest " << manifest.to_json().dump() << '\n';
    s << "N = " << data.size() << ", d' = " << parameter_count(model);
    if (rank) s << ", d = " << rank->d;
    s << '\n';
    for (const auto& r : reports) {
      s << std::left << std::setw(14) << r.score << " value " << fmt(r.value) << "  loglik " << fmt(r.loglik_term)
        << "  penalty " << fmt(r.penalty_term);
      if (r.d_used) s << "  (d=" << *r.d_used << ")";
      s << '\n';
    }
    if (em) {
      s << "em: best loglik " << fmt(em->loglik) << " after " << em->iterations << " iterations ("
        << (em->converged ? "converged" : "NOT converged") << ")";
      if (em->zero_row) s << ", zero-mass rows kept";
      s << '\n';
      for (const auto& run : em->runs)
        s << "  restart seed " << run.seed << ": loglik " << fmt(run.loglik) << ", " << run.iterations << " iterations"
          << (run.converged ? "" : " (not converged)") << '\n';
    }
    for (const auto& n : notes) s << "note: " << n << '\n';
  }
  sink.flush();
  if (em && !em->converged) {
    err << "warning: EM did not converge within " << a.max_iterations << " iterations; reporting best so far\n";
    return kConvergenceWarning;
  }
  return kSuccess;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceArgs {
  std::string table = "all";
  int trials = 10;
  std::uint64_t seed = 0;
  bool json_output = false;
  std::string timestamp;
};

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out) {
  const auto rows = reproduce(repro_table_from_string(a.table), a.trials, a.seed);
  RunManifest manifest{"reproduce", {"table:" + a.table}, a.seed, a.trials};
  manifest.timestamp = a.timestamp;
  bool ok = std::all_of(rows.begin(), rows.end(), [](const ReproRow& r) { return r.pass; });
  if (a.json_output) {
    out << json{{"manifest", manifest.to_json()}, {"rows", rows_to_json(rows)}, {"pass", ok}}.dump(2) << '\n';
  } else {
    out << "# manifest " << manifest.to_json().dump() << '\n';
    out << std::left << std::setw(11) << "table" << std::setw(24) << "model" << std::right << std::setw(5) << "d'"
        << std::setw(5) << "d" << std::setw(10) << "expect d'" << std::setw(10) << "expect d" << "  result\n";
    for (const auto& r : rows) {
      out << std::left << std::setw(11) << r.table << std::setw(24) << r.model << std::right << std::setw(5) << r.d_prime
          << std::setw(5) << r.d << std::setw(10) << r.expected_d_prime << std::setw(10) << r.expected_d << "  "
          << (r.pass ? "pass" : "FAIL") << '\n';
    }
  }
  return ok ? kSuccess : kMismatch;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string model_file;
  std::string builtin;
  std::string params_file;
  std::uint64_t param_seed = 0;
  std::size_t cases = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string timestamp;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (a.model_file.empty() == a.builtin.empty()) throw InputError("give exactly one of a model file or --builtin");
  const auto model = load_model_arg(a.model_file, a.builtin);
  if (model.family() == Family::LinearGaussian) throw InputError("gen supports discrete and sigmoid networks");
  ParameterPoint<Rational> point;
  if (a.params_file.empty()) {
    point = sample_parameters(model, a.param_seed);
  } else {
    std::ifstream in(a.params_file);
    if (!in) throw InputError("cannot open parameter file " + a.params_file);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw InputError("parameter file is not valid JSON");
    point = point_from_json(model, doc);
    auto problems = check_point(model, point);
    if (!problems.empty()) throw InputError("parameter file: " + problems.front());
  }
  const auto data = sample_data(model, to_real(point), a.cases, a.seed);

  RunManifest manifest{"gen", {a.builtin.empty() ? a.model_file : "builtin:" + a.builtin}, a.seed, 0};
  if (!a.params_file.empty()) {
    manifest.inputs.push_back(a.params_file);
  } else {
    manifest.tolerances = {{"param_seed", a.param_seed}};
  }
  manifest.tolerances["N"] = a.cases;
  manifest.output = a.output;
  manifest.timestamp = a.timestamp;

  Sink sink{out, a.output, {}};
  write_csv(sink.stream(), data, model, "manifest " + manifest.to_json().dump());
  sink.flush();
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective dimension and asymptotic scores for Bayesian networks with hidden variables", "latentdim"};
  app.require_subcommand(1);
  std::string timestamp_flag;
  app.add_option("--timestamp", timestamp_flag, "Manifest timestamp (ISO-8601 or 'now'; default unset)");

  DimArgs dim;
  auto* dim_cmd = app.add_subcommand("dim", "Regular Jacobian rank (effective dimension) of a model");
  dim_cmd->add_option("model", dim.model_file, "Model spec (JSON)");
  dim_cmd->add_option("--builtin", dim.builtin, "Use a built-in model instead of a file");
  dim_cmd->add_option("--trials", dim.trials, "Random parameter points")->capture_default_str();
  dim_cmd->add_option("--seed", dim.seed, "Base seed")->capture_default_str();
  dim_cmd->add_option("--method", dim.method, "Force 'exact' or 'numeric' rank")->check(CLI::IsMember({"exact", "numeric"}));
  dim_cmd->add_option("--tolerance", dim.tolerance, "Relative singular value cut (numeric path)")->capture_default_str();
  dim_cmd->add_flag("--parallel", dim.parallel, "Run trials concurrently");
  dim_cmd->add_flag("--json", dim.json_output, "Machine-readable output");
  dim_cmd->add_option("-o,--output", dim.output, "Write the report to a file");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a model against data");
  score_cmd->add_option("inputs", score.inputs, "[model spec (JSON)] dataset (CSV)")->required()->expected(1, 2);
  score_cmd->add_option("--builtin", score.builtin, "Use a built-in model instead of a file");
  score_cmd->add_option("--score", score.score, "ch|bic|bic-latent|cs|cs-corrected|all")
      ->check(CLI::IsMember({"ch", "bic", "bic-latent", "cs", "cs-corrected", "all"}))
      ->capture_default_str();
  score_cmd->add_option("--alpha", score.alpha, "Equivalent sample size (default 1, or the prior file's)");
  score_cmd->add_option("--prior", score.prior_file, "Prior network file {alpha, network, parameters}");
  score_cmd->add_option("--seed", score.seed, "Seed for EM restarts and rank trials")->capture_default_str();
  score_cmd->add_option("--trials", score.trials, "Rank trials")->capture_default_str();
  score_cmd->add_option("--restarts", score.restarts, "EM restarts")->capture_default_str();
  score_cmd->add_option("--em-tol", score.em_tolerance, "EM loglik gain tolerance")->capture_default_str();
  score_cmd->add_option("--max-iter", score.max_iterations, "EM iteration cap")->capture_default_str();
  score_cmd->add_flag("--json", score.json_output, "Machine-readable output");
  score_cmd->add_option("-o,--output", score.output, "Write the report to a file");

  ReproduceArgs repro;
  auto* repro_cmd = app.add_subcommand("reproduce", "Recompute the reference dimension tables");
  repro_cmd->add_option("--table", repro.table, "dims|autoclass|gaussian|sigmoid|all")
      ->check(CLI::IsMember({"dims", "autoclass", "gaussian", "sigmoid", "all"}))
      ->capture_default_str();
  repro_cmd->add_option("--trials", repro.trials, "Random parameter points")->capture_default_str();
  repro_cmd->add_option("--seed", repro.seed, "Base seed")->capture_default_str();
  repro_cmd->add_flag("--json", repro.json_output, "Machine-readable output");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample a dataset from a model");
  gen_cmd->add_option("model", gen.model_file, "Model spec (JSON)");
  gen_cmd->add_option("--builtin", gen.builtin, "Use a built-in model instead of a file");
  auto* params_opt = gen_cmd->add_option("--params", gen.params_file, "Parameter file");
  gen_cmd->add_option("--seed-params", gen.param_seed, "Sample parameters with this seed")->excludes(params_opt);
  gen_cmd->add_option("-N", gen.cases, "Number of cases")->required();
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Output CSV (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e_stream;
    int code = app.exit(e, o, e_stream);
    out << o.str();
    err << e_stream.str();
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    const std::string timestamp = resolve_timestamp(timestamp_flag);
    if (*dim_cmd) {
      dim.timestamp = timestamp;
      return cmd_dim(dim, out);
    }
    if (*score_cmd) {
      score.timestamp = timestamp;
      return cmd_score(score, out, err);
    }
    if (*repro_cmd) {
      repro.timestamp = timestamp;
      return cmd_reproduce(repro, out);
    }
    gen.timestamp = timestamp;
    return cmd_gen(gen, out);
  } catch (const StateCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kResourceCap;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace latentdim::cli
