#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latentdim/error.hpp"
#include "latentdim/inference.hpp"
#include "latentdim/models.hpp"
#include "latentdim/rank.hpp"
#include "latentdim/reproduce.hpp"
#include "latentdim/scoring.hpp"

namespace py = pybind11;
using namespace latentdim;

namespace {

Dataset to_dataset(const NetworkModel& model, const std::vector<std::vector<int>>& cases) {
  return Dataset(model, cases);
}

std::string report_json(const RegularRankReport& r) { return report_to_json(r).dump(); }

RankOptions rank_options(int trials, std::uint64_t seed, const std::string& method, bool parallel) {
  RankOptions o;
  o.trials = trials;
  o.seed = seed;
  o.parallel = parallel;
  if (method == "exact") {
    o.method = RankMethod::ExactRational;
  } else if (method == "numeric") {
    o.method = RankMethod::NumericTolerance;
  } else if (!method.empty()) {
    throw InputError("method must be 'exact' or 'numeric'");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Effective dimension and asymptotic scores for Bayesian networks with hidden variables";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<InvalidModel>(m, "InvalidModel", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StateCapExceeded>(m, "StateCapExceeded", PyExc_MemoryError);

  py::class_<NetworkModel>(m, "Model")
      .def_static("from_json", [](const std::string& text) {
        auto model = load_model(text);
        require_valid(model);
        return model;
      })
      .def_static("builtin", [](const std::string& name) { return models::builtin(name); })
      .def("to_json", [](const NetworkModel& self) { return save_model(self); })
      .def_property_readonly("family", [](const NetworkModel& self) { return std::string(to_string(self.family())); })
      .def_property_readonly("fingerprint", &NetworkModel::fingerprint)
      .def_property_readonly("names", [](const NetworkModel& self) {
        std::vector<std::string> out;
        for (const auto& v : self.variables()) out.push_back(v.name);
        return out;
      })
      .def_property_readonly("hidden", [](const NetworkModel& self) {
        std::vector<std::string> out;
        for (auto i : self.hidden()) out.push_back(self.variable(i).name);
        return out;
      })
      .def("parameter_count", [](const NetworkModel& self) { return parameter_count(self); })
      .def("observable_parameter_count", [](const NetworkModel& self) { return observable_parameter_count(self); })
      .def("__len__", &NetworkModel::size)
      .def("__eq__", [](const NetworkModel& a, const NetworkModel& b) { return a == b; })
      .def("__repr__", [](const NetworkModel& self) {
        return "<Model " + std::string(to_string(self.family())) + " " + std::to_string(self.size()) + " variables>";
      });

  m.def("builtin_names", &models::builtin_names);

  m.def("_regular_rank",
        [](const NetworkModel& model, int trials, std::uint64_t seed, const std::string& method, bool parallel) {
          py::gil_scoped_release release;
          return report_json(regular_rank(model, rank_options(trials, seed, method, parallel)));
        },
        py::arg("model"), py::arg("trials") = 10, py::arg("seed") = 0, py::arg("method") = "",
        py::arg("parallel") = false);

  m.def("sample_parameters",
        [](const NetworkModel& model, std::uint64_t seed) {
          const auto point = sample_parameters(model, seed);
          std::vector<std::string> out;
          for (const auto& v : point.values()) out.push_back(to_string(v));
          return out;
        },
        py::arg("model"), py::arg("seed"), "Exact parameter values as 'p/q' strings.");

  m.def("jacobian",
        [](const NetworkModel& model, std::uint64_t seed) {
          auto point = sample_parameters(model, seed);
          Matrix<double> j = model.family() == Family::Sigmoid ? jacobian(model, to_real(point))
                                                               : to_real(jacobian(model, point));
          std::vector<std::vector<double>> out(j.rows());
          for (std::size_t r = 0; r < j.rows(); ++r) out[r].assign(j.row(r).begin(), j.row(r).end());
          return out;
        },
        py::arg("model"), py::arg("seed"), "dW/dtheta at the parameter point sampled with `seed`.");

  m.def("rank_exact",
        [](const std::vector<std::vector<std::string>>& rows) {
          const std::size_t cols = rows.empty() ? 0 : rows.front().size();
          Matrix<Rational> mat(rows.size(), cols);
          for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw InputError("ragged matrix");
            for (std::size_t c = 0; c < cols; ++c) mat(r, c) = parse_rational(rows[r][c]);
          }
          return rank_exact(mat);
        },
        py::arg("rows"));

  m.def("sample_data",
        [](const NetworkModel& model, std::uint64_t param_seed, std::size_t n, std::uint64_t seed) {
          return sample_data(model, to_real(sample_parameters(model, param_seed)), n, seed).cases();
        },
        py::arg("model"), py::arg("param_seed"), py::arg("n"), py::arg("seed"),
        "Cases in declaration order; hidden and missing entries are -1.");

  m.def("loglik",
        [](const NetworkModel& model, const std::vector<std::vector<int>>& cases, const std::vector<double>& values) {
          return loglik(to_dataset(model, cases), model, ParameterPoint<double>(model, values));
        },
        py::arg("model"), py::arg("cases"), py::arg("values"));

  m.def("_em_fit",
        [](const NetworkModel& model, const std::vector<std::vector<int>>& cases, int restarts, double tolerance,
           int max_iterations, std::uint64_t seed) {
          EmOptions o;
          o.restarts = restarts;
          o.tolerance = tolerance;
          o.max_iterations = max_iterations;
          o.seed = seed;
          auto fit = em_fit(to_dataset(model, cases), model, o);
          nlohmann::json doc = {{"loglik", fit.loglik},
                                {"iterations", fit.iterations},
                                {"converged", fit.converged},
                                {"zero_row", fit.zero_row},
                                {"trace", fit.trace},
                                {"values", fit.point.values()}};
          return doc.dump();
        },
        py::arg("model"), py::arg("cases"), py::arg("restarts") = 5, py::arg("tolerance") = 1e-8,
        py::arg("max_iterations") = 500, py::arg("seed") = 0);

  m.def("_score",
        [](const NetworkModel& model, const std::vector<std::vector<int>>& cases, const std::string& name, double alpha,
           std::uint64_t seed, int trials) {
          const auto data = to_dataset(model, cases);
          const auto prior = PriorSpec::uniform(model, alpha);
          if (name == "ch") return score_to_json(ch_score(data, model, prior)).dump();
          if (name == "bic") return score_to_json(bic_complete(data, model)).dump();
          EmOptions o;
          o.seed = seed;
          const auto fit = em_fit(data, model, o);
          if (name == "cs") return score_to_json(cs_score(data, model, fit.point, prior)).dump();
          RankOptions r;
          r.seed = seed;
          r.trials = trials;
          const auto rank = regular_rank(model, r);
          if (name == "bic-latent") return score_to_json(bic_latent(data, model, fit.point, rank)).dump();
          if (name == "cs-corrected") return score_to_json(cs_corrected(data, model, fit.point, prior, rank)).dump();
          throw InputError("unknown score '" + name + "'");
        },
        py::arg("model"), py::arg("cases"), py::arg("score"), py::arg("alpha") = 1.0, py::arg("seed") = 0,
        py::arg("trials") = 10);

  m.def("multinomial_hessian",
        [](const std::vector<long long>& counts) {
          auto h = multinomial_hessian(counts);
          std::vector<std::vector<double>> out(h.rows());
          for (std::size_t r = 0; r < h.rows(); ++r) out[r].assign(h.row(r).begin(), h.row(r).end());
          return out;
        },
        py::arg("counts"));

  m.def("_reproduce",
        [](const std::string& table, int trials, std::uint64_t seed) {
          return rows_to_json(reproduce(repro_table_from_string(table), trials, seed)).dump();
        },
        py::arg("table") = "all", py::arg("trials") = 10, py::arg("seed") = 0);

#ifdef LATENTDIM_VERSION
  m.attr("__version__") = LATENTDIM_VERSION;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
