#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "radsel/acceptance.hpp"
#include "radsel/errors.hpp"
#include "radsel/experiments.hpp"
#include "radsel/limit_sim.hpp"
#include "radsel/markov_source.hpp"
#include "radsel/radix_select.hpp"
#include "radsel/theory.hpp"
#include "radsel/version.hpp"

namespace py = pybind11;
using namespace radsel;

namespace {

// pybind11 holders cannot be pointers to const; the library takes them as such.
using ModelPtr = std::shared_ptr<MarkovModel>;

ModelPtr share(MarkovModel m) { return std::make_shared<MarkovModel>(std::move(m)); }

RunConfig make_config(ModelPtr model, std::size_t n, std::size_t reps, Seed seed,
                      std::vector<double> grid, std::map<std::string, double> tolerances,
                      unsigned threads) {
  RunConfig cfg;
  cfg.model = std::move(model);
  cfg.n = n;
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.grid = std::move(grid);
  cfg.tolerances = std::move(tolerances);
  cfg.threads = threads;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radix Selection on Markov sources";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<DepthCapError>(m, "DepthCapError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());
  py::register_exception<NotPsdError>(m, "NotPsdError", base.ptr());

  py::class_<MarkovModel, ModelPtr>(m, "MarkovModel")
      .def(py::init([](int b, std::vector<double> mu, std::vector<std::vector<double>> P) {
             return share(MarkovModel::create(b, std::move(mu), std::move(P)));
           }),
           py::arg("b"), py::arg("mu"), py::arg("P"))
      .def_static("uniform", [](int b) { return share(MarkovModel::uniform(b)); }, py::arg("b") = 2)
      .def_static("bernoulli", [](double p) { return share(MarkovModel::bernoulli(p)); })
      .def_static("from_json",
                  [](const std::string& text) {
                    return share(MarkovModel::from_json(nlohmann::json::parse(text)));
                  })
      .def("to_json", [](const MarkovModel& self) { return self.to_json().dump(); })
      .def_property_readonly("b", &MarkovModel::alphabet_size)
      .def("p", &MarkovModel::p)
      .def_property_readonly("family",
                             [](const MarkovModel& self) { return std::string(to_string(classify(self))); });

  m.def("profile",
        [](ModelPtr model, std::size_t n, Seed seed) {
          DataSet d(std::move(model), n, seed);
          const auto y = profile(d);
          return std::vector<std::uint64_t>(y.values().begin(), y.values().end());
        },
        py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def("select_ops",
        [](ModelPtr model, std::size_t n, Seed seed, std::size_t rank) {
          DataSet d(std::move(model), n, seed);
          return select(d, rank).ops;
        },
        py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("rank"));

  m.def("lcp", [](double s, double t, int b) {
    const int j = lcp(s, t, b);
    return j == kInfiniteDepth ? py::object(py::float_(INFINITY)) : py::object(py::int_(j));
  }, py::arg("s"), py::arg("t"), py::arg("b") = 2);
  m.def("cov_uniform", &cov_uniform, py::arg("s"), py::arg("t"), py::arg("b") = 2);
  m.def("cov_asyb", &cov_asyb, py::arg("s"), py::arg("t"), py::arg("p"), py::arg("tol") = 1e-12);
  m.def("mean_asyb", &mean_asyb, py::arg("t"), py::arg("p"));
  m.def("mean_markov",
        [](double t, const ModelPtr& model, double tol) { return mean_markov(t, *model, tol); },
        py::arg("t"), py::arg("model"), py::arg("tol") = 1e-9);
  m.def("kappa", [](const ModelPtr& model) {
    const auto k = kappa_mu(*model);
    return py::make_tuple(k.kappa0, k.kappa1, k.kappa_mu);
  });
  m.def("skew_digits", [](double t, double p, std::size_t depth) { return skew_path(t, p, depth).digits; });

  m.def("sample_G_uniform",
        [](int b, int depth, Seed seed) {
          Rng rng(seed);
          auto g = sample_G_uniform(b, depth, rng);
          return py::make_tuple(g.grid, g.values);
        },
        py::arg("b"), py::arg("depth"), py::arg("seed"));
  m.def("sample_G_asyb",
        [](double p, std::vector<double> grid, Seed seed) {
          Rng rng(seed);
          return sample_G_asyb(p, grid, rng).values;
        },
        py::arg("p"), py::arg("grid"), py::arg("seed"));
  m.def("sample_Z_mu",
        [](const ModelPtr& model, std::size_t count, Seed seed) {
          std::vector<double> out(count);
          for (std::size_t i = 0; i < count; ++i) {
            Rng rng(seed, i);
            out[i] = *sample_Z_mu(*model, kDefaultZIterations, rng).z_mu;
          }
          return out;
        },
        py::arg("model"), py::arg("count"), py::arg("seed"));

  m.def("wasserstein1", [](std::vector<double> a, std::vector<double> b) { return wasserstein1(a, b); });

  auto experiment = [](EstimatorSummary (*fn)(const RunConfig&)) {
    return [fn](ModelPtr model, std::size_t n, std::size_t reps, Seed seed,
                std::vector<double> grid, std::map<std::string, double> tolerances,
                unsigned threads) {
      const RunConfig cfg = make_config(std::move(model), n, reps, seed, std::move(grid),
                                        std::move(tolerances), threads);
      EstimatorSummary s;
      {
        py::gil_scoped_release release;
        s = fn(cfg);
      }
      return to_json(s).dump();
    };
  };
  for (const auto& [name, fn] :
       {std::pair{"_quantile_experiment", &quantile_experiment},
        std::pair{"_grand_average_experiment", &grand_average_experiment},
        std::pair{"_worst_case_experiment", &worst_case_experiment}}) {
    m.def(name, experiment(fn), py::arg("model"), py::arg("n"), py::arg("reps"), py::arg("seed"),
          py::arg("grid") = std::vector<double>{},
          py::arg("tolerances") = std::map<std::string, double>{}, py::arg("threads") = 0u);
  }

  m.def("_run_acceptance",
        [](const std::string& budget, Seed seed, std::vector<int> only, unsigned threads) {
          AcceptanceOptions opt;
          opt.budget = budget == "full" ? Budget::full : Budget::fast;
          opt.seed = seed;
          opt.threads = threads;
          opt.only.insert(only.begin(), only.end());
          std::vector<CriterionResult> results;
          {
            py::gil_scoped_release release;
            results = run_acceptance(opt);
          }
          nlohmann::json out = nlohmann::json::array();
          for (const auto& r : results) out.push_back(to_json(r));
          return out.dump();
        },
        py::arg("budget") = "fast", py::arg("seed") = 42, py::arg("only") = std::vector<int>{},
        py::arg("threads") = 0u);
}
