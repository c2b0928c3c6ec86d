// radsel: theory evaluation, simulation and validation from the command line.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "radsel/acceptance.hpp"
#include "radsel/errors.hpp"
#include "radsel/experiments.hpp"
#include "radsel/limit_sim.hpp"
#include "radsel/markov_source.hpp"
#include "radsel/parallel.hpp"
#include "radsel/radix_select.hpp"
#include "radsel/theory.hpp"
#include "radsel/version.hpp"

namespace {

using namespace radsel;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string model = "uniform";
  std::size_t n = 1 << 12;
  std::size_t reps = 100;
  Seed seed = 0;
  int grid_depth = 3;
  int depth_cap = kDefaultDepthCap;
  double tol = 1e-9;
  unsigned threads = 0;
  std::string out;
  std::string format = "csv";

  int b = 2;
  double p = 0.7;
  double s = 0.0;
  double t = 0.0;
  int digits = 16;
  int tree_depth = 10;
  std::vector<int> only;
};

std::shared_ptr<const MarkovModel> load_model(const std::string& preset) {
  auto make = [](MarkovModel m) { return std::make_shared<const MarkovModel>(std::move(m)); };
  const auto colon = preset.find(':');
  const std::string head = preset.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : preset.substr(colon + 1);
  try {
    if (head == "uniform") return make(MarkovModel::uniform(arg.empty() ? 2 : std::stoi(arg)));
    if (head == "asyb" && !arg.empty()) return make(MarkovModel::bernoulli(std::stod(arg)));
    if (head == "markov" && arg.empty())
      return make(MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}}));
  } catch (const std::logic_error&) {
    throw ArgumentError("malformed model preset '" + preset + "'");
  }
  const std::string path = head == "markov" ? arg : preset;
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ModelError("invalid model JSON in '" + path + "': " + e.what());
  }
  return make(MarkovModel::from_json(doc));
}

std::vector<double> regular_grid(int b, int depth) {
  const auto cells = static_cast<std::size_t>(std::llround(std::pow(b, depth)));
  std::vector<double> grid(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) grid[k] = static_cast<double>(k) / cells;
  return grid;
}

// Every option given on the command line, with the text exactly as typed.
json echo_invocation(const CLI::App& leaf, const std::string& command) {
  json flags = json::object();
  for (const CLI::App* app = &leaf; app != nullptr; app = app->get_parent()) {
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      const auto& raw = opt->results();
      std::string key = opt->get_name();
      while (!key.empty() && key.front() == '-') key.erase(key.begin());
      flags[key] = raw.size() == 1 ? json(raw.front()) : json(raw);
    }
  }
  return {{"command", command}, {"flags", flags}, {"version", kVersion}};
}

void emit(const Options& o, const std::function<void(std::ostream&)>& write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw Error("cannot write '" + o.out + "'");
  write(file);
}

int report(const Options& o, EstimatorSummary summary, const json& invocation) {
  summary.metadata["invocation"] = invocation;
  emit(o, [&](std::ostream& os) {
    if (o.format == "json")
      os << to_json(summary).dump(2) << '\n';
    else
      write_csv(summary, os);
  });
  return summary.passed() ? kExitOk : kExitCheckFailed;
}

RunConfig run_config(const Options& o) {
  RunConfig cfg;
  cfg.model = load_model(o.model);
  cfg.n = o.n;
  cfg.reps = o.reps;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.depth_cap = o.depth_cap;
  cfg.mean_tol = o.tol;
  return cfg;
}

double cov_std_error(const Eigen::MatrixXd& draws, std::size_t i, std::size_t j) {
  const double R = static_cast<double>(draws.rows());
  const Eigen::VectorXd a = draws.col(i).array() - draws.col(i).mean();
  const Eigen::VectorXd b = draws.col(j).array() - draws.col(j).mean();
  const Eigen::VectorXd prod = a.cwiseProduct(b);
  const double m = prod.mean();
  return std::sqrt((prod.array() - m).square().sum() / (R - 1) / R);
}

// Covariance of limit-process draws at the points {k/8} of the sampler grid.
EstimatorSummary limit_summary(const std::string& name, const std::vector<double>& grid,
                               const Eigen::MatrixXd& draws,
                               const std::function<double(double, double)>& theory,
                               const std::vector<double>& suprema, TailModel tail,
                               double tail_param) {
  EstimatorSummary s;
  s.experiment = name;
  s.count = static_cast<std::size_t>(draws.rows());
  s.grid = grid;
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const Eigen::MatrixXd centered = draws.rowwise() - mean;
  s.covariance = centered.transpose() * centered / static_cast<double>(draws.rows() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.mean.push_back(mean(i));
    s.variance.push_back(s.covariance(i, i));
    s.std_error.push_back(std::sqrt(s.covariance(i, i) / s.count));
  }
  auto fmt = [](double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      CheckRow row{"cov", fmt(grid[i]) + ";" + fmt(grid[j]), s.covariance(i, j),
                   theory(grid[i], grid[j]), cov_std_error(draws, i, j), {}, {}};
      row.tolerance = 4.0 * row.std_error + 1e-3;
      row.pass = std::abs(row.empirical - *row.theory) <= *row.tolerance;
      s.rows.push_back(std::move(row));
    }
  }
  if (suprema.size() >= 1000) {
    const double center = summarize(suprema).mean;
    std::vector<double> thresholds;
    for (int k = 1; k <= 24; ++k) thresholds.push_back(0.25 * k);
    for (const TailRow& r : sup_tail_check(suprema, center, thresholds, tail, tail_param)) {
      CheckRow row{"sup_tail", fmt(r.threshold), r.frequency, r.bound, r.std_error, {}, {}};
      if (r.bound < 1.0) {
        row.tolerance = 3.0 * r.std_error;
        row.pass = r.pass;
      }
      s.rows.push_back(std::move(row));
    }
  }
  return s;
}

int simulate_limit_g(const Options& o, const json& inv) {
  const UniformLimitSampler sampler(o.b, o.tree_depth);
  const std::size_t R = o.reps, stride = (sampler.grid().size() - 1) / 8;
  const bool coarse = sampler.grid().size() > 9 && (sampler.grid().size() - 1) % 8 == 0;
  std::vector<double> grid;
  for (std::size_t k = 0; k < sampler.grid().size(); k += coarse ? stride : 1)
    grid.push_back(sampler.grid()[k]);
  Eigen::MatrixXd draws(R, grid.size());
  std::vector<double> sup(R);
  parallel_for(R, o.threads, [&](std::size_t r) {
    Rng rng(derive_key(o.seed, r));
    std::vector<double> path(sampler.grid().size());
    sup[r] = sampler.sample_into(rng, path);
    for (std::size_t g = 0; g < grid.size(); ++g) draws(r, g) = path[g * (coarse ? stride : 1)];
  });
  const int b = o.b;
  return report(o,
                limit_summary("limit_g", grid, draws,
                              [b](double s, double t) { return cov_uniform(s, t, b); }, sup,
                              TailModel::uniform, b),
                inv);
}

int simulate_limit_g_asyb(const Options& o, const json& inv) {
  const auto model = load_model(o.model);
  double p = o.p;
  if (classify(*model) == ModelFamily::asymmetric_bernoulli) p = model->p(0, 0);
  const std::vector<double> grid = regular_grid(2, o.grid_depth);
  const AsybLimitSampler sampler(p, grid);
  const std::size_t R = o.reps;
  Eigen::MatrixXd draws(R, grid.size());
  std::vector<double> sup(R);
  parallel_for(R, o.threads, [&](std::size_t r) {
    Rng rng(derive_key(o.seed, r));
    std::vector<double> path(grid.size());
    sup[r] = sampler.sample_into(rng, path);
    for (std::size_t g = 0; g < grid.size(); ++g) draws(r, g) = path[g];
  });
  return report(o,
                limit_summary("limit_g_asyb", grid, draws,
                              [p](double s, double t) { return cov_asyb(s, t, p); }, sup,
                              TailModel::asymmetric_bernoulli, p),
                inv);
}

int simulate_limit_z(const Options& o, const json& inv) {
  const auto model = load_model(o.model);
  const std::size_t R = o.reps;
  std::vector<double> z0(R), z1(R), zmu(R), zq(R);
  parallel_for(R, o.threads, [&](std::size_t r) {
    Rng rng(derive_key(o.seed, r));
    const ZSample z = sample_Z_mu(*model, kDefaultZIterations, rng);
    z0[r] = z.z0;
    z1[r] = z.z1;
    zmu[r] = *z.z_mu;
    Rng urng(derive_key(o.seed ^ 0x5A5A5A5A5A5A5A5AULL, r));
    zq[r] = sample_Z_mu_quantile(*model, urng, o.tol);
  });
  const KappaConstants k = kappa_mu(*model);
  EstimatorSummary s;
  s.experiment = "limit_z";
  s.count = R;
  auto mean_row = [](const std::string& id, const std::vector<double>& v, double target) {
    const SampleSummary ss = summarize(v);
    CheckRow row{id, "", ss.mean, target, ss.std_error, 4.0 * ss.std_error, {}};
    row.pass = std::abs(ss.mean - target) <= *row.tolerance;
    return row;
  };
  s.rows.push_back(mean_row("mean_Z0", z0, k.kappa0));
  s.rows.push_back(mean_row("mean_Z1", z1, k.kappa1));
  s.rows.push_back(mean_row("mean_Z_mu", zmu, k.kappa_mu));
  s.rows.push_back(mean_row("mean_Z_mu_quantile", zq, k.kappa_mu));
  s.rows.push_back(CheckRow{"wasserstein1_Z_mu", "", wasserstein1(zmu, zq), 0.0, 0.0, {}, {}});
  return report(o, std::move(s), inv);
}

int run_gen(const Options& o) {
  const auto model = load_model(o.model);
  DataSet data = gen_dataset(model, o.n, o.seed, o.depth_cap);
  std::ostringstream os;
  for (std::size_t i = 0; i < o.n; ++i) {
    std::vector<Symbol> digits;
    for (int pos = 1; pos <= o.digits; ++pos) digits.push_back(data.digit_at(i, pos));
    os << i;
    for (Symbol d : digits) os << ' ' << static_cast<int>(d);
    os << ' ' << std::setprecision(12) << value_of_prefix(digits, model->alphabet_size()) << '\n';
  }
  emit(o, [&](std::ostream& out) { out << os.str(); });
  return kExitOk;
}

int run_validate(const Options& o, Budget budget, const json& inv) {
  AcceptanceOptions opt;
  opt.budget = budget;
  opt.seed = o.seed;
  opt.threads = o.threads;
  opt.only.insert(o.only.begin(), o.only.end());
  const auto results = run_acceptance(opt, nullptr);
  bool ok = true;
  json doc = {{"invocation", inv}, {"criteria", json::array()}};
  for (const auto& r : results) {
    ok = ok && r.pass;
    std::cout << format_line(r, false) << '\n';
    json j = to_json(r);
    j.erase("seconds");
    doc["criteria"].push_back(std::move(j));
  }
  doc["pass"] = ok;
  if (!o.out.empty()) emit(o, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return ok ? kExitOk : kExitCheckFailed;
}

void print_value(double x) { std::cout << std::setprecision(12) << x << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radix Selection on Markov sources"};
  app.set_version_flag("--version", std::string(radsel::kVersion));
  app.require_subcommand(1);
  Options o;
  std::function<int()> action;

  auto on = [&](CLI::App* sub, std::function<int()> fn) {
    sub->callback([&action, fn = std::move(fn)] { action = fn; });
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model,
                    "uniform[:b] | asyb:p | markov | markov:file | path to a model JSON");
  };

  // theory ------------------------------------------------------------------
  auto* theory = app.add_subcommand("theory", "Evaluate closed-form quantities");
  theory->require_subcommand(1);
  {
    auto* s = theory->add_subcommand("cov-uniform", "Limit covariance, uniform model");
    s->add_option("--b", o.b)->check(CLI::Range(2, 256));
    s->add_option("--s", o.s)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--t", o.t)->required()->check(CLI::Range(0.0, 1.0));
    on(s, [&] {
      print_value(cov_uniform(o.s, o.t, o.b));
      return kExitOk;
    });
  }
  {
    auto* s = theory->add_subcommand("cov-asyb", "Limit covariance, asymmetric Bernoulli model");
    s->add_option("--p", o.p)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--s", o.s)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--t", o.t)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--tol", o.tol, "Series truncation tolerance");
    on(s, [&] {
      print_value(cov_asyb(o.s, o.t, o.p, o.tol));
      return kExitOk;
    });
  }
  {
    auto* s = theory->add_subcommand("mean", "Mean function of the normalized complexity");
    add_model(s);
    s->add_option("--t", o.t)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--tol", o.tol, "Tail tolerance for general Markov models");
    on(s, [&] {
      print_value(Centering::for_model(load_model(o.model), o.tol)(o.t));
      return kExitOk;
    });
  }
  {
    auto* s = theory->add_subcommand("kappa", "Grand-average constants (b = 2)");
    add_model(s);
    on(s, [&] {
      const KappaConstants k = kappa_mu(*load_model(o.model));
      std::cout << std::setprecision(12) << "kappa0 " << k.kappa0 << "\nkappa1 " << k.kappa1
                << "\nkappa_mu " << k.kappa_mu << '\n';
      return kExitOk;
    });
  }
  {
    auto* s = theory->add_subcommand("lcp", "Longest common b-ary prefix length");
    s->add_option("--b", o.b)->check(CLI::Range(2, 256));
    s->add_option("--s", o.s)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--t", o.t)->required()->check(CLI::Range(0.0, 1.0));
    s->add_option("--depth-cap", o.depth_cap)->check(CLI::PositiveNumber);
    on(s, [&] {
      const int j = lcp(o.s, o.t, o.b, o.depth_cap);
      if (j == kInfiniteDepth)
        std::cout << "inf\n";
      else
        std::cout << j << '\n';
      return kExitOk;
    });
  }

  // simulate ----------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments");
  simulate->require_subcommand(1);
  auto add_sim = [&](CLI::App* s) {
    add_model(s);
    s->add_option("--seed", o.seed, "Master seed")->required();
    s->add_option("--reps", o.reps, "Replicates or draws")->check(CLI::Range(2, 100000000));
    s->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    add_out(s);
  };
  {
    auto* s = simulate->add_subcommand("process", "Normalized quantile complexity process");
    add_sim(s);
    s->add_option("--n", o.n)->check(CLI::PositiveNumber);
    s->add_option("--grid-depth", o.grid_depth, "Use the grid {k/b^d} instead of the default")
        ->check(CLI::Range(0, 12));
    s->add_option("--depth-cap", o.depth_cap)->check(CLI::Range(1, 65535));
    s->add_option("--tol", o.tol, "Mean-function tolerance");
    on(s, [&, s] {
      RunConfig cfg = run_config(o);
      if (s->count("--grid-depth") > 0) cfg.grid = regular_grid(cfg.model->alphabet_size(), o.grid_depth);
      return report(o, quantile_experiment(cfg), echo_invocation(*s, "simulate process"));
    });
  }
  {
    auto* s = simulate->add_subcommand("grand-average", "Complexity at a uniform random rank");
    add_sim(s);
    s->add_option("--n", o.n)->check(CLI::PositiveNumber);
    s->add_option("--depth-cap", o.depth_cap)->check(CLI::Range(1, 65535));
    s->add_option("--tol", o.tol, "Mean-function tolerance");
    on(s, [&, s] {
      return report(o, grand_average_experiment(run_config(o)),
                    echo_invocation(*s, "simulate grand-average"));
    });
  }
  {
    auto* s = simulate->add_subcommand("worst-case", "Normalized worst case vs limit suprema");
    add_sim(s);
    s->add_option("--n", o.n)->check(CLI::PositiveNumber);
    s->add_option("--grid-depth", o.grid_depth, "Limit-process tree depth")
        ->check(CLI::Range(1, 22));
    s->add_option("--depth-cap", o.depth_cap)->check(CLI::Range(1, 65535));
    on(s, [&, s] {
      RunConfig cfg = run_config(o);
      if (s->count("--grid-depth") > 0) cfg.limit_depth = o.grid_depth;
      cfg.limit_draws = o.reps;
      return report(o, worst_case_experiment(cfg), echo_invocation(*s, "simulate worst-case"));
    });
  }
  {
    auto* s = simulate->add_subcommand("limit-g", "Uniform-model limit process");
    add_sim(s);
    s->add_option("--b", o.b)->check(CLI::Range(2, 256));
    s->add_option("--grid-depth", o.tree_depth, "Tree depth K (grid k/b^K)")
        ->check(CLI::Range(1, 22));
    on(s, [&, s] {
      return simulate_limit_g(o, echo_invocation(*s, "simulate limit-g"));
    });
  }
  {
    auto* s = simulate->add_subcommand("limit-g-asyb", "Asymmetric Bernoulli limit process");
    add_sim(s);
    s->add_option("--p", o.p, "Used when --model is not asyb:p")->check(CLI::Range(0.0, 1.0));
    s->add_option("--grid-depth", o.grid_depth, "Grid {k/2^d}")->check(CLI::Range(1, 10));
    on(s, [&, s] {
      return simulate_limit_g_asyb(o, echo_invocation(*s, "simulate limit-g-asyb"));
    });
  }
  {
    auto* s = simulate->add_subcommand("limit-z", "Grand-average limit variables (b = 2)");
    add_sim(s);
    s->add_option("--tol", o.tol, "Mean-function tolerance for the quantile sampler");
    on(s, [&, s] {
      return simulate_limit_z(o, echo_invocation(*s, "simulate limit-z"));
    });
  }

  // validate ----------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
  validate->require_subcommand(1);
  for (const auto& [name, budget] :
       {std::pair{"fast", Budget::fast}, std::pair{"full", Budget::full}}) {
    auto* s = validate->add_subcommand(name, std::string("Acceptance suite, ") + name + " budget");
    s->add_option("--seed", o.seed, "Master seed")->required();
    s->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    s->add_option("--only", o.only, "Criterion ids to run")->check(CLI::Range(1, 10));
    s->add_option("--out", o.out, "JSON report file");
    const std::string cmd = std::string("validate ") + name;
    const Budget bud = budget;
    on(s, [&, s, cmd, bud] { return run_validate(o, bud, echo_invocation(*s, cmd)); });
  }

  // gen ---------------------------------------------------------------------
  {
    auto* s = app.add_subcommand("gen", "Dump dataset digits: index, digits, prefix value");
    add_model(s);
    s->add_option("--n", o.n)->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed)->required();
    s->add_option("--digits", o.digits, "Digits per string")->check(CLI::Range(1, 65535));
    s->add_option("--depth-cap", o.depth_cap)->check(CLI::Range(1, 65535));
    s->add_option("--out", o.out, "Output file (default: stdout)");
    on(s, [&] { return run_gen(o); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "radsel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    std::cerr << "radsel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "radsel: " << e.what() << '\n';
    return kExitRuntime;
  }
}
