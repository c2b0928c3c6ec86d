#include "radsel/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "radsel/errors.hpp"
#include "radsel/limit_sim.hpp"
#include "radsel/parallel.hpp"
#include "radsel/theory.hpp"
#include "radsel/version.hpp"

namespace radsel {

namespace {

// Substream tags so data, ranks and limit draws never share randomness.
constexpr std::uint64_t kRankStream = 0x6A09E667F3BCC909ULL;
constexpr std::uint64_t kLimitStream = 0xBB67AE8584CAA73BULL;

// Finite-n bias allowances added to 3 standard errors when a check has no
// explicit tolerance.
constexpr double kBiasMeanX = 0.10;
constexpr double kBiasMeanYOverN = 0.01;
constexpr double kBiasCov = 0.15;
constexpr double kBiasWorstCase = 0.10;

std::string fmt_point(double t) {
  std::ostringstream os;
  os << std::setprecision(12) << t;
  return os.str();
}

std::string fmt_pair(double s, double t) { return fmt_point(s) + ";" + fmt_point(t); }

double tolerance_for(const RunConfig& cfg, const std::string& id, double std_error,
                     double bias) {
  if (auto it = cfg.tolerances.find(id); it != cfg.tolerances.end()) return it->second;
  return 3.0 * std_error + bias;
}

CheckRow make_check(std::string id, std::string point, double empirical, double theory,
                    double std_error, double tolerance) {
  CheckRow row;
  row.check_id = std::move(id);
  row.point = std::move(point);
  row.empirical = empirical;
  row.theory = theory;
  row.std_error = std_error;
  row.tolerance = tolerance;
  row.pass = std::abs(empirical - theory) <= tolerance;
  return row;
}

CheckRow make_report(std::string id, std::string point, double empirical, double std_error,
                     std::optional<double> theory = std::nullopt) {
  CheckRow row;
  row.check_id = std::move(id);
  row.point = std::move(point);
  row.empirical = empirical;
  row.theory = theory;
  row.std_error = std_error;
  return row;
}

void validate(const RunConfig& cfg) {
  if (!cfg.model) throw ArgumentError("run configuration has no model");
  if (cfg.reps < 1) throw ArgumentError("reps must be at least 1");
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    const double t = cfg.grid[i];
    if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("grid point outside [0, 1]");
    if (i > 0 && !(t > cfg.grid[i - 1])) throw ArgumentError("grid must be strictly increasing");
  }
}

// Standard error of an unbiased variance estimate from the fourth central moment.
double variance_std_error(std::span<const double> v, double mean, double var) {
  const double n = static_cast<double>(v.size());
  if (v.size() < 2) return 0.0;
  double m4 = 0.0;
  for (double x : v) m4 += std::pow(x - mean, 4);
  m4 /= n;
  return std::sqrt(std::max(m4 - var * var, 0.0) / n);
}

// Standard error of an empirical quantile via the order-statistic asymptotics,
// with the density estimated from neighbouring quantiles.
double quantile_std_error(std::span<const double> sorted, double q) {
  constexpr double h = 0.05;
  const double spread = quantile_sorted(sorted, std::min(q + h, 1.0)) -
                        quantile_sorted(sorted, std::max(q - h, 0.0));
  return std::sqrt(q * (1.0 - q) / static_cast<double>(sorted.size())) * spread / (2.0 * h);
}

}  // namespace

// ---------------------------------------------------------------------------

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SampleSummary summarize(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("cannot summarize an empty sample");
  SampleSummary s;
  s.count = values.size();
  const double n = static_cast<double>(s.count);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : values) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / (n - 1.0);
  }
  s.std_error = std::sqrt(s.variance / n);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.q25 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q75 = quantile_sorted(sorted, 0.75);
  return s;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("wasserstein1 needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  // Quantile functions are step functions with jumps at multiples of 1/|a|
  // and 1/|b|; walk the merged jump points in units of 1/(|a| |b|).
  const std::uint64_t na = x.size(), nb = y.size();
  std::uint64_t cur = 0;
  std::size_t i = 0, j = 0;
  long double total = 0.0L;
  while (i < na && j < nb) {
    const std::uint64_t ea = (i + 1) * nb, eb = (j + 1) * na;
    const std::uint64_t next = std::min(ea, eb);
    total += static_cast<long double>(next - cur) * std::abs(x[i] - y[j]);
    cur = next;
    if (ea == next) ++i;
    if (eb == next) ++j;
  }
  return static_cast<double>(total / (static_cast<long double>(na) * nb));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_normal(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("ks_normal needs a nonempty sample");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

MeanMoments mean_function_moments(const MarkovModel& model, std::size_t points, double tol) {
  if (points == 0) throw ArgumentError("quadrature needs at least one point");
  std::vector<double> m(points);
  const double h = 1.0 / static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) {
    m[k] = mean_markov((static_cast<double>(k) + 0.5) * h, model, tol);
  }
  MeanMoments out;
  out.mean = std::accumulate(m.begin(), m.end(), 0.0) * h;
  for (double v : m) out.variance += (v - out.mean) * (v - out.mean);
  out.variance *= h;
  return out;
}

// ---------------------------------------------------------------------------

bool EstimatorSummary::passed() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const CheckRow& r) { return !r.pass.has_value() || *r.pass; });
}

const CheckRow* EstimatorSummary::find(const std::string& check_id,
                                       const std::string& point) const {
  for (const auto& r : rows) {
    if (r.check_id == check_id && r.point == point) return &r;
  }
  return nullptr;
}

std::vector<double> default_grid(const MarkovModel& model) {
  const int b = model.alphabet_size();
  const ModelFamily family = classify(model);
  std::vector<double> grid;
  if (family != ModelFamily::markov) {
    const int cells = b * b * b;
    for (int k = 0; k <= cells; ++k) grid.push_back(static_cast<double>(k) / cells);
    return grid;
  }
  if (b != 2) {
    for (int k = 1; k <= 9; ++k) grid.push_back(k / 10.0);
    return grid;
  }
  // Keep 0.01 clear of the coarse breakpoints (depth <= 3) and 0.003 clear of
  // depth <= 6; nudge candidates outward in steps of 0.001 until they are.
  auto clear = [&model](double t) {
    return breakpoint_distance(t, model, 3) >= 0.01 && breakpoint_distance(t, model, 6) >= 0.003;
  };
  for (int k = 1; k <= 9; ++k) {
    const double base = k / 10.0;
    double chosen = base;
    for (int step = 0; step <= 45; ++step) {
      const double lo = base - 0.001 * step, hi = base + 0.001 * step;
      if (clear(lo)) {
        chosen = lo;
        break;
      }
      if (clear(hi)) {
        chosen = hi;
        break;
      }
    }
    grid.push_back(chosen);
  }
  return grid;
}

nlohmann::json run_metadata(const RunConfig& cfg) {
  nlohmann::json meta;
  meta["version"] = std::string(kVersion);
  meta["model"] = cfg.model ? cfg.model->to_json() : nlohmann::json();
  meta["family"] = cfg.model ? std::string(to_string(classify(*cfg.model))) : "";
  meta["n"] = cfg.n;
  meta["reps"] = cfg.reps;
  meta["seed"] = cfg.seed;
  meta["budget"] = cfg.budget == Budget::full ? "full" : "fast";
  meta["threads"] = resolve_threads(cfg.threads);
  meta["depth_cap"] = cfg.depth_cap;
  meta["mean_tol"] = cfg.mean_tol;
  meta["cov_max_prefix"] = cfg.cov_max_prefix;
  meta["cov_include_diagonal"] = cfg.cov_include_diagonal;
  meta["tolerances"] = cfg.tolerances;
  meta["bias_allowances"] = {{"mean_X", kBiasMeanX},
                             {"mean_Y_over_n", kBiasMeanYOverN},
                             {"cov", kBiasCov},
                             {"worst_case_quantile", kBiasWorstCase}};
  return meta;
}

EstimatorSummary quantile_experiment(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.n < 1) throw ArgumentError("n must be at least 1");
  const MarkovModel& model = *cfg.model;
  const ModelFamily family = classify(model);
  const Centering centering = Centering::for_model(cfg.model, cfg.mean_tol);
  const std::vector<double> grid = cfg.grid.empty() ? default_grid(model) : cfg.grid;
  const std::size_t G = grid.size(), R = cfg.reps;
  const double nd = static_cast<double>(cfg.n), root_n = std::sqrt(nd);

  std::vector<double> center(G);
  std::vector<std::size_t> ranks(G);
  for (std::size_t g = 0; g < G; ++g) {
    center[g] = centering(grid[g]);
    ranks[g] = std::min(static_cast<std::size_t>(std::floor(grid[g] * nd)) + 1, cfg.n);
  }

  // x: normalized process, y: Y_n / n; row-major R x G.
  std::vector<double> x(R * G), y(R * G);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    DataSet data(cfg.model, cfg.n, derive_key(cfg.seed, r), cfg.depth_cap);
    const ComplexityProfile prof = profile(data);
    for (std::size_t g = 0; g < G; ++g) {
      const double v = static_cast<double>(prof.at(ranks[g]));
      y[r * G + g] = v / nd;
      x[r * G + g] = (v - center[g] * nd) / root_n;
    }
  });

  EstimatorSummary out;
  out.experiment = "quantile";
  out.count = R;
  out.grid = grid;
  out.theory_mean = center;
  out.metadata = run_metadata(cfg);
  out.metadata["grid"] = grid;

  std::vector<double> column(R), ycol(R);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t r = 0; r < R; ++r) {
      column[r] = x[r * G + g];
      ycol[r] = y[r * G + g];
    }
    const SampleSummary sx = summarize(column), sy = summarize(ycol);
    out.mean.push_back(sx.mean);
    out.variance.push_back(sx.variance);
    out.std_error.push_back(sx.std_error);

    const std::string pt = fmt_point(grid[g]);
    if (family != ModelFamily::markov) {
      out.rows.push_back(make_check("mean_X", pt, sx.mean, 0.0, sx.std_error,
                                    tolerance_for(cfg, "mean_X", sx.std_error, kBiasMeanX)));
    } else if (evaluate_mean(grid[g], model, cfg.mean_tol).at_breakpoint) {
      // theory value below is the average of the one-sided limits
      out.rows.push_back(make_report("grid_breakpoint", pt, 1.0, 0.0));
    }
    out.rows.push_back(make_check(
        "mean_Y_over_n", pt, sy.mean, center[g], sy.std_error,
        tolerance_for(cfg, "mean_Y_over_n", sy.std_error, kBiasMeanYOverN)));
  }

  out.covariance.resize(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(G));
  std::vector<double> products(R);
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t j = i; j < G; ++j) {
      for (std::size_t r = 0; r < R; ++r) {
        products[r] = (x[r * G + i] - out.mean[i]) * (x[r * G + j] - out.mean[j]);
      }
      const SampleSummary sp = summarize(products);
      const double cov = R > 1 ? sp.mean * static_cast<double>(R) / (R - 1.0) : 0.0;
      out.covariance(i, j) = out.covariance(j, i) = cov;

      const std::string pt = fmt_pair(grid[i], grid[j]);
      std::optional<double> theory;
      int prefix = 0;
      if (family == ModelFamily::uniform) {
        theory = cov_uniform(grid[i], grid[j], model.alphabet_size());
        prefix = lcp(grid[i], grid[j], model.alphabet_size());
      } else if (family == ModelFamily::asymmetric_bernoulli) {
        const double p = model.initial()[1];
        theory = cov_asyb(grid[i], grid[j], p);
        prefix = r_index(grid[i], grid[j], p);
      }
      const bool gated = theory && (i == j ? cfg.cov_include_diagonal : prefix <= cfg.cov_max_prefix);
      if (gated) {
        out.rows.push_back(make_check("cov", pt, cov, *theory, sp.std_error,
                                      tolerance_for(cfg, "cov", sp.std_error, kBiasCov)));
      } else {
        out.rows.push_back(make_report("cov", pt, cov, sp.std_error, theory));
      }
    }
  }
  return out;
}

EstimatorSummary grand_average_experiment(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.n < 1) throw ArgumentError("n must be at least 1");
  const MarkovModel& model = *cfg.model;
  if (model.alphabet_size() != 2) throw ArgumentError("grand averages are defined for b = 2");
  const std::size_t R = cfg.reps;
  const double nd = static_cast<double>(cfg.n);

  std::vector<double> w(R);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    DataSet data(cfg.model, cfg.n, derive_key(cfg.seed, r), cfg.depth_cap);
    Rng rank_rng(derive_key(cfg.seed ^ kRankStream, r));
    const auto rank =
        std::min(static_cast<std::size_t>(rank_rng.uniform() * nd) + 1, cfg.n);
    w[r] = static_cast<double>(select(data, rank).ops);
  });

  EstimatorSummary out;
  out.experiment = "grand_average";
  out.count = R;
  out.metadata = run_metadata(cfg);

  std::vector<double> ratio(R);
  for (std::size_t r = 0; r < R; ++r) ratio[r] = w[r] / nd;
  const SampleSummary s = summarize(ratio);
  const KappaConstants k = kappa_mu(model);
  out.metadata["kappa"] = {{"kappa0", k.kappa0}, {"kappa1", k.kappa1}, {"kappa_mu", k.kappa_mu}};
  out.rows.push_back(make_check("mean_W_over_n", "", s.mean, k.kappa_mu, s.std_error,
                                tolerance_for(cfg, "mean_W_over_n", s.std_error, 0.02)));

  const double var_se = variance_std_error(ratio, s.mean, s.variance);
  if (classify(model) == ModelFamily::uniform) {
    out.rows.push_back(make_report("var_W_over_n2", "", s.variance, var_se, 0.0));
    std::vector<double> z(R);
    const double scale = std::sqrt(2.0 * nd);
    for (std::size_t r = 0; r < R; ++r) z[r] = (w[r] - 2.0 * nd) / scale;
    const SampleSummary sz = summarize(z);
    const double z_var_se = variance_std_error(z, sz.mean, sz.variance);
    out.rows.push_back(make_check("mean_normalized", "", sz.mean, 0.0, sz.std_error,
                                  tolerance_for(cfg, "mean_normalized", sz.std_error, 0.05)));
    out.rows.push_back(make_check("var_normalized", "", sz.variance, 1.0, z_var_se,
                                  tolerance_for(cfg, "var_normalized", z_var_se, 0.10)));
    const double ks_noise = 1.36 / std::sqrt(static_cast<double>(R));
    out.rows.push_back(make_check("ks_normal", "", ks_normal(z), 0.0, ks_noise / 3.0,
                                  tolerance_for(cfg, "ks_normal", ks_noise / 3.0, 0.02)));
  } else {
    const MeanMoments mm = mean_function_moments(model, 10000, 1e-6);
    out.metadata["quadrature_points"] = 10000;
    double tol;
    if (auto it = cfg.tolerances.find("var_W_over_n2_rel"); it != cfg.tolerances.end()) {
      tol = it->second * mm.variance;
    } else {
      tol = tolerance_for(cfg, "var_W_over_n2", var_se, 0.1 * mm.variance);
    }
    out.rows.push_back(make_check("var_W_over_n2", "", s.variance, mm.variance, var_se, tol));
  }
  out.mean = {s.mean};
  out.variance = {s.variance};
  out.std_error = {s.std_error};
  return out;
}

EstimatorSummary worst_case_experiment(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.n < 1) throw ArgumentError("n must be at least 1");
  const MarkovModel& model = *cfg.model;
  const ModelFamily family = classify(model);
  if (family == ModelFamily::markov) {
    throw ArgumentError("worst-case comparison needs the uniform or asymmetric Bernoulli model");
  }
  const Centering centering = Centering::for_model(cfg.model, cfg.mean_tol);
  const std::size_t R = cfg.reps;

  std::vector<double> worst(R);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    DataSet data(cfg.model, cfg.n, derive_key(cfg.seed, r), cfg.depth_cap);
    worst[r] = worst_case(profile(data), centering);
  });

  std::vector<double> sup(cfg.limit_draws);
  nlohmann::json limit_meta;
  if (family == ModelFamily::uniform) {
    const UniformLimitSampler sampler(model.alphabet_size(), cfg.limit_depth);
    limit_meta = {{"sampler", "tree_series"},
                  {"depth", cfg.limit_depth},
                  {"grid_points", sampler.grid().size()},
                  {"truncation_bound", sampler.truncation_bound()}};
    parallel_for(sup.size(), cfg.threads, [&](std::size_t i) {
      Rng rng(derive_key(cfg.seed ^ kLimitStream, i));
      std::vector<double> path(sampler.grid().size());
      sup[i] = sampler.sample_into(rng, path);
    });
  } else {
    const int depth = std::min(cfg.limit_depth, 8);
    std::vector<double> grid;
    for (int k = 0; k <= (1 << depth); ++k) grid.push_back(std::ldexp(k, -depth));
    const AsybLimitSampler sampler(model.initial()[1], grid);
    limit_meta = {{"sampler", "grid_cholesky"},
                  {"depth", depth},
                  {"grid_points", grid.size()},
                  {"jitter", sampler.jitter_used()}};
    parallel_for(sup.size(), cfg.threads, [&](std::size_t i) {
      Rng rng(derive_key(cfg.seed ^ kLimitStream, i));
      std::vector<double> path(grid.size());
      sup[i] = sampler.sample_into(rng, path);
    });
  }

  EstimatorSummary out;
  out.experiment = "worst_case";
  out.count = R;
  out.metadata = run_metadata(cfg);
  out.metadata["limit"] = limit_meta;
  out.metadata["limit_draws"] = cfg.limit_draws;

  std::vector<double> ws = worst, ss = sup;
  std::sort(ws.begin(), ws.end());
  std::sort(ss.begin(), ss.end());
  const SampleSummary sw = summarize(worst), sl = summarize(sup);
  out.rows.push_back(make_report("worst_case_mean", "", sw.mean, sw.std_error, sl.mean));
  for (double q : {0.25, 0.5, 0.75}) {
    const double se = std::hypot(quantile_std_error(ws, q), quantile_std_error(ss, q));
    out.rows.push_back(make_check(
        "worst_case_quantile", fmt_point(q), quantile_sorted(ws, q), quantile_sorted(ss, q), se,
        tolerance_for(cfg, "worst_case_quantile", se, kBiasWorstCase)));
  }
  out.mean = {sw.mean};
  out.variance = {sw.variance};
  out.std_error = {sw.std_error};
  return out;
}

// ---------------------------------------------------------------------------

void write_csv(const EstimatorSummary& summary, std::ostream& out) {
  out << "check_id,point,empirical,theory,stderr,tolerance,pass\n";
  const auto old_precision = out.precision(12);
  for (const auto& r : summary.rows) {
    out << r.check_id << ',' << r.point << ',' << r.empirical << ',';
    if (r.theory) out << *r.theory;
    out << ',' << r.std_error << ',';
    if (r.tolerance) out << *r.tolerance;
    out << ',';
    if (r.pass) out << (*r.pass ? "true" : "false");
    out << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json to_json(const CheckRow& r) {
  nlohmann::json j;
  j["check_id"] = r.check_id;
  j["point"] = r.point;
  j["empirical"] = r.empirical;
  j["theory"] = r.theory ? nlohmann::json(*r.theory) : nlohmann::json();
  j["stderr"] = r.std_error;
  j["tolerance"] = r.tolerance ? nlohmann::json(*r.tolerance) : nlohmann::json();
  j["pass"] = r.pass ? nlohmann::json(*r.pass) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const EstimatorSummary& s) {
  nlohmann::json j;
  j["experiment"] = s.experiment;
  j["metadata"] = s.metadata;
  j["count"] = s.count;
  j["grid"] = s.grid;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["stderr"] = s.std_error;
  j["theory_mean"] = s.theory_mean;
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.covariance.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < s.covariance.cols(); ++k) row.push_back(s.covariance(i, k));
    cov.push_back(std::move(row));
  }
  j["covariance"] = std::move(cov);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) rows.push_back(to_json(r));
  j["rows"] = std::move(rows);
  j["passed"] = s.passed();
  return j;
}

}  // namespace radsel
