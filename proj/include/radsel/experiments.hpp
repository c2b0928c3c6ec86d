#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "radsel/markov_source.hpp"
#include "radsel/radix_select.hpp"
#include "radsel/rng.hpp"

namespace radsel {

// ---------------------------------------------------------------------------
// Sample statistics

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;    // sqrt(variance / count)
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

/// Unbiased moments and interpolated quartiles. Throws ArgumentError on empty input.
SampleSummary summarize(std::span<const double> values);

/// Quantile of sorted data by linear interpolation of order statistics.
double quantile_sorted(std::span<const double> sorted, double q);

/// Wasserstein-1 distance between the empirical distributions of a and b,
/// integrating the gap between their quantile functions.
double wasserstein1(std::span<const double> a, std::span<const double> b);

/// Kolmogorov-Smirnov distance between the sample and the standard normal.
double ks_normal(std::span<const double> values);

/// Standard normal distribution function.
double normal_cdf(double x);

struct MeanMoments {
  double mean = 0.0;      // approximates kappa_mu
  double variance = 0.0;  // approximates Var(m_mu(U))
};

/// Midpoint-rule moments of m_mu(U), U uniform, with breakpoint averaging.
MeanMoments mean_function_moments(const MarkovModel& model, std::size_t points,
                                  double tol = 1e-6);

// ---------------------------------------------------------------------------
// Runs and summaries

enum class Budget { fast, full };

struct RunConfig {
  std::shared_ptr<const MarkovModel> model;
  std::size_t n = 1 << 12;
  std::size_t reps = 100;
  Seed seed = 0;
  std::vector<double> grid;  // empty: family default
  /// Absolute tolerance overrides by check id. Without an override a check
  /// uses 3 standard errors plus the check's finite-n bias allowance.
  std::map<std::string, double> tolerances;
  Budget budget = Budget::fast;
  unsigned threads = 0;  // 0: available parallelism
  int depth_cap = kDefaultDepthCap;
  double mean_tol = 1e-9;
  /// Covariance checks cover pairs whose common prefix (j or r) is at most this.
  int cov_max_prefix = 4;
  bool cov_include_diagonal = false;
  /// Limit-process draws for the worst-case comparison.
  std::size_t limit_draws = 10000;
  int limit_depth = 10;
};

/// One line of the CSV report.
struct CheckRow {
  std::string check_id;
  std::string point;  // "t" or "s;t" or "" for scalar statistics
  double empirical = 0.0;
  std::optional<double> theory;
  double std_error = 0.0;
  std::optional<double> tolerance;
  std::optional<bool> pass;
};

struct EstimatorSummary {
  std::string experiment;
  std::size_t count = 0;
  std::vector<double> grid;
  std::vector<double> mean;         // per grid point
  std::vector<double> variance;
  std::vector<double> std_error;
  std::vector<double> theory_mean;  // may be empty
  Eigen::MatrixXd covariance;       // pairwise estimates on the grid
  std::vector<CheckRow> rows;
  nlohmann::json metadata;

  /// True iff every row carrying a verdict passed.
  bool passed() const;
  const CheckRow* find(const std::string& check_id, const std::string& point = "") const;
};

/// Default evaluation grid: {k/8} for the uniform and asymmetric Bernoulli
/// families; for general Markov models {0.1, ..., 0.9} with points within
/// 0.01 of a breakpoint of depth <= 6 pushed off it.
std::vector<double> default_grid(const MarkovModel& model);

/// Normalized complexity process on the grid, aggregated over replicates,
/// with theory targets for the mean and (where known) the covariance.
EstimatorSummary quantile_experiment(const RunConfig& config);

/// Complexity W_n at a uniformly random rank (b = 2 only).
EstimatorSummary grand_average_experiment(const RunConfig& config);

/// Quartiles of the normalized worst case against grid suprema of the
/// matching limit process (uniform or asymmetric Bernoulli models).
EstimatorSummary worst_case_experiment(const RunConfig& config);

void write_csv(const EstimatorSummary& summary, std::ostream& out);
nlohmann::json to_json(const EstimatorSummary& summary);
nlohmann::json to_json(const CheckRow& row);

/// Metadata block shared by every report.
nlohmann::json run_metadata(const RunConfig& config);

}  // namespace radsel
