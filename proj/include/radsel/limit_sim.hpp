#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "radsel/markov_source.hpp"
#include "radsel/radix_select.hpp"
#include "radsel/rng.hpp"
#include "radsel/theory.hpp"

namespace radsel {

/// Centered Gaussian vector with covariance 1/(b-1) on the diagonal and
/// -1/(b-1)^2 off it.
using UpsilonVector = std::vector<double>;

UpsilonVector sample_upsilon(int b, Rng& rng);

/// The Upsilon covariance matrix itself.
Eigen::MatrixXd upsilon_covariance(int b);

// ---------------------------------------------------------------------------
// Uniform-model limit process

/// Draws of the uniform-model limit process on {k b^{-K} : k = 0..b^K}.
///
/// Each draw unfolds the fixed-point equation K times: every node of the
/// complete b-ary tree of depth K carries an independent UpsilonVector, and
/// G(t) = sum_{k<K} b^{-k/2} N^{(node at depth k on t's path)}_{(digit k+1 of t)}.
/// For points whose expansions differ within the first K digits the
/// covariance is exact; on the diagonal it falls short by b^{1-K}/(b-1)^2.
class UniformLimitSampler {
 public:
  static constexpr int kMaxLeaves = 1 << 22;

  /// Throws ResourceError if b^K exceeds kMaxLeaves.
  UniformLimitSampler(int b, int depth);

  int alphabet_size() const noexcept { return b_; }
  int depth() const noexcept { return depth_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  /// Covariance truncation bound (b/(b-1)^2) b^{-K} (b/(b-1)).
  double truncation_bound() const noexcept;

  GridProcess sample(Rng& rng) const;
  /// Writes one draw into `out` (size = grid().size()) without allocating a
  /// new process; returns the grid supremum.
  double sample_into(Rng& rng, std::span<double> out) const;

 private:
  int b_;
  int depth_;
  std::size_t leaves_;
  std::vector<double> grid_;
};

GridProcess sample_G_uniform(int b, int depth, Rng& rng);

// ---------------------------------------------------------------------------
// Asymmetric Bernoulli limit process

/// Gaussian draws on a fixed grid from the factorized cov_asyb matrix.
class AsybLimitSampler {
 public:
  /// Factorizes with diagonal jitter, escalating x10 up to three times.
  /// Throws NotPsdError naming the most negative pivot's grid pair.
  AsybLimitSampler(double p, std::vector<double> grid, double jitter = 1e-10,
                   double tol = 1e-12);

  double p() const noexcept { return p_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  double jitter_used() const noexcept { return jitter_used_; }

  GridProcess sample(Rng& rng) const;
  double sample_into(Rng& rng, std::span<double> out) const;

 private:
  double p_;
  std::vector<double> grid_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;  // lower triangular
  double jitter_used_ = 0.0;
};

GridProcess sample_G_asyb(double p, std::span<const double> grid, Rng& rng,
                          double jitter = 1e-10);

// ---------------------------------------------------------------------------
// Supremum tails

struct TailRow {
  double threshold = 0.0;
  double frequency = 0.0;  // empirical P(|S - mean(S)| >= threshold)
  double bound = 0.0;
  double std_error = 0.0;     // binomial standard error at the bound
  bool pass = true;        // frequency <= bound + 3 std_error (vacuous when bound >= 1)
};

/// Sub-Gaussian tail bound 2 exp(-c t^2) with c = (b-1)^2 / (2b).
double sup_tail_bound_uniform(double threshold, int b);
/// Same with c = (1 - pv)^2 / (2 pv), pv = max(p, 1 - p).
double sup_tail_bound_asyb(double threshold, double p);

enum class TailModel { uniform, asymmetric_bernoulli };

/// Compares empirical deviation frequencies of grid suprema against the bound.
/// `center` replaces E[S]; `param` is b (uniform) or p (asymmetric Bernoulli).
/// Requires at least 1000 samples.
std::vector<TailRow> sup_tail_check(std::span<const double> suprema, double center,
                                    std::span<const double> thresholds, TailModel model,
                                    double param);

// ---------------------------------------------------------------------------
// Grand-average limit variables

struct ZSample {
  double z0 = 0.0;
  double z1 = 0.0;
  std::optional<double> z_mu;
  int iterations = 0;
};

inline constexpr int kDefaultZIterations = 64;

/// Iterates the two-type random map
///   Z^i <- B p_{i0} Z^0 + (1 - B)(1 - p_{i0}) Z^1 + 1,  B ~ Bernoulli(p_{i0}),
/// `iterations` times from the constants (kappa_0, kappa_1). z0 and z1 are
/// independent draws.
ZSample sample_Z_pair(const Matrix2& P, int iterations, Rng& rng);

/// As sample_Z_pair, plus Z_mu = B mu_0 Z^0 + (1 - B)(1 - mu_0) Z^1 + 1.
ZSample sample_Z_mu(const MarkovModel& model, int iterations, Rng& rng);

/// One application of the random map to a state i, with the continuation
/// values drawn from the given pools (used to test fixed-point stability).
double apply_Z_map(const Matrix2& P, int state, std::span<const double> pool0,
                   std::span<const double> pool1, Rng& rng);

/// Z_mu through its quantile representation m_mu(U), U uniform.
double sample_Z_mu_quantile(const MarkovModel& model, Rng& rng, double tol = 1e-9);

}  // namespace radsel
