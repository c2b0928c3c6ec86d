#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "radsel/markov_source.hpp"

namespace radsel {

/// Sentinel for "digits agree through the cap". Every formula below treats
/// base^{-kInfiniteDepth} as 0.
inline constexpr int kInfiniteDepth = std::numeric_limits<int>::max();

/// base^{-j}, with the sentinel mapped to 0.
double inverse_power(double base, int j);

// ---------------------------------------------------------------------------
// Uniform model

/// b-ary digits of t in [0, 1], choosing the expansion with infinitely many
/// digits below b-1 (t = 1 expands to all b-1). Exact for b = 2.
std::vector<Symbol> digits_of(double t, int b, int count);

/// Length of the longest common b-ary prefix of s and t; kInfiniteDepth if
/// the digits agree through `cap`.
int lcp(double s, double t, int b, int cap = kDefaultDepthCap);

/// Covariance of the uniform-model limit process:
/// b/(b-1)^2 - (b+1)/(b-1)^2 * b^{-j(s,t)}.
double cov_uniform(double s, double t, int b);

/// b^{-j(s,t)}.
double metric_db(double s, double t, int b);
/// Canonical metric sqrt(E[(G(t) - G(s))^2]).
double metric_d(double s, double t, int b);

// ---------------------------------------------------------------------------
// Asymmetric Bernoulli model

/// Digits g(t, k) and remainders h(t, k) of the skewed expansion of t, where
/// each step splits [0, 1) at 1 - p.
struct SkewPath {
  double p = 0.5;
  std::vector<int> digits;         // g(t, 1..K)
  std::vector<double> remainders;  // h(t, 0..K)

  int g(std::size_t k) const { return k == 0 ? 0 : digits.at(k - 1); }
  double h(std::size_t k) const { return remainders.at(k); }
};

SkewPath skew_path(double t, double p, std::size_t depth);

/// Number of leading skew digits shared by s and t; kInfiniteDepth if they
/// agree through `cap`.
int r_index(double s, double t, double p, int cap = kDefaultDepthCap);

/// Covariance of the asymmetric Bernoulli limit process. Infinite series are
/// truncated where the geometric tail bound drops below `tol`.
double cov_asyb(double s, double t, double p, double tol = 1e-12);

/// Truncation depth K with pmax^K / (1 - pmax)^2 <= tol.
int cov_asyb_depth(double p, double tol);

/// Affine mean function ((2p-1)/(p(1-p))) t + 1/p.
double mean_asyb(double t, double p);

// ---------------------------------------------------------------------------
// General binary Markov sources

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Transition matrix of a b = 2 model; throws ArgumentError otherwise.
Matrix2 binary_transition(const MarkovModel& model);

/// Breakpoint sets D^i_n, n = 1..N, of the recursive interval decomposition
/// started from state i. Level n holds 2^n + 1 sorted points.
class MeanFunctionTable {
 public:
  static constexpr int kMaxDepth = 22;

  /// Throws ResourceError if N exceeds kMaxDepth.
  static MeanFunctionTable build(const Matrix2& P, int start_state, int depth);

  int depth() const noexcept { return static_cast<int>(levels_.size()); }
  int start_state() const noexcept { return start_state_; }
  double p_max() const noexcept { return p_max_; }
  std::span<const double> level(int n) const { return levels_.at(n - 1); }

  /// Length of the level-n interval containing t ([a, b) with the last
  /// interval closed; zero-length intervals never contain t).
  double interval_length(int n, double t) const;
  /// 1 + sum_{n <= N} lambda_n(t).
  double truncated_mean(double t) const;
  /// p_max^{N+1} / (1 - p_max).
  double tail_bound() const noexcept;

 private:
  Matrix2 P_{};
  int start_state_ = 0;
  double p_max_ = 0.0;
  std::vector<std::vector<double>> levels_;
};

/// m_mu(t) evaluated to within `tol`, with breakpoints resolved by averaging
/// the one-sided limits.
struct MeanEvaluation {
  double value = 0.0;
  int levels = 0;           // refinement levels below the first split
  double tail_bound = 0.0;  // certified bound on the neglected tail
  bool at_breakpoint = false;
};

MeanEvaluation evaluate_mean(double t, const MarkovModel& model, double tol = 1e-9);

/// m_mu(t); equals evaluate_mean(...).value.
double mean_markov(double t, const MarkovModel& model, double tol = 1e-9);

/// m_i(t) for the chain started with row i of P.
double mean_start_state(double t, const MarkovModel& model, int start_state,
                        double tol = 1e-9);

/// Levels N with p_max^{N+1} / (1 - p_max) <= tol.
int mean_truncation_levels(double p_max, double tol);

/// Distance from t to the nearest interior breakpoint of D^mu_n, n <= depth.
double breakpoint_distance(double t, const MarkovModel& model, int depth);

struct KappaConstants {
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double kappa_mu = 0.0;
};

/// (kappa_0, kappa_1). Throws DegeneracyError if the denominator vanishes.
std::array<double, 2> kappas(const Matrix2& P);

KappaConstants kappa_mu(const MarkovModel& model);

}  // namespace radsel
