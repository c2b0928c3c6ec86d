#include "radsel/limit_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "radsel/errors.hpp"

namespace radsel {

UpsilonVector sample_upsilon(int b, Rng& rng) {
  if (b < 2) throw ArgumentError("b must be at least 2");
  std::normal_distribution<double> normal;
  UpsilonVector v(b);
  double mean = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    mean += x;
  }
  mean /= b;
  const double scale = std::sqrt(static_cast<double>(b)) / (b - 1.0);
  for (auto& x : v) x = scale * (x - mean);
  return v;
}

Eigen::MatrixXd upsilon_covariance(int b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(b, b, -1.0 / ((b - 1.0) * (b - 1.0)));
  m.diagonal().setConstant(1.0 / (b - 1.0));
  return m;
}

// ---------------------------------------------------------------------------

UniformLimitSampler::UniformLimitSampler(int b, int depth) : b_(b), depth_(depth) {
  if (b < 2) throw ArgumentError("b must be at least 2");
  if (depth < 1) throw ArgumentError("tree depth must be at least 1");
  std::size_t leaves = 1;
  for (int k = 0; k < depth; ++k) {
    leaves *= static_cast<std::size_t>(b);
    if (leaves > static_cast<std::size_t>(kMaxLeaves)) {
      throw ResourceError("tree of depth " + std::to_string(depth) + " for b = " +
                          std::to_string(b) + " exceeds the memory budget of " +
                          std::to_string(kMaxLeaves) + " leaves");
    }
  }
  leaves_ = leaves;
  grid_.resize(leaves_ + 1);
  for (std::size_t k = 0; k <= leaves_; ++k) {
    grid_[k] = static_cast<double>(k) / static_cast<double>(leaves_);
  }
}

double UniformLimitSampler::truncation_bound() const noexcept {
  const double b = b_;
  return b / ((b - 1.0) * (b - 1.0)) * std::pow(b, -depth_) * (b / (b - 1.0));
}

double UniformLimitSampler::sample_into(Rng& rng, std::span<double> out) const {
  std::vector<double> level{0.0};
  std::vector<double> next;
  double scale = 1.0;
  const double shrink = 1.0 / std::sqrt(static_cast<double>(b_));
  for (int k = 0; k < depth_; ++k) {
    next.resize(level.size() * b_);
    for (std::size_t node = 0; node < level.size(); ++node) {
      const UpsilonVector v = sample_upsilon(b_, rng);
      for (int d = 0; d < b_; ++d) next[node * b_ + d] = level[node] + scale * v[d];
    }
    level.swap(next);
    scale *= shrink;
  }
  std::copy(level.begin(), level.end(), out.begin());
  out[leaves_] = level.back();  // t = 1 follows the all-(b-1) path
  return *std::max_element(level.begin(), level.end());
}

GridProcess UniformLimitSampler::sample(Rng& rng) const {
  GridProcess g;
  g.kind = ProcessKind::limit_G;
  g.grid = grid_;
  g.values.resize(grid_.size());
  sample_into(rng, g.values);
  return g;
}

GridProcess sample_G_uniform(int b, int depth, Rng& rng) {
  return UniformLimitSampler(b, depth).sample(rng);
}

// ---------------------------------------------------------------------------

AsybLimitSampler::AsybLimitSampler(double p, std::vector<double> grid, double jitter,
                                   double tol)
    : p_(p), grid_(std::move(grid)) {
  if (grid_.empty()) throw ArgumentError("grid must not be empty");
  if (!(jitter >= 0.0)) throw ArgumentError("jitter must be non-negative");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) throw ArgumentError("grid must be strictly increasing");
  }
  const auto n = static_cast<Eigen::Index>(grid_.size());
  cov_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov_(i, j) = cov_(j, i) = cov_asyb(grid_[i], grid_[j], p, tol);
    }
  }

  double eps = jitter;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::MatrixXd a = cov_;
    a.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_used_ = eps;
      return;
    }
    eps = eps > 0.0 ? eps * 10.0 : 1e-10;
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov_);
  Eigen::Index worst = 0;
  ldlt.vectorD().minCoeff(&worst);
  const Eigen::Index pivot = ldlt.transpositionsP().indices()(worst);
  Eigen::Index partner = pivot == 0 ? 1 : 0;
  double best = -1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == pivot) continue;
    const double c = std::abs(cov_(pivot, j)) / std::sqrt(cov_(pivot, pivot) * cov_(j, j));
    if (c > best) {
      best = c;
      partner = j;
    }
  }
  throw NotPsdError("covariance not positive definite after jitter " + std::to_string(eps) +
                    "; offending pair t = " + std::to_string(grid_[pivot]) + ", s = " +
                    std::to_string(grid_[std::min(partner, n - 1)]));
}

double AsybLimitSampler::sample_into(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  const auto n = factor_.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
  std::copy(x.data(), x.data() + n, out.begin());
  return x.maxCoeff();
}

GridProcess AsybLimitSampler::sample(Rng& rng) const {
  GridProcess g;
  g.kind = ProcessKind::limit_G_asyB;
  g.grid = grid_;
  g.values.resize(grid_.size());
  sample_into(rng, g.values);
  return g;
}

GridProcess sample_G_asyb(double p, std::span<const double> grid, Rng& rng, double jitter) {
  return AsybLimitSampler(p, {grid.begin(), grid.end()}, jitter).sample(rng);
}

// ---------------------------------------------------------------------------

double sup_tail_bound_uniform(double threshold, int b) {
  const double c = (b - 1.0) * (b - 1.0) / (2.0 * b);
  return 2.0 * std::exp(-c * threshold * threshold);
}

double sup_tail_bound_asyb(double threshold, double p) {
  const double pv = std::max(p, 1.0 - p);
  const double c = (1.0 - pv) * (1.0 - pv) / (2.0 * pv);
  return 2.0 * std::exp(-c * threshold * threshold);
}

std::vector<TailRow> sup_tail_check(std::span<const double> suprema, double center,
                                    std::span<const double> thresholds, TailModel model,
                                    double param) {
  if (suprema.size() < 1000) {
    throw ArgumentError("sup_tail_check needs at least 1000 samples, got " +
                        std::to_string(suprema.size()));
  }
  const double count = static_cast<double>(suprema.size());
  std::vector<TailRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) {
    TailRow row;
    row.threshold = t;
    std::size_t hits = 0;
    for (double s : suprema) hits += std::abs(s - center) >= t;
    row.frequency = static_cast<double>(hits) / count;
    row.bound = model == TailModel::uniform ? sup_tail_bound_uniform(t, static_cast<int>(param))
                                            : sup_tail_bound_asyb(t, param);
    const double q = std::min(row.bound, 1.0);
    row.std_error = std::sqrt(q * (1.0 - q) / count);
    row.pass = row.bound >= 1.0 || row.frequency <= row.bound + 3.0 * row.std_error;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

// One draw of Z^state: the random map applied along a single branch,
// Z = 1 + w_1 (1 + w_2 (... (1 + w_D kappa_{s_D}))).
double draw_Z(const Matrix2& P, const std::array<double, 2>& kappa, int state, int iterations,
              Rng& rng) {
  double weight = 1.0;
  double sum = 0.0;
  int s = state;
  for (int it = 0; it < iterations; ++it) {
    sum += weight;
    if (rng.uniform() < P[s][0]) {
      weight *= P[s][0];
      s = 0;
    } else {
      weight *= P[s][1];
      s = 1;
    }
  }
  return sum + weight * kappa[s];
}

}  // namespace

ZSample sample_Z_pair(const Matrix2& P, int iterations, Rng& rng) {
  if (iterations < 1) throw ArgumentError("iterations must be at least 1");
  const auto kappa = kappas(P);
  ZSample z;
  z.iterations = iterations;
  z.z0 = draw_Z(P, kappa, 0, iterations, rng);
  z.z1 = draw_Z(P, kappa, 1, iterations, rng);
  return z;
}

ZSample sample_Z_mu(const MarkovModel& model, int iterations, Rng& rng) {
  const Matrix2 P = binary_transition(model);
  ZSample z = sample_Z_pair(P, iterations, rng);
  const double mu0 = model.initial()[0];
  z.z_mu = rng.uniform() < mu0 ? mu0 * z.z0 + 1.0 : (1.0 - mu0) * z.z1 + 1.0;
  return z;
}

double apply_Z_map(const Matrix2& P, int state, std::span<const double> pool0,
                   std::span<const double> pool1, Rng& rng) {
  if (pool0.empty() || pool1.empty()) throw ArgumentError("pools must not be empty");
  const double p0 = P[state][0];
  auto pick = [&rng](std::span<const double> pool) {
    const auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool.size()));
    return pool[std::min(i, pool.size() - 1)];
  };
  if (rng.uniform() < p0) return p0 * pick(pool0) + 1.0;
  return (1.0 - p0) * pick(pool1) + 1.0;
}

double sample_Z_mu_quantile(const MarkovModel& model, Rng& rng, double tol) {
  return mean_markov(rng.uniform(), model, tol);
}

}  // namespace radsel
