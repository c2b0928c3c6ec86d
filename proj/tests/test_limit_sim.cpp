#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "radsel/errors.hpp"
#include "radsel/experiments.hpp"
#include "radsel/limit_sim.hpp"

using namespace radsel;

namespace {

double sample_cov(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n, mb /= n;
  double c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma) * (b[i] - mb);
  return c / (n - 1);
}

}  // namespace

TEST(Upsilon, BinaryIsAntisymmetric) {
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto u = sample_upsilon(2, rng);
    ASSERT_EQ(u.size(), 2u);
    EXPECT_DOUBLE_EQ(u[1], -u[0]);
  }
  const auto cov = upsilon_covariance(2);
  EXPECT_DOUBLE_EQ(cov(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(cov(0, 1), -1.0);
}

TEST(Upsilon, CovarianceMatchesWithinMonteCarloError) {
  const int b = 3;
  const std::size_t draws = 100000;
  std::vector<std::vector<double>> comp(b, std::vector<double>(draws));
  Rng rng(2);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto u = sample_upsilon(b, rng);
    for (int k = 0; k < b; ++k) comp[k][i] = u[k];
  }
  const auto target = upsilon_covariance(b);
  for (int k = 0; k < b; ++k) {
    const auto s = summarize(comp[k]);
    EXPECT_NEAR(s.mean, 0.0, 3.0 * s.std_error);
    for (int l = 0; l < b; ++l) {
      // variance of a product of jointly normal components
      const double se = std::sqrt((target(k, k) * target(l, l) + target(k, l) * target(k, l)) / draws);
      EXPECT_NEAR(sample_cov(comp[k], comp[l]), target(k, l), 3.0 * se);
    }
  }
}

TEST(UniformLimit, DepthOneIsTwoValued) {
  const UniformLimitSampler s(2, 1);
  ASSERT_EQ(s.grid().size(), 3u);
  Rng rng(3);
  const auto g = s.sample(rng);
  EXPECT_EQ(g.kind, ProcessKind::limit_G);
  EXPECT_DOUBLE_EQ(g.values[1], -g.values[0]);
  EXPECT_DOUBLE_EQ(g.values[2], g.values[1]);
}

TEST(UniformLimit, RejectsOversizedTrees) {
  EXPECT_THROW(UniformLimitSampler(2, 23), ResourceError);
  EXPECT_NO_THROW(UniformLimitSampler(4, 5));
}

TEST(UniformLimit, CovarianceWithinMonteCarloError) {
  const UniformLimitSampler s(2, 10);
  const std::size_t draws = 20000;
  const std::vector<std::size_t> idx{0, 128, 384, 512, 640, 1023, 1024};
  std::vector<std::vector<double>> cols(idx.size(), std::vector<double>(draws));
  std::vector<double> path(s.grid().size());
  for (std::size_t i = 0; i < draws; ++i) {
    Rng rng(derive_key(4, i));
    s.sample_into(rng, path);
    for (std::size_t k = 0; k < idx.size(); ++k) cols[k][i] = path[idx[k]];
  }
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a; b < idx.size(); ++b) {
      const double ta = s.grid()[idx[a]], tb = s.grid()[idx[b]];
      const double target = cov_uniform(ta, tb, 2);
      const double va = cov_uniform(ta, ta, 2), vb = cov_uniform(tb, tb, 2);
      const double se = std::sqrt((va * vb + target * target) / draws);
      EXPECT_NEAR(sample_cov(cols[a], cols[b]), target, 3.5 * se + s.truncation_bound())
          << ta << "," << tb;
    }
  }
}

TEST(AsybLimit, VarianceAtZeroAndSinglePoint) {
  const std::size_t draws = 20000;
  const AsybLimitSampler s(0.7, {0.0});
  std::vector<double> v(draws), one(1);
  for (std::size_t i = 0; i < draws; ++i) {
    Rng rng(derive_key(5, i));
    s.sample_into(rng, one);
    v[i] = one[0];
  }
  const double target = 0.3 / 0.49;
  EXPECT_NEAR(summarize(v).variance, target, 3.0 * target * std::sqrt(2.0 / draws));
}

TEST(AsybLimit, HalfMatchesUniformCovariance) {
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(k / 8.0);
  const AsybLimitSampler s(0.5, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j)
      EXPECT_NEAR(s.covariance()(i, j), cov_uniform(grid[i], grid[j], 2), 1e-9);
}

TEST(AsybLimit, FactorizesFineGrids) {
  std::vector<double> grid;
  for (int k = 0; k <= 256; ++k) grid.push_back(k / 256.0);
  for (double p : {0.2, 0.7, 0.9}) {
    const AsybLimitSampler s(p, grid);
    EXPECT_LE(s.jitter_used(), 1e-7);
  }
}

TEST(SupTail, Bounds) {
  EXPECT_NEAR(sup_tail_bound_uniform(2.0, 2), 2.0 * std::exp(-1.0), 1e-12);
  EXPECT_DOUBLE_EQ(sup_tail_bound_uniform(0.0, 2), 2.0);
  EXPECT_NEAR(sup_tail_bound_asyb(3.0, 0.7), 2.0 * std::exp(-(0.09 / 1.4) * 9.0), 1e-12);
  EXPECT_NEAR(sup_tail_bound_asyb(3.0, 0.7), 1.122, 1e-3);
  EXPECT_DOUBLE_EQ(sup_tail_bound_asyb(1.0, 0.3), sup_tail_bound_asyb(1.0, 0.7));
}

TEST(SupTail, CheckRequiresEnoughSamples) {
  std::vector<double> few(999, 0.0);
  const std::vector<double> th{1.0};
  EXPECT_THROW(sup_tail_check(few, 0.0, th, TailModel::uniform, 2), ArgumentError);
  std::vector<double> many(2000, 0.0);
  many[0] = 10.0;
  const auto rows = sup_tail_check(many, 0.0, th, TailModel::uniform, 2);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].frequency, 1.0 / 2000);
  EXPECT_TRUE(rows[0].pass);
}

TEST(ZSampler, UniformIsDeterministic) {
  const auto u = MarkovModel::uniform(2);
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto z = sample_Z_mu(u, kDefaultZIterations, rng);
    EXPECT_EQ(z.z0, 2.0);
    EXPECT_EQ(z.z1, 2.0);
    EXPECT_EQ(*z.z_mu, 2.0);
    EXPECT_NEAR(sample_Z_mu_quantile(u, rng), 2.0, 1e-9);
  }
}

TEST(ZSampler, RangeAndMean) {
  const auto m = MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}});
  const auto k = kappa_mu(m);
  const std::size_t draws = 100000;
  std::vector<double> z0(draws), zq(draws);
  const double upper = 1.0 / (1.0 - m.max_transition()) + 1.0;
  for (std::size_t i = 0; i < draws; ++i) {
    Rng rng(derive_key(7, i));
    const auto z = sample_Z_mu(m, kDefaultZIterations, rng);
    z0[i] = z.z0;
    EXPECT_GE(z.z0, 1.0);
    EXPECT_LE(z.z0, upper);
    EXPECT_GE(*z.z_mu, 1.0);
    zq[i] = sample_Z_mu_quantile(m, rng, 1e-6);
  }
  const auto s0 = summarize(z0), sq = summarize(zq);
  EXPECT_NEAR(s0.mean, k.kappa0, 3.0 * s0.std_error);
  EXPECT_NEAR(sq.mean, k.kappa_mu, 3.0 * sq.std_error);
}

TEST(ZSampler, MapPreservesTheLaw) {
  // Feeding pools of Z^0 and Z^1 draws through one map application leaves the
  // Z^0 distribution unchanged.
  const auto m = MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}});
  const Matrix2 P = binary_transition(m);
  const std::size_t draws = 50000;
  std::vector<double> pool0(draws), pool1(draws), mapped(draws);
  Rng rng(8);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto z = sample_Z_pair(P, kDefaultZIterations, rng);
    pool0[i] = z.z0;
    pool1[i] = z.z1;
  }
  for (std::size_t i = 0; i < draws; ++i) mapped[i] = apply_Z_map(P, 0, pool0, pool1, rng);
  EXPECT_LE(wasserstein1(mapped, pool0), 0.01);
}
