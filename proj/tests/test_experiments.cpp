#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "radsel/errors.hpp"
#include "radsel/experiments.hpp"
#include "radsel/parallel.hpp"
#include "radsel/theory.hpp"

using namespace radsel;

TEST(Summarize, Examples) {
  const std::vector<double> constant{2, 2, 2}, pair{0, 1}, four{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(summarize(constant).mean, 2.0);
  EXPECT_DOUBLE_EQ(summarize(constant).variance, 0.0);
  EXPECT_DOUBLE_EQ(summarize(pair).mean, 0.5);
  EXPECT_DOUBLE_EQ(summarize(pair).variance, 0.5);
  EXPECT_DOUBLE_EQ(summarize(four).median, 2.5);
  EXPECT_DOUBLE_EQ(summarize(four).q25, 1.75);
  EXPECT_THROW(summarize(std::vector<double>{}), ArgumentError);
}

TEST(Wasserstein, Examples) {
  const std::vector<double> a{0, 1}, b{1, 2}, c{3, 1, 2};
  EXPECT_DOUBLE_EQ(wasserstein1(a, a), 0.0);
  EXPECT_DOUBLE_EQ(wasserstein1(a, b), 1.0);
  // unequal sizes; every point of c lies above a, so W1 is the mean gap
  EXPECT_NEAR(wasserstein1(a, c), 1.5, 1e-12);
}

TEST(KsNormal, SmallForNormalSample) {
  std::vector<double> z(20000);
  Rng rng(1);
  std::normal_distribution<double> normal;
  for (double& v : z) v = normal(rng);
  EXPECT_LT(ks_normal(z), 0.02);
  for (double& v : z) v += 1.0;
  EXPECT_GT(ks_normal(z), 0.3);
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.96), 0.975, 1e-4);
}

TEST(MeanMoments, UniformAndKappaIdentity) {
  const auto u = mean_function_moments(MarkovModel::uniform(2), 1000);
  EXPECT_NEAR(u.mean, 2.0, 1e-6);
  EXPECT_NEAR(u.variance, 0.0, 1e-12);
  const auto m = MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}});
  EXPECT_NEAR(mean_function_moments(m, 10000).mean, kappa_mu(m).kappa_mu, 1e-3);
}

TEST(DefaultGrid, Families) {
  const auto g = default_grid(MarkovModel::uniform(2));
  ASSERT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g[3], 0.375);
  const auto m = MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}});
  const auto mg = default_grid(m);
  ASSERT_EQ(mg.size(), 9u);
  for (double t : mg) {
    EXPECT_GE(breakpoint_distance(t, m, 3), 0.01 - 1e-12);
    EXPECT_GE(breakpoint_distance(t, m, 6), 0.003 - 1e-12);
    EXPECT_FALSE(evaluate_mean(t, m).at_breakpoint);
  }
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  std::vector<double> a(1000), b(1000);
  parallel_for(1000, 1, [&](std::size_t i) { a[i] = Rng(9, i).uniform(); });
  parallel_for(1000, 4, [&](std::size_t i) { b[i] = Rng(9, i).uniform(); });
  EXPECT_EQ(a, b);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 17) throw ArgumentError("boom");
                            }),
               ArgumentError);
}

namespace {

RunConfig small(std::shared_ptr<const MarkovModel> model) {
  RunConfig cfg;
  cfg.model = std::move(model);
  cfg.n = 512;
  cfg.reps = 40;
  cfg.seed = 42;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST(QuantileExperiment, DeterministicAcrossThreadCounts) {
  auto cfg = small(std::make_shared<const MarkovModel>(MarkovModel::bernoulli(0.7)));
  const auto a = quantile_experiment(cfg);
  cfg.threads = 1;
  const auto b = quantile_experiment(cfg);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')),
            "check_id,point,empirical,theory,stderr,tolerance,pass");
  EXPECT_EQ(a.metadata["seed"], 42);
}

TEST(QuantileExperiment, RowsAndOverrides) {
  auto cfg = small(std::make_shared<const MarkovModel>(MarkovModel::uniform(2)));
  cfg.tolerances["mean_Y_over_n"] = 0.123;
  const auto s = quantile_experiment(cfg);
  const CheckRow* row = s.find("mean_Y_over_n", "0.5");
  ASSERT_NE(row, nullptr);
  EXPECT_DOUBLE_EQ(*row->tolerance, 0.123);
  EXPECT_DOUBLE_EQ(*row->theory, 2.0);
  EXPECT_NE(s.find("mean_X", "0.5"), nullptr);
  EXPECT_NE(s.find("cov", "0.25;0.375"), nullptr);
  // diagonal covariance rows carry no verdict unless requested
  EXPECT_FALSE(s.find("cov", "0.5;0.5")->pass.has_value());
  EXPECT_EQ(s.covariance.rows(), 9);
}

TEST(QuantileExperiment, MarkovReportsMeanOnly) {
  auto cfg = small(std::make_shared<const MarkovModel>(
      MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}})));
  const auto s = quantile_experiment(cfg);
  for (const auto& r : s.rows) {
    EXPECT_NE(r.check_id, "mean_X");
    if (r.check_id == "cov") {
      EXPECT_FALSE(r.theory.has_value());
    }
  }
  EXPECT_NEAR(s.find("mean_Y_over_n", "0.4")->empirical, mean_markov(0.4, *cfg.model), 0.1);
}

TEST(GrandAverage, BinaryOnlyAndJson) {
  auto cfg = small(std::make_shared<const MarkovModel>(MarkovModel::uniform(3)));
  EXPECT_THROW(grand_average_experiment(cfg), ArgumentError);
  cfg.model = std::make_shared<const MarkovModel>(MarkovModel::uniform(2));
  cfg.reps = 200;
  const auto s = grand_average_experiment(cfg);
  ASSERT_NE(s.find("mean_W_over_n"), nullptr);
  ASSERT_NE(s.find("ks_normal"), nullptr);
  const auto j = to_json(s);
  EXPECT_EQ(j["metadata"]["n"], 512);
  EXPECT_TRUE(j["rows"].is_array());
}

TEST(WorstCase, DegenerateAndSmallRuns) {
  auto cfg = small(std::make_shared<const MarkovModel>(MarkovModel::uniform(2)));
  cfg.n = 1;
  cfg.limit_draws = 1000;
  cfg.limit_depth = 6;
  const auto one = worst_case_experiment(cfg);
  EXPECT_TRUE(std::isfinite(one.find("worst_case_mean")->empirical));
  cfg.n = 1024;
  const auto s = worst_case_experiment(cfg);
  EXPECT_NE(s.find("worst_case_quantile", "0.5"), nullptr);
  cfg.model = std::make_shared<const MarkovModel>(
      MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}}));
  EXPECT_THROW(worst_case_experiment(cfg), ArgumentError);
}
