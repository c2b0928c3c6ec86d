#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "radsel/errors.hpp"
#include "radsel/radix_select.hpp"
#include "radsel/theory.hpp"

using namespace radsel;

namespace {

std::shared_ptr<const MarkovModel> uniform2() {
  return std::make_shared<const MarkovModel>(MarkovModel::uniform(2));
}

// Finds a seed whose n = 3 uniform dataset has prefixes 00..., 01..., 1...
Seed three_item_seed() {
  for (Seed seed = 0;; ++seed) {
    DataSet d(uniform2(), 3, seed);
    int zeros = 0, ones = 0;
    for (std::size_t i = 0; i < 3; ++i) (d.digit_at(i, 1) == 0 ? zeros : ones) += 1;
    if (zeros != 2 || ones != 1) continue;
    int second = 0;
    for (std::size_t i = 0; i < 3; ++i)
      if (d.digit_at(i, 1) == 0) second += d.digit_at(i, 2);
    if (second == 1) return seed;
  }
}

// Reference by brute force: sort the realized values, then count the
// elements sharing each prefix of the target.
std::uint64_t brute_force_ops(DataSet& d, std::size_t rank) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    for (std::size_t pos = 1;; ++pos) {
      const Symbol x = d.digit_at(a, pos), y = d.digit_at(b, pos);
      if (x != y) return x < y;
    }
  };
  std::sort(order.begin(), order.end(), less);
  const std::size_t target = order[rank - 1];
  std::uint64_t ops = 0;
  std::vector<std::size_t> group(order);
  for (std::size_t pos = 1; group.size() > 1; ++pos) {
    ops += group.size();
    std::vector<std::size_t> next;
    for (std::size_t i : group)
      if (d.digit_at(i, pos) == d.digit_at(target, pos)) next.push_back(i);
    group.swap(next);
  }
  return ops;
}

}  // namespace

TEST(Select, SingleItemCostsNothing) {
  DataSet d(uniform2(), 1, 3);
  EXPECT_EQ(select(d, 1).ops, 0u);
  EXPECT_EQ(profile(d).values().size(), 1u);
  EXPECT_EQ(profile(d).at(1), 0u);
}

TEST(Select, TwoItemsSplitAtTheRoot) {
  for (Seed seed = 0;; ++seed) {
    DataSet d(uniform2(), 2, seed);
    if (d.digit_at(0, 1) == d.digit_at(1, 1)) continue;
    EXPECT_EQ(select(d, 1).ops, 2u);
    EXPECT_EQ(select(d, 2).ops, 2u);
    break;
  }
}

TEST(Select, HandTracedThreeItems) {
  DataSet d(uniform2(), 3, three_item_seed());
  EXPECT_EQ(select(d, 3).ops, 3u);
  EXPECT_EQ(select(d, 1).ops, 5u);
  EXPECT_EQ(select(d, 2).ops, 5u);
  const auto y = profile(d);
  EXPECT_EQ(std::vector<std::uint64_t>(y.values().begin(), y.values().end()),
            (std::vector<std::uint64_t>{5, 5, 3}));
  EXPECT_EQ(y.at(4), 3u);
  EXPECT_NEAR(worst_case(y, Centering::uniform(2)), -1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Select, RejectsBadRanks) {
  DataSet d(uniform2(), 4, 1);
  EXPECT_THROW(select(d, 0), ArgumentError);
  EXPECT_THROW(select(d, 5), ArgumentError);
}

TEST(Select, DepthCapCollision) {
  // With a one-digit cap two of three binary items always collide.
  DataSet d(uniform2(), 3, 8, 1);
  EXPECT_THROW(profile(d), DepthCapError);
}

TEST(Select, SelectedPrefixOrdersRanks) {
  DataSet d(uniform2(), 40, 77);
  double previous = -1.0;
  for (std::size_t l = 1; l <= 40; ++l) {
    const auto r = select(d, l);
    const double v = value_of_prefix(r.selected_prefix, 2);
    EXPECT_GT(v, previous);
    previous = v;
  }
}

class OracleEquality : public ::testing::TestWithParam<int> {};

TEST_P(OracleEquality, ProfileMatchesSelectAndBruteForce) {
  std::shared_ptr<const MarkovModel> model;
  switch (GetParam()) {
    case 0: model = uniform2(); break;
    case 1: model = std::make_shared<const MarkovModel>(MarkovModel::bernoulli(0.7)); break;
    case 2:
      model = std::make_shared<const MarkovModel>(
          MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}}));
      break;
    default: model = std::make_shared<const MarkovModel>(MarkovModel::uniform(5)); break;
  }
  Rng rng(123, GetParam());
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rng() % 64;
    DataSet a(model, n, rng()), b(model, n, a.seed()), c(model, n, a.seed());
    const auto y = profile(a);
    for (std::size_t l = 1; l <= n; ++l) {
      ASSERT_EQ(y.at(l), select(b, l).ops) << "n=" << n << " rank=" << l;
      ASSERT_EQ(y.at(l), brute_force_ops(c, l));
      if (n >= 2) EXPECT_GE(y.at(l), n);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Families, OracleEquality, ::testing::Values(0, 1, 2, 3));

TEST(Centering, FamiliesAndValues) {
  auto asyb = std::make_shared<const MarkovModel>(MarkovModel::bernoulli(0.7));
  EXPECT_EQ(classify(*asyb), ModelFamily::asymmetric_bernoulli);
  EXPECT_EQ(classify(*uniform2()), ModelFamily::uniform);
  const auto c = Centering::for_model(asyb);
  EXPECT_NEAR(c(0.0), 1.0 / 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(Centering::uniform(2)(0.3), 2.0);
  EXPECT_DOUBLE_EQ(Centering::uniform(3)(0.3), 1.5);
}

TEST(NormalizeProfile, ExactCenteringGivesZero) {
  const std::size_t n = 16;
  ComplexityProfile y(n, 2, std::vector<std::uint64_t>(n, 2 * n), 4);
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  const auto x = normalize_profile(y, grid, Centering::uniform(2));
  for (double v : x.values) EXPECT_DOUBLE_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(worst_case(y, Centering::uniform(2)), 0.0);
}

TEST(NormalizeProfile, IndexConvention) {
  // y[l] = l makes the rank used at each t visible
  const std::size_t n = 8;
  std::vector<std::uint64_t> v(n);
  for (std::size_t l = 0; l < n; ++l) v[l] = l + 1;
  ComplexityProfile y(n, 2, v, 3);
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto x = normalize_profile(y, grid, Centering::uniform(2));
  const double s = std::sqrt(8.0);
  EXPECT_NEAR(x.values[0], (1.0 - 16.0) / s, 1e-12);   // rank 1
  EXPECT_NEAR(x.values[1], (5.0 - 16.0) / s, 1e-12);   // rank floor(4) + 1
  EXPECT_NEAR(x.values[2], (8.0 - 16.0) / s, 1e-12);   // rank n + 1 -> n
}
