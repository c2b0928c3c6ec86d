#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsel/errors.hpp"
#include "radsel/markov_source.hpp"

using namespace radsel;

TEST(MarkovModel, UniformIsValid) {
  const auto m = MarkovModel::create(2, {0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(m.alphabet_size(), 2);
  EXPECT_DOUBLE_EQ(m.max_transition(), 0.5);
  const auto u = MarkovModel::uniform(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(u.p(i, j), 0.25);
}

TEST(MarkovModel, RejectsInvalidInput) {
  EXPECT_THROW(MarkovModel::create(2, {0.5, 0.5}, {{1.0, 0.0}, {0.5, 0.5}}), ModelError);
  EXPECT_THROW(MarkovModel::create(2, {0.3, 0.8}, {{0.5, 0.5}, {0.5, 0.5}}), ModelError);
  EXPECT_THROW(MarkovModel::create(2, {0.5, 0.5}, {{0.5, 0.5}}), ModelError);
  EXPECT_THROW(MarkovModel::create(2, {0.5, 0.5}, {{1.2, -0.2}, {0.5, 0.5}}), ModelError);
  EXPECT_THROW(MarkovModel::create(1, {1.0}, {{1.0}}), ModelError);
  EXPECT_THROW(MarkovModel::bernoulli(1.0), ModelError);
  EXPECT_THROW(MarkovModel::bernoulli(0.0), ModelError);
}

TEST(MarkovModel, BernoulliShortcut) {
  const auto m = MarkovModel::bernoulli(0.7);
  EXPECT_DOUBLE_EQ(m.initial()[1], 0.7);
  EXPECT_DOUBLE_EQ(m.p(0, 1), 0.7);
  EXPECT_DOUBLE_EQ(m.p(1, 1), 0.7);
  EXPECT_NEAR(m.p(0, 0), 0.3, 1e-15);
}

TEST(MarkovModel, JsonRoundTrip) {
  const auto doc = nlohmann::json::parse(R"({"b": 2, "mu": [0.5, 0.5], "P": [[0.3, 0.7], [0.4, 0.6]]})");
  const auto m = MarkovModel::from_json(doc);
  EXPECT_DOUBLE_EQ(m.p(1, 0), 0.4);
  const auto again = MarkovModel::from_json(m.to_json());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(again.p(i, j), m.p(i, j));
  EXPECT_THROW(MarkovModel::from_json(nlohmann::json::parse(R"({"b": 2})")), ModelError);
}

TEST(DigitStream, RereadingIsStable) {
  const auto m = MarkovModel::uniform(2);
  DigitStream s(m, derive_key(7, 0));
  const Symbol first = s.digit_at(1);
  EXPECT_EQ(s.digit_at(1), first);
  const Symbol deep = s.digit_at(40);
  EXPECT_EQ(s.realized_length(), 40u);
  EXPECT_EQ(s.digit_at(1), first);
  EXPECT_EQ(s.digit_at(40), deep);

  // forcing deeper digits never changes shallower ones
  DigitStream t(m, derive_key(7, 0));
  for (std::size_t i = 1; i <= 40; ++i) EXPECT_EQ(t.digit_at(i), s.digit_at(i));
}

TEST(DigitStream, DepthCap) {
  const auto m = MarkovModel::uniform(2);
  DigitStream s(m, 1, 8);
  EXPECT_NO_THROW(s.digit_at(8));
  EXPECT_THROW(s.digit_at(9), DepthCapError);
}

TEST(DigitStream, SkewedFrequency) {
  const double p = 0.999;
  const auto m = MarkovModel::bernoulli(p);
  const std::size_t count = 100000;
  std::size_t ones = 0;
  // 500 streams of 200 digits; a single stream stops at the depth cap
  for (std::size_t k = 0; k < 500; ++k) {
    DigitStream s(m, derive_key(11, k));
    for (std::size_t i = 1; i <= 200; ++i) ones += s.digit_at(i);
  }
  const double freq = static_cast<double>(ones) / count;
  EXPECT_NEAR(freq, p, 3.0 * std::sqrt(p * (1 - p) / count));
}

TEST(DigitStream, TransitionsFollowRows) {
  const auto m = MarkovModel::create(2, {0.5, 0.5}, {{0.3, 0.7}, {0.4, 0.6}});
  double counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t k = 0; k < 2000; ++k) {
    DigitStream s(m, derive_key(3, k));
    for (std::size_t i = 1; i < 50; ++i) counts[s.digit_at(i)][s.digit_at(i + 1)] += 1;
  }
  for (int i = 0; i < 2; ++i) {
    const double total = counts[i][0] + counts[i][1];
    EXPECT_NEAR(counts[i][0] / total, m.p(i, 0), 4.0 * std::sqrt(0.25 / total));
  }
}

TEST(DataSet, DistinctStreamsDiffer) {
  DataSet d(std::make_shared<const MarkovModel>(MarkovModel::uniform(2)), 2, 5);
  bool differ = false;
  for (std::size_t i = 1; i <= 64; ++i) differ = differ || d.digit_at(0, i) != d.digit_at(1, i);
  EXPECT_TRUE(differ);
}

TEST(DataSet, EmptyAndReproducible) {
  auto model = std::make_shared<const MarkovModel>(MarkovModel::uniform(2));
  EXPECT_EQ(gen_dataset(model, 0, 1).size(), 0u);
  DataSet a = gen_dataset(model, 50, 99), b = gen_dataset(model, 50, 99);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t pos = 1; pos <= 30; ++pos) EXPECT_EQ(a.digit_at(i, pos), b.digit_at(i, pos));
}

TEST(DataSet, FirstDigitBalance) {
  auto model = std::make_shared<const MarkovModel>(MarkovModel::uniform(2));
  const std::size_t n = 100000;
  DataSet d = gen_dataset(model, n, 2024);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) zeros += d.digit_at(i, 1) == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(ValueOfPrefix, Examples) {
  const std::vector<Symbol> a{0, 1, 1}, one{1}, none;
  EXPECT_DOUBLE_EQ(value_of_prefix(a, 2), 0.375);
  EXPECT_DOUBLE_EQ(value_of_prefix(none, 2), 0.0);
  EXPECT_DOUBLE_EQ(value_of_prefix(one, 2), 0.5);
  const std::vector<Symbol> ternary{2, 1};
  EXPECT_DOUBLE_EQ(value_of_prefix(ternary, 3), 2.0 / 3 + 1.0 / 9);
}
