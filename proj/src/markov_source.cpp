#include "radsel/markov_source.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "radsel/errors.hpp"

namespace radsel {

namespace {

void check_probability_vector(const std::vector<double>& v, const std::string& what) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ModelError(what + ": entry " + std::to_string(x) + " outside [0, 1]");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw ModelError(what + ": entries sum to " + std::to_string(sum) + ", not 1");
  }
}

std::vector<double> cumulative(std::span<const double> v) {
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    out[i] = acc;
  }
  return out;
}

}  // namespace

MarkovModel MarkovModel::create(int b, std::vector<double> mu,
                                std::vector<std::vector<double>> transition) {
  if (b < 2 || b > 256) {
    throw ModelError("alphabet size must lie in [2, 256], got " + std::to_string(b));
  }
  if (mu.size() != static_cast<std::size_t>(b)) {
    throw ModelError("initial distribution has " + std::to_string(mu.size()) +
                     " entries, expected " + std::to_string(b));
  }
  if (transition.size() != static_cast<std::size_t>(b)) {
    throw ModelError("transition matrix has " + std::to_string(transition.size()) +
                     " rows, expected " + std::to_string(b));
  }
  check_probability_vector(mu, "initial distribution");

  MarkovModel m;
  m.b_ = b;
  m.mu_ = std::move(mu);
  m.transition_.reserve(static_cast<std::size_t>(b) * b);
  for (int i = 0; i < b; ++i) {
    const auto& row = transition[i];
    if (row.size() != static_cast<std::size_t>(b)) {
      throw ModelError("transition row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(b));
    }
    check_probability_vector(row, "transition row " + std::to_string(i));
    for (int j = 0; j < b; ++j) {
      if (row[j] >= 1.0) {
        throw ModelError("transition p_" + std::to_string(i) + std::to_string(j) +
                         " = 1 is not allowed");
      }
      m.p_max_ = std::max(m.p_max_, row[j]);
    }
    m.transition_.insert(m.transition_.end(), row.begin(), row.end());
  }

  m.mu_cdf_ = cumulative(m.mu_);
  m.row_cdf_.reserve(m.transition_.size());
  for (int i = 0; i < b; ++i) {
    auto c = cumulative(m.row(i));
    m.row_cdf_.insert(m.row_cdf_.end(), c.begin(), c.end());
  }
  return m;
}

MarkovModel MarkovModel::uniform(int b) {
  const double q = 1.0 / b;
  return create(b, std::vector<double>(b, q),
                std::vector<std::vector<double>>(b, std::vector<double>(b, q)));
}

MarkovModel MarkovModel::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ModelError("Bernoulli parameter must lie in (0, 1), got " + std::to_string(p));
  }
  return create(2, {1.0 - p, p}, {{1.0 - p, p}, {1.0 - p, p}});
}

MarkovModel MarkovModel::from_json(const nlohmann::json& doc) {
  try {
    return create(doc.at("b").get<int>(), doc.at("mu").get<std::vector<double>>(),
                  doc.at("P").get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

nlohmann::json MarkovModel::to_json() const {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < b_; ++i) rows.emplace_back(row(i).begin(), row(i).end());
  return {{"b", b_}, {"mu", mu_}, {"P", rows}};
}

Symbol DigitStream::extend_to(std::size_t position) {
  if (position > cap_) {
    throw DepthCapError("digit position " + std::to_string(position) +
                        " exceeds depth cap " + std::to_string(cap_));
  }
  while (size_ < position) {
    const double u = counter_uniform(key_, size_);
    const Symbol next = size_ == 0 ? model_->draw_initial(u)
                                   : model_->draw_next(data()[size_ - 1], u);
    if (size_ < kInline && heap_.empty()) {
      inline_[size_] = next;
    } else {
      if (heap_.empty()) {
        heap_.reserve(2 * kInline);
        heap_.assign(inline_.begin(), inline_.end());
      }
      heap_.push_back(next);
    }
    ++size_;
  }
  return data()[position - 1];
}

DataSet::DataSet(std::shared_ptr<const MarkovModel> model, std::size_t n,
                 Seed seed, int depth_cap)
    : model_(std::move(model)), seed_(seed), depth_cap_(depth_cap) {
  if (!model_) throw ArgumentError("DataSet requires a model");
  if (depth_cap < 1 || depth_cap > 65535) {
    throw ArgumentError("depth cap must lie in [1, 65535]");
  }
  streams_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    streams_.emplace_back(*model_, derive_key(seed, i), depth_cap);
  }
}

DataSet gen_dataset(std::shared_ptr<const MarkovModel> model, std::size_t n,
                    Seed seed, int depth_cap) {
  return DataSet(std::move(model), n, seed, depth_cap);
}

double value_of_prefix(std::span<const Symbol> digits, int b) {
  // Horner from the deepest digit keeps dyadic prefixes exact for b = 2.
  double value = 0.0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    value = (value + *it) / b;
  }
  return value;
}

}  // namespace radsel
