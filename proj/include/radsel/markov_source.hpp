#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "radsel/rng.hpp"

namespace radsel {

using Symbol = std::uint8_t;

inline constexpr int kDefaultDepthCap = 256;
inline constexpr double kProbabilityTolerance = 1e-12;

/// Homogeneous Markov chain over the alphabet {0, ..., b-1}: the law of each
/// datum's digit string. Immutable once constructed.
class MarkovModel {
 public:
  /// Validates and builds a model. Throws ModelError on dimension mismatch,
  /// entries outside [0, 1], sums off by more than 1e-12, or any p_ij = 1.
  static MarkovModel create(int b, std::vector<double> mu,
                            std::vector<std::vector<double>> transition);

  /// All symbols independent and uniform.
  static MarkovModel uniform(int b = 2);
  /// Binary model with independent bits, each 1 with probability p.
  static MarkovModel bernoulli(double p);

  static MarkovModel from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  int alphabet_size() const noexcept { return b_; }
  std::span<const double> initial() const noexcept { return mu_; }
  std::span<const double> row(int i) const noexcept {
    return {transition_.data() + static_cast<std::size_t>(i) * b_,
            static_cast<std::size_t>(b_)};
  }
  double p(int i, int j) const noexcept {
    return transition_[static_cast<std::size_t>(i) * b_ + j];
  }
  /// Largest transition probability; strictly below 1.
  double max_transition() const noexcept { return p_max_; }

  Symbol draw_initial(double u) const noexcept { return draw(mu_cdf_, 0, u); }
  Symbol draw_next(Symbol state, double u) const noexcept {
    return draw(row_cdf_, static_cast<std::size_t>(state) * b_, u);
  }

 private:
  MarkovModel() = default;

  Symbol draw(const std::vector<double>& cdf, std::size_t offset,
              double u) const noexcept {
    if (b_ == 2) return u < cdf[offset] ? 0 : 1;
    int s = 0;
    while (s < b_ - 1 && u >= cdf[offset + s]) ++s;
    return static_cast<Symbol>(s);
  }

  int b_ = 0;
  std::vector<double> mu_;
  std::vector<double> transition_;  // row-major b x b
  std::vector<double> mu_cdf_;
  std::vector<double> row_cdf_;
  double p_max_ = 0.0;
};

/// Lazily extended digit string of one datum. Digit i is a pure function of
/// (stream key, i, digit i-1), so re-reading any position is stable and
/// forcing deeper digits never changes shallower ones.
class DigitStream {
 public:
  DigitStream(const MarkovModel& model, std::uint64_t key,
              int depth_cap = kDefaultDepthCap) noexcept
      : model_(&model), key_(key), cap_(static_cast<std::uint16_t>(depth_cap)) {}

  /// Digit at 1-based position i, realizing the prefix up to i if needed.
  /// Throws DepthCapError if i exceeds the depth cap.
  Symbol digit_at(std::size_t position) {
    if (position <= size_) return data()[position - 1];
    return extend_to(position);
  }

  std::size_t realized_length() const noexcept { return size_; }
  std::span<const Symbol> realized() const noexcept { return {data(), size_}; }
  int depth_cap() const noexcept { return cap_; }
  std::uint64_t key() const noexcept { return key_; }

 private:
  static constexpr std::size_t kInline = 24;

  const Symbol* data() const noexcept {
    return heap_.empty() ? inline_.data() : heap_.data();
  }
  Symbol extend_to(std::size_t position);

  const MarkovModel* model_;
  std::uint64_t key_;
  std::uint16_t cap_;
  std::uint16_t size_ = 0;
  std::array<Symbol, kInline> inline_{};
  std::vector<Symbol> heap_;
};

/// n independent data strings drawn from one model. Stream i's randomness is
/// derived from (seed, i) only, so (model, n, seed) reproduces every digit.
class DataSet {
 public:
  DataSet(std::shared_ptr<const MarkovModel> model, std::size_t n, Seed seed,
          int depth_cap = kDefaultDepthCap);

  std::size_t size() const noexcept { return streams_.size(); }
  Seed seed() const noexcept { return seed_; }
  int depth_cap() const noexcept { return depth_cap_; }
  const MarkovModel& model() const noexcept { return *model_; }

  DigitStream& stream(std::size_t i) { return streams_[i]; }
  const DigitStream& stream(std::size_t i) const { return streams_[i]; }
  Symbol digit_at(std::size_t i, std::size_t position) {
    return streams_[i].digit_at(position);
  }

 private:
  std::shared_ptr<const MarkovModel> model_;
  Seed seed_;
  int depth_cap_;
  std::vector<DigitStream> streams_;
};

DataSet gen_dataset(std::shared_ptr<const MarkovModel> model, std::size_t n,
                    Seed seed, int depth_cap = kDefaultDepthCap);

/// Sum of s_i b^{-i} over the given finite prefix.
double value_of_prefix(std::span<const Symbol> digits, int b);

}  // namespace radsel
