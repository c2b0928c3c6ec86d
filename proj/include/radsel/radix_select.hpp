#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "radsel/markov_source.hpp"

namespace radsel {

/// Outcome of selecting one rank.
struct SelectionResult {
  std::size_t rank = 0;      // 1-based
  std::uint64_t ops = 0;     // bucket operations
  int depth = 0;             // number of distribution rounds performed
  std::vector<Symbol> selected_prefix;
};

/// Bucket-operation counts Y_n(l) for every rank l = 1..n.
class ComplexityProfile {
 public:
  ComplexityProfile(std::size_t n, int b, std::vector<std::uint64_t> y, int max_depth)
      : n_(n), b_(b), y_(std::move(y)), max_depth_(max_depth) {}

  std::size_t n() const noexcept { return n_; }
  int alphabet_size() const noexcept { return b_; }
  int max_depth() const noexcept { return max_depth_; }
  /// Y_n(rank) for 1 <= rank <= n; rank n + 1 maps to rank n.
  std::uint64_t at(std::size_t rank) const;
  std::span<const std::uint64_t> values() const noexcept { return y_; }

 private:
  std::size_t n_;
  int b_;
  std::vector<std::uint64_t> y_;
  int max_depth_;
};

/// Radix Selection of one rank, instrumented to count bucket operations.
/// Throws ArgumentError for ranks outside 1..n and DepthCapError when two data
/// share every digit up to the cap.
SelectionResult select(DataSet& data, std::size_t rank);

/// Y_n(l) for all ranks in one depth-first pass over the radix trie.
ComplexityProfile profile(DataSet& data);

enum class ModelFamily { uniform, asymmetric_bernoulli, markov };

std::string_view to_string(ModelFamily family) noexcept;

/// Identifies the uniform and asymmetric Bernoulli special cases.
ModelFamily classify(const MarkovModel& model) noexcept;

/// Linear-order centering c(t) of the complexity: b/(b-1) for the uniform
/// model, the affine m(t) for the asymmetric Bernoulli model, m_mu(t) otherwise.
class Centering {
 public:
  static Centering uniform(int b);
  static Centering asymmetric_bernoulli(double p);
  static Centering markov(std::shared_ptr<const MarkovModel> model, double tol = 1e-9);
  /// Picks the centering matching the model's family.
  static Centering for_model(std::shared_ptr<const MarkovModel> model, double tol = 1e-9);

  ModelFamily family() const noexcept { return family_; }
  double operator()(double t) const;

 private:
  ModelFamily family_ = ModelFamily::uniform;
  double param_ = 2.0;  // b for uniform, p for asymmetric Bernoulli
  double tol_ = 1e-9;
  std::shared_ptr<const MarkovModel> model_;
};

enum class ProcessKind { empirical_X_n, limit_G, limit_G_asyB };

std::string_view to_string(ProcessKind kind) noexcept;

/// Values of a process on a strictly increasing grid of [0, 1].
struct GridProcess {
  std::vector<double> grid;
  std::vector<double> values;
  ProcessKind kind = ProcessKind::empirical_X_n;
};

/// X_n(t) = (Y_n(floor(tn) + 1) - c(t) n) / sqrt(n) on the given grid.
GridProcess normalize_profile(const ComplexityProfile& profile,
                              std::span<const double> grid,
                              const Centering& centering);

/// sup_l (Y_n(l) - c(l/n) n) / sqrt(n).
double worst_case(const ComplexityProfile& profile, const Centering& centering);

}  // namespace radsel
