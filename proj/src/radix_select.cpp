#include "radsel/radix_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radsel/errors.hpp"
#include "radsel/theory.hpp"

namespace radsel {

namespace {

[[noreturn]] void throw_duplicate(int cap) {
  throw DepthCapError("two data agree on all " + std::to_string(cap) +
                      " digits up to the depth cap (duplicate data?)");
}

}  // namespace

std::uint64_t ComplexityProfile::at(std::size_t rank) const {
  if (rank == n_ + 1 && n_ > 0) rank = n_;
  if (rank < 1 || rank > n_) {
    throw ArgumentError("rank " + std::to_string(rank) + " outside 1.." + std::to_string(n_));
  }
  return y_[rank - 1];
}

SelectionResult select(DataSet& data, std::size_t rank) {
  const std::size_t n = data.size();
  if (rank < 1 || rank > n) {
    throw ArgumentError("rank " + std::to_string(rank) + " outside 1.." + std::to_string(n));
  }
  const int b = data.model().alphabet_size();
  const int cap = data.depth_cap();

  SelectionResult result;
  result.rank = rank;

  std::vector<std::uint32_t> bucket(n);
  for (std::size_t i = 0; i < n; ++i) bucket[i] = static_cast<std::uint32_t>(i);
  std::vector<Symbol> digits(n);
  std::vector<std::size_t> counts(b);

  std::size_t sought = rank;  // rank within the current bucket
  int depth = 0;
  while (bucket.size() >= 2) {
    if (depth == cap) throw_duplicate(cap);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t k = 0; k < bucket.size(); ++k) {
      digits[k] = data.digit_at(bucket[k], depth + 1);
      ++counts[digits[k]];
    }
    result.ops += bucket.size();

    Symbol target = 0;
    std::size_t below = 0;
    while (sought > below + counts[target]) below += counts[target++];
    sought -= below;

    std::size_t kept = 0;
    for (std::size_t k = 0; k < bucket.size(); ++k) {
      if (digits[k] == target) bucket[kept++] = bucket[k];
    }
    bucket.resize(kept);
    ++depth;
  }

  result.depth = depth;
  if (!bucket.empty() && depth > 0) {
    auto prefix = data.stream(bucket.front()).realized().first(depth);
    result.selected_prefix.assign(prefix.begin(), prefix.end());
  }
  return result;
}

ComplexityProfile profile(DataSet& data) {
  const std::size_t n = data.size();
  const int b = data.model().alphabet_size();
  const int cap = data.depth_cap();

  std::vector<std::uint64_t> y(n, 0);
  std::vector<std::uint32_t> order(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::vector<Symbol> digits(n);
  std::vector<std::size_t> counts(b), offsets(b);

  // A node of the trie is a contiguous range of `order`; its position in the
  // array equals the ranks of the data it holds.
  struct Frame {
    std::size_t begin;
    std::size_t end;
    int depth;
    std::uint64_t path_ops;
  };
  std::vector<Frame> stack;
  stack.push_back({0, n, 0, 0});
  int max_depth = 0;

  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const std::size_t size = f.end - f.begin;
    if (size == 0) continue;
    if (size == 1) {
      y[f.begin] = f.path_ops;
      continue;
    }
    if (f.depth == cap) throw_duplicate(cap);

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t k = f.begin; k < f.end; ++k) {
      digits[k] = data.digit_at(order[k], f.depth + 1);
      ++counts[digits[k]];
    }
    std::size_t acc = f.begin;
    for (int d = 0; d < b; ++d) {
      offsets[d] = acc;
      acc += counts[d];
    }
    for (std::size_t k = f.begin; k < f.end; ++k) scratch[offsets[digits[k]]++] = order[k];
    std::copy(scratch.begin() + f.begin, scratch.begin() + f.end, order.begin() + f.begin);

    max_depth = std::max(max_depth, f.depth + 1);
    const std::uint64_t path_ops = f.path_ops + size;
    std::size_t child_end = f.end;
    for (int d = b - 1; d >= 0; --d) {
      const std::size_t child_begin = child_end - counts[d];
      if (child_end > child_begin) stack.push_back({child_begin, child_end, f.depth + 1, path_ops});
      child_end = child_begin;
    }
  }
  return ComplexityProfile(n, b, std::move(y), max_depth);
}

std::string_view to_string(ModelFamily family) noexcept {
  switch (family) {
    case ModelFamily::uniform: return "uniform";
    case ModelFamily::asymmetric_bernoulli: return "asymmetric_bernoulli";
    case ModelFamily::markov: return "markov";
  }
  return "unknown";
}

std::string_view to_string(ProcessKind kind) noexcept {
  switch (kind) {
    case ProcessKind::empirical_X_n: return "empirical_X_n";
    case ProcessKind::limit_G: return "limit_G";
    case ProcessKind::limit_G_asyB: return "limit_G_asyB";
  }
  return "unknown";
}

ModelFamily classify(const MarkovModel& model) noexcept {
  const int b = model.alphabet_size();
  auto close = [](double x, double y) { return std::abs(x - y) <= kProbabilityTolerance; };

  bool uniform = true;
  for (int i = 0; i < b && uniform; ++i) {
    uniform = close(model.initial()[i], 1.0 / b);
    for (int j = 0; j < b && uniform; ++j) uniform = close(model.p(i, j), 1.0 / b);
  }
  if (uniform) return ModelFamily::uniform;

  if (b == 2) {
    const double p = model.initial()[1];
    if (close(model.p(0, 1), p) && close(model.p(1, 1), p)) {
      return ModelFamily::asymmetric_bernoulli;
    }
  }
  return ModelFamily::markov;
}

Centering Centering::uniform(int b) {
  if (b < 2) throw ArgumentError("alphabet size must be at least 2");
  Centering c;
  c.family_ = ModelFamily::uniform;
  c.param_ = b;
  return c;
}

Centering Centering::asymmetric_bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("p must lie in (0, 1)");
  Centering c;
  c.family_ = ModelFamily::asymmetric_bernoulli;
  c.param_ = p;
  return c;
}

Centering Centering::markov(std::shared_ptr<const MarkovModel> model, double tol) {
  if (!model || model->alphabet_size() != 2) {
    throw ArgumentError("the general Markov centering is defined for b = 2 only");
  }
  Centering c;
  c.family_ = ModelFamily::markov;
  c.model_ = std::move(model);
  c.tol_ = tol;
  return c;
}

Centering Centering::for_model(std::shared_ptr<const MarkovModel> model, double tol) {
  switch (classify(*model)) {
    case ModelFamily::uniform: return uniform(model->alphabet_size());
    case ModelFamily::asymmetric_bernoulli: return asymmetric_bernoulli(model->initial()[1]);
    case ModelFamily::markov: return markov(std::move(model), tol);
  }
  return uniform(2);
}

double Centering::operator()(double t) const {
  switch (family_) {
    case ModelFamily::uniform: return param_ / (param_ - 1.0);
    case ModelFamily::asymmetric_bernoulli: return mean_asyb(t, param_);
    case ModelFamily::markov: return mean_markov(t, *model_, tol_);
  }
  return 0.0;
}

GridProcess normalize_profile(const ComplexityProfile& profile,
                              std::span<const double> grid,
                              const Centering& centering) {
  const std::size_t n = profile.n();
  if (n == 0) throw ArgumentError("cannot normalize an empty profile");
  GridProcess out;
  out.kind = ProcessKind::empirical_X_n;
  out.grid.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("grid point outside [0, 1]");
    const auto rank = std::min(static_cast<std::size_t>(std::floor(t * nd)) + 1, n);
    out.values.push_back((static_cast<double>(profile.at(rank)) - centering(t) * nd) / root_n);
  }
  return out;
}

double worst_case(const ComplexityProfile& profile, const Centering& centering) {
  const std::size_t n = profile.n();
  if (n == 0) throw ArgumentError("worst case needs n >= 1");
  const double nd = static_cast<double>(n);
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 1; l <= n; ++l) {
    const double c = centering(static_cast<double>(l) / nd);
    sup = std::max(sup, static_cast<double>(profile.at(l)) - c * nd);
  }
  return sup / std::sqrt(nd);
}

}  // namespace radsel
