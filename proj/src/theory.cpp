#include "radsel/theory.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

#include "radsel/errors.hpp"

namespace radsel {

namespace {

void require_unit(double t, const char* name) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ArgumentError(std::string(name) + " = " + std::to_string(t) + " outside [0, 1]");
  }
}

void require_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("p must lie in (0, 1), got " + std::to_string(p));
}

// Greedy b-ary digit extraction with the t = 1 convention.
class DigitCursor {
 public:
  DigitCursor(double t, int b) : x_(t), b_(b), top_(t >= 1.0) {}
  int next() {
    if (top_) return b_ - 1;
    const double y = x_ * b_;
    const double d = std::min(std::floor(y), static_cast<double>(b_ - 1));
    x_ = y - d;
    return static_cast<int>(d);
  }

 private:
  double x_;
  int b_;
  bool top_;
};

// One step of the skewed expansion: split [0, 1) at q = 1 - p.
class SkewCursor {
 public:
  SkewCursor(double t, double p) : h_(t), p_(p), q_(1.0 - p) {}
  int next() {
    if (h_ >= 1.0) return 1;  // t = 1 is a fixed point of the right branch
    if (h_ < q_) {
      h_ = std::min(h_ / q_, 1.0);
      return 0;
    }
    h_ = std::clamp((h_ - q_) / p_, 0.0, 1.0);
    return 1;
  }
  double remainder() const noexcept { return h_; }

 private:
  double h_;
  double p_;
  double q_;
};

}  // namespace

double inverse_power(double base, int j) {
  if (j == kInfiniteDepth) return 0.0;
  return std::pow(base, -static_cast<double>(j));
}

std::vector<Symbol> digits_of(double t, int b, int count) {
  require_unit(t, "t");
  DigitCursor cursor(t, b);
  std::vector<Symbol> out(static_cast<std::size_t>(count));
  for (auto& d : out) d = static_cast<Symbol>(cursor.next());
  return out;
}

int lcp(double s, double t, int b, int cap) {
  require_unit(s, "s");
  require_unit(t, "t");
  if (b < 2) throw ArgumentError("b must be at least 2");
  DigitCursor ds(s, b), dt(t, b);
  for (int i = 0; i < cap; ++i) {
    if (ds.next() != dt.next()) return i;
  }
  return kInfiniteDepth;
}

double cov_uniform(double s, double t, int b) {
  const double bm1sq = (b - 1.0) * (b - 1.0);
  return b / bm1sq - (b + 1.0) / bm1sq * inverse_power(b, lcp(s, t, b));
}

double metric_db(double s, double t, int b) { return inverse_power(b, lcp(s, t, b)); }

double metric_d(double s, double t, int b) {
  return std::sqrt(2.0 * (b + 1.0)) / (b - 1.0) * std::sqrt(metric_db(s, t, b));
}

SkewPath skew_path(double t, double p, std::size_t depth) {
  require_unit(t, "t");
  require_p(p);
  SkewPath path;
  path.p = p;
  path.digits.reserve(depth);
  path.remainders.reserve(depth + 1);
  path.remainders.push_back(t);
  SkewCursor cursor(t, p);
  for (std::size_t k = 0; k < depth; ++k) {
    path.digits.push_back(cursor.next());
    path.remainders.push_back(cursor.remainder());
  }
  return path;
}

int r_index(double s, double t, double p, int cap) {
  require_unit(s, "s");
  require_unit(t, "t");
  require_p(p);
  SkewCursor cs(s, p), ct(t, p);
  for (int k = 0; k < cap; ++k) {
    if (cs.next() != ct.next()) return k;
  }
  return kInfiniteDepth;
}

int cov_asyb_depth(double p, double tol) {
  require_p(p);
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const double pv = std::max(p, 1.0 - p);
  const double target = tol * (1.0 - pv) * (1.0 - pv);
  const int depth = static_cast<int>(std::ceil(std::log(target) / std::log(pv)));
  return std::max(depth, 1);
}

double cov_asyb(double s, double t, double p, double tol) {
  const int depth = cov_asyb_depth(p, tol);
  const int r = r_index(s, t, p, depth);
  const int terms = r == kInfiniteDepth ? depth : r;

  SkewCursor cursor(t, p);
  double product = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const int g = cursor.next();
    const double here = g == 1 ? p : 1.0 - p;
    const double other = g == 1 ? 1.0 - p : p;
    product *= here;
    sum += product / other;
  }
  return r == kInfiniteDepth ? sum : sum - product;
}

double mean_asyb(double t, double p) {
  require_p(p);
  return (2.0 * p - 1.0) / (p * (1.0 - p)) * t + 1.0 / p;
}

Matrix2 binary_transition(const MarkovModel& model) {
  if (model.alphabet_size() != 2) {
    throw ArgumentError("operation defined for b = 2 only, model has b = " +
                        std::to_string(model.alphabet_size()));
  }
  return {{{model.p(0, 0), model.p(0, 1)}, {model.p(1, 0), model.p(1, 1)}}};
}

// ---------------------------------------------------------------------------
// Breakpoint tables

MeanFunctionTable MeanFunctionTable::build(const Matrix2& P, int start_state, int depth) {
  if (start_state != 0 && start_state != 1) throw ArgumentError("start state must be 0 or 1");
  if (depth < 1) throw ArgumentError("table depth must be at least 1");
  if (depth > kMaxDepth) {
    throw ResourceError("breakpoint table of depth " + std::to_string(depth) +
                        " needs 2^" + std::to_string(depth) +
                        " points per level; the budget allows depth " +
                        std::to_string(kMaxDepth));
  }
  MeanFunctionTable table;
  table.P_ = P;
  table.start_state_ = start_state;
  table.p_max_ = std::max({P[0][0], P[0][1], P[1][0], P[1][1]});
  table.levels_.reserve(depth);
  table.levels_.push_back({0.0, P[start_state][0], 1.0});
  for (int n = 1; n < depth; ++n) {
    const auto& prev = table.levels_.back();
    std::vector<double> next(2 * (prev.size() - 1) + 1);
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (k % 2 == 0) {
        next[k] = prev[k / 2];
      } else {
        const auto& row = (k % 4 == 1) ? P[0] : P[1];
        next[k] = row[0] * prev[(k + 1) / 2] + row[1] * prev[(k - 1) / 2];
      }
    }
    table.levels_.push_back(std::move(next));
  }
  return table;
}

double MeanFunctionTable::interval_length(int n, double t) const {
  require_unit(t, "t");
  const auto pts = level(n);
  const std::size_t last = pts.size() - 2;
  auto it = std::upper_bound(pts.begin(), pts.end(), t);
  std::size_t k = std::min(static_cast<std::size_t>(it - pts.begin()) - 1, last);
  // Only t = 1 can land on a degenerate last interval; step back to the
  // closest interval of positive length.
  while (k > 0 && pts[k + 1] - pts[k] <= 0.0) --k;
  return pts[k + 1] - pts[k];
}

double MeanFunctionTable::truncated_mean(double t) const {
  double m = 1.0;
  for (int n = 1; n <= depth(); ++n) m += interval_length(n, t);
  return m;
}

double MeanFunctionTable::tail_bound() const noexcept {
  return std::pow(p_max_, depth() + 1) / (1.0 - p_max_);
}

// ---------------------------------------------------------------------------
// Mean functions by interval descent

namespace {

constexpr int kMaxDescentLevels = 1 << 20;
// Below this length split points are no longer resolvable from t in double
// precision; the discarded tail is at most kResolution * p_max / (1 - p_max).
constexpr double kResolution = 64.0 * std::numeric_limits<double>::epsilon();

enum class Side { right, left };

struct Descent {
  double sum = 0.0;  // sum of interval lengths over the visited levels
  std::uint64_t decisions = 0;
};

// Follows t down the recursive decomposition. The first split uses
// `first_p0`; each later split uses the row of the previous digit. On the
// right side intervals are [a, c); on the left side (a, c], which realizes the
// left-hand limit at breakpoints.
Descent descend(double t, double first_p0, double first_p1, const Matrix2& P,
                int levels, Side side) {
  Descent out;
  double a = 0.0;
  double len = 1.0;
  double p0 = first_p0;
  double p1 = first_p1;
  std::uint64_t fingerprint = 1469598103934665603ULL;
  for (int level = 0; level < levels && len >= kResolution; ++level) {
    const double x = a + p0 * len;
    bool left = side == Side::right ? (t < x) : (t <= x);
    if (left && p0 <= 0.0) left = false;
    if (!left && p1 <= 0.0) left = true;
    int digit;
    if (left) {
      len *= p0;
      digit = 0;
    } else {
      a = x;
      len *= p1;
      digit = 1;
    }
    out.sum += len;
    fingerprint = (fingerprint ^ static_cast<std::uint64_t>(digit)) * 1099511628211ULL;
    p0 = P[digit][0];
    p1 = P[digit][1];
  }
  out.decisions = fingerprint;
  return out;
}

MeanEvaluation evaluate(double t, double first_p0, double first_p1, const Matrix2& P,
                        double p_max, int extra_levels, double tol) {
  require_unit(t, "t");
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const int levels = mean_truncation_levels(p_max, tol);
  MeanEvaluation ev;
  ev.levels = levels;
  ev.tail_bound = std::pow(p_max, levels + 1) / (1.0 - p_max);
  const Descent right = descend(t, first_p0, first_p1, P, levels + extra_levels, Side::right);
  if (t > 0.0) {
    const Descent left = descend(t, first_p0, first_p1, P, levels + extra_levels, Side::left);
    ev.at_breakpoint = left.decisions != right.decisions;
    ev.value = 1.0 + 0.5 * (left.sum + right.sum);
  } else {
    ev.value = 1.0 + right.sum;
  }
  return ev;
}

}  // namespace

int mean_truncation_levels(double p_max, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  if (!(p_max > 0.0 && p_max < 1.0)) throw ArgumentError("p_max must lie in (0, 1)");
  // smallest N >= 1 with p_max^{N+1} / (1 - p_max) <= tol
  const double needed = std::log(tol * (1.0 - p_max)) / std::log(p_max) - 1.0;
  const double levels = std::max(1.0, std::ceil(needed));
  if (levels > kMaxDescentLevels) {
    throw ResourceError("tolerance " + std::to_string(tol) + " needs " +
                        std::to_string(levels) + " levels at p_max = " +
                        std::to_string(p_max) + ", beyond the evaluation budget");
  }
  return static_cast<int>(levels);
}

MeanEvaluation evaluate_mean(double t, const MarkovModel& model, double tol) {
  const Matrix2 P = binary_transition(model);
  const auto mu = model.initial();
  // m_mu = 1 + mu_x * (m_x - 1) + ... : one split by mu, then N levels of P.
  return evaluate(t, mu[0], mu[1], P, model.max_transition(), 1, tol);
}

double mean_markov(double t, const MarkovModel& model, double tol) {
  return evaluate_mean(t, model, tol).value;
}

double mean_start_state(double t, const MarkovModel& model, int start_state, double tol) {
  if (start_state != 0 && start_state != 1) throw ArgumentError("start state must be 0 or 1");
  const Matrix2 P = binary_transition(model);
  return evaluate(t, P[start_state][0], P[start_state][1], P, model.max_transition(), 0, tol)
      .value;
}

double breakpoint_distance(double t, const MarkovModel& model, int depth) {
  require_unit(t, "t");
  const Matrix2 P = binary_transition(model);
  double a = 0.0;
  double len = 1.0;
  double p0 = model.initial()[0];
  double p1 = model.initial()[1];
  double best = std::numeric_limits<double>::infinity();
  for (int level = 0; level < depth; ++level) {
    const double x = a + p0 * len;
    if (x > 0.0 && x < 1.0) best = std::min(best, std::abs(t - x));
    int digit = (t < x && p0 > 0.0) || p1 <= 0.0 ? 0 : 1;
    if (digit == 0) {
      len *= p0;
    } else {
      a = x;
      len *= p1;
    }
    p0 = P[digit][0];
    p1 = P[digit][1];
  }
  return best;
}

std::array<double, 2> kappas(const Matrix2& P) {
  const double p00 = P[0][0], p01 = P[0][1], p10 = P[1][0], p11 = P[1][1];
  const double s = p00 + p11;
  const double denom = 2.0 * s * (1.0 + p00 * p11) - 2.0 * s * s;
  if (std::abs(denom) < 1e-300) {
    throw DegeneracyError("kappa denominator vanishes for p00 = " + std::to_string(p00) +
                          ", p11 = " + std::to_string(p11));
  }
  return {(1.0 + p01 * p01 - p11 * p11) / denom, (1.0 + p10 * p10 - p00 * p00) / denom};
}

KappaConstants kappa_mu(const MarkovModel& model) {
  const auto [k0, k1] = kappas(binary_transition(model));
  const double mu0 = model.initial()[0];
  return {k0, k1, mu0 * mu0 * k0 + (1.0 - mu0) * (1.0 - mu0) * k1 + 1.0};
}

}  // namespace radsel
