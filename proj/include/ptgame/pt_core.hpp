#pragma once

// Prospect-theoretic probability weighting, value transforms, and
// distortion-aware expectations over a finite outcome distribution.

#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace ptgame {

/// Finite-support random outcome: strictly increasing support values with
/// probabilities summing to one (within 1e-12).
class OutcomeDistribution {
 public:
  OutcomeDistribution(std::vector<double> support, std::vector<double> probs);

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }

  // Some scenarios additionally need 0 < xi_1.
  bool all_positive() const noexcept { return support_.front() > 0.0; }

  friend bool operator==(const OutcomeDistribution&, const OutcomeDistribution&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

/// Monotone map pi: [0,1] -> [0,1] with pi(0) = 0 and pi(1) = 1.
class WeightingFunction {
 public:
  struct Identity {
    bool operator==(const Identity&) const = default;
  };
  /// pi(p) = exp(-(-ln p)^alpha).
  struct Prelec {
    double alpha;
    bool operator==(const Prelec&) const = default;
  };
  /// Piecewise-linear interpolation through (p, pi(p)) knots.
  struct Tabulated {
    std::vector<std::pair<double, double>> knots;
    bool operator==(const Tabulated&) const = default;
  };
  using Kind = std::variant<Identity, Prelec, Tabulated>;

  WeightingFunction() = default;
  explicit WeightingFunction(Kind kind);

  static WeightingFunction identity() { return WeightingFunction{Identity{}}; }
  static WeightingFunction prelec(double alpha) { return WeightingFunction{Prelec{alpha}}; }
  static WeightingFunction tabulated(std::vector<std::pair<double, double>> knots) {
    return WeightingFunction{Tabulated{std::move(knots)}};
  }

  double operator()(double p) const;
  const Kind& kind() const noexcept { return kind_; }
  bool is_identity() const noexcept { return std::holds_alternative<Identity>(kind_); }

  friend bool operator==(const WeightingFunction&, const WeightingFunction&) = default;

 private:
  Kind kind_{Identity{}};
};

/// One segment of a piecewise value function. On [start, next start) the
/// value is offset + f(x - start), where f is the segment's form. The first
/// segment also covers everything to its left.
struct ValueSegment {
  enum class Form { linear, log1p, exp_saturating };
  double start = 0.0;
  double offset = 0.0;
  Form form = Form::linear;
  // linear: slope = a. log1p: a * ln(1 + u). exp_saturating: a * (1 - e^{-b u}).
  double a = 1.0;
  double b = 0.0;

  bool operator==(const ValueSegment&) const = default;
};

/// Monotone increasing transform V of rewards into perceived value.
class ValueFunction {
 public:
  struct Identity {
    bool operator==(const Identity&) const = default;
  };
  struct Linear {
    double slope;
    bool operator==(const Linear&) const = default;
  };
  /// ln(1 + x) for gains, x for losses.
  struct LogGainLinearLoss {
    bool operator==(const LogGainLinearLoss&) const = default;
  };
  /// c * (1 - e^{-k x}).
  struct ExpSaturating {
    double c;
    double k;
    bool operator==(const ExpSaturating&) const = default;
  };
  struct Piecewise {
    std::vector<ValueSegment> segments;
    bool operator==(const Piecewise&) const = default;
  };
  using Kind = std::variant<Identity, Linear, LogGainLinearLoss, ExpSaturating, Piecewise>;

  ValueFunction() = default;
  explicit ValueFunction(Kind kind);

  static ValueFunction identity() { return ValueFunction{Identity{}}; }
  static ValueFunction linear(double slope) { return ValueFunction{Linear{slope}}; }
  static ValueFunction log_gain_linear_loss() { return ValueFunction{LogGainLinearLoss{}}; }
  static ValueFunction exp_saturating(double c, double k) { return ValueFunction{ExpSaturating{c, k}}; }
  static ValueFunction piecewise(std::vector<ValueSegment> segments) {
    return ValueFunction{Piecewise{std::move(segments)}};
  }

  /// Throws DomainError when x lies outside the function's domain.
  double operator()(double x) const;
  double derivative(double x) const;
  const Kind& kind() const noexcept { return kind_; }

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

 private:
  Kind kind_{Identity{}};
};

/// Individual reward R(x, xi) as a function of one strategy coordinate and
/// the random outcome.
class RewardFunction {
 public:
  struct AffineScaled {  // (x - d) * xi
    double d;
    bool operator==(const AffineScaled&) const = default;
  };
  struct ScaleShift {  // x * xi - d
    double d;
    bool operator==(const ScaleShift&) const = default;
  };
  struct ExpOfProduct {  // exp(-k x xi)
    double k;
    bool operator==(const ExpOfProduct&) const = default;
  };
  struct ExpPlain {  // exp(-k x)
    double k;
    bool operator==(const ExpPlain&) const = default;
  };
  struct Linear {  // c * x
    double c;
    bool operator==(const Linear&) const = default;
  };
  using Kind = std::variant<AffineScaled, ScaleShift, ExpOfProduct, ExpPlain, Linear>;

  RewardFunction() : kind_(Linear{1.0}) {}
  explicit RewardFunction(Kind kind) : kind_(std::move(kind)) {}

  static RewardFunction affine_scaled(double d) { return RewardFunction{AffineScaled{d}}; }
  static RewardFunction scale_shift(double d) { return RewardFunction{ScaleShift{d}}; }
  static RewardFunction exp_of_product(double k) { return RewardFunction{ExpOfProduct{k}}; }
  static RewardFunction exp_plain(double k) { return RewardFunction{ExpPlain{k}}; }
  static RewardFunction linear(double c) { return RewardFunction{Linear{c}}; }

  double operator()(double x, double xi) const;
  /// Partial derivative in x.
  double derivative(double x, double xi) const;
  const Kind& kind() const noexcept { return kind_; }

  friend bool operator==(const RewardFunction&, const RewardFunction&) = default;

 private:
  Kind kind_;
};

/// Rewards ordered by increasing attractiveness, paired with a distribution.
struct Prospect {
  Prospect(std::vector<double> rewards, OutcomeDistribution dist);

  std::vector<double> rewards;
  OutcomeDistribution dist;
};

/// Rank-dependent distortion of a probability vector taken in the given
/// order: q~_j = pi(q_1 + .. + q_j) - pi(q_1 + .. + q_{j-1}).
std::vector<double> distort_cumulative(std::span<const double> probs, const WeightingFunction& w);

std::vector<double> distort_probabilities(const OutcomeDistribution& dist, const WeightingFunction& w);

/// sum_j q~_j V(R_j).
double pt_value(const Prospect& p, const ValueFunction& v, const WeightingFunction& w);

/// Distorted expectation of V(R(x, xi)). The induced rewards are sorted
/// (stably, ascending) together with their probabilities before weighting.
double pt_expected_reward(const ValueFunction& v, const RewardFunction& r, double x,
                          const OutcomeDistribution& dist, const WeightingFunction& w);

/// d/dx of pt_expected_reward, holding the sorted order fixed at x.
double pt_expected_reward_derivative(const ValueFunction& v, const RewardFunction& r, double x,
                                     const OutcomeDistribution& dist, const WeightingFunction& w);

}  // namespace ptgame
