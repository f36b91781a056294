#pragma once

// The regularized coordination game: strategy boxes, collective utility,
// regularizer, and prospect-theoretic individual terms, with utility,
// weighted-potential and supergradient evaluation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ptgame/pt_core.hpp"
#include "ptgame/rng.hpp"

namespace ptgame {

/// A point of the joint strategy space: all agents' coordinates concatenated
/// in agent order. Block boundaries come from the owning StrategySpace.
using JointStrategy = std::vector<double>;

/// Grid restriction for a block: coordinates take values origin + k * step.
struct Lattice {
  double origin = 0.0;
  double step = 1.0;
  bool operator==(const Lattice&) const = default;
};

/// One agent's strategy set: a box, optionally intersected with a lattice.
struct StrategyBlock {
  std::vector<double> lo;
  std::vector<double> hi;
  std::optional<Lattice> lattice;

  std::size_t dim() const noexcept { return lo.size(); }
  bool operator==(const StrategyBlock&) const = default;
};

class StrategySpace {
 public:
  StrategySpace() = default;
  explicit StrategySpace(std::vector<StrategyBlock> blocks);

  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  std::size_t dimension() const noexcept { return lo_.size(); }
  const StrategyBlock& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<StrategyBlock>& blocks() const noexcept { return blocks_; }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  std::size_t block_dim(std::size_t i) const { return blocks_.at(i).dim(); }

  // Flat per-coordinate views.
  double lo(std::size_t k) const { return lo_[k]; }
  double hi(std::size_t k) const { return hi_[k]; }
  const std::vector<double>& lower() const noexcept { return lo_; }
  const std::vector<double>& upper() const noexcept { return hi_; }
  /// Block owning flat coordinate k.
  std::size_t owner(std::size_t k) const { return owner_.at(k); }
  const std::optional<Lattice>& lattice_of(std::size_t k) const { return blocks_[owner_[k]].lattice; }

  bool has_lattice() const noexcept;
  bool all_lattice() const noexcept;

  bool contains(std::span<const double> x, double tol = 1e-12) const;
  bool lattice_feasible(std::span<const double> x, double tol = 1e-9) const;

  friend bool operator==(const StrategySpace& a, const StrategySpace& b) { return a.blocks_ == b.blocks_; }

 private:
  std::vector<StrategyBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Clamp to the box, then round lattice coordinates to the nearest feasible
/// lattice point (ties toward lo). Throws ValidationError on dimension
/// mismatch.
JointStrategy project(const StrategySpace& space, std::span<const double> x);

// ---------------------------------------------------------------------------
// Collective utility: a sum of concave catalog terms. Coordinates are flat
// indices into the joint strategy.

namespace collective {

struct Constant {
  double c = 0.0;
  bool operator==(const Constant&) const = default;
};
/// -coef * (sum of coords - target)^2
struct NegQuadraticToTarget {
  double coef = 1.0;
  double target = 0.0;
  std::vector<std::size_t> coords;
  bool operator==(const NegQuadraticToTarget&) const = default;
};
/// -sum_k (x_k - d)^2 over coords (all coordinates when empty).
struct NegSqDeviation {
  double d = 0.0;
  std::vector<std::size_t> coords;
  bool operator==(const NegSqDeviation&) const = default;
};
/// -sum_{i} sum_{j<i} ||w_i - w_j||_1 over agent blocks of equal dimension.
struct NegPairwiseL1 {
  bool operator==(const NegPairwiseL1&) const = default;
};
/// -|sum of coords|
struct NegAbsSum {
  std::vector<std::size_t> coords;
  bool operator==(const NegAbsSum&) const = default;
};

using Term = std::variant<Constant, NegQuadraticToTarget, NegSqDeviation, NegPairwiseL1, NegAbsSum>;

}  // namespace collective

using CollectiveUtility = std::vector<collective::Term>;

// ---------------------------------------------------------------------------
// Regularizer H >= 0.

namespace regularizer {

/// sum_k w_k (x_k - c_k)^2 over all coordinates.
struct WeightedSqNorm {
  std::vector<double> center;
  std::vector<double> weights;
  bool operator==(const WeightedSqNorm&) const = default;
};
/// sum_i coef_i * x_{coord_i}; not strictly convex.
struct LinearIncentive {
  std::vector<double> coefficients;
  std::vector<std::size_t> coords;
  bool operator==(const LinearIncentive&) const = default;
};

using Term = std::variant<WeightedSqNorm, LinearIncentive>;

}  // namespace regularizer

using Regularizer = std::vector<regularizer::Term>;

// ---------------------------------------------------------------------------
// Agents.

/// sign * E~[V(R(x_coord, xi))]; sign = -1 models a perceived cost.
struct IndividualTerm {
  int sign = 1;
  ValueFunction value;
  RewardFunction reward;
  std::size_t coordinate = 0;  // index within the agent's block
  bool operator==(const IndividualTerm&) const = default;
};

struct AgentSpec {
  double weight = 1.0;
  std::vector<IndividualTerm> terms;
  double constant = 0.0;
  bool operator==(const AgentSpec&) const = default;
};

/// Nonsmooth part of the potential: contributes -weight * |a^T x|.
struct Kink {
  double weight = 1.0;
  std::vector<std::pair<std::size_t, double>> coeffs;
};

/// The game G^lambda. Immutable after construction; the constructor
/// validates structure and throws ValidationError, while soft findings
/// (weight ordering, numerically detected nonconcavity) land in warnings().
class GameSpec {
 public:
  GameSpec(StrategySpace space, std::vector<AgentSpec> agents, CollectiveUtility collective,
           Regularizer regularizer, double lambda, OutcomeDistribution dist,
           WeightingFunction weighting = WeightingFunction::identity());

  std::size_t num_agents() const noexcept { return agents_.size(); }
  std::size_t dimension() const noexcept { return space_.dimension(); }
  const StrategySpace& space() const noexcept { return space_; }
  const std::vector<AgentSpec>& agents() const noexcept { return agents_; }
  const AgentSpec& agent(std::size_t i) const { return agents_.at(i); }
  const CollectiveUtility& collective() const noexcept { return collective_; }
  const Regularizer& regularizer() const noexcept { return regularizer_; }
  double lambda() const noexcept { return lambda_; }
  const OutcomeDistribution& distribution() const noexcept { return dist_; }
  const WeightingFunction& weighting() const noexcept { return weighting_; }
  const std::vector<Kink>& kinks() const noexcept { return kinks_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// Largest agent weight (a_1 when agents are sorted).
  double max_weight() const noexcept;

  /// Same game with a different lambda and/or regularizer.
  GameSpec with_lambda(double lambda) const;
  GameSpec with_regularizer(Regularizer reg, double lambda) const;

  // Components.
  double collective_value(std::span<const double> x) const;
  double regularizer_value(std::span<const double> x) const;
  double individual_value(std::size_t i, std::span<const double> x) const;

  double utility(std::size_t i, std::span<const double> x) const;
  double potential(std::span<const double> x) const;
  /// Potential without its kink terms.
  double smooth_potential(std::span<const double> x) const;

  /// One element of each kink's subdifferential slope: sign(a^T x), or a
  /// uniform draw on [-1, 1] when exactly on the kink.
  std::vector<double> kink_slopes(std::span<const double> x, Rng& rng) const;
  /// True when some kink is exactly active at x.
  bool on_kink(std::span<const double> x) const;

  /// Supergradients given chosen kink slopes.
  std::vector<double> smooth_potential_gradient(std::span<const double> x) const;
  std::vector<double> potential_gradient(std::span<const double> x, std::span<const double> slopes) const;
  /// Gradient of agent i's utility over agent i's block.
  std::vector<double> utility_gradient(std::size_t i, std::span<const double> x,
                                       std::span<const double> slopes) const;

  friend bool operator==(const GameSpec&, const GameSpec&);

 private:
  void validate();
  void build_kinks();
  void check_term_concavity();

  std::vector<double> collective_smooth_gradient(std::span<const double> x) const;
  std::vector<double> regularizer_gradient(std::span<const double> x) const;
  double individual_derivative(std::size_t i, std::size_t local, std::span<const double> x) const;
  double collective_smooth_value(std::span<const double> x) const;
  double kink_penalty(std::span<const double> x) const;

  StrategySpace space_;
  std::vector<AgentSpec> agents_;
  CollectiveUtility collective_;
  Regularizer regularizer_;
  double lambda_ = 0.0;
  OutcomeDistribution dist_;
  WeightingFunction weighting_;
  std::vector<Kink> kinks_;
  std::vector<std::string> warnings_;
};

double utility(const GameSpec& game, std::size_t i, std::span<const double> x);
double potential(const GameSpec& game, std::span<const double> x);
std::vector<double> subgrad_potential(const GameSpec& game, std::span<const double> x, Rng& rng);
std::vector<double> subgrad_utility(const GameSpec& game, std::size_t i, std::span<const double> x, Rng& rng);

/// Max over random unilateral deviations of
/// |J_i(x) - J_i(x~) - a_i (Phi(x) - Phi(x~))|.
double verify_weighted_potential(const GameSpec& game, std::size_t samples, Rng& rng);

/// Uniform random point of the strategy space (lattice-feasible when a
/// lattice is active).
JointStrategy random_point(const StrategySpace& space, Rng& rng);

}  // namespace ptgame
