#pragma once

// Brute-force oracles: best-response gaps, grid argmax of the potential, the
// regularization bound on epsilon, and suboptimality certificates for IMM.

#include <cstddef>
#include <string>
#include <vector>

#include "ptgame/game_model.hpp"
#include "ptgame/solvers.hpp"

namespace ptgame {

inline constexpr double kDefaultBudget = 1e7;

struct BoundComparison {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

struct GridArgmax {
  JointStrategy point;  // refined
  double value = 0.0;
  /// Grid nodes whose potential is within tie_tol of the grid maximum.
  std::vector<JointStrategy> ties;
  double grid_max = 0.0;
  std::size_t evaluations = 0;
  /// Largest grid spacing over all coordinates.
  double cell = 0.0;
};

/// Per-coordinate nodes used by the grid oracles: lattice points for lattice
/// blocks, `resolution` uniform points otherwise.
std::vector<std::vector<double>> grid_axes(const StrategySpace& space, std::size_t resolution);

/// Number of grid nodes, saturating at infinity.
double grid_size(const StrategySpace& space, std::size_t resolution);

/// gap_i = max_y J_i(y, x_-i) - J_i(x), from a uniform grid over block i
/// plus golden-section refinement around the grid best, clipped at 0.
std::vector<double> br_gap(const GameSpec& game, const JointStrategy& x, std::size_t resolution);

/// Exhaustive evaluation of the potential over the product grid. Throws
/// BudgetExceeded when the grid is larger than `budget` evaluations.
GridArgmax grid_potential_argmax(const GameSpec& game, std::size_t resolution, double budget = kDefaultBudget,
                                 double tie_tol = 1e-9);

struct RegularizationBound {
  JointStrategy x_dagger;
  double h_dagger = 0.0;
  double epsilon = 0.0;
  JointStrategy x_lambda;
  std::vector<double> gaps;  // br_gap of x_lambda in the unregularized game
  std::size_t gamma0_size = 0;
  double tolerance = 0.0;
  std::vector<BoundComparison> bounds;
  bool satisfied() const;
};

/// Compares the regularized maximizer with the set of unregularized
/// maximizers. `game0` must have lambda = 0; the regularized game is
/// game0 with regularizer H and weight lambda.
RegularizationBound regularization_bound_check(const GameSpec& game0, const Regularizer& H, double lambda, std::size_t resolution,
                                double budget = kDefaultBudget);

struct RateRow {
  std::size_t n = 0;
  double suboptimality = 0.0;
  double bound_unsquared = 0.0;
  double bound_squared = 0.0;
  bool ok_unsquared = false;
  bool ok_squared = false;
};

struct RateCertificate {
  double phi_star = 0.0;
  double distance = 0.0;  // from x(0) to the grid maximizer set
  double prox_weight = 0.0;
  std::vector<RateRow> rows;
  bool squared_ok() const;
  bool unsquared_ok() const;
};

/// Per-iteration suboptimality of an IMM trajectory against lambda D / (2n)
/// and lambda D^2 / (2n). Iterations past the end of the trajectory reuse its
/// final point. `horizon` = 0 means the trajectory length. When phi_star and
/// maximizers are known, pass them to skip the grid search.
RateCertificate imm_rate_certificate(const Trajectory& traj, const GameSpec& game, double prox_weight,
                                     std::size_t resolution, std::size_t horizon = 0,
                                     double budget = kDefaultBudget);
RateCertificate imm_rate_certificate(const Trajectory& traj, const GameSpec& game, double prox_weight,
                                     double phi_star, const std::vector<JointStrategy>& maximizers,
                                     std::size_t horizon = 0);

struct CertificationReport {
  JointStrategy point;
  std::vector<double> gaps;
  double epsilon = 0.0;
  double potential = 0.0;
  bool has_argmax = false;
  GridArgmax argmax;
  std::vector<BoundComparison> bounds;
  std::size_t resolution = 0;
};

}  // namespace ptgame
