#pragma once

// Learning dynamics: projected (sub)gradient ascent with optional Nesterov
// momentum, cyclic iterative best response, the proximal minorize-maximize
// iteration (IMM) and its cyclic per-agent variant (IMMd).

#include <cstdint>
#include <string>
#include <vector>

#include "ptgame/game_model.hpp"

namespace ptgame {

enum class StepSchedule { constant, diminishing };

struct SolverConfig {
  std::size_t max_iter = 1000;
  /// Stop when the infinity-norm displacement of one iteration is <= tol.
  double tol = 1e-8;
  StepSchedule step = StepSchedule::constant;
  /// Constant step, or eta / sqrt(k) for the diminishing schedule.
  double eta = 0.1;
  bool accelerate = false;
  /// Weight of the proximal term lambda_prox * ||x - x(n)||^2.
  double prox_weight = 0.1;
  double inner_tol = 1e-10;
  std::size_t max_inner_iter = 500;
  /// Number of seeded sample paths for stochastic subgradient runs.
  std::size_t averaging = 1;
  std::uint64_t seed = 0;
  /// Agent that moves first in each IBR sweep / IMMd cycle.
  std::size_t first_agent = 0;
  /// Coarse scan resolution per coordinate inside best-response searches.
  std::size_t grid_points = 64;

  bool operator==(const SolverConfig&) const = default;
};

/// Throws ValidationError naming the offending field.
void validate(const SolverConfig& cfg);

enum class Status { converged, max_iter, error };
const char* to_string(Status s);

struct Iterate {
  std::size_t iter = 0;
  JointStrategy x;
  double potential = 0.0;
  std::vector<double> utilities;
  double displacement = 0.0;
  double wall_ms = 0.0;
};

/// One state relay through the IMMd coordinator.
struct RelayEvent {
  std::size_t cycle = 0;
  std::size_t agent = 0;
  std::vector<double> before;
  std::vector<double> after;
};

struct Trajectory {
  std::vector<Iterate> iterates;  // entry 0 is the initial state
  Status status = Status::max_iter;
  std::string message;
  /// Every sample path when averaging > 1 (paths[0] equals iterates).
  std::vector<std::vector<Iterate>> paths;
  /// Pointwise mean of the sample paths, per iteration index.
  std::vector<Iterate> mean_path;
  std::vector<RelayEvent> relay_log;

  const Iterate& last() const { return iterates.back(); }
};

/// What argmax_block maximizes over an agent's block.
struct BlockObjective {
  enum class Kind { utility, surrogate };
  Kind kind = Kind::utility;
  JointStrategy anchor;      // surrogate only
  double prox_weight = 0.0;  // surrogate only

  static BlockObjective utility() { return {}; }
  static BlockObjective surrogate(JointStrategy anchor, double prox_weight) {
    return {Kind::surrogate, std::move(anchor), prox_weight};
  }
};

/// Best response of agent i over its block with the other agents fixed.
/// Continuous blocks use a coarse scan followed by golden-section search per
/// coordinate (cyclic passes for multi-dimensional blocks). Lattice blocks
/// evaluate {stay, +-step along each axis}. Ties go to the candidate nearest
/// the current block value, then the lexicographically smallest.
std::vector<double> argmax_block(const GameSpec& game, std::size_t i, const JointStrategy& x,
                                 const BlockObjective& objective, const SolverConfig& cfg);

/// Simultaneous projected (sub)gradient ascent on the agents' utilities.
/// On lattice spaces each agent takes one unit step along the axis of its
/// largest gradient component.
Trajectory solve_gradient(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg);

Trajectory solve_ibr(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg);

struct ProxStep {
  JointStrategy x;
  bool ok = true;
  std::size_t inner_iterations = 0;
  std::string message;
};

/// One IMM step: argmax over the joint space of
/// Phi(x) - prox_weight * ||x - anchor||^2. Never returns a point whose
/// surrogate value is below the anchor's.
ProxStep prox_step(const GameSpec& game, const JointStrategy& anchor, const SolverConfig& cfg);

Trajectory solve_imm(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg);

/// In-process relay between IMMd agents; holds the shared state and logs
/// every update it forwards.
class Coordinator {
 public:
  explicit Coordinator(JointStrategy initial) : state_(std::move(initial)) {}

  const JointStrategy& state() const noexcept { return state_; }
  void relay(std::size_t cycle, std::size_t agent, std::size_t offset, const std::vector<double>& block);
  const std::vector<RelayEvent>& log() const noexcept { return log_; }
  std::vector<RelayEvent> take_log() { return std::move(log_); }

 private:
  JointStrategy state_;
  std::vector<RelayEvent> log_;
};

Trajectory solve_immd(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg);

}  // namespace ptgame
