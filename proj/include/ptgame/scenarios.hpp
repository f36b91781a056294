#pragma once

// Built-in scenarios and the incentive-steering loop for the energy game.

#include <map>
#include <string>
#include <vector>

#include "ptgame/game_model.hpp"
#include "ptgame/solvers.hpp"

namespace ptgame {

struct Acceptance {
  /// Expected limit points (empty when the scenario has none to check).
  std::vector<JointStrategy> targets;
  double tolerance = 1e-3;
  std::string note;
  bool operator==(const Acceptance&) const = default;
};

struct CertificationSettings {
  std::size_t resolution = 101;
  double budget = 1e7;
  bool operator==(const CertificationSettings&) const = default;
};

struct ScenarioDef {
  std::string name;
  std::string description;
  GameSpec game;
  std::vector<JointStrategy> initial_states;
  /// Keyed by algorithm name: ga, aga, sga, ibr, imm, immd.
  std::map<std::string, SolverConfig> solver_defaults;
  CertificationSettings certification;
  Acceptance acceptance;

  /// Configured defaults for `algo`, or SolverConfig{} when none are set.
  SolverConfig solver_config(const std::string& algo) const;
  /// Throws ValidationError when an initial state is infeasible.
  void validate() const;
  friend bool operator==(const ScenarioDef&, const ScenarioDef&) = default;
};

/// Two agents, shared quadratic benefit around x1 + x2 = 2, PT-perceived
/// rewards x_i xi - d_i.
ScenarioDef build_smooth_two_player(double d1 = 1.0, double d2 = 2.0);

/// Team game with potential 5 - |x1 + x2| - lambda (x1^2 + x2^2).
ScenarioDef build_team_nonsmooth(double lambda = 0.1);

/// Energy community with per-unit incentives lambda_i x_i.
ScenarioDef build_energy_community(double incentive1 = 0.0, double incentive2 = 0.0);

/// Sign convention of the y-exponential in agent 2's cost. `printed` uses
/// exp(+k y xi), which is unbounded on large boxes.
enum class ExponentSign { corrected, printed };

/// Three agents on a unit lattice in [0, box_hi]^2.
ScenarioDef build_grid_rendezvous(ExponentSign sign = ExponentSign::corrected, double box_hi = 30.0);

std::vector<std::string> builtin_names();
/// Throws ValidationError for unknown names.
ScenarioDef builtin(const std::string& name);

struct SteeringConfig {
  double tau = -4.0;
  double eta = 0.05;
  double delta = 1e-3;
  double lambda_min = -10.0;
  double lambda_max = 10.0;
  std::size_t max_outer = 2000;
  /// Stop once |J - tau| <= tol and the step moved x by at most x_tol.
  double tol = 1e-3;
  double x_tol = 1e-4;
  std::size_t saturation_limit = 50;
};

void validate(const SteeringConfig& cfg);

struct SteeringStep {
  std::size_t k = 0;
  std::vector<double> lambda;
  JointStrategy x;
  double collective = 0.0;
  double error = 0.0;
};

enum class SteeringStatus { converged, max_iter, unreachable, error };
const char* to_string(SteeringStatus s);

struct SteeringTrace {
  std::vector<SteeringStep> steps;
  SteeringStatus status = SteeringStatus::max_iter;
  std::string message;
};

/// Alternates one IMM step with a finite-difference gradient step of the
/// incentives on (J(x) - tau)^2. Requires a linear_incentive regularizer.
/// `x0` defaults to the scenario's first initial state.
SteeringTrace steer_collective(const ScenarioDef& scenario, const SteeringConfig& steer, const SolverConfig& cfg,
                               const JointStrategy& x0 = {});

}  // namespace ptgame
