#include "ptgame/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "ptgame/error.hpp"

namespace ptgame {

namespace {

StrategyBlock box1(double lo, double hi) { return StrategyBlock{{lo}, {hi}, std::nullopt}; }

regularizer::WeightedSqNorm unit_sq_norm(std::size_t dim) {
  return regularizer::WeightedSqNorm{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

}  // namespace

SolverConfig ScenarioDef::solver_config(const std::string& algo) const {
  auto it = solver_defaults.find(algo);
  return it == solver_defaults.end() ? SolverConfig{} : it->second;
}

void ScenarioDef::validate() const {
  const auto& space = game.space();
  for (std::size_t s = 0; s < initial_states.size(); ++s) {
    const std::string field = "initial_states[" + std::to_string(s) + "]";
    if (initial_states[s].size() != space.dimension()) {
      throw ValidationError("expected " + std::to_string(space.dimension()) + " coordinates", field);
    }
    if (!space.contains(initial_states[s])) throw ValidationError("outside the strategy box", field);
    if (!space.lattice_feasible(initial_states[s])) throw ValidationError("not on the lattice", field);
  }
  for (const auto& [algo, cfg] : solver_defaults) {
    try {
      ptgame::validate(cfg);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), "solver_defaults." + algo);
    }
  }
  if (certification.resolution < 2) throw ValidationError("must be at least 2", "certification.resolution");
  if (!(certification.budget >= 1.0)) throw ValidationError("must be at least 1", "certification.budget");
}

ScenarioDef build_smooth_two_player(double d1, double d2) {
  StrategySpace space({box1(-10.0, 10.0), box1(-10.0, 10.0)});
  std::vector<AgentSpec> agents(2);
  agents[0].terms.push_back({1, ValueFunction::log_gain_linear_loss(), RewardFunction::scale_shift(d1), 0});
  agents[1].terms.push_back({1, ValueFunction::identity(), RewardFunction::scale_shift(d2), 0});
  CollectiveUtility coll{collective::Constant{10.0}, collective::NegQuadraticToTarget{1.0, 2.0, {0, 1}}};
  GameSpec game(std::move(space), std::move(agents), std::move(coll), {unit_sq_norm(2)}, 0.1,
                OutcomeDistribution({2.0, 10.0}, {0.8, 0.2}));

  std::map<std::string, SolverConfig> defaults;
  SolverConfig base;
  base.max_iter = 2000;
  base.tol = 1e-10;
  for (const char* algo : {"ga", "aga", "ibr", "imm", "immd"}) defaults[algo] = base;
  defaults["ga"].eta = 0.05;
  defaults["aga"].eta = 0.05;
  defaults["aga"].accelerate = true;
  defaults["imm"].prox_weight = 0.1;
  defaults["immd"].prox_weight = 0.1;

  return ScenarioDef{"smooth_two_player",
                     "Smooth two-agent game with a shared quadratic benefit and perceived rewards x_i xi - d_i.",
                     std::move(game),
                     {{5.0, 5.0}},
                     std::move(defaults),
                     CertificationSettings{401, 1e7},
                     Acceptance{{}, 1e-4, "unique equilibrium; compare iterations to reach error 1e-4"}};
}

ScenarioDef build_team_nonsmooth(double lambda) {
  StrategySpace space({box1(-100.0, 100.0), box1(-100.0, 100.0)});
  std::vector<AgentSpec> agents(2);
  CollectiveUtility coll{collective::Constant{5.0}, collective::NegAbsSum{{0, 1}}};
  GameSpec game(std::move(space), std::move(agents), std::move(coll), {unit_sq_norm(2)}, lambda,
                OutcomeDistribution({1.0}, {1.0}));

  std::map<std::string, SolverConfig> defaults;
  SolverConfig base;
  base.max_iter = 500;
  base.tol = 1e-9;
  for (const char* algo : {"ga", "aga", "sga", "ibr", "imm", "immd"}) defaults[algo] = base;
  defaults["aga"].accelerate = true;
  defaults["sga"].averaging = 100;
  defaults["sga"].max_iter = 300;
  // Agent 2 responds first so that a start with agent 1 at 4 stays there.
  defaults["ibr"].first_agent = 1;
  defaults["ibr"].max_iter = 100;

  return ScenarioDef{"team_nonsmooth",
                     "Two-agent team game with potential 5 - |x1 + x2| - lambda (x1^2 + x2^2) on [-100, 100]^2.",
                     std::move(game),
                     {{2.0, 4.0}, {-4.0, -4.0}, {-5.0, 4.0}, {10.0, 5.0}, {10.0, -1.0}},
                     std::move(defaults),
                     CertificationSettings{201, 1e7},
                     Acceptance{{{0.0, 0.0}},
                                1e-3,
                                "potential maximizer (0,0) with value 5; best response from (4,0) stalls at the "
                                "Nash point (4,-4) with potential 1.8"}};
}

ScenarioDef build_energy_community(double incentive1, double incentive2) {
  StrategySpace space({box1(0.0, 20.0), box1(0.0, 20.0)});
  std::vector<AgentSpec> agents(2);
  agents[0].terms.push_back({1, ValueFunction::log_gain_linear_loss(), RewardFunction::affine_scaled(1.0), 0});
  agents[1].terms.push_back({1, ValueFunction::identity(), RewardFunction::affine_scaled(2.0), 0});
  CollectiveUtility coll{collective::NegSqDeviation{4.0, {}}};
  Regularizer reg{regularizer::LinearIncentive{{incentive1, incentive2}, {0, 1}}};
  GameSpec game(std::move(space), std::move(agents), std::move(coll), std::move(reg), 1.0,
                OutcomeDistribution({1.0, 5.0}, {0.2, 0.8}));

  std::map<std::string, SolverConfig> defaults;
  SolverConfig base;
  base.max_iter = 1000;
  base.tol = 1e-9;
  for (const char* algo : {"ga", "aga", "ibr", "imm", "immd"}) defaults[algo] = base;
  defaults["aga"].accelerate = true;

  return ScenarioDef{"energy_community",
                     "Energy community: collective benefit -sum (x_i - 4)^2, perceived rewards (x_i - d_i) xi, "
                     "per-unit incentives lambda_i x_i.",
                     std::move(game),
                     {{1.0, 1.0}},
                     std::move(defaults),
                     CertificationSettings{401, 1e7},
                     Acceptance{{}, 0.05, "steering targets tau in {-4, -4.5, -5}"}};
}

ScenarioDef build_grid_rendezvous(ExponentSign sign, double box_hi) {
  std::vector<StrategyBlock> blocks(3, StrategyBlock{{0.0, 0.0}, {box_hi, box_hi}, Lattice{0.0, 1.0}});
  StrategySpace space(std::move(blocks));

  std::vector<AgentSpec> agents(3);
  const double c1 = 4.0, c2 = 0.4, c3 = 1.0, k1 = 0.1, k2 = 0.3, k3 = 1.0, k4 = 1.0;
  // -C1 = -c1 (x + y)
  for (std::size_t c = 0; c < 2; ++c) {
    agents[0].terms.push_back({-1, ValueFunction::identity(), RewardFunction::linear(c1), c});
  }
  // -C2 = -2 c2 + c2 E exp(-k1 x xi) + c2 E exp(-/+ k2 y xi)
  agents[1].constant = -2.0 * c2;
  agents[1].terms.push_back({1, ValueFunction::linear(c2), RewardFunction::exp_of_product(k1), 0});
  const double k2_signed = sign == ExponentSign::corrected ? k2 : -k2;
  agents[1].terms.push_back({1, ValueFunction::linear(c2), RewardFunction::exp_of_product(k2_signed), 1});
  // -C3 = -2 c3 + c3 exp(-k3 x) + c3 exp(-k4 y)
  agents[2].constant = -2.0 * c3;
  agents[2].terms.push_back({1, ValueFunction::linear(c3), RewardFunction::exp_plain(k3), 0});
  agents[2].terms.push_back({1, ValueFunction::linear(c3), RewardFunction::exp_plain(k4), 1});

  GameSpec game(std::move(space), std::move(agents), {collective::NegPairwiseL1{}}, {unit_sq_norm(6)}, 1.0,
                OutcomeDistribution({1.0, 100.0}, {0.9, 0.1}));

  std::map<std::string, SolverConfig> defaults;
  SolverConfig base;
  base.max_iter = 200;
  base.tol = 1e-9;
  defaults["immd"] = base;
  defaults["immd"].prox_weight = 1.0;
  defaults["sga"] = base;
  defaults["sga"].max_iter = 100;

  std::string name = sign == ExponentSign::corrected ? "grid_rendezvous" : "grid_rendezvous_printed";
  return ScenarioDef{std::move(name),
                     "Three agents on a unit lattice in the nonnegative quadrant moving toward a common point; "
                     "agent 2 perceives its cost under outcome uncertainty.",
                     std::move(game),
                     {{10.0, 0.0, 0.0, 10.0, 10.0, 10.0}},
                     std::move(defaults),
                     CertificationSettings{31, 1e7},
                     Acceptance{{}, 2.0, "IMMd ends with max pairwise L1 distance <= 2; sGA <= 4"}};
}

std::vector<std::string> builtin_names() {
  return {"energy_community", "grid_rendezvous", "smooth_two_player", "team_nonsmooth"};
}

ScenarioDef builtin(const std::string& name) {
  if (name == "smooth_two_player") return build_smooth_two_player();
  if (name == "team_nonsmooth") return build_team_nonsmooth();
  if (name == "energy_community") return build_energy_community();
  if (name == "grid_rendezvous") return build_grid_rendezvous();
  throw ValidationError("unknown built-in scenario '" + name + "'", "scenario");
}

// ---------------------------------------------------------------------------

void validate(const SteeringConfig& cfg) {
  if (!std::isfinite(cfg.tau)) throw ValidationError("must be finite", "tau");
  if (!(cfg.eta >= 0.0)) throw ValidationError("must be nonnegative", "eta");
  if (!(cfg.delta > 0.0)) throw ValidationError("must be positive", "delta");
  if (!(cfg.lambda_min <= cfg.lambda_max)) throw ValidationError("lambda_min exceeds lambda_max", "lambda_min");
  if (cfg.max_outer == 0) throw ValidationError("must be positive", "max_outer");
  if (!(cfg.tol > 0.0) || !(cfg.x_tol > 0.0)) throw ValidationError("tolerances must be positive", "tol");
  if (cfg.saturation_limit == 0) throw ValidationError("must be positive", "saturation_limit");
}

const char* to_string(SteeringStatus s) {
  switch (s) {
    case SteeringStatus::converged:
      return "converged";
    case SteeringStatus::max_iter:
      return "max_iter";
    case SteeringStatus::unreachable:
      return "target unreachable";
    case SteeringStatus::error:
      return "error";
  }
  return "unknown";
}

SteeringTrace steer_collective(const ScenarioDef& scenario, const SteeringConfig& steer, const SolverConfig& cfg,
                               const JointStrategy& x0) {
  validate(steer);
  validate(cfg);
  const GameSpec& base = scenario.game;
  const regularizer::LinearIncentive* incentive = nullptr;
  for (const auto& term : base.regularizer()) {
    if (const auto* li = std::get_if<regularizer::LinearIncentive>(&term)) incentive = li;
  }
  if (incentive == nullptr || base.regularizer().size() != 1) {
    throw ValidationError("steering needs a game whose only regularizer is a linear incentive", "regularizer");
  }
  // Incentives are the per-coordinate coefficients, scaled by the game's lambda.
  const double scale = base.lambda();
  const auto coords = incentive->coords;
  std::vector<double> lambda(incentive->coefficients);
  for (double& l : lambda) l = std::clamp(l * scale, steer.lambda_min, steer.lambda_max);

  auto game_for = [&](const std::vector<double>& l) {
    return base.with_regularizer({regularizer::LinearIncentive{l, coords}}, 1.0);
  };
  auto imm_step = [&](const GameSpec& g, const JointStrategy& from) {
    auto step = prox_step(g, from, cfg);
    if (!step.ok) throw DomainError("proximal step failed: " + step.message);
    return std::move(step.x);
  };

  JointStrategy x = x0.empty() ? scenario.initial_states.at(0) : x0;
  if (!base.space().contains(x)) throw ValidationError("initial state lies outside the strategy box", "x0");

  SteeringTrace trace;
  trace.status = SteeringStatus::max_iter;
  std::size_t saturated_run = 0;
  try {
    for (std::size_t k = 0; k < steer.max_outer; ++k) {
      const GameSpec game = game_for(lambda);
      const JointStrategy next = imm_step(game, x);
      double moved = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) moved = std::max(moved, std::abs(next[c] - x[c]));
      x = next;
      const double J = game.collective_value(x);
      const double err = std::abs(J - steer.tau);
      trace.steps.push_back({k, lambda, x, J, err});
      if (err <= steer.tol && moved <= steer.x_tol) {
        trace.status = SteeringStatus::converged;
        return trace;
      }

      // Sensitivity of J after one IMM step to each incentive.
      const double J_base = game.collective_value(imm_step(game, x));
      bool all_saturated = true;
      std::vector<double> updated = lambda;
      for (std::size_t i = 0; i < lambda.size(); ++i) {
        auto bumped = lambda;
        bumped[i] += steer.delta;
        const double J_bump = game_for(bumped).collective_value(imm_step(game_for(bumped), x));
        const double s = (J_bump - J_base) / steer.delta;
        const double raw = lambda[i] - steer.eta * 2.0 * (J - steer.tau) * s;
        updated[i] = std::clamp(raw, steer.lambda_min, steer.lambda_max);
        if (raw > steer.lambda_min && raw < steer.lambda_max) all_saturated = false;
      }
      lambda = std::move(updated);
      saturated_run = all_saturated ? saturated_run + 1 : 0;
      if (saturated_run >= steer.saturation_limit) {
        trace.status = SteeringStatus::unreachable;
        trace.message = "target unreachable: incentives saturated at their bounds for " + std::to_string(saturated_run) +
                        " consecutive steps with |J - tau| = " + std::to_string(err);
        return trace;
      }
    }
  } catch (const DomainError& e) {
    trace.status = SteeringStatus::error;
    trace.message = e.what();
  }
  return trace;
}

}  // namespace ptgame
