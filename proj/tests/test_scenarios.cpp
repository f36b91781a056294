#include <doctest.h>

#include <cmath>

#include "ptgame/cli_io.hpp"
#include "ptgame/error.hpp"
#include "ptgame/scenarios.hpp"

using namespace ptgame;

TEST_CASE("smooth two-player game values") {
  const auto def = build_smooth_two_player(0.0, 0.0);
  CHECK(def.game.utility(1, JointStrategy{0.0, 0.0}) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(def.game.num_agents() == 2);
  CHECK(def.game.lambda() == 0.1);
  CHECK(def.game.weighting().is_identity());
}

TEST_CASE("team game metadata") {
  const auto def = build_team_nonsmooth();
  CHECK(def.initial_states.size() == 5);
  CHECK(def.initial_states[0] == JointStrategy{2.0, 4.0});
  CHECK(def.game.potential(JointStrategy{0.0, 0.0}) == 5.0);
  CHECK(def.game.potential(JointStrategy{4.0, -4.0}) == doctest::Approx(1.8).epsilon(1e-14));
  REQUIRE(!def.acceptance.targets.empty());
  CHECK(def.acceptance.targets[0] == JointStrategy{0.0, 0.0});
}

TEST_CASE("rendezvous collective benefit and costs") {
  const auto def = build_grid_rendezvous();
  CHECK(def.game.collective_value(JointStrategy(6, 0.0)) == 0.0);
  CHECK(def.game.collective_value(def.initial_states[0]) == doctest::Approx(-40.0).epsilon(1e-15));
  CHECK(def.game.individual_value(0, JointStrategy{10, 0, 0, 0, 0, 0}) == doctest::Approx(-40.0).epsilon(1e-15));
  CHECK(def.game.space().all_lattice());
  CHECK(def.name == "grid_rendezvous");
  CHECK(build_grid_rendezvous(ExponentSign::printed, 12.0).name == "grid_rendezvous_printed");
}

TEST_CASE("builders are deterministic and validate") {
  for (const auto& name : builtin_names()) {
    const auto a = builtin(name);
    const auto b = builtin(name);
    CHECK(a == b);
    CHECK(io::canonical_text(a) == io::canonical_text(b));
    CHECK_NOTHROW(a.validate());
  }
  CHECK_THROWS_AS(builtin("nope"), ValidationError);
}

TEST_CASE("steering to the unincentivized equilibrium value converges at once") {
  const auto def = build_energy_community();
  SteeringConfig steer;
  steer.tau = -4.430666397689993;
  const JointStrategy eq{4.143758494234573, 6.1};
  const auto trace = steer_collective(def, steer, def.solver_config("imm"), eq);
  CHECK(trace.status == SteeringStatus::converged);
  CHECK(trace.steps.size() <= 3);
  for (double l : trace.steps.back().lambda) CHECK(std::abs(l) <= 1e-3);
}

TEST_CASE("steering reaches the three targets") {
  const auto def = build_energy_community();
  for (double tau : {-4.0, -4.5, -5.0}) {
    SteeringConfig steer;
    steer.tau = tau;
    const auto trace = steer_collective(def, steer, def.solver_config("imm"), {1.0, 1.0});
    CHECK(trace.status == SteeringStatus::converged);
    CHECK(trace.steps.size() <= 2000);
    CHECK(trace.steps.back().error <= 0.05);
    const std::size_t n = trace.steps.size();
    for (std::size_t k = n / 2; k + 10 < n; ++k) {
      CHECK(trace.steps[k + 10].error <= trace.steps[k].error + 1e-9);
    }
  }
}

TEST_CASE("zero incentive step keeps lambda fixed") {
  const auto def = build_energy_community();
  SteeringConfig steer;
  steer.tau = -4.0;
  steer.eta = 0.0;
  steer.max_outer = 200;
  const auto trace = steer_collective(def, steer, def.solver_config("imm"), {1.0, 1.0});
  for (const auto& s : trace.steps) {
    CHECK(s.lambda[0] == 0.0);
    CHECK(s.lambda[1] == 0.0);
  }
  CHECK(trace.steps.back().collective == doctest::Approx(-4.430666397689993).epsilon(1e-6));
}

TEST_CASE("unreachable target is reported") {
  const auto def = build_energy_community();
  SteeringConfig steer;
  steer.tau = -1000.0;
  const auto trace = steer_collective(def, steer, def.solver_config("imm"), {1.0, 1.0});
  CHECK(trace.status == SteeringStatus::unreachable);
}

TEST_CASE("steering needs an incentive regularizer") {
  const auto def = build_smooth_two_player();
  CHECK_THROWS_AS(steer_collective(def, SteeringConfig{}, def.solver_config("imm")), ValidationError);
}
