#include <doctest.h>

#include <cmath>

#include "ptgame/certify.hpp"
#include "ptgame/error.hpp"
#include "ptgame/scenarios.hpp"

using namespace ptgame;

namespace {

GameSpec neg_square_1d(double lo, double hi, double target) {
  StrategySpace space({StrategyBlock{{lo}, {hi}, std::nullopt}});
  return GameSpec(space, {AgentSpec{}}, {collective::NegQuadraticToTarget{1.0, target, {0}}}, {}, 0.0,
                  OutcomeDistribution({1.0}, {1.0}));
}

}  // namespace

TEST_CASE("best-response gaps on the team game") {
  const auto game = build_team_nonsmooth().game;
  for (const JointStrategy& x : {JointStrategy{0.0, 0.0}, JointStrategy{4.0, -4.0}}) {
    const auto gaps = br_gap(game, x, 201);
    CHECK(gaps[0] <= 1e-6);
    CHECK(gaps[1] <= 1e-6);
  }
  // From (1,0) agent 1 gains 1.1 by moving to 0 and agent 2 gains 0.9 by moving to -1.
  const auto gaps = br_gap(game, {1.0, 0.0}, 201);
  CHECK(gaps[0] == doctest::Approx(1.1).epsilon(1e-9));
  CHECK(gaps[1] == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("grid argmax of the regularized team game") {
  const auto game = build_team_nonsmooth().game;
  const auto g = grid_potential_argmax(game, 201);
  CHECK(std::abs(g.point[0]) <= g.cell);
  CHECK(std::abs(g.point[1]) <= g.cell);
  CHECK(g.value == doctest::Approx(5.0).epsilon(1e-3));
  CHECK(g.ties.size() == 1);
  CHECK(g.evaluations == 201 * 201);
}

TEST_CASE("unregularized team game has a ridge of ties") {
  const auto game = build_team_nonsmooth().game.with_lambda(0.0);
  const auto g = grid_potential_argmax(game, 201);
  CHECK(g.value == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(g.ties.size() == 201);
  for (const auto& t : g.ties) CHECK(std::abs(t[0] + t[1]) <= 1e-9);
}

TEST_CASE("grid argmax of a 1-D quadratic") {
  const auto g = grid_potential_argmax(neg_square_1d(0, 10, 3), 101);
  CHECK(std::abs(g.point[0] - 3.0) <= g.cell);
  CHECK(std::abs(g.value) <= 1e-9);
}

TEST_CASE("grid budget is enforced") {
  const auto game = build_team_nonsmooth().game;
  CHECK_THROWS_AS(grid_potential_argmax(game, 201, 1000.0), BudgetExceeded);
  CHECK(grid_size(game.space(), 201) == 201.0 * 201.0);
}

TEST_CASE("lattice axes enumerate lattice points") {
  const auto def = build_grid_rendezvous();
  const auto axes = grid_axes(def.game.space(), 5);
  REQUIRE(axes.size() == 6);
  CHECK(axes[0].size() == 31);
  CHECK(axes[0].front() == 0.0);
  CHECK(axes[0].back() == 30.0);
}

TEST_CASE("regularization bound with the plain squared norm") {
  const auto def = build_team_nonsmooth();
  const auto game0 = def.game.with_lambda(0.0);
  const auto r = regularization_bound_check(game0, def.game.regularizer(), 0.1, 201);
  CHECK(std::abs(r.x_dagger[0]) <= 1e-6);
  CHECK(std::abs(r.x_dagger[1]) <= 1e-6);
  CHECK(r.h_dagger <= 1e-9);
  CHECK(r.epsilon <= 1e-9);
  CHECK(r.gaps[0] <= 1e-6);
  CHECK(r.gaps[1] <= 1e-6);
  CHECK(r.satisfied());
}

TEST_CASE("regularization bound with a shifted regularizer") {
  const auto def = build_team_nonsmooth();
  const auto game0 = def.game.with_lambda(0.0);
  const Regularizer h{regularizer::WeightedSqNorm{{2.0, 0.0}, {1.0, 1.0}}};
  const auto r = regularization_bound_check(game0, h, 0.1, 201);
  CHECK(r.x_dagger[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x_dagger[1] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(r.h_dagger == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.epsilon == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(r.bounds.size() == 3);
  CHECK(r.satisfied());
}

TEST_CASE("regularization bound rejects a regularized base game") {
  const auto def = build_team_nonsmooth();
  CHECK_THROWS_AS(regularization_bound_check(def.game, def.game.regularizer(), 0.1, 21), ValidationError);
  CHECK_THROWS_AS(regularization_bound_check(def.game.with_lambda(0.0), def.game.regularizer(), 0.0, 21), ValidationError);
}

TEST_CASE("IMM rate certificate on the team game") {
  const auto def = build_team_nonsmooth();
  const auto cfg = def.solver_config("imm");
  const auto traj = solve_imm(def.game, {2.0, 4.0}, cfg);
  const auto cert = imm_rate_certificate(traj, def.game, cfg.prox_weight, 5.0, {{0.0, 0.0}}, 200);
  CHECK(cert.rows.size() == 200);
  CHECK(cert.distance * cert.distance == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(cert.squared_ok());
}

TEST_CASE("rate certificate from an optimal start is trivially satisfied") {
  const auto game = neg_square_1d(-1, 1, 0);
  SolverConfig cfg;
  const auto traj = solve_imm(game, {0.0}, cfg);
  const auto cert = imm_rate_certificate(traj, game, cfg.prox_weight, 101, 10);
  for (const auto& row : cert.rows) {
    CHECK(row.suboptimality == 0.0);
    CHECK(row.ok_squared);
    CHECK(row.ok_unsquared);
  }
}
