#include <doctest.h>

#include <cmath>

#include "ptgame/error.hpp"
#include "ptgame/scenarios.hpp"
#include "ptgame/solvers.hpp"

using namespace ptgame;

namespace {

GameSpec neg_square_1d(double lo, double hi, double target, std::optional<Lattice> lattice = std::nullopt) {
  StrategySpace space({StrategyBlock{{lo}, {hi}, lattice}});
  return GameSpec(space, {AgentSpec{}}, {collective::NegQuadraticToTarget{1.0, target, {0}}}, {}, 0.0,
                  OutcomeDistribution({1.0}, {1.0}));
}

double linf(const JointStrategy& a, const JointStrategy& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("best response of agent 2 lands on the kink") {
  const auto game = build_team_nonsmooth().game;
  SolverConfig cfg;
  const auto y = argmax_block(game, 1, JointStrategy{4.0, 0.0}, BlockObjective::utility(), cfg);
  CHECK(y[0] == doctest::Approx(-4.0).epsilon(1e-6));
}

TEST_CASE("best response of a quadratic is its center") {
  const auto game = neg_square_1d(-10, 10, 2.75);
  const auto y = argmax_block(game, 0, JointStrategy{-9.0}, BlockObjective::utility(), SolverConfig{});
  CHECK(std::abs(y[0] - 2.75) <= 1e-8);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.tol = -1.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = SolverConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = SolverConfig{};
  cfg.eta = 0.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("IMM on the team game reaches the origin from every listed start") {
  const auto def = build_team_nonsmooth();
  const auto cfg = def.solver_config("imm");
  for (const auto& x0 : def.initial_states) {
    const auto traj = solve_imm(def.game, x0, cfg);
    CHECK(traj.status == Status::converged);
    CHECK(traj.iterates.size() <= 501);
    CHECK(linf(traj.last().x, {0.0, 0.0}) <= 1e-3);
    for (std::size_t n = 1; n < traj.iterates.size(); ++n) {
      CHECK(traj.iterates[n].potential >= traj.iterates[n - 1].potential - 1e-12);
    }
  }
}

TEST_CASE("IMM on a 1-D quadratic halves the iterate every step") {
  const auto game = neg_square_1d(-1, 1, 0);
  SolverConfig cfg;
  cfg.prox_weight = 1.0;
  cfg.max_iter = 30;
  cfg.tol = 1e-300;
  const auto traj = solve_imm(game, {1.0}, cfg);
  REQUIRE(traj.iterates.size() >= 21);
  for (std::size_t n = 1; n <= 20; ++n) {
    CHECK(std::abs(traj.iterates[n].x[0] - std::ldexp(1.0, -static_cast<int>(n))) <= 1e-12);
  }
}

TEST_CASE("IMM started at the maximizer stops immediately") {
  const auto game = neg_square_1d(-5, 5, 1.5);
  const auto traj = solve_imm(game, {1.5}, SolverConfig{});
  CHECK(traj.status == Status::converged);
  CHECK(traj.iterates.size() == 2);
  CHECK(traj.last().x[0] == 1.5);
}

TEST_CASE("IBR from agent 1 at 4 is trapped at (4,-4)") {
  const auto def = build_team_nonsmooth();
  const auto traj = solve_ibr(def.game, {4.0, 0.0}, def.solver_config("ibr"));
  CHECK(traj.status == Status::converged);
  CHECK(traj.last().x[0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(traj.last().x[1] == doctest::Approx(-4.0).epsilon(1e-6));
}

TEST_CASE("IBR with one agent converges in one sweep") {
  const auto game = neg_square_1d(0, 10, 3);
  const auto traj = solve_ibr(game, {9.0}, SolverConfig{});
  CHECK(traj.status == Status::converged);
  CHECK(std::abs(traj.iterates[1].x[0] - 3.0) <= 1e-8);
}

TEST_CASE("subgradient ascent on the team game approaches the origin") {
  const auto def = build_team_nonsmooth();
  SolverConfig cfg;
  cfg.eta = 0.1;
  cfg.max_iter = 2000;
  cfg.tol = 1e-300;
  const auto traj = solve_gradient(def.game, {2.0, 4.0}, cfg);
  CHECK(linf(traj.last().x, {0.0, 0.0}) <= 0.15);
}

TEST_CASE("gradient ascent from the maximizer reports convergence at once") {
  const auto def = build_smooth_two_player();
  const JointStrategy xs{0.14651653260460884, 3.3213485516009187};
  SolverConfig cfg = def.solver_config("ga");
  cfg.tol = 1e-6;
  const auto traj = solve_gradient(def.game, xs, cfg);
  CHECK(traj.status == Status::converged);
  CHECK(traj.iterates[1].displacement <= 1e-6);
}

TEST_CASE("smooth game limits agree across methods") {
  const auto def = build_smooth_two_player();
  const JointStrategy xs{0.14651653260460884, 3.3213485516009187};
  for (const char* algo : {"ga", "aga", "ibr", "imm"}) {
    const auto cfg = def.solver_config(algo);
    Trajectory traj;
    if (std::string(algo) == "ibr") traj = solve_ibr(def.game, def.initial_states[0], cfg);
    else if (std::string(algo) == "imm") traj = solve_imm(def.game, def.initial_states[0], cfg);
    else traj = solve_gradient(def.game, def.initial_states[0], cfg);
    CHECK_MESSAGE(traj.status == Status::converged, algo);
    CHECK_MESSAGE(linf(traj.last().x, xs) <= 1e-5, algo);
    CHECK(traj.last().potential == doctest::Approx(16.207764620275242).epsilon(1e-9));
  }
}

TEST_CASE("acceleration is rejected on lattices") {
  const auto def = build_grid_rendezvous();
  SolverConfig cfg;
  cfg.accelerate = true;
  CHECK_THROWS_AS(solve_gradient(def.game, def.initial_states[0], cfg), ValidationError);
}

TEST_CASE("IMMd on the rendezvous lattice") {
  const auto def = build_grid_rendezvous();
  const auto traj = solve_immd(def.game, def.initial_states[0], def.solver_config("immd"));
  CHECK(traj.status == Status::converged);
  for (std::size_t n = 1; n < traj.iterates.size(); ++n) {
    CHECK(traj.iterates[n].potential >= traj.iterates[n - 1].potential - 1e-12);
  }
  CHECK(!traj.relay_log.empty());
  CHECK(traj.relay_log.size() == 3 * (traj.iterates.size() - 1));
  for (const auto& it : traj.iterates) CHECK(def.game.space().lattice_feasible(it.x));
}

TEST_CASE("IMMd with a single lattice agent reaches the lattice argmax") {
  const auto game = neg_square_1d(0, 12, 7.3, Lattice{0.0, 1.0});
  SolverConfig cfg;
  cfg.prox_weight = 0.1;
  const auto traj = solve_immd(game, {1.0}, cfg);
  CHECK(traj.status == Status::converged);
  CHECK(traj.last().x[0] == 7.0);
}

TEST_CASE("IMMd with agents co-located at the argmax does not move") {
  const auto def = build_grid_rendezvous();
  const JointStrategy x0(6, 0.0);
  const auto traj = solve_immd(def.game, x0, def.solver_config("immd"));
  CHECK(traj.status == Status::converged);
  CHECK(traj.last().x == x0);
}

TEST_CASE("stochastic runs are reproducible for a fixed seed") {
  const auto def = build_team_nonsmooth();
  auto cfg = def.solver_config("sga");
  cfg.averaging = 5;
  cfg.max_iter = 50;
  const auto a = solve_gradient(def.game, {1.0, -1.0}, cfg);
  const auto b = solve_gradient(def.game, {1.0, -1.0}, cfg);
  REQUIRE(a.iterates.size() == b.iterates.size());
  for (std::size_t n = 0; n < a.iterates.size(); ++n) CHECK(a.iterates[n].x == b.iterates[n].x);
  CHECK(a.paths.size() == 5);
  CHECK(a.mean_path.size() == a.iterates.size());
}
