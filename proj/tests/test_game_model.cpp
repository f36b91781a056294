#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ptgame/error.hpp"
#include "ptgame/game_model.hpp"
#include "ptgame/scenarios.hpp"

using namespace ptgame;

namespace {

GameSpec single_agent_quadratic(double lo, double hi, double target) {
  StrategySpace space({StrategyBlock{{lo}, {hi}, std::nullopt}});
  return GameSpec(space, {AgentSpec{}}, {collective::NegQuadraticToTarget{1.0, target, {0}}}, {}, 0.0,
                  OutcomeDistribution({1.0}, {1.0}));
}

}  // namespace

TEST_CASE("team game utility and potential values") {
  const auto game = build_team_nonsmooth().game;
  const JointStrategy origin{0.0, 0.0};
  CHECK(game.utility(0, origin) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(game.utility(1, origin) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(game.potential(origin) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(game.potential(JointStrategy{1.0, -1.0}) == doctest::Approx(4.8).epsilon(1e-15));
  CHECK(game.potential(JointStrategy{4.0, -4.0}) == doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("all-zero game has zero potential") {
  StrategySpace space({StrategyBlock{{-1.0}, {1.0}, std::nullopt}, StrategyBlock{{-1.0}, {1.0}, std::nullopt}});
  const GameSpec game(space, {AgentSpec{}, AgentSpec{}}, {}, {}, 0.0, OutcomeDistribution({1.0}, {1.0}));
  CHECK(game.potential(JointStrategy{0.3, -0.7}) == 0.0);
}

TEST_CASE("team game gradient away from the kink") {
  const auto game = build_team_nonsmooth().game;
  Rng rng(0);
  const auto g = subgrad_potential(game, JointStrategy{1.0, 1.0}, rng);
  CHECK(g[0] == doctest::Approx(-1.2).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(-1.2).epsilon(1e-14));
}

TEST_CASE("utility and potential supergradients agree blockwise with unit weights") {
  const auto game = build_team_nonsmooth().game;
  for (const JointStrategy& x : {JointStrategy{1.0, -1.0}, JointStrategy{3.0, 2.0}, JointStrategy{-5.0, 1.0}}) {
    Rng r1(42), r2(42), r3(42);
    const auto gp = subgrad_potential(game, x, r1);
    const auto g0 = subgrad_utility(game, 0, x, r2);
    const auto g1 = subgrad_utility(game, 1, x, r3);
    CHECK(g0[0] == gp[0]);
    CHECK(g1[0] == gp[1]);
  }
}

TEST_CASE("linear individual term contributes its slope") {
  StrategySpace space({StrategyBlock{{0.0}, {10.0}, std::nullopt}});
  AgentSpec a;
  a.terms.push_back(IndividualTerm{1, ValueFunction::identity(), RewardFunction::linear(0.7), 0});
  const GameSpec game(space, {a}, {}, {}, 0.0, OutcomeDistribution({1.0}, {1.0}));
  Rng rng(0);
  CHECK(subgrad_utility(game, 0, JointStrategy{3.0}, rng)[0] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("smooth gradients match central differences") {
  Rng rng(3);
  for (const auto& def : {build_smooth_two_player(), build_energy_community(0.5, -0.3)}) {
    const auto& game = def.game;
    for (int k = 0; k < 25; ++k) {
      auto x = random_point(game.space(), rng);
      for (std::size_t c = 0; c < x.size(); ++c) x[c] = std::clamp(x[c], game.space().lo(c) + 1e-3, game.space().hi(c) - 1e-3);
      Rng slopes(1);
      const auto g = subgrad_potential(game, x, slopes);
      for (std::size_t c = 0; c < x.size(); ++c) {
        const double h = 1e-6;
        auto xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const double fd = (game.potential(xp) - game.potential(xm)) / (2 * h);
        CHECK(g[c] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("project examples") {
  StrategySpace box({StrategyBlock{{-100.0}, {100.0}, std::nullopt}, StrategyBlock{{-100.0}, {100.0}, std::nullopt}});
  CHECK(project(box, JointStrategy{150.0, -7.0}) == JointStrategy{100.0, -7.0});
  CHECK(project(box, JointStrategy{3.5, -2.25}) == JointStrategy{3.5, -2.25});
  StrategySpace lat({StrategyBlock{{0.0, 0.0}, {10.0, 10.0}, Lattice{0.0, 1.0}}});
  CHECK(project(lat, JointStrategy{2.4, 3.6}) == JointStrategy{2.0, 4.0});
  CHECK_THROWS_AS(project(box, JointStrategy{1.0}), ValidationError);
}

TEST_CASE("weighted potential identity on every built-in scenario") {
  for (const auto& name : builtin_names()) {
    Rng rng(17);
    CHECK_MESSAGE(verify_weighted_potential(builtin(name).game, 1000, rng) <= 1e-9, name);
  }
  Rng rng(1);
  CHECK(verify_weighted_potential(single_agent_quadratic(0, 10, 3), 100, rng) <= 1e-9);
}

TEST_CASE("unequal agent weights keep the identity") {
  auto def = build_energy_community();
  auto agents = def.game.agents();
  agents[0].weight = 2.5;
  agents[1].weight = 0.4;
  const GameSpec game(def.game.space(), agents, def.game.collective(), def.game.regularizer(), def.game.lambda(),
                      def.game.distribution(), WeightingFunction::prelec(0.7));
  Rng rng(23);
  CHECK(verify_weighted_potential(game, 1000, rng) <= 1e-9);
}

TEST_CASE("changing lambda shifts the potential by lambda H") {
  const auto def = build_smooth_two_player();
  const auto g0 = def.game.with_lambda(0.0);
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_point(def.game.space(), rng);
    const double h = x[0] * x[0] + x[1] * x[1];
    CHECK(g0.potential(x) - def.game.potential(x) == doctest::Approx(0.1 * h).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("concave scenarios are concave along random segments") {
  Rng rng(12);
  for (const auto& def : {build_team_nonsmooth(), build_energy_community(), build_smooth_two_player()}) {
    const auto& game = def.game;
    for (int k = 0; k < 200; ++k) {
      const auto a = random_point(game.space(), rng);
      const auto b = random_point(game.space(), rng);
      const double t = rng.unit();
      JointStrategy m(a.size());
      for (std::size_t c = 0; c < a.size(); ++c) m[c] = t * a[c] + (1 - t) * b[c];
      const double lhs = game.potential(m);
      const double rhs = t * game.potential(a) + (1 - t) * game.potential(b);
      CHECK(lhs >= rhs - 1e-9 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("structural validation") {
  StrategySpace space({StrategyBlock{{0.0}, {1.0}, std::nullopt}});
  const OutcomeDistribution d({1.0}, {1.0});
  CHECK_THROWS_AS(GameSpec(space, {AgentSpec{}, AgentSpec{}}, {}, {}, 0.0, d), ValidationError);
  AgentSpec bad;
  bad.weight = 0.0;
  CHECK_THROWS_AS(GameSpec(space, {bad}, {}, {}, 0.0, d), ValidationError);
  CHECK_THROWS_AS(GameSpec(space, {AgentSpec{}}, {}, {}, -1.0, d), ValidationError);
  CHECK_THROWS_AS(StrategySpace({StrategyBlock{{1.0}, {0.0}, std::nullopt}}), ValidationError);
}

TEST_CASE("energy community collective values") {
  const auto game = build_energy_community().game;
  CHECK(game.collective_value(JointStrategy{4.0, 4.0}) == 0.0);
  CHECK(game.collective_value(JointStrategy{1.0, 1.0}) == doctest::Approx(-18.0).epsilon(1e-15));
  Rng rng(0);
  const auto g = subgrad_utility(game, 1, JointStrategy{4.0, 4.0}, rng);
  CHECK(g[0] == doctest::Approx(4.2).epsilon(1e-14));
}
