#pragma once

#include <string>

#include "ptgame/game_model.hpp"

namespace ptgame::detail {

struct BarrierResult {
  JointStrategy x;
  std::size_t newton_steps = 0;
  bool ok = true;
  std::string message;
};

// Maximizes Phi(x) - rho * ||x - anchor||^2 over the box for games whose
// potential has kink terms -w|a^T x|. Each kink is lifted to an epigraph
// variable t >= |a^T x| and the resulting smooth problem is solved with a
// primal log-barrier Newton method.
BarrierResult maximize_prox_barrier(const GameSpec& game, const JointStrategy& anchor, double rho,
                                    double gap_tol, std::size_t max_newton);

}  // namespace ptgame::detail
