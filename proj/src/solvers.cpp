#include "ptgame/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "prox_barrier.hpp"
#include "ptgame/error.hpp"

namespace ptgame {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

double inf_norm_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Iterate make_iterate(const GameSpec& game, std::size_t iter, const JointStrategy& x, double disp, double wall_ms) {
  Iterate it;
  it.iter = iter;
  it.x = x;
  it.potential = game.potential(x);
  it.utilities.resize(game.num_agents());
  for (std::size_t i = 0; i < game.num_agents(); ++i) it.utilities[i] = game.utility(i, x);
  it.displacement = disp;
  it.wall_ms = wall_ms;
  return it;
}

void check_start(const GameSpec& game, const JointStrategy& x0) {
  const auto& space = game.space();
  if (x0.size() != space.dimension()) {
    std::ostringstream msg;
    msg << "initial state has " << x0.size() << " coordinates, expected " << space.dimension();
    throw ValidationError(msg.str(), "x0");
  }
  if (!space.contains(x0, 1e-12)) throw ValidationError("initial state lies outside the strategy box", "x0");
  if (!space.lattice_feasible(x0)) throw ValidationError("initial state is not on the lattice", "x0");
}

// Maximizes a scalar function on [lo, hi]: coarse scan, golden-section
// refinement in the bracket around the best scan point, then one guarded
// Newton step from differences. Returns `current` unless a candidate is
// strictly better.
double coordinate_argmax(const std::function<double(double)>& f, double lo, double hi, double current,
                         std::size_t grid_points, double tol) {
  if (!(hi > lo)) return lo;
  const std::size_t g = std::max<std::size_t>(grid_points, 3);
  std::vector<double> vals(g);
  std::size_t best = 0;
  for (std::size_t k = 0; k < g; ++k) {
    const double y = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(g - 1);
    vals[k] = f(y);
    if (vals[k] > vals[best]) best = k;
  }
  // Ties on the scan go to the point nearest the current value.
  const double tie = 1e-12 * (1.0 + std::abs(vals[best]));
  auto grid_at = [&](std::size_t k) { return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(g - 1); };
  for (std::size_t k = 0; k < g; ++k) {
    if (vals[k] >= vals[best] - tie && std::abs(grid_at(k) - current) < std::abs(grid_at(best) - current)) best = k;
  }

  double a = grid_at(best == 0 ? 0 : best - 1);
  double b = grid_at(std::min(best + 1, g - 1));
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  double y = 0.5 * (a + b);
  double fy = f(y);
  if (vals[best] > fy) {
    y = grid_at(best);
    fy = vals[best];
  }

  // Newton polish; exact for quadratics, kept unless it is worse.
  const double h = 1e-4 * std::max(1.0, std::abs(y));
  if (y - h >= lo && y + h <= hi) {
    const double fp = f(y + h), fm = f(y - h);
    const double g1 = (fp - fm) / (2.0 * h);
    const double g2 = (fp - 2.0 * fy + fm) / (h * h);
    if (g2 < 0.0 && std::isfinite(g1)) {
      const double yn = y - g1 / g2;
      if (yn >= lo && yn <= hi && std::abs(yn - y) <= 2.0 * h) {
        const double fn = f(yn);
        if (fn >= fy) {
          y = yn;
          fy = fn;
        }
      }
    }
  }

  if (current >= lo && current <= hi) {
    const double fcur = f(current);
    if (!(fy > fcur + 1e-15 * (1.0 + std::abs(fcur)))) return current;
  }
  return y;
}

// Objective of a block objective with the block replaced by y.
double block_objective_value(const GameSpec& game, std::size_t i, const JointStrategy& x,
                             const BlockObjective& obj) {
  if (obj.kind == BlockObjective::Kind::utility) return game.utility(i, x);
  const auto& space = game.space();
  double prox = 0.0;
  for (std::size_t c = 0; c < space.block_dim(i); ++c) {
    const std::size_t k = space.offset(i) + c;
    prox += (x[k] - obj.anchor[k]) * (x[k] - obj.anchor[k]);
  }
  return game.potential(x) - obj.prox_weight * prox;
}

std::vector<double> argmax_block_lattice(const GameSpec& game, std::size_t i, const JointStrategy& x,
                                         const BlockObjective& obj) {
  const auto& space = game.space();
  const auto& blk = space.block(i);
  const std::size_t off = space.offset(i);
  const std::size_t d = blk.dim();
  const double step = blk.lattice->step;

  std::vector<std::vector<double>> cands;
  cands.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(off), x.begin() + static_cast<std::ptrdiff_t>(off + d));
  for (std::size_t c = 0; c < d; ++c) {
    for (double dir : {-1.0, 1.0}) {
      auto y = cands.front();
      y[c] += dir * step;
      if (y[c] < blk.lo[c] - 1e-9 || y[c] > blk.hi[c] + 1e-9) continue;
      cands.push_back(std::move(y));
    }
  }
  JointStrategy trial = x;
  std::size_t best = 0;
  double best_val = 0.0;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    std::copy(cands[k].begin(), cands[k].end(), trial.begin() + static_cast<std::ptrdiff_t>(off));
    const double v = block_objective_value(game, i, trial, obj);
    if (k == 0) {
      best_val = v;
      continue;
    }
    const double tie = 1e-12 * (1.0 + std::abs(best_val));
    // Candidates are generated stay-first, so strict improvement keeps the
    // nearest; among equal-distance moves, prefer the lexicographically smaller.
    if (v > best_val + tie) {
      best = k;
      best_val = v;
    } else if (v >= best_val - tie && best > 0 && cands[k] < cands[best]) {
      best = k;
    }
  }
  return cands[best];
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const SolverConfig& cfg) {
  if (cfg.max_iter == 0) throw ValidationError("max_iter must be positive", "max_iter");
  if (!(cfg.tol > 0.0)) throw ValidationError("tol must be positive", "tol");
  if (!(cfg.eta > 0.0)) throw ValidationError("eta must be positive", "step.eta");
  if (!(cfg.prox_weight > 0.0)) throw ValidationError("prox_weight must be positive", "prox_weight");
  if (!(cfg.inner_tol > 0.0)) throw ValidationError("inner_tol must be positive", "inner_tol");
  if (cfg.max_inner_iter == 0) throw ValidationError("max_inner_iter must be positive", "max_inner_iter");
  if (cfg.averaging == 0) throw ValidationError("averaging must be at least 1", "averaging");
  if (cfg.grid_points < 3) throw ValidationError("grid_points must be at least 3", "grid_points");
}

const char* to_string(Status s) {
  switch (s) {
    case Status::converged:
      return "converged";
    case Status::max_iter:
      return "max_iter";
    case Status::error:
      return "error";
  }
  return "unknown";
}

std::vector<double> argmax_block(const GameSpec& game, std::size_t i, const JointStrategy& x,
                                 const BlockObjective& objective, const SolverConfig& cfg) {
  const auto& space = game.space();
  if (i >= game.num_agents()) throw ValidationError("agent index out of range");
  if (space.block(i).lattice) return argmax_block_lattice(game, i, x, objective);

  const std::size_t off = space.offset(i);
  const std::size_t d = space.block_dim(i);
  JointStrategy work = x;
  for (std::size_t pass = 0; pass < cfg.max_inner_iter; ++pass) {
    double moved = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t k = off + c;
      const double old = work[k];
      auto f = [&](double y) {
        work[k] = y;
        return block_objective_value(game, i, work, objective);
      };
      const double y = coordinate_argmax(f, space.lo(k), space.hi(k), old, cfg.grid_points, cfg.inner_tol);
      work[k] = y;
      moved = std::max(moved, std::abs(y - old));
    }
    if (d == 1 || moved < cfg.inner_tol) break;
  }
  return {work.begin() + static_cast<std::ptrdiff_t>(off), work.begin() + static_cast<std::ptrdiff_t>(off + d)};
}

// ---------------------------------------------------------------------------
// Gradient ascent

namespace {

Trajectory gradient_path(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg, std::uint64_t seed) {
  const auto& space = game.space();
  const bool lattice = space.has_lattice();
  Rng rng(seed);
  Trajectory traj;
  traj.iterates.push_back(make_iterate(game, 0, x0, 0.0, 0.0));

  // Ascent direction for every agent at y, with one shared kink draw.
  auto ascent = [&](const JointStrategy& y) {
    const auto slopes = game.kink_slopes(y, rng);
    std::vector<double> g(y.size());
    for (std::size_t i = 0; i < game.num_agents(); ++i) {
      const auto gi = game.utility_gradient(i, y, slopes);
      std::copy(gi.begin(), gi.end(), g.begin() + static_cast<std::ptrdiff_t>(space.offset(i)));
    }
    return g;
  };
  auto finite = [](const std::vector<double>& g) {
    return std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); });
  };
  auto step_size = [&](std::size_t k) {
    return cfg.step == StepSchedule::constant ? cfg.eta : cfg.eta / std::sqrt(static_cast<double>(k));
  };
  auto lattice_move = [&](const JointStrategy& y, const std::vector<double>& g) {
    JointStrategy out = y;
    for (std::size_t i = 0; i < game.num_agents(); ++i) {
      const std::size_t off = space.offset(i);
      std::size_t axis = 0;
      for (std::size_t c = 1; c < space.block_dim(i); ++c) {
        if (std::abs(g[off + c]) > std::abs(g[off + axis])) axis = c;
      }
      const double gv = g[off + axis];
      if (gv == 0.0) continue;
      const double step = space.block(i).lattice ? space.block(i).lattice->step : step_size(1);
      out[off + axis] += gv > 0.0 ? step : -step;
    }
    return project(space, out);
  };

  JointStrategy x = x0, x_prev = x0;
  double t = 1.0;
  traj.status = Status::max_iter;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const auto t0 = Clock::now();
    JointStrategy next;
    try {
      if (lattice) {
        const auto g = ascent(x);
        if (!finite(g)) {
          traj.status = Status::error;
          traj.message = "non-finite gradient at iterate " + std::to_string(k - 1);
          break;
        }
        next = lattice_move(x, g);
      } else {
        const double eta = step_size(k);
        double t_next = 1.0;
        JointStrategy y = x;
        if (cfg.accelerate) {
          t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
          const double beta = (t - 1.0) / t_next;
          for (std::size_t c = 0; c < y.size(); ++c) y[c] = x[c] + beta * (x[c] - x_prev[c]);
          y = project(space, y);
        }
        auto g = ascent(y);
        if (!finite(g)) {
          traj.status = Status::error;
          traj.message = "non-finite gradient at iterate " + std::to_string(k - 1);
          break;
        }
        next = y;
        for (std::size_t c = 0; c < next.size(); ++c) next[c] += eta * g[c];
        next = project(space, next);
        // Function-value restart: drop the momentum when the potential falls.
        if (cfg.accelerate && t > 1.0 && game.potential(next) < game.potential(x)) {
          t_next = 1.0;
          g = ascent(x);
          next = x;
          for (std::size_t c = 0; c < next.size(); ++c) next[c] += eta * g[c];
          next = project(space, next);
        }
        t = t_next;
      }
    } catch (const DomainError& e) {
      traj.status = Status::error;
      traj.message = e.what();
      break;
    }
    const double disp = inf_norm_diff(next, x);
    x_prev = x;
    x = std::move(next);
    traj.iterates.push_back(make_iterate(game, k, x, disp, ms_since(t0)));
    if (disp <= cfg.tol) {
      traj.status = Status::converged;
      break;
    }
  }
  return traj;
}

}  // namespace

Trajectory solve_gradient(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg) {
  validate(cfg);
  check_start(game, x0);
  if (cfg.accelerate && game.space().has_lattice()) {
    throw ValidationError("accelerated gradient ascent is not defined on lattice strategy spaces", "accelerate");
  }
  Trajectory main = gradient_path(game, x0, cfg, cfg.seed);
  if (cfg.averaging <= 1) return main;

  main.paths.push_back(main.iterates);
  for (std::size_t p = 1; p < cfg.averaging; ++p) {
    main.paths.push_back(gradient_path(game, x0, cfg, cfg.seed + p).iterates);
  }
  std::size_t len = 0;
  for (const auto& path : main.paths) len = std::max(len, path.size());
  const double inv = 1.0 / static_cast<double>(main.paths.size());
  for (std::size_t k = 0; k < len; ++k) {
    JointStrategy mean(x0.size(), 0.0);
    for (const auto& path : main.paths) {
      const auto& it = path[std::min(k, path.size() - 1)];
      for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += it.x[c] * inv;
    }
    const double disp = k == 0 ? 0.0 : inf_norm_diff(mean, main.mean_path.back().x);
    main.mean_path.push_back(make_iterate(game, k, mean, disp, 0.0));
  }
  return main;
}

// ---------------------------------------------------------------------------
// Iterative best response

Trajectory solve_ibr(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg) {
  validate(cfg);
  check_start(game, x0);
  const auto& space = game.space();
  const std::size_t n = game.num_agents();
  Trajectory traj;
  traj.iterates.push_back(make_iterate(game, 0, x0, 0.0, 0.0));
  JointStrategy x = x0;
  traj.status = Status::max_iter;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const auto t0 = Clock::now();
    JointStrategy before = x;
    try {
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = (cfg.first_agent + s) % n;
        const auto blk = argmax_block(game, i, x, BlockObjective::utility(), cfg);
        std::copy(blk.begin(), blk.end(), x.begin() + static_cast<std::ptrdiff_t>(space.offset(i)));
      }
    } catch (const DomainError& e) {
      traj.status = Status::error;
      traj.message = std::string("best response failed: ") + e.what();
      break;
    }
    const double disp = inf_norm_diff(x, before);
    traj.iterates.push_back(make_iterate(game, k, x, disp, ms_since(t0)));
    if (disp <= cfg.tol) {
      traj.status = Status::converged;
      break;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Proximal minorize-maximize

ProxStep prox_step(const GameSpec& game, const JointStrategy& anchor, const SolverConfig& cfg) {
  const auto& space = game.space();
  const double rho = cfg.prox_weight;
  ProxStep out;
  if (!game.kinks().empty() && !space.has_lattice()) {
    // Cyclic block passes stall on kinks that couple several agents, so the
    // joint problem goes to the barrier solver.
    auto r = detail::maximize_prox_barrier(game, anchor, rho, 1e-13, 200);
    out.x = std::move(r.x);
    out.ok = r.ok;
    out.inner_iterations = r.newton_steps;
    out.message = r.message;
  } else {
    JointStrategy x = anchor;
    const auto obj = BlockObjective::surrogate(anchor, rho);
    const std::size_t n = game.num_agents();
    bool done = false;
    for (std::size_t pass = 0; pass < cfg.max_inner_iter && !done; ++pass) {
      ++out.inner_iterations;
      double moved = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = (cfg.first_agent + s) % n;
        const auto blk = argmax_block(game, i, x, obj, cfg);
        for (std::size_t c = 0; c < blk.size(); ++c) {
          double& xi = x[space.offset(i) + c];
          moved = std::max(moved, std::abs(blk[c] - xi));
          xi = blk[c];
        }
      }
      done = moved <= cfg.inner_tol;
    }
    if (!done) {
      out.ok = false;
      out.message = "inner maximization did not converge within " + std::to_string(cfg.max_inner_iter) + " passes";
    }
    out.x = std::move(x);
  }

  // Keep the anchor unless the surrogate strictly improves; this is what
  // makes the potential sequence monotone.
  double sq = 0.0;
  for (std::size_t k = 0; k < anchor.size(); ++k) sq += (out.x[k] - anchor[k]) * (out.x[k] - anchor[k]);
  const double s_new = game.potential(out.x) - rho * sq;
  const double s_anchor = game.potential(anchor);
  if (!(s_new > s_anchor + 1e-14 * (1.0 + std::abs(s_anchor)))) out.x = anchor;
  return out;
}

Trajectory solve_imm(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg) {
  validate(cfg);
  check_start(game, x0);
  Trajectory traj;
  traj.iterates.push_back(make_iterate(game, 0, x0, 0.0, 0.0));
  JointStrategy x = x0;
  traj.status = Status::max_iter;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const auto t0 = Clock::now();
    ProxStep step;
    try {
      step = prox_step(game, x, cfg);
    } catch (const DomainError& e) {
      traj.status = Status::error;
      traj.message = e.what();
      break;
    }
    const double disp = inf_norm_diff(step.x, x);
    x = std::move(step.x);
    traj.iterates.push_back(make_iterate(game, k, x, disp, ms_since(t0)));
    if (!step.ok) {
      traj.status = Status::error;
      traj.message = "iteration " + std::to_string(k) + ": " + step.message;
      break;
    }
    if (disp <= cfg.tol) {
      traj.status = Status::converged;
      break;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Distributed IMM

void Coordinator::relay(std::size_t cycle, std::size_t agent, std::size_t offset, const std::vector<double>& block) {
  RelayEvent ev;
  ev.cycle = cycle;
  ev.agent = agent;
  ev.before.assign(state_.begin() + static_cast<std::ptrdiff_t>(offset),
                   state_.begin() + static_cast<std::ptrdiff_t>(offset + block.size()));
  ev.after = block;
  std::copy(block.begin(), block.end(), state_.begin() + static_cast<std::ptrdiff_t>(offset));
  log_.push_back(std::move(ev));
}

Trajectory solve_immd(const GameSpec& game, const JointStrategy& x0, const SolverConfig& cfg) {
  validate(cfg);
  check_start(game, x0);
  const auto& space = game.space();
  const std::size_t n = game.num_agents();
  Coordinator coord(x0);
  Trajectory traj;
  traj.iterates.push_back(make_iterate(game, 0, x0, 0.0, 0.0));
  traj.status = Status::max_iter;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const auto t0 = Clock::now();
    const JointStrategy start = coord.state();
    try {
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = (cfg.first_agent + s) % n;
        // The agent sees the latest relayed state; its own prox anchor is its
        // current block.
        const JointStrategy& view = coord.state();
        const auto blk = argmax_block(game, i, view, BlockObjective::surrogate(view, cfg.prox_weight), cfg);
        coord.relay(k, i, space.offset(i), blk);
      }
    } catch (const DomainError& e) {
      traj.status = Status::error;
      traj.message = e.what();
      break;
    }
    const double disp = inf_norm_diff(coord.state(), start);
    traj.iterates.push_back(make_iterate(game, k, coord.state(), disp, ms_since(t0)));
    if (disp <= cfg.tol) {
      traj.status = Status::converged;
      break;
    }
  }
  traj.relay_log = coord.take_log();
  return traj;
}

}  // namespace ptgame
