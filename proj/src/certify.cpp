#include "ptgame/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ptgame/error.hpp"

namespace ptgame {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section maximization on [a, b].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
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
  const double m = 0.5 * (a + b);
  return {m, f(m)};
}

double axis_cell(const std::vector<double>& axis) { return axis.size() < 2 ? 0.0 : axis[1] - axis[0]; }

// Coordinate golden passes over `coords` of y, each restricted to one cell
// either side of `center`. Only improvements are kept.
double refine(JointStrategy& y, double fy, const std::vector<std::size_t>& coords, const JointStrategy& center,
              const std::vector<std::vector<double>>& axes, const StrategySpace& space,
              const std::function<double(const JointStrategy&)>& f) {
  for (int pass = 0; pass < 100; ++pass) {
    double moved = 0.0;
    for (std::size_t k : coords) {
      if (space.lattice_of(k) || axes[k].size() < 2) continue;
      const double h = axis_cell(axes[k]);
      const double a = std::max(space.lo(k), center[k] - h);
      const double b = std::min(space.hi(k), center[k] + h);
      JointStrategy work = y;
      auto g = [&](double v) {
        work[k] = v;
        return f(work);
      };
      const auto [v, fv] = golden_max(g, a, b, 1e-12 * std::max(1.0, h));
      if (fv > fy) {
        moved = std::max(moved, std::abs(v - y[k]));
        y[k] = v;
        fy = fv;
      }
    }
    if (moved < 1e-12) break;
  }
  return fy;
}

// Calls visit(point) for every node of the product grid over `coords`,
// other coordinates taken from `base`.
void for_each_node(const std::vector<std::vector<double>>& axes, const std::vector<std::size_t>& coords,
                   JointStrategy base, const std::function<void(const JointStrategy&)>& visit) {
  std::vector<std::size_t> idx(coords.size(), 0);
  for (std::size_t c = 0; c < coords.size(); ++c) base[coords[c]] = axes[coords[c]][0];
  while (true) {
    visit(base);
    std::size_t c = 0;
    for (; c < coords.size(); ++c) {
      const auto& axis = axes[coords[c]];
      if (++idx[c] < axis.size()) {
        base[coords[c]] = axis[idx[c]];
        break;
      }
      idx[c] = 0;
      base[coords[c]] = axis[0];
    }
    if (c == coords.size()) return;
  }
}

}  // namespace

std::vector<std::vector<double>> grid_axes(const StrategySpace& space, std::size_t resolution) {
  if (resolution < 2) throw ValidationError("resolution must be at least 2", "certification.resolution");
  std::vector<std::vector<double>> axes(space.dimension());
  for (std::size_t k = 0; k < space.dimension(); ++k) {
    const double lo = space.lo(k), hi = space.hi(k);
    auto& axis = axes[k];
    if (!(hi > lo)) {
      axis = {lo};
    } else if (const auto& lat = space.lattice_of(k)) {
      const double first = std::ceil((lo - lat->origin) / lat->step - 1e-9);
      const double last = std::floor((hi - lat->origin) / lat->step + 1e-9);
      for (double m = first; m <= last; m += 1.0) axis.push_back(lat->origin + m * lat->step);
    } else {
      axis.resize(resolution);
      for (std::size_t j = 0; j < resolution; ++j) {
        axis[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(resolution - 1);
      }
      axis.back() = hi;
    }
  }
  return axes;
}

double grid_size(const StrategySpace& space, std::size_t resolution) {
  double total = 1.0;
  for (const auto& axis : grid_axes(space, resolution)) total *= static_cast<double>(axis.size());
  return total;
}

std::vector<double> br_gap(const GameSpec& game, const JointStrategy& x, std::size_t resolution) {
  const auto& space = game.space();
  const auto axes = grid_axes(space, resolution);
  std::vector<double> gaps(game.num_agents(), 0.0);
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    const double current = game.utility(i, x);
    std::vector<std::size_t> coords(space.block_dim(i));
    for (std::size_t c = 0; c < coords.size(); ++c) coords[c] = space.offset(i) + c;

    JointStrategy best_point = x;
    double best = current;
    for_each_node(axes, coords, x, [&](const JointStrategy& y) {
      const double v = game.utility(i, y);
      if (v > best) {
        best = v;
        best_point = y;
      }
    });
    const JointStrategy center = best_point;
    auto f = [&](const JointStrategy& y) { return game.utility(i, y); };
    best = refine(best_point, best, coords, center, axes, space, f);
    gaps[i] = std::max(0.0, best - current);
  }
  return gaps;
}

GridArgmax grid_potential_argmax(const GameSpec& game, std::size_t resolution, double budget, double tie_tol) {
  const auto& space = game.space();
  const double size = grid_size(space, resolution);
  if (size > budget) {
    std::ostringstream msg;
    msg << "grid of " << size << " potential evaluations exceeds the budget of " << budget
        << "; lower --resolution or raise --budget";
    throw BudgetExceeded(msg.str());
  }
  const auto axes = grid_axes(space, resolution);
  std::vector<std::size_t> coords(space.dimension());
  for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = k;

  GridArgmax out;
  out.grid_max = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, JointStrategy>> near;
  for_each_node(axes, coords, JointStrategy(space.dimension(), 0.0), [&](const JointStrategy& y) {
    ++out.evaluations;
    const double v = game.potential(y);
    if (!std::isfinite(v)) return;
    if (v > out.grid_max) {
      out.grid_max = v;
      out.point = y;
      std::erase_if(near, [&](const auto& e) { return e.first < v - tie_tol; });
    }
    if (v >= out.grid_max - tie_tol) near.emplace_back(v, y);
  });
  if (out.point.empty()) throw DomainError("potential is not finite at any grid node");
  for (auto& e : near) out.ties.push_back(std::move(e.second));
  for (const auto& axis : axes) out.cell = std::max(out.cell, axis_cell(axis));

  const JointStrategy center = out.point;
  auto f = [&](const JointStrategy& y) { return game.potential(y); };
  out.value = refine(out.point, out.grid_max, coords, center, axes, space, f);
  return out;
}

bool RegularizationBound::satisfied() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const BoundComparison& b) { return b.satisfied; });
}

RegularizationBound regularization_bound_check(const GameSpec& game0, const Regularizer& H, double lambda, std::size_t resolution,
                                double budget) {
  if (game0.lambda() != 0.0) throw ValidationError("the reference game must be unregularized", "lambda");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive", "lambda");
  const GameSpec game_l = game0.with_regularizer(H, lambda);

  RegularizationBound r;
  const auto a0 = grid_potential_argmax(game0, resolution, budget, 1e-6);
  r.gamma0_size = a0.ties.size();
  if (r.gamma0_size == 0) throw DomainError("empty maximizer set");
  if (r.gamma0_size == 1) {
    r.x_dagger = a0.point;
  } else {
    double best_h = std::numeric_limits<double>::infinity();
    for (const auto& y : a0.ties) {
      const double h = game_l.regularizer_value(y);
      if (h < best_h) {
        best_h = h;
        r.x_dagger = y;
      }
    }
  }
  r.h_dagger = game_l.regularizer_value(r.x_dagger);
  r.epsilon = lambda * game0.max_weight() * r.h_dagger;
  r.x_lambda = grid_potential_argmax(game_l, resolution, budget).point;
  r.gaps = br_gap(game0, r.x_lambda, resolution);
  r.tolerance = 1e-6 + std::max(0.0, a0.value - a0.grid_max);

  const double p_dag = game0.potential(r.x_dagger);
  const double p_lam = game0.potential(r.x_lambda);
  const double gap = *std::max_element(r.gaps.begin(), r.gaps.end());
  r.bounds.push_back({"phi0(x_dagger) >= phi0(x_lambda)", p_dag, p_lam, p_dag >= p_lam - r.tolerance});
  r.bounds.push_back({"phi0(x_lambda) >= phi0(x_dagger) - eps/a1", p_lam, p_dag - lambda * r.h_dagger,
                      p_lam >= p_dag - lambda * r.h_dagger - r.tolerance});
  r.bounds.push_back({"br_gap0(x_lambda) <= eps", gap, r.epsilon, gap <= r.epsilon + r.tolerance});
  return r;
}

bool RateCertificate::squared_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.ok_squared; });
}
bool RateCertificate::unsquared_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.ok_unsquared; });
}

RateCertificate imm_rate_certificate(const Trajectory& traj, const GameSpec& game, double prox_weight,
                                     std::size_t resolution, std::size_t horizon, double budget) {
  const auto am = grid_potential_argmax(game, resolution, budget, 1e-6);
  std::vector<JointStrategy> maximizers = am.ties.size() == 1 ? std::vector<JointStrategy>{am.point} : am.ties;
  return imm_rate_certificate(traj, game, prox_weight, am.value, maximizers, horizon);
}

RateCertificate imm_rate_certificate(const Trajectory& traj, const GameSpec& game, double prox_weight,
                                     double phi_star, const std::vector<JointStrategy>& maximizers,
                                     std::size_t horizon) {
  if (traj.iterates.empty()) throw ValidationError("empty trajectory");
  if (!(prox_weight > 0.0)) throw ValidationError("prox weight must be positive", "prox_weight");
  RateCertificate cert;
  cert.phi_star = phi_star;
  cert.prox_weight = prox_weight;
  const auto& x0 = traj.iterates.front().x;
  cert.distance = std::numeric_limits<double>::infinity();
  for (const auto& m : maximizers) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x0.size(); ++k) sq += (x0[k] - m[k]) * (x0[k] - m[k]);
    cert.distance = std::min(cert.distance, std::sqrt(sq));
  }
  if (horizon == 0) horizon = traj.iterates.size() - 1;
  constexpr double slack = 1e-9;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const auto& it = traj.iterates[std::min(n, traj.iterates.size() - 1)];
    RateRow row;
    row.n = n;
    row.suboptimality = phi_star - game.potential(it.x);
    row.bound_unsquared = prox_weight * cert.distance / (2.0 * static_cast<double>(n));
    row.bound_squared = prox_weight * cert.distance * cert.distance / (2.0 * static_cast<double>(n));
    row.ok_unsquared = row.suboptimality <= row.bound_unsquared + slack;
    row.ok_squared = row.suboptimality <= row.bound_squared + slack;
    cert.rows.push_back(row);
  }
  return cert;
}

}  // namespace ptgame
