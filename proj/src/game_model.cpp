#include "ptgame/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptgame/error.hpp"

namespace ptgame {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string agent_field(std::size_t i, const std::string& rest) {
  return "agents[" + std::to_string(i) + "]" + (rest.empty() ? "" : "." + rest);
}

// Range of lattice indices k with origin + k*step inside [lo, hi].
std::pair<double, double> lattice_index_range(const Lattice& lat, double lo, double hi) {
  const double kmin = std::ceil((lo - lat.origin) / lat.step - 1e-9);
  const double kmax = std::floor((hi - lat.origin) / lat.step + 1e-9);
  return {kmin, kmax};
}

}  // namespace

// ---------------------------------------------------------------------------
// StrategySpace

StrategySpace::StrategySpace(std::vector<StrategyBlock> blocks) : blocks_(std::move(blocks)) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const std::string field = agent_field(i, "block");
    if (b.dim() == 0) throw ValidationError("block dimension must be at least 1", field);
    if (b.hi.size() != b.lo.size()) throw ValidationError("lo and hi lengths differ", field);
    if (b.lattice && !(b.lattice->step > 0.0)) throw ValidationError("lattice step must be positive", field + ".lattice");
    for (std::size_t k = 0; k < b.dim(); ++k) {
      if (!std::isfinite(b.lo[k]) || !std::isfinite(b.hi[k])) throw ValidationError("bounds must be finite", field);
      if (b.lo[k] > b.hi[k]) throw ValidationError("lo exceeds hi", field);
      if (b.lattice) {
        const auto [kmin, kmax] = lattice_index_range(*b.lattice, b.lo[k], b.hi[k]);
        if (kmin > kmax) throw ValidationError("no lattice point inside the box", field + ".lattice");
      }
      lo_.push_back(b.lo[k]);
      hi_.push_back(b.hi[k]);
      owner_.push_back(i);
    }
    offsets_.push_back(off);
    off += b.dim();
  }
}

bool StrategySpace::has_lattice() const noexcept {
  return std::any_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.lattice.has_value(); });
}

bool StrategySpace::all_lattice() const noexcept {
  return !blocks_.empty() &&
         std::all_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.lattice.has_value(); });
}

bool StrategySpace::contains(std::span<const double> x, double tol) const {
  if (x.size() != dimension()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] >= lo_[k] - tol && x[k] <= hi_[k] + tol)) return false;
  }
  return true;
}

bool StrategySpace::lattice_feasible(std::span<const double> x, double tol) const {
  if (x.size() != dimension()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto& lat = lattice_of(k);
    if (!lat) continue;
    const double idx = (x[k] - lat->origin) / lat->step;
    if (std::abs(idx - std::round(idx)) > tol) return false;
  }
  return true;
}

JointStrategy project(const StrategySpace& space, std::span<const double> x) {
  if (x.size() != space.dimension()) {
    std::ostringstream msg;
    msg << "expected " << space.dimension() << " coordinates, got " << x.size();
    throw ValidationError(msg.str());
  }
  JointStrategy out(x.begin(), x.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = std::clamp(out[k], space.lo(k), space.hi(k));
    const auto& lat = space.lattice_of(k);
    if (!lat) continue;
    const double idx = (out[k] - lat->origin) / lat->step;
    const double fl = std::floor(idx);
    double k_near = (idx - fl > 0.5) ? fl + 1.0 : fl;
    const auto [kmin, kmax] = lattice_index_range(*lat, space.lo(k), space.hi(k));
    k_near = std::clamp(k_near, kmin, kmax);
    out[k] = lat->origin + k_near * lat->step;
  }
  return out;
}

JointStrategy random_point(const StrategySpace& space, Rng& rng) {
  JointStrategy x(space.dimension());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(space.lo(k), space.hi(k));
  return space.has_lattice() ? project(space, x) : x;
}

// ---------------------------------------------------------------------------
// GameSpec

GameSpec::GameSpec(StrategySpace space, std::vector<AgentSpec> agents, CollectiveUtility collective,
                   Regularizer reg, double lambda, OutcomeDistribution dist, WeightingFunction weighting)
    : space_(std::move(space)),
      agents_(std::move(agents)),
      collective_(std::move(collective)),
      regularizer_(std::move(reg)),
      lambda_(lambda),
      dist_(std::move(dist)),
      weighting_(std::move(weighting)) {
  validate();
  build_kinks();
  check_term_concavity();
}

bool operator==(const GameSpec& a, const GameSpec& b) {
  return a.space_ == b.space_ && a.agents_ == b.agents_ && a.collective_ == b.collective_ &&
         a.regularizer_ == b.regularizer_ && a.lambda_ == b.lambda_ && a.dist_ == b.dist_ &&
         a.weighting_ == b.weighting_;
}

void GameSpec::validate() {
  const std::size_t n = space_.dimension();
  if (agents_.empty()) throw ValidationError("game needs at least one agent", "agents");
  if (agents_.size() != space_.num_blocks()) {
    throw ValidationError("number of agents differs from number of strategy blocks", "agents");
  }
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw ValidationError("lambda must be nonnegative", "lambda");

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw ValidationError("weight must be positive", agent_field(i, "weight"));
    }
    if (!std::isfinite(a.constant)) throw ValidationError("constant must be finite", agent_field(i, "constant"));
    for (std::size_t t = 0; t < a.terms.size(); ++t) {
      const auto& term = a.terms[t];
      const std::string field = agent_field(i, "individual_terms[" + std::to_string(t) + "]");
      if (term.sign != 1 && term.sign != -1) throw ValidationError("sign must be +1 or -1", field + ".sign");
      if (term.coordinate >= space_.block_dim(i)) {
        throw ValidationError("coordinate outside the agent's block", field + ".coordinate");
      }
      const std::size_t k = space_.offset(i) + term.coordinate;
      for (double x : {space_.lo(k), 0.5 * (space_.lo(k) + space_.hi(k)), space_.hi(k)}) {
        try {
          pt_expected_reward(term.value, term.reward, x, dist_, weighting_);
        } catch (const DomainError& e) {
          throw ValidationError(std::string("term not evaluable on the box: ") + e.what(), field);
        }
      }
    }
  }
  for (std::size_t i = 1; i < agents_.size(); ++i) {
    if (agents_[i].weight > agents_[i - 1].weight) {
      warnings_.push_back("agent weights are not nonincreasing (agent " + std::to_string(i) + ")");
      break;
    }
  }

  for (std::size_t t = 0; t < collective_.size(); ++t) {
    const std::string field = "collective[" + std::to_string(t) + "]";
    auto check_coords = [&](const std::vector<std::size_t>& coords, bool allow_empty) {
      if (!allow_empty && coords.empty()) throw ValidationError("coordinate list is empty", field + ".coords");
      for (auto c : coords) {
        if (c >= n) throw ValidationError("coordinate index out of range", field + ".coords");
      }
    };
    std::visit(overloaded{
                   [&](const collective::Constant& c) {
                     if (!std::isfinite(c.c)) throw ValidationError("constant must be finite", field);
                   },
                   [&](const collective::NegQuadraticToTarget& q) {
                     if (!(q.coef >= 0.0)) throw ValidationError("coefficient must be nonnegative", field + ".coef");
                     check_coords(q.coords, false);
                   },
                   [&](const collective::NegSqDeviation& q) { check_coords(q.coords, true); },
                   [&](const collective::NegPairwiseL1&) {
                     if (space_.num_blocks() < 2) throw ValidationError("pairwise term needs two or more agents", field);
                     for (std::size_t i = 1; i < space_.num_blocks(); ++i) {
                       if (space_.block_dim(i) != space_.block_dim(0)) {
                         throw ValidationError("pairwise term needs equal block dimensions", field);
                       }
                     }
                   },
                   [&](const collective::NegAbsSum& a) { check_coords(a.coords, false); },
               },
               collective_[t]);
  }

  bool strictly_convex = false;
  for (std::size_t t = 0; t < regularizer_.size(); ++t) {
    const std::string field = "regularizer[" + std::to_string(t) + "]";
    std::visit(overloaded{
                   [&](const regularizer::WeightedSqNorm& w) {
                     if (w.center.size() != n || w.weights.size() != n) {
                       throw ValidationError("center and weights need one entry per coordinate", field);
                     }
                     for (double v : w.weights) {
                       if (!(v > 0.0)) throw ValidationError("weights must be positive", field + ".weights");
                     }
                     strictly_convex = true;
                   },
                   [&](const regularizer::LinearIncentive& l) {
                     if (l.coefficients.size() != l.coords.size()) {
                       throw ValidationError("coefficients and coords lengths differ", field);
                     }
                     for (std::size_t j = 0; j < l.coords.size(); ++j) {
                       if (l.coords[j] >= n) throw ValidationError("coordinate index out of range", field + ".coords");
                       const double lo_val = l.coefficients[j] * space_.lo(l.coords[j]);
                       const double hi_val = l.coefficients[j] * space_.hi(l.coords[j]);
                       if (std::min(lo_val, hi_val) < 0.0) {
                         warnings_.push_back(field + ": linear incentive can be negative on the box");
                       }
                     }
                   },
               },
               regularizer_[t]);
  }
  if (lambda_ > 0.0 && !regularizer_.empty() && !strictly_convex) {
    warnings_.push_back("regularizer is not strictly convex; uniqueness needs a strictly concave collective utility");
  }
}

void GameSpec::build_kinks() {
  kinks_.clear();
  for (const auto& term : collective_) {
    if (const auto* a = std::get_if<collective::NegAbsSum>(&term)) {
      Kink k;
      for (auto c : a->coords) k.coeffs.emplace_back(c, 1.0);
      kinks_.push_back(std::move(k));
    } else if (std::holds_alternative<collective::NegPairwiseL1>(term)) {
      const std::size_t d = space_.block_dim(0);
      for (std::size_t i = 0; i < space_.num_blocks(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          for (std::size_t c = 0; c < d; ++c) {
            Kink k;
            k.coeffs.emplace_back(space_.offset(i) + c, 1.0);
            k.coeffs.emplace_back(space_.offset(j) + c, -1.0);
            kinks_.push_back(std::move(k));
          }
        }
      }
    }
  }
}

void GameSpec::check_term_concavity() {
  constexpr int kPoints = 41;
  constexpr double kTol = 1e-8;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (std::size_t t = 0; t < agents_[i].terms.size(); ++t) {
      const auto& term = agents_[i].terms[t];
      const std::size_t k = space_.offset(i) + term.coordinate;
      const double lo = space_.lo(k), hi = space_.hi(k);
      if (!(hi > lo)) continue;
      std::vector<double> g(kPoints);
      for (int s = 0; s < kPoints; ++s) {
        const double x = lo + (hi - lo) * s / (kPoints - 1);
        g[s] = term.sign * pt_expected_reward(term.value, term.reward, x, dist_, weighting_);
      }
      bool concave = true;
      for (int s = 1; s + 1 < kPoints && concave; ++s) {
        const double scale = 1.0 + std::max({std::abs(g[s - 1]), std::abs(g[s]), std::abs(g[s + 1])});
        if (g[s] < 0.5 * (g[s - 1] + g[s + 1]) - kTol * scale) concave = false;
      }
      if (!concave) {
        warnings_.push_back(agent_field(i, "individual_terms[" + std::to_string(t) + "]") +
                            (term.sign > 0 ? ": reward term is not concave" : ": cost term is not convex"));
      }
    }
  }
}

double GameSpec::max_weight() const noexcept {
  double m = 0.0;
  for (const auto& a : agents_) m = std::max(m, a.weight);
  return m;
}

GameSpec GameSpec::with_lambda(double lambda) const {
  return GameSpec(space_, agents_, collective_, regularizer_, lambda, dist_, weighting_);
}

GameSpec GameSpec::with_regularizer(Regularizer reg, double lambda) const {
  return GameSpec(space_, agents_, collective_, std::move(reg), lambda, dist_, weighting_);
}

double GameSpec::collective_smooth_value(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& term : collective_) {
    total += std::visit(overloaded{
                            [](const collective::Constant& c) { return c.c; },
                            [&](const collective::NegQuadraticToTarget& q) {
                              double s = -q.target;
                              for (auto c : q.coords) s += x[c];
                              return -q.coef * s * s;
                            },
                            [&](const collective::NegSqDeviation& q) {
                              double s = 0.0;
                              if (q.coords.empty()) {
                                for (double v : x) s += (v - q.d) * (v - q.d);
                              } else {
                                for (auto c : q.coords) s += (x[c] - q.d) * (x[c] - q.d);
                              }
                              return -s;
                            },
                            [](const collective::NegPairwiseL1&) { return 0.0; },
                            [](const collective::NegAbsSum&) { return 0.0; },
                        },
                        term);
  }
  return total;
}

double GameSpec::kink_penalty(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& k : kinks_) {
    double s = 0.0;
    for (const auto& [c, a] : k.coeffs) s += a * x[c];
    total += k.weight * std::abs(s);
  }
  return total;
}

double GameSpec::collective_value(std::span<const double> x) const {
  return collective_smooth_value(x) - kink_penalty(x);
}

double GameSpec::regularizer_value(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& term : regularizer_) {
    total += std::visit(overloaded{
                            [&](const regularizer::WeightedSqNorm& w) {
                              double s = 0.0;
                              for (std::size_t k = 0; k < x.size(); ++k) {
                                s += w.weights[k] * (x[k] - w.center[k]) * (x[k] - w.center[k]);
                              }
                              return s;
                            },
                            [&](const regularizer::LinearIncentive& l) {
                              double s = 0.0;
                              for (std::size_t j = 0; j < l.coords.size(); ++j) s += l.coefficients[j] * x[l.coords[j]];
                              return s;
                            },
                        },
                        term);
  }
  return total;
}

double GameSpec::individual_value(std::size_t i, std::span<const double> x) const {
  const auto& a = agents_.at(i);
  double total = a.constant;
  const std::size_t off = space_.offset(i);
  for (const auto& t : a.terms) {
    total += t.sign * pt_expected_reward(t.value, t.reward, x[off + t.coordinate], dist_, weighting_);
  }
  return total;
}

double GameSpec::utility(std::size_t i, std::span<const double> x) const {
  if (i >= agents_.size()) throw ValidationError("agent index out of range");
  return agents_[i].weight * (collective_value(x) - lambda_ * regularizer_value(x)) + individual_value(i, x);
}

double GameSpec::smooth_potential(std::span<const double> x) const {
  double total = collective_smooth_value(x) - lambda_ * regularizer_value(x);
  for (std::size_t j = 0; j < agents_.size(); ++j) total += individual_value(j, x) / agents_[j].weight;
  return total;
}

double GameSpec::potential(std::span<const double> x) const { return smooth_potential(x) - kink_penalty(x); }

std::vector<double> GameSpec::kink_slopes(std::span<const double> x, Rng& rng) const {
  std::vector<double> s(kinks_.size());
  for (std::size_t j = 0; j < kinks_.size(); ++j) {
    double v = 0.0;
    for (const auto& [c, a] : kinks_[j].coeffs) v += a * x[c];
    s[j] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : rng.uniform(-1.0, 1.0));
  }
  return s;
}

bool GameSpec::on_kink(std::span<const double> x) const {
  for (const auto& k : kinks_) {
    double v = 0.0;
    for (const auto& [c, a] : k.coeffs) v += a * x[c];
    if (v == 0.0) return true;
  }
  return false;
}

std::vector<double> GameSpec::collective_smooth_gradient(std::span<const double> x) const {
  std::vector<double> g(x.size(), 0.0);
  for (const auto& term : collective_) {
    std::visit(overloaded{
                   [](const collective::Constant&) {},
                   [&](const collective::NegQuadraticToTarget& q) {
                     double s = -q.target;
                     for (auto c : q.coords) s += x[c];
                     for (auto c : q.coords) g[c] += -2.0 * q.coef * s;
                   },
                   [&](const collective::NegSqDeviation& q) {
                     if (q.coords.empty()) {
                       for (std::size_t k = 0; k < x.size(); ++k) g[k] += -2.0 * (x[k] - q.d);
                     } else {
                       for (auto c : q.coords) g[c] += -2.0 * (x[c] - q.d);
                     }
                   },
                   [](const collective::NegPairwiseL1&) {},
                   [](const collective::NegAbsSum&) {},
               },
               term);
  }
  return g;
}

std::vector<double> GameSpec::regularizer_gradient(std::span<const double> x) const {
  std::vector<double> g(x.size(), 0.0);
  for (const auto& term : regularizer_) {
    std::visit(overloaded{
                   [&](const regularizer::WeightedSqNorm& w) {
                     for (std::size_t k = 0; k < x.size(); ++k) g[k] += 2.0 * w.weights[k] * (x[k] - w.center[k]);
                   },
                   [&](const regularizer::LinearIncentive& l) {
                     for (std::size_t j = 0; j < l.coords.size(); ++j) g[l.coords[j]] += l.coefficients[j];
                   },
               },
               term);
  }
  return g;
}

double GameSpec::individual_derivative(std::size_t i, std::size_t local, std::span<const double> x) const {
  const std::size_t off = space_.offset(i);
  double d = 0.0;
  for (const auto& t : agents_[i].terms) {
    if (t.coordinate != local) continue;
    d += t.sign * pt_expected_reward_derivative(t.value, t.reward, x[off + local], dist_, weighting_);
  }
  return d;
}

std::vector<double> GameSpec::smooth_potential_gradient(std::span<const double> x) const {
  auto g = collective_smooth_gradient(x);
  const auto gh = regularizer_gradient(x);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] -= lambda_ * gh[k];
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (std::size_t c = 0; c < space_.block_dim(i); ++c) {
      g[space_.offset(i) + c] += individual_derivative(i, c, x) / agents_[i].weight;
    }
  }
  return g;
}

std::vector<double> GameSpec::potential_gradient(std::span<const double> x, std::span<const double> slopes) const {
  auto g = smooth_potential_gradient(x);
  for (std::size_t j = 0; j < kinks_.size(); ++j) {
    for (const auto& [c, a] : kinks_[j].coeffs) g[c] -= kinks_[j].weight * slopes[j] * a;
  }
  return g;
}

std::vector<double> GameSpec::utility_gradient(std::size_t i, std::span<const double> x,
                                               std::span<const double> slopes) const {
  if (i >= agents_.size()) throw ValidationError("agent index out of range");
  auto gc = collective_smooth_gradient(x);
  for (std::size_t j = 0; j < kinks_.size(); ++j) {
    for (const auto& [c, a] : kinks_[j].coeffs) gc[c] -= kinks_[j].weight * slopes[j] * a;
  }
  const auto gh = regularizer_gradient(x);
  const std::size_t off = space_.offset(i);
  std::vector<double> g(space_.block_dim(i));
  for (std::size_t c = 0; c < g.size(); ++c) {
    g[c] = agents_[i].weight * (gc[off + c] - lambda_ * gh[off + c]) + individual_derivative(i, c, x);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Free-function surface

double utility(const GameSpec& game, std::size_t i, std::span<const double> x) { return game.utility(i, x); }

double potential(const GameSpec& game, std::span<const double> x) { return game.potential(x); }

std::vector<double> subgrad_potential(const GameSpec& game, std::span<const double> x, Rng& rng) {
  const auto slopes = game.kink_slopes(x, rng);
  return game.potential_gradient(x, slopes);
}

std::vector<double> subgrad_utility(const GameSpec& game, std::size_t i, std::span<const double> x, Rng& rng) {
  const auto slopes = game.kink_slopes(x, rng);
  return game.utility_gradient(i, x, slopes);
}

double verify_weighted_potential(const GameSpec& game, std::size_t samples, Rng& rng) {
  const auto& space = game.space();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x = random_point(space, rng);
    const std::size_t i = rng.index(game.num_agents());
    auto dev = random_point(space, rng);
    JointStrategy xt = x;
    for (std::size_t c = 0; c < space.block_dim(i); ++c) xt[space.offset(i) + c] = dev[space.offset(i) + c];
    const double lhs = game.utility(i, x) - game.utility(i, xt);
    const double rhs = game.agent(i).weight * (game.potential(x) - game.potential(xt));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace ptgame
