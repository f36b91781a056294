#include "ptgame/pt_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "ptgame/error.hpp"

namespace ptgame {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kEndpointTol = 1e-9;
constexpr double kContinuityTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double segment_value(const ValueSegment& s, double u) {
  switch (s.form) {
    case ValueSegment::Form::linear:
      return s.offset + s.a * u;
    case ValueSegment::Form::log1p:
      if (u <= -1.0) {
        std::ostringstream msg;
        msg << "log1p segment starting at " << s.start << " undefined at offset " << u;
        throw DomainError(msg.str());
      }
      return s.offset + s.a * std::log1p(u);
    case ValueSegment::Form::exp_saturating:
      return s.offset + s.a * (1.0 - std::exp(-s.b * u));
  }
  return 0.0;
}

double segment_derivative(const ValueSegment& s, double u) {
  switch (s.form) {
    case ValueSegment::Form::linear:
      return s.a;
    case ValueSegment::Form::log1p:
      if (u <= -1.0) throw DomainError("log1p segment derivative outside domain");
      return s.a / (1.0 + u);
    case ValueSegment::Form::exp_saturating:
      return s.a * s.b * std::exp(-s.b * u);
  }
  return 0.0;
}

bool segment_increasing(const ValueSegment& s) {
  switch (s.form) {
    case ValueSegment::Form::linear:
    case ValueSegment::Form::log1p:
      return s.a > 0.0;
    case ValueSegment::Form::exp_saturating:
      return s.a * s.b > 0.0;
  }
  return false;
}

// Index of the segment covering x.
std::size_t find_segment(const std::vector<ValueSegment>& segs, double x) {
  auto it = std::upper_bound(segs.begin(), segs.end(), x,
                             [](double v, const ValueSegment& s) { return v < s.start; });
  if (it == segs.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segs.begin(), it)) - 1;
}

void validate_piecewise(const ValueFunction::Piecewise& pw) {
  const auto& segs = pw.segments;
  if (segs.empty()) throw ValidationError("piecewise value function needs at least one segment");
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!segment_increasing(segs[k])) {
      throw ValidationError("piecewise segment " + std::to_string(k) + " is not increasing");
    }
    if (k + 1 < segs.size()) {
      if (!(segs[k + 1].start > segs[k].start)) {
        throw ValidationError("piecewise segment starts must be strictly increasing");
      }
      const double left = segment_value(segs[k], segs[k + 1].start - segs[k].start);
      const double right = segs[k + 1].offset;
      if (std::abs(left - right) > kContinuityTol) {
        std::ostringstream msg;
        msg << "piecewise value function discontinuous at " << segs[k + 1].start << " (left "
            << left << ", right " << right << ")";
        throw ValidationError(msg.str());
      }
    }
  }
}

// Sampled monotonicity check over a window around the breakpoints.
void check_monotone_sampled(const ValueFunction& v, double lo, double hi) {
  constexpr int kSamples = 2001;
  double prev = 0.0;
  bool have_prev = false;
  for (int s = 0; s < kSamples; ++s) {
    const double x = lo + (hi - lo) * s / (kSamples - 1);
    double y;
    try {
      y = v(x);
    } catch (const DomainError&) {
      have_prev = false;
      continue;
    }
    if (have_prev && y < prev - 1e-12) {
      std::ostringstream msg;
      msg << "value function decreases near x = " << x;
      throw ValidationError(msg.str());
    }
    prev = y;
    have_prev = true;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// OutcomeDistribution

OutcomeDistribution::OutcomeDistribution(std::vector<double> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty()) throw ValidationError("support must be non-empty", "distribution.support");
  if (support_.size() != probs_.size()) {
    throw ValidationError("support and probs lengths differ", "distribution.probs");
  }
  for (std::size_t j = 0; j < support_.size(); ++j) {
    if (!std::isfinite(support_[j])) throw ValidationError("non-finite outcome", "distribution.support");
    if (j > 0 && !(support_[j] > support_[j - 1])) {
      throw ValidationError("support must be strictly increasing", "distribution.support");
    }
  }
  double sum = 0.0;
  for (double q : probs_) {
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("probability outside [0,1]", "distribution.probs");
    sum += q;
  }
  if (std::abs(sum - 1.0) > kProbSumTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", expected 1";
    throw ValidationError(msg.str(), "distribution.probs");
  }
}

// ---------------------------------------------------------------------------
// WeightingFunction

WeightingFunction::WeightingFunction(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const Identity&) {},
                 [](const Prelec& p) {
                   if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
                     throw ValidationError("prelec alpha must be positive", "weighting.alpha");
                   }
                 },
                 [](const Tabulated& t) {
                   const auto& k = t.knots;
                   if (k.size() < 2) throw ValidationError("need at least two knots", "weighting.knots");
                   for (std::size_t i = 0; i < k.size(); ++i) {
                     const auto [p, v] = k[i];
                     if (p < 0.0 || p > 1.0 || v < 0.0 || v > 1.0) {
                       throw ValidationError("knot outside [0,1]^2", "weighting.knots");
                     }
                     if (i > 0 && !(p > k[i - 1].first)) {
                       throw ValidationError("knot abscissae must be strictly increasing", "weighting.knots");
                     }
                     if (i > 0 && v < k[i - 1].second) {
                       throw ValidationError("tabulated weighting is not monotone", "weighting.knots");
                     }
                   }
                   if (std::abs(k.front().first) > kEndpointTol || std::abs(k.front().second) > kEndpointTol) {
                     throw ValidationError("weighting must satisfy pi(0) = 0", "weighting.knots");
                   }
                   if (std::abs(k.back().first - 1.0) > kEndpointTol ||
                       std::abs(k.back().second - 1.0) > kEndpointTol) {
                     throw ValidationError("weighting must satisfy pi(1) = 1", "weighting.knots");
                   }
                 },
             },
             kind_);
}

double WeightingFunction::operator()(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  return std::visit(overloaded{
                        [p](const Identity&) { return p; },
                        [p](const Prelec& w) {
                          if (p <= 0.0) return 0.0;
                          if (p >= 1.0) return 1.0;
                          return std::exp(-std::pow(-std::log(p), w.alpha));
                        },
                        [p](const Tabulated& t) {
                          const auto& k = t.knots;
                          if (p <= k.front().first) return k.front().second;
                          if (p >= k.back().first) return k.back().second;
                          auto it = std::upper_bound(k.begin(), k.end(), p,
                                                     [](double v, const auto& kn) { return v < kn.first; });
                          const auto& hi = *it;
                          const auto& lo = *(it - 1);
                          const double t01 = (p - lo.first) / (hi.first - lo.first);
                          return lo.second + t01 * (hi.second - lo.second);
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------
// ValueFunction

ValueFunction::ValueFunction(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const Identity&) {},
                 [](const Linear& l) {
                   if (!(l.slope > 0.0)) throw ValidationError("linear value function needs a positive slope");
                 },
                 [](const LogGainLinearLoss&) {},
                 [](const ExpSaturating& e) {
                   if (!(e.c * e.k > 0.0)) throw ValidationError("exp_saturating needs c*k > 0");
                 },
                 [](const Piecewise& pw) { validate_piecewise(pw); },
             },
             kind_);
  if (const auto* pw = std::get_if<Piecewise>(&kind_)) {
    const double lo = pw->segments.front().start - 10.0;
    const double hi = pw->segments.back().start + 10.0;
    check_monotone_sampled(*this, lo, hi);
  }
}

double ValueFunction::operator()(double x) const {
  return std::visit(overloaded{
                        [x](const Identity&) { return x; },
                        [x](const Linear& l) { return l.slope * x; },
                        [x](const LogGainLinearLoss&) { return x >= 0.0 ? std::log1p(x) : x; },
                        [x](const ExpSaturating& e) { return e.c * (1.0 - std::exp(-e.k * x)); },
                        [x](const Piecewise& pw) {
                          const auto& s = pw.segments[find_segment(pw.segments, x)];
                          return segment_value(s, x - s.start);
                        },
                    },
                    kind_);
}

double ValueFunction::derivative(double x) const {
  return std::visit(overloaded{
                        [](const Identity&) { return 1.0; },
                        [](const Linear& l) { return l.slope; },
                        [x](const LogGainLinearLoss&) { return x >= 0.0 ? 1.0 / (1.0 + x) : 1.0; },
                        [x](const ExpSaturating& e) { return e.c * e.k * std::exp(-e.k * x); },
                        [x](const Piecewise& pw) {
                          const auto& s = pw.segments[find_segment(pw.segments, x)];
                          return segment_derivative(s, x - s.start);
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------
// RewardFunction

double RewardFunction::operator()(double x, double xi) const {
  return std::visit(overloaded{
                        [=](const AffineScaled& r) { return (x - r.d) * xi; },
                        [=](const ScaleShift& r) { return x * xi - r.d; },
                        [=](const ExpOfProduct& r) { return std::exp(-r.k * x * xi); },
                        [=](const ExpPlain& r) { return std::exp(-r.k * x); },
                        [=](const Linear& r) { return r.c * x; },
                    },
                    kind_);
}

double RewardFunction::derivative(double x, double xi) const {
  return std::visit(overloaded{
                        [=](const AffineScaled&) { return xi; },
                        [=](const ScaleShift&) { return xi; },
                        [=](const ExpOfProduct& r) { return -r.k * xi * std::exp(-r.k * x * xi); },
                        [=](const ExpPlain& r) { return -r.k * std::exp(-r.k * x); },
                        [=](const Linear& r) { return r.c; },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------
// Prospects and expectations

Prospect::Prospect(std::vector<double> r, OutcomeDistribution d) : rewards(std::move(r)), dist(std::move(d)) {
  if (rewards.size() != dist.size()) throw ValidationError("rewards and probabilities differ in length");
  for (std::size_t j = 1; j < rewards.size(); ++j) {
    if (rewards[j] < rewards[j - 1]) throw ValidationError("prospect rewards must be nondecreasing");
  }
}

std::vector<double> distort_cumulative(std::span<const double> probs, const WeightingFunction& w) {
  std::vector<double> out(probs.size());
  double cum = 0.0;
  double prev_pi = 0.0;  // pi(0) = 0
  for (std::size_t j = 0; j < probs.size(); ++j) {
    cum += probs[j];
    // The last cumulative sum is 1 by construction; pin it so rounding in the
    // running sum cannot leak into pi.
    const double pi = (j + 1 == probs.size()) ? w(1.0) : w(cum);
    out[j] = std::max(0.0, pi - prev_pi);
    prev_pi = pi;
  }
  return out;
}

std::vector<double> distort_probabilities(const OutcomeDistribution& dist, const WeightingFunction& w) {
  return distort_cumulative(dist.probs(), w);
}

double pt_value(const Prospect& p, const ValueFunction& v, const WeightingFunction& w) {
  const auto qt = distort_probabilities(p.dist, w);
  double total = 0.0;
  for (std::size_t j = 0; j < qt.size(); ++j) total += qt[j] * v(p.rewards[j]);
  return total;
}

namespace {

struct SortedOutcomes {
  std::vector<std::size_t> order;  // original outcome indices, ascending reward
  std::vector<double> rewards;     // in sorted order
  std::vector<double> weights;     // distorted probabilities, sorted order
};

SortedOutcomes sort_and_weight(const RewardFunction& r, double x, const OutcomeDistribution& dist,
                               const WeightingFunction& w) {
  const auto& xi = dist.support();
  const std::size_t m = dist.size();
  std::vector<double> raw(m);
  for (std::size_t j = 0; j < m; ++j) {
    raw[j] = r(x, xi[j]);
    if (!std::isfinite(raw[j])) {
      std::ostringstream msg;
      msg << "reward is not finite at x = " << x << " for outcome " << j << " (xi = " << xi[j] << ")";
      throw DomainError(msg.str());
    }
  }
  SortedOutcomes s;
  s.order.resize(m);
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  std::stable_sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  s.rewards.resize(m);
  std::vector<double> probs(m);
  for (std::size_t j = 0; j < m; ++j) {
    s.rewards[j] = raw[s.order[j]];
    probs[j] = dist.probs()[s.order[j]];
  }
  s.weights = distort_cumulative(probs, w);
  return s;
}

}  // namespace

double pt_expected_reward(const ValueFunction& v, const RewardFunction& r, double x,
                          const OutcomeDistribution& dist, const WeightingFunction& w) {
  const auto s = sort_and_weight(r, x, dist, w);
  double total = 0.0;
  for (std::size_t j = 0; j < s.rewards.size(); ++j) {
    double val;
    try {
      val = v(s.rewards[j]);
    } catch (const DomainError& e) {
      std::ostringstream msg;
      msg << "value undefined for outcome " << s.order[j] << " (xi = " << dist.support()[s.order[j]]
          << ", reward = " << s.rewards[j] << "): " << e.what();
      throw DomainError(msg.str());
    }
    total += s.weights[j] * val;
  }
  if (!std::isfinite(total)) throw DomainError("distorted expectation is not finite");
  return total;
}

double pt_expected_reward_derivative(const ValueFunction& v, const RewardFunction& r, double x,
                                     const OutcomeDistribution& dist, const WeightingFunction& w) {
  const auto s = sort_and_weight(r, x, dist, w);
  double total = 0.0;
  for (std::size_t j = 0; j < s.rewards.size(); ++j) {
    const double xi = dist.support()[s.order[j]];
    total += s.weights[j] * v.derivative(s.rewards[j]) * r.derivative(x, xi);
  }
  return total;
}

}  // namespace ptgame
