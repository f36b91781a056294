#include "prox_barrier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ptgame::detail {

namespace {

struct Problem {
  const GameSpec& game;
  const JointStrategy& anchor;
  double rho;
  std::vector<std::size_t> free;  // flat indices of non-degenerate coordinates
  std::size_t nk = 0;
  Eigen::MatrixXd G;  // constraint slacks s = G z + c
  Eigen::VectorXd c;

  std::size_t nz() const { return free.size() + nk; }

  JointStrategy to_x(const Eigen::VectorXd& z) const {
    JointStrategy x = anchor;
    for (std::size_t p = 0; p < free.size(); ++p) x[free[p]] = z[static_cast<Eigen::Index>(p)];
    return x;
  }

  double objective(const Eigen::VectorXd& z) const {
    const auto x = to_x(z);
    double val = game.smooth_potential(x);
    for (std::size_t p = 0; p < free.size(); ++p) {
      const double d = x[free[p]] - anchor[free[p]];
      val -= rho * d * d;
    }
    const auto& kinks = game.kinks();
    for (std::size_t k = 0; k < nk; ++k) val -= kinks[k].weight * z[static_cast<Eigen::Index>(free.size() + k)];
    return val;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const {
    const auto x = to_x(z);
    const auto g = game.smooth_potential_gradient(x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(nz()));
    for (std::size_t p = 0; p < free.size(); ++p) {
      out[static_cast<Eigen::Index>(p)] = g[free[p]] - 2.0 * rho * (x[free[p]] - anchor[free[p]]);
    }
    const auto& kinks = game.kinks();
    for (std::size_t k = 0; k < nk; ++k) out[static_cast<Eigen::Index>(free.size() + k)] = -kinks[k].weight;
    return out;
  }

  // Hessian of the smooth objective by differencing the analytic gradient.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& z) const {
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nz()), static_cast<Eigen::Index>(nz()));
    const auto x = to_x(z);
    const auto& space = game.space();
    for (Eigen::Index p = 0; p < nf; ++p) {
      const std::size_t k = free[static_cast<std::size_t>(p)];
      const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
      JointStrategy xp = x, xm = x;
      xp[k] = std::min(x[k] + h, space.hi(k));
      xm[k] = std::max(x[k] - h, space.lo(k));
      const auto gp = game.smooth_potential_gradient(xp);
      const auto gm = game.smooth_potential_gradient(xm);
      for (Eigen::Index q = 0; q < nf; ++q) {
        const std::size_t kq = free[static_cast<std::size_t>(q)];
        H(q, p) = (gp[kq] - gm[kq]) / (xp[k] - xm[k]);
      }
    }
    H.topLeftCorner(nf, nf) = 0.5 * (H.topLeftCorner(nf, nf) + H.topLeftCorner(nf, nf).transpose()).eval();
    H.topLeftCorner(nf, nf).diagonal().array() -= 2.0 * rho;
    return H;
  }
};

double barrier_value(const Problem& prob, const Eigen::VectorXd& z, double tau) {
  const Eigen::VectorXd s = prob.G * z + prob.c;
  if ((s.array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
  return tau * prob.objective(z) + s.array().log().sum();
}

}  // namespace

BarrierResult maximize_prox_barrier(const GameSpec& game, const JointStrategy& anchor, double rho,
                                    double gap_tol, std::size_t max_newton) {
  const auto& space = game.space();
  Problem prob{game, anchor, rho, {}, game.kinks().size(), {}, {}};
  for (std::size_t k = 0; k < space.dimension(); ++k) {
    if (space.hi(k) > space.lo(k)) prob.free.push_back(k);
  }
  const auto nf = static_cast<Eigen::Index>(prob.free.size());
  const auto nk = static_cast<Eigen::Index>(prob.nk);
  const Eigen::Index nz = nf + nk;
  const Eigen::Index m = 2 * nf + 2 * nk;

  // Start strictly inside the box, near the anchor.
  JointStrategy x0 = anchor;
  for (std::size_t k = 0; k < space.dimension(); ++k) {
    const double margin = 1e-6 * (space.hi(k) - space.lo(k));
    x0[k] = (space.hi(k) > space.lo(k)) ? std::clamp(anchor[k], space.lo(k) + margin, space.hi(k) - margin)
                                        : space.lo(k);
  }

  prob.G = Eigen::MatrixXd::Zero(m, nz);
  prob.c = Eigen::VectorXd::Zero(m);
  Eigen::Index row = 0;
  for (Eigen::Index p = 0; p < nf; ++p) {
    const std::size_t k = prob.free[static_cast<std::size_t>(p)];
    prob.G(row, p) = 1.0;
    prob.c[row++] = -space.lo(k);
    prob.G(row, p) = -1.0;
    prob.c[row++] = space.hi(k);
  }
  Eigen::VectorXd z(nz);
  for (Eigen::Index p = 0; p < nf; ++p) z[p] = x0[prob.free[static_cast<std::size_t>(p)]];
  const auto& kinks = game.kinks();
  for (Eigen::Index kk = 0; kk < nk; ++kk) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(nz);
    double fixed = 0.0;
    double ax = 0.0;
    for (const auto& [coord, coef] : kinks[static_cast<std::size_t>(kk)].coeffs) {
      auto it = std::find(prob.free.begin(), prob.free.end(), coord);
      if (it == prob.free.end()) {
        fixed += coef * x0[coord];
      } else {
        a[std::distance(prob.free.begin(), it)] = coef;
      }
      ax += coef * x0[coord];
    }
    // t - a^T x >= 0 and t + a^T x >= 0
    prob.G.row(row) = -a.transpose();
    prob.G(row, nf + kk) = 1.0;
    prob.c[row++] = -fixed;
    prob.G.row(row) = a.transpose();
    prob.G(row, nf + kk) = 1.0;
    prob.c[row++] = fixed;
    z[nf + kk] = std::abs(ax) + 1.0;
  }

  BarrierResult res;
  if (nz == 0) {
    res.x = anchor;
    return res;
  }
  double tau = 1.0;
  const double scale = 1.0 + std::abs(prob.objective(z));
  while (true) {
    for (std::size_t it = 0; it < max_newton; ++it) {
      const Eigen::VectorXd s = prob.G * z + prob.c;
      const Eigen::VectorXd inv = s.cwiseInverse();
      const Eigen::VectorXd grad = tau * prob.gradient(z) + prob.G.transpose() * inv;
      Eigen::MatrixXd negH = -tau * prob.hessian(z);
      negH += prob.G.transpose() * inv.cwiseAbs2().asDiagonal() * prob.G;

      Eigen::VectorXd d;
      double shift = 0.0;
      for (int attempt = 0; attempt < 30; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(negH + shift * Eigen::MatrixXd::Identity(nz, nz));
        if (llt.info() == Eigen::Success) {
          d = llt.solve(grad);
          if (d.allFinite()) break;
        }
        shift = shift == 0.0 ? 1e-10 * (1.0 + negH.diagonal().cwiseAbs().maxCoeff()) : shift * 10.0;
        d.resize(0);
      }
      ++res.newton_steps;
      if (d.size() == 0) {
        res.ok = false;
        res.message = "barrier Newton system could not be factored";
        break;
      }
      const double decrement = grad.dot(d);
      if (!(decrement > 2e-12)) break;

      // Largest step keeping every slack positive.
      const Eigen::VectorXd gd = prob.G * d;
      double alpha = 1.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (gd[r] < 0.0) alpha = std::min(alpha, -0.99 * s[r] / gd[r]);
      }
      const double phi0 = barrier_value(prob, z, tau);
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd zt = z + alpha * d;
        const double phi = barrier_value(prob, zt, tau);
        if (phi >= phi0 + 0.25 * alpha * decrement) {
          z = zt;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // no further progress at this tau
    }
    if (!res.ok) break;
    if (static_cast<double>(m) / tau < gap_tol * scale) break;
    tau *= 10.0;
  }

  res.x = prob.to_x(z);
  for (std::size_t k = 0; k < res.x.size(); ++k) res.x[k] = std::clamp(res.x[k], space.lo(k), space.hi(k));
  return res;
}

}  // namespace ptgame::detail
