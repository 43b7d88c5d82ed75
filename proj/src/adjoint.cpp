#include "stiffsense/adjoint.hpp"

#include <cmath>
#include <vector>

namespace stiffsense {

namespace {

void require_reversible(const Trajectory& traj, const SimConfig& cfg) {
  if (cfg.integrator != IntegratorKind::ExplicitEuler) {
    throw std::invalid_argument("adjoint_gradient is defined for explicit Euler only");
  }
  if (traj.status.kind == StatusKind::PrimalOverflow ||
      traj.status.kind == StatusKind::NewtonFailed) {
    throw TrajectoryIncomplete("primal trajectory terminated before n_steps");
  }
  const std::size_t expected = static_cast<std::size_t>(cfg.n_steps) + 1;
  if (cfg.record_stride != 1 || traj.records.size() != expected ||
      traj.records.back().step != cfg.n_steps) {
    throw TrajectoryIncomplete("adjoint sweep needs every step recorded (record_stride 1)");
  }
}

}  // namespace

AdjointResult adjoint_gradient_weighted(const Trajectory& traj, const ModelParams& p,
                                        const SimConfig& cfg,
                                        std::span<const double> weights) {
  require_reversible(traj, cfg);
  const std::int64_t n_final = cfg.n_steps;
  if (weights.size() != static_cast<std::size_t>(n_final) + 1) {
    throw std::invalid_argument("weights must have one entry per step");
  }

  AdjointResult out;
  double lambda = weights[static_cast<std::size_t>(n_final)];
  if (std::isfinite(lambda)) out.max_costate_magnitude = std::fabs(lambda);

  for (std::int64_t n = n_final - 1; n >= 0; --n) {
    const double x_n = traj.records[static_cast<std::size_t>(n)].x;
    const RhsPartials d = rhs_partials(x_n, p);
    // lambda currently holds lambda_{n+1}.
    out.dJ_dalpha += lambda * (cfg.dt * d.df_dalpha);
    out.dJ_dbeta += lambda * (cfg.dt * d.df_dbeta);
    lambda = weights[static_cast<std::size_t>(n)] + lambda * (1.0 + cfg.dt * d.df_dx);
    if (std::isfinite(lambda) && std::fabs(lambda) > out.max_costate_magnitude) {
      out.max_costate_magnitude = std::fabs(lambda);
    }
  }
  return out;
}

AdjointResult adjoint_gradient(const Trajectory& traj, const ModelParams& p,
                               const SimConfig& cfg, const AveragingWindow& w) {
  if (!(w.start_step >= 0 && w.start_step < w.end_step && w.end_step <= cfg.n_steps)) {
    throw std::invalid_argument("averaging window must satisfy 0 <= start < end <= n_steps");
  }
  std::vector<double> weights(static_cast<std::size_t>(cfg.n_steps) + 1, 0.0);
  const double wgt = 1.0 / static_cast<double>(w.end_step - w.start_step);
  for (std::int64_t n = w.start_step; n <= w.end_step; ++n) {
    weights[static_cast<std::size_t>(n)] = wgt;
  }
  return adjoint_gradient_weighted(traj, p, cfg, weights);
}

}  // namespace stiffsense
