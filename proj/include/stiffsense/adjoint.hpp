#pragma once

#include <span>
#include <stdexcept>

#include "stiffsense/integrators.hpp"
#include "stiffsense/objective.hpp"

// Discrete adjoint of the explicit-Euler + time-average pipeline: one
// reverse costate sweep yields both gradient components. Mathematically the
// transpose of the tangent recursion, so the two must agree to rounding.

namespace stiffsense {

struct AdjointResult {
  double dJ_dalpha = 0.0;
  double dJ_dbeta = 0.0;
  // Largest finite |costate| seen during the sweep; grows like the tangent
  // norms and is reported as a diagnostic, never asserted on here.
  double max_costate_magnitude = 0.0;
};

struct TrajectoryIncomplete : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Costate recursion, descending from n = N:
//   lambda_N = w_N,   lambda_n = w_n + lambda_{n+1} * (1 + dt*df_dx(x_n))
//   dJ/dalpha = sum_{n=0}^{N-1} lambda_{n+1} * dt * df_dalpha(x_n)
// with weights w_n = 1/(end-start) inside [start, end], 0 outside.
// Requires a primal-complete explicit-Euler trajectory at record_stride 1;
// throws TrajectoryIncomplete otherwise (std::invalid_argument for a
// non-explicit config). Overflowing costates propagate through IEEE
// arithmetic rather than aborting.
AdjointResult adjoint_gradient(const Trajectory& traj, const ModelParams& p,
                               const SimConfig& cfg, const AveragingWindow& w);

// Same sweep with caller-supplied weights, one per step (size n_steps + 1).
AdjointResult adjoint_gradient_weighted(const Trajectory& traj, const ModelParams& p,
                                        const SimConfig& cfg, std::span<const double> weights);

}  // namespace stiffsense
