#pragma once

#include <cstdint>
#include <stdexcept>

#include "stiffsense/integrators.hpp"

// Classification of a trajectory into the four observed behaviors, with the
// largest Lyapunov exponent of the discrete map as the chaos criterion.

namespace stiffsense {

enum class Regime { Monotone, Oscillating, Chaotic, Divergent };

struct RegimeReport {
  Regime regime = Regime::Monotone;
  // Mean ln|g'| per step over the diagnostic window. -inf when every term
  // was skipped (perfectly contractive orbit); NaN for Divergent, where the
  // estimate is meaningless.
  double lyapunov = 0.0;
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;
  double sign_flip_fraction = 0.0;
  // Late-window amplitude over early-window amplitude; NaN when the early
  // envelope is exactly zero.
  double envelope_ratio = 0.0;
};

// All thresholds are artifact choices, surfaced with their defaults.
struct ClassifyOptions {
  double lambda_tol = 0.01;
  double flip_threshold = 0.5;
  double window_fraction = 0.25;  // diagnostic window = trailing fraction of completed steps
  double deadband = 1e-12;        // |difference| below this counts as no movement
};

struct EmptyWindow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (1/N) * sum of ln|map_derivative(x_n)| over recorded steps in
// [start_step, end_step], skipping terms with |g'| < 1e-300. Explicit-Euler
// trajectories only. Throws EmptyWindow when no term qualifies.
double estimate_lyapunov(const Trajectory& traj, const ModelParams& p, double dt,
                         std::int64_t start_step, std::int64_t end_step);

// Decision order: Divergent -> Chaotic -> Oscillating -> Monotone. The
// Chaotic gate fires only for lyapunov > lambda_tol, so a marginal
// oscillation (lyapunov near 0) falls through to the sign-flip test.
// Implicit-Euler runs use the implicit map's per-step derivative
// 1/(1 - dt*df_dx) for the Lyapunov estimate.
RegimeReport classify(const Trajectory& traj, const ModelParams& p, const SimConfig& cfg,
                      const ClassifyOptions& opts = {});

}  // namespace stiffsense
