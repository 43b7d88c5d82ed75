#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stiffsense/model.hpp"
#include "stiffsense/tangent.hpp"

// Discrete time stepping for the flame model: explicit Euler (primal +
// tangent), implicit Euler (Newton-solved, primal + tangent), and the
// full-trajectory driver with overflow bookkeeping.

namespace stiffsense {

enum class IntegratorKind { ExplicitEuler, ImplicitEuler };

struct SimConfig {
  double dt = 1.0;
  std::int64_t n_steps = 100000;
  IntegratorKind integrator = IntegratorKind::ExplicitEuler;
  // |x| or |tangent| beyond this is treated as overflow; just under the
  // largest finite double so records never contain non-finite values.
  double overflow_guard = 1e300;
  double newton_tol = 1e-12;      // absolute residual tolerance
  int newton_max_iter = 50;
  std::int64_t record_stride = 1; // thin output every k steps
};

std::optional<std::string> check_config(const SimConfig& cfg);

enum class StatusKind { Completed, PrimalOverflow, TangentOverflow, NewtonFailed };

// `step` is the step index at which the event occurred; -1 for Completed.
struct TrajectoryStatus {
  StatusKind kind = StatusKind::Completed;
  std::int64_t step = -1;
};

struct TrajectoryRecord {
  std::int64_t step;
  double time;  // step * dt
  double x;
  double d_alpha;
  double d_beta;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  TrajectoryStatus status;
  // Set whenever the tangent columns froze, even if the primal overflowed
  // later (in which case status reports the primal overflow).
  std::optional<std::int64_t> tangent_overflow_step;
  SimConfig config_echo;
  ModelParams params_echo;

  std::int64_t final_step() const {
    return records.empty() ? -1 : records.back().step;
  }
};

// One explicit Euler step, evaluation order fixed as x + (dt * rhs).
double explicit_euler_step(double x, const ModelParams& p, double dt);

// Same formula over TangentScalar with alpha and beta seeded.
TangentScalar explicit_euler_tangent_step(TangentScalar x, const ModelParams& p, double dt);

struct ImplicitStepResult {
  double x_next;
  int iters;       // Newton updates performed
  bool converged;  // false: iteration budget spent or denominator vanished
};

// Solves y - x - dt*rhs(y) = 0 by undamped Newton from y0 = x.
ImplicitStepResult implicit_euler_step(double x, const ModelParams& p, const SimConfig& cfg);

struct ImplicitTangentResult {
  double d_alpha;
  double d_beta;
  bool ok;  // false when |1 - dt*df_dx(x_next)| < 1e-14
};

// Differentiates the implicit relation: s+ = (s + dt*df_dparam(x_next)) / (1 - dt*df_dx(x_next)).
ImplicitTangentResult implicit_euler_tangent_step(double x_next, double s_alpha, double s_beta,
                                                  const ModelParams& p, double dt);

// Derivative of the explicit Euler map: 1 + dt*(2*alpha*x - 3*beta*x^2).
double map_derivative(double x, const ModelParams& p, double dt);

// Runs n_steps from x0 = sigma with zero initial tangents. Tangent overflow
// freezes the tangent columns at their last finite values and the primal
// continues; primal overflow or Newton failure stops the run. Records every
// record_stride-th step plus the final state. Deterministic: identical inputs
// give bit-identical record streams. Throws std::invalid_argument if the
// parameter or config invariants are violated; runtime outcomes are reported
// through Trajectory::status, never as errors.
Trajectory simulate(const ModelParams& p, const SimConfig& cfg);

// Same driver without tangent propagation (tangent columns stay zero).
// Used by the finite-difference oracle, which must not touch tangent state.
Trajectory simulate_primal(const ModelParams& p, const SimConfig& cfg);

}  // namespace stiffsense
