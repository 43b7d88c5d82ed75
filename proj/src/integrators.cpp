#include "stiffsense/integrators.hpp"

#include <cmath>
#include <stdexcept>

namespace stiffsense {

std::optional<std::string> check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) return "dt must be finite and > 0";
  if (cfg.n_steps < 1) return "n_steps must be >= 1";
  if (!(cfg.overflow_guard > 0.0)) return "overflow_guard must be > 0";
  if (!(cfg.newton_tol > 0.0)) return "newton_tol must be > 0";
  if (cfg.newton_max_iter < 1) return "newton_max_iter must be >= 1";
  if (cfg.record_stride < 1) return "record_stride must be >= 1";
  return std::nullopt;
}

double explicit_euler_step(double x, const ModelParams& p, double dt) {
  return x + dt * rhs(x, p);
}

TangentScalar explicit_euler_tangent_step(TangentScalar x, const ModelParams& p, double dt) {
  return x + dt * rhs_tangent(x, p);
}

ImplicitStepResult implicit_euler_step(double x, const ModelParams& p, const SimConfig& cfg) {
  double y = x;
  for (int it = 0; it <= cfg.newton_max_iter; ++it) {
    const double r = y - x - cfg.dt * rhs(y, p);
    if (std::fabs(r) < cfg.newton_tol) return {y, it, true};
    const double denom = 1.0 - cfg.dt * rhs_partials(y, p).df_dx;
    if (std::fabs(denom) < 1e-14) return {y, it, false};
    y = y - r / denom;
  }
  return {y, cfg.newton_max_iter + 1, false};
}

ImplicitTangentResult implicit_euler_tangent_step(double x_next, double s_alpha, double s_beta,
                                                  const ModelParams& p, double dt) {
  const RhsPartials d = rhs_partials(x_next, p);
  const double denom = 1.0 - dt * d.df_dx;
  if (std::fabs(denom) < 1e-14) return {s_alpha, s_beta, false};
  return {(s_alpha + dt * d.df_dalpha) / denom, (s_beta + dt * d.df_dbeta) / denom, true};
}

double map_derivative(double x, const ModelParams& p, double dt) {
  return 1.0 + dt * rhs_partials(x, p).df_dx;
}

namespace {

bool over_guard(double v, double guard) {
  return !std::isfinite(v) || std::fabs(v) > guard;
}

Trajectory run(const ModelParams& p, const SimConfig& cfg, bool with_tangents) {
  if (auto err = check_params(p)) throw std::invalid_argument(*err);
  if (auto err = check_config(cfg)) throw std::invalid_argument(*err);

  Trajectory traj;
  traj.config_echo = cfg;
  traj.params_echo = p;
  traj.records.reserve(static_cast<std::size_t>(cfg.n_steps / cfg.record_stride) + 2);

  double x = p.sigma;
  double sa = 0.0;
  double sb = 0.0;
  bool tangents_alive = with_tangents;
  traj.records.push_back({0, 0.0, x, sa, sb});

  bool terminated = false;
  for (std::int64_t n = 0; n < cfg.n_steps; ++n) {
    const std::int64_t step = n + 1;
    double x_next;
    double sa_next = sa;
    double sb_next = sb;

    if (cfg.integrator == IntegratorKind::ExplicitEuler) {
      if (tangents_alive) {
        const TangentScalar next =
            explicit_euler_tangent_step({x, sa, sb}, p, cfg.dt);
        x_next = next.value;
        sa_next = next.d_alpha;
        sb_next = next.d_beta;
      } else {
        x_next = explicit_euler_step(x, p, cfg.dt);
      }
    } else {
      const ImplicitStepResult r = implicit_euler_step(x, p, cfg);
      if (!r.converged) {
        traj.status = {StatusKind::NewtonFailed, step};
        terminated = true;
        break;
      }
      x_next = r.x_next;
      if (tangents_alive) {
        const ImplicitTangentResult t =
            implicit_euler_tangent_step(x_next, sa, sb, p, cfg.dt);
        if (!t.ok) {
          traj.status = {StatusKind::NewtonFailed, step};
          terminated = true;
          break;
        }
        sa_next = t.d_alpha;
        sb_next = t.d_beta;
      }
    }

    if (over_guard(x_next, cfg.overflow_guard)) {
      traj.status = {StatusKind::PrimalOverflow, step};
      terminated = true;
      break;
    }
    x = x_next;

    if (tangents_alive) {
      if (over_guard(sa_next, cfg.overflow_guard) || over_guard(sb_next, cfg.overflow_guard)) {
        // Freeze the tangent columns at their last finite values; the
        // primal keeps going.
        tangents_alive = false;
        traj.tangent_overflow_step = step;
      } else {
        sa = sa_next;
        sb = sb_next;
      }
    }

    if (step % cfg.record_stride == 0) {
      traj.records.push_back({step, static_cast<double>(step) * cfg.dt, x, sa, sb});
    }
  }

  if (!terminated) {
    if (traj.tangent_overflow_step) {
      traj.status = {StatusKind::TangentOverflow, *traj.tangent_overflow_step};
    } else {
      traj.status = {StatusKind::Completed, -1};
    }
  }

  // The final good state is always recorded regardless of stride. On a
  // terminal event at step k the state never advanced past k-1, so the
  // appended record carries the last step that passed the checks.
  const std::int64_t last_good =
      terminated ? traj.status.step - 1 : cfg.n_steps;
  if (traj.records.back().step != last_good) {
    traj.records.push_back({last_good, static_cast<double>(last_good) * cfg.dt, x, sa, sb});
  }
  return traj;
}

}  // namespace

Trajectory simulate(const ModelParams& p, const SimConfig& cfg) {
  return run(p, cfg, true);
}

Trajectory simulate_primal(const ModelParams& p, const SimConfig& cfg) {
  return run(p, cfg, false);
}

}  // namespace stiffsense
