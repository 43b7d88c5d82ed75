#include <doctest.h>

#include <cmath>
#include <vector>

#include "stiffsense/adjoint.hpp"
#include "stiffsense/objective.hpp"
#include "stiffsense/verify.hpp"

using namespace stiffsense;

namespace {

const ModelParams kUnit{1.0, 1.0, 1e-4};
const AveragingWindow kDefaultWindow{2000, 100000};

SimConfig case_cfg(double dt) {
  SimConfig cfg;
  cfg.dt = dt;
  return cfg;
}

}  // namespace

TEST_CASE("case I adjoint matches the tangent gradient") {
  const SimConfig cfg = case_cfg(1.0);
  const Trajectory traj = simulate(kUnit, cfg);
  const ObjectiveResult tangent = time_average(traj, kDefaultWindow);
  const AdjointResult adj = adjoint_gradient(traj, kUnit, cfg, kDefaultWindow);
  CHECK(relative_error(adj.dJ_dalpha, tangent.dJ_dalpha) < 1e-10);
  CHECK(relative_error(adj.dJ_dbeta, tangent.dJ_dbeta) < 1e-10);
}

TEST_CASE("single-weight functional reproduces the final-state sensitivity") {
  const SimConfig cfg = case_cfg(1.0);
  const Trajectory traj = simulate(kUnit, cfg);
  std::vector<double> weights(static_cast<std::size_t>(cfg.n_steps) + 1, 0.0);
  weights.back() = 1.0;
  const AdjointResult adj = adjoint_gradient_weighted(traj, kUnit, cfg, weights);
  CHECK(relative_error(adj.dJ_dalpha, traj.records.back().d_alpha) < 1e-10);
  CHECK(relative_error(adj.dJ_dbeta, traj.records.back().d_beta) < 1e-10);
}

TEST_CASE("zero weights give exactly zero gradients") {
  const SimConfig cfg = case_cfg(1.0);
  const Trajectory traj = simulate(kUnit, cfg);
  const std::vector<double> weights(static_cast<std::size_t>(cfg.n_steps) + 1, 0.0);
  const AdjointResult adj = adjoint_gradient_weighted(traj, kUnit, cfg, weights);
  CHECK(adj.dJ_dalpha == 0.0);
  CHECK(adj.dJ_dbeta == 0.0);
  CHECK(adj.max_costate_magnitude == 0.0);
}

TEST_CASE("tangent-adjoint equivalence across stable configurations") {
  for (const double dt : {0.5, 1.0, 1.5}) {
    for (const double alpha : {0.5, 1.0, 2.0}) {
      for (const double beta : {0.5, 1.0, 2.0}) {
        // Linear stability of the steady state: |1 - dt*alpha^2/beta| < 1.
        if (!(dt * alpha * alpha / beta < 2.0)) continue;
        const ModelParams p{alpha, beta, 1e-4};
        const SimConfig cfg = case_cfg(dt);
        const Trajectory traj = simulate(p, cfg);
        REQUIRE(traj.status.kind == StatusKind::Completed);
        const ObjectiveResult tangent = time_average(traj, kDefaultWindow);
        const AdjointResult adj = adjoint_gradient(traj, p, cfg, kDefaultWindow);
        CAPTURE(dt);
        CAPTURE(alpha);
        CAPTURE(beta);
        CHECK(relative_error(adj.dJ_dalpha, tangent.dJ_dalpha) < 1e-10);
        CHECK(relative_error(adj.dJ_dbeta, tangent.dJ_dbeta) < 1e-10);
      }
    }
  }
}

TEST_CASE("costate magnitudes explode in the chaotic regime") {
  const SimConfig cfg = case_cfg(2.8);
  const Trajectory traj = simulate(kUnit, cfg);
  REQUIRE(traj.status.kind == StatusKind::TangentOverflow);  // primal is complete
  const AdjointResult adj = adjoint_gradient(traj, kUnit, cfg, kDefaultWindow);
  CHECK(adj.max_costate_magnitude > 1e15);
}

TEST_CASE("adjoint preconditions") {
  const SimConfig cfg = case_cfg(5.0);
  const Trajectory diverged = simulate(kUnit, cfg);
  CHECK_THROWS_AS(adjoint_gradient(diverged, kUnit, cfg, kDefaultWindow),
                  TrajectoryIncomplete);

  SimConfig strided = case_cfg(1.0);
  strided.record_stride = 2;
  const Trajectory thin = simulate(kUnit, strided);
  CHECK_THROWS_AS(adjoint_gradient(thin, kUnit, strided, kDefaultWindow),
                  TrajectoryIncomplete);

  SimConfig implicit = case_cfg(1.0);
  implicit.integrator = IntegratorKind::ImplicitEuler;
  const Trajectory imp = simulate(kUnit, implicit);
  CHECK_THROWS_AS(adjoint_gradient(imp, kUnit, implicit, kDefaultWindow),
                  std::invalid_argument);

  const Trajectory ok = simulate(kUnit, case_cfg(1.0));
  const std::vector<double> short_weights(10, 0.0);
  CHECK_THROWS_AS(adjoint_gradient_weighted(ok, kUnit, case_cfg(1.0), short_weights),
                  std::invalid_argument);
  CHECK_THROWS_AS(adjoint_gradient(ok, kUnit, case_cfg(1.0), {2000, 200000}),
                  std::invalid_argument);
}
