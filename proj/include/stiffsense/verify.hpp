#pragma once

#include <optional>

#include "stiffsense/adjoint.hpp"
#include "stiffsense/integrators.hpp"
#include "stiffsense/objective.hpp"

// Independent central-finite-difference oracle for dJ/dalpha and dJ/dbeta,
// plus the three-way tangent / adjoint / finite-difference comparison. The
// oracle runs primal-only simulations and never reads tangent columns.

namespace stiffsense {

struct FdGradient {
  std::optional<double> d_alpha;  // empty when a perturbed run overflowed
  std::optional<double> d_beta;
  double h_alpha = 0.0;
  double h_beta = 0.0;
};

// Central differences (J(p+h) - J(p-h)) / (2h) with h = h_rel*max(1, |param|),
// each J evaluated on a fresh primal-only simulation.
FdGradient fd_gradient(const ModelParams& p, const SimConfig& cfg, const AveragingWindow& w,
                       double h_rel = 1e-6);

struct GradientComparison {
  double tangent_d_alpha = 0.0;
  double tangent_d_beta = 0.0;
  bool tangent_valid = false;  // false on window gaps or frozen tangents

  double adjoint_d_alpha = 0.0;
  double adjoint_d_beta = 0.0;
  bool adjoint_valid = false;

  FdGradient fd;

  // |a - b| / max(|a|, |b|, 1e-300); NaN when either side is unavailable.
  double rel_err_tangent_fd_alpha = 0.0;
  double rel_err_tangent_fd_beta = 0.0;
  double rel_err_tangent_adjoint_alpha = 0.0;
  double rel_err_tangent_adjoint_beta = 0.0;
};

double relative_error(double a, double b);

// Runs the tangent, adjoint, and finite-difference pipelines on identical
// inputs; failures surface as per-route validity flags, never as errors.
GradientComparison compare_gradients(const ModelParams& p, const SimConfig& cfg,
                                     const AveragingWindow& w, double h_rel = 1e-6);

}  // namespace stiffsense
