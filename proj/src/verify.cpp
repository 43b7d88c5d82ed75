#include "stiffsense/verify.hpp"

#include <cmath>
#include <limits>

namespace stiffsense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// J from a primal-only run, or empty if the run cannot cover the window.
std::optional<double> primal_objective(const ModelParams& p, const SimConfig& cfg,
                                       const AveragingWindow& w) {
  const Trajectory traj = simulate_primal(p, cfg);
  try {
    return time_average(traj, w).J;
  } catch (const WindowNotCovered&) {
    return std::nullopt;
  }
}

std::optional<double> central_difference(std::optional<double> plus,
                                         std::optional<double> minus, double h) {
  if (!plus || !minus) return std::nullopt;
  return (*plus - *minus) / (2.0 * h);
}

}  // namespace

double relative_error(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

FdGradient fd_gradient(const ModelParams& p, const SimConfig& cfg, const AveragingWindow& w,
                       double h_rel) {
  if (!(h_rel > 0.0)) throw std::invalid_argument("h_rel must be > 0");
  FdGradient out;
  out.h_alpha = h_rel * std::max(1.0, std::fabs(p.alpha));
  out.h_beta = h_rel * std::max(1.0, std::fabs(p.beta));

  ModelParams q = p;
  q.alpha = p.alpha + out.h_alpha;
  const auto jap = primal_objective(q, cfg, w);
  q.alpha = p.alpha - out.h_alpha;
  const auto jam = primal_objective(q, cfg, w);
  out.d_alpha = central_difference(jap, jam, out.h_alpha);

  q = p;
  q.beta = p.beta + out.h_beta;
  const auto jbp = primal_objective(q, cfg, w);
  q.beta = p.beta - out.h_beta;
  const auto jbm = primal_objective(q, cfg, w);
  out.d_beta = central_difference(jbp, jbm, out.h_beta);
  return out;
}

GradientComparison compare_gradients(const ModelParams& p, const SimConfig& cfg,
                                     const AveragingWindow& w, double h_rel) {
  GradientComparison cmp;
  cmp.rel_err_tangent_fd_alpha = kNaN;
  cmp.rel_err_tangent_fd_beta = kNaN;
  cmp.rel_err_tangent_adjoint_alpha = kNaN;
  cmp.rel_err_tangent_adjoint_beta = kNaN;

  const Trajectory traj = simulate(p, cfg);
  try {
    const ObjectiveResult obj = time_average(traj, w);
    cmp.tangent_d_alpha = obj.dJ_dalpha;
    cmp.tangent_d_beta = obj.dJ_dbeta;
    cmp.tangent_valid = obj.valid;
  } catch (const WindowNotCovered&) {
    cmp.tangent_d_alpha = kNaN;
    cmp.tangent_d_beta = kNaN;
  }

  try {
    const AdjointResult adj = adjoint_gradient(traj, p, cfg, w);
    cmp.adjoint_d_alpha = adj.dJ_dalpha;
    cmp.adjoint_d_beta = adj.dJ_dbeta;
    cmp.adjoint_valid = std::isfinite(adj.dJ_dalpha) && std::isfinite(adj.dJ_dbeta);
  } catch (const TrajectoryIncomplete&) {
    cmp.adjoint_d_alpha = kNaN;
    cmp.adjoint_d_beta = kNaN;
  } catch (const std::invalid_argument&) {
    cmp.adjoint_d_alpha = kNaN;
    cmp.adjoint_d_beta = kNaN;
  }

  cmp.fd = fd_gradient(p, cfg, w, h_rel);

  if (cmp.tangent_valid && cmp.fd.d_alpha) {
    cmp.rel_err_tangent_fd_alpha = relative_error(cmp.tangent_d_alpha, *cmp.fd.d_alpha);
  }
  if (cmp.tangent_valid && cmp.fd.d_beta) {
    cmp.rel_err_tangent_fd_beta = relative_error(cmp.tangent_d_beta, *cmp.fd.d_beta);
  }
  if (cmp.tangent_valid && cmp.adjoint_valid) {
    cmp.rel_err_tangent_adjoint_alpha =
        relative_error(cmp.tangent_d_alpha, cmp.adjoint_d_alpha);
    cmp.rel_err_tangent_adjoint_beta =
        relative_error(cmp.tangent_d_beta, cmp.adjoint_d_beta);
  }
  return cmp;
}

}  // namespace stiffsense
