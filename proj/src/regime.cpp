#include "stiffsense/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace stiffsense {

namespace {

// Record index range [first, last] covering steps in [start, end].
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  bool empty = true;
};

IndexRange locate(const Trajectory& traj, std::int64_t start, std::int64_t end) {
  const auto& recs = traj.records;
  const auto lo = std::lower_bound(
      recs.begin(), recs.end(), start,
      [](const TrajectoryRecord& r, std::int64_t s) { return r.step < s; });
  const auto hi = std::upper_bound(
      recs.begin(), recs.end(), end,
      [](std::int64_t s, const TrajectoryRecord& r) { return s < r.step; });
  IndexRange range;
  if (lo == hi) return range;
  range.first = static_cast<std::size_t>(lo - recs.begin());
  range.last = static_cast<std::size_t>(hi - recs.begin()) - 1;
  range.empty = false;
  return range;
}

// Mean of ln|derivative(x_n)|, or nullopt when every term is skipped.
template <class Derivative>
std::optional<double> mean_log_derivative(const Trajectory& traj, const IndexRange& range,
                                          Derivative&& deriv) {
  if (range.empty) return std::nullopt;
  double acc = 0.0;
  std::int64_t count = 0;
  for (std::size_t i = range.first; i <= range.last; ++i) {
    const double g = deriv(traj.records[i].x);
    if (std::fabs(g) < 1e-300) continue;
    acc += std::log(std::fabs(g));
    ++count;
  }
  if (count == 0) return std::nullopt;
  return acc / static_cast<double>(count);
}

double flip_fraction(const Trajectory& traj, const IndexRange& range, double deadband) {
  if (range.empty || range.last - range.first < 2) return 0.0;
  std::int64_t flips = 0;
  std::int64_t pairs = 0;
  double prev_diff = traj.records[range.first + 1].x - traj.records[range.first].x;
  for (std::size_t i = range.first + 1; i < range.last; ++i) {
    const double diff = traj.records[i + 1].x - traj.records[i].x;
    ++pairs;
    if (std::fabs(diff) > deadband && std::fabs(prev_diff) > deadband &&
        diff * prev_diff < 0.0) {
      ++flips;
    }
    prev_diff = diff;
  }
  return pairs > 0 ? static_cast<double>(flips) / static_cast<double>(pairs) : 0.0;
}

double envelope_ratio(const Trajectory& traj, const IndexRange& range) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (range.empty) return nan;
  const std::size_t n = range.last - range.first + 1;
  if (n < 10) return nan;
  double mean = 0.0;
  for (std::size_t i = range.first; i <= range.last; ++i) mean += traj.records[i].x;
  mean /= static_cast<double>(n);
  const std::size_t tenth = n / 10;
  double early = 0.0;
  double late = 0.0;
  for (std::size_t i = range.first; i < range.first + tenth; ++i) {
    early = std::max(early, std::fabs(traj.records[i].x - mean));
  }
  for (std::size_t i = range.last + 1 - tenth; i <= range.last; ++i) {
    late = std::max(late, std::fabs(traj.records[i].x - mean));
  }
  if (early == 0.0) return nan;
  return late / early;
}

}  // namespace

double estimate_lyapunov(const Trajectory& traj, const ModelParams& p, double dt,
                         std::int64_t start_step, std::int64_t end_step) {
  const IndexRange range = locate(traj, start_step, end_step);
  const auto mean = mean_log_derivative(
      traj, range, [&](double x) { return map_derivative(x, p, dt); });
  if (!mean) throw EmptyWindow("no usable terms in the Lyapunov window");
  return *mean;
}

RegimeReport classify(const Trajectory& traj, const ModelParams& p, const SimConfig& cfg,
                      const ClassifyOptions& opts) {
  RegimeReport report;
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  const std::int64_t last = traj.final_step();
  const std::int64_t len =
      static_cast<std::int64_t>(static_cast<double>(last) * opts.window_fraction);
  report.window_start = last - len;
  report.window_end = last;
  const IndexRange range = locate(traj, report.window_start, report.window_end);

  report.sign_flip_fraction = flip_fraction(traj, range, opts.deadband);
  report.envelope_ratio = envelope_ratio(traj, range);

  bool nonfinite_primal = false;
  for (const TrajectoryRecord& r : traj.records) {
    if (!std::isfinite(r.x)) {
      nonfinite_primal = true;
      break;
    }
  }
  if (traj.status.kind == StatusKind::PrimalOverflow || nonfinite_primal) {
    report.regime = Regime::Divergent;
    report.lyapunov = nan;
    return report;
  }

  std::optional<double> lambda;
  if (cfg.integrator == IntegratorKind::ExplicitEuler) {
    lambda = mean_log_derivative(traj, range,
                                 [&](double x) { return map_derivative(x, p, cfg.dt); });
  } else {
    // Derivative of the implicit map x -> x_next is 1/(1 - dt*df_dx(x_next));
    // averaging over the recorded states is equivalent up to window ends.
    lambda = mean_log_derivative(traj, range, [&](double x) {
      const double denom = 1.0 - cfg.dt * rhs_partials(x, p).df_dx;
      return std::fabs(denom) < 1e-300 ? 0.0 : 1.0 / denom;
    });
  }
  report.lyapunov = lambda.value_or(-inf);

  if (report.lyapunov > opts.lambda_tol) {
    report.regime = Regime::Chaotic;
  } else if (report.sign_flip_fraction > opts.flip_threshold) {
    report.regime = Regime::Oscillating;
  } else {
    report.regime = Regime::Monotone;
  }
  return report;
}

}  // namespace stiffsense
