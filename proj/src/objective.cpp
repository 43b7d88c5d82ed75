#include "stiffsense/objective.hpp"

#include <algorithm>

namespace stiffsense {

namespace {

// Index of the record holding `step`, with the window [start, end]
// guaranteed contiguous from there; throws otherwise.
std::size_t window_base(const Trajectory& traj, const AveragingWindow& w) {
  if (!(w.start_step >= 0 && w.start_step < w.end_step)) {
    throw WindowNotCovered("averaging window must satisfy 0 <= start < end");
  }
  const auto& recs = traj.records;
  const auto it = std::lower_bound(
      recs.begin(), recs.end(), w.start_step,
      [](const TrajectoryRecord& r, std::int64_t s) { return r.step < s; });
  if (it == recs.end() || it->step != w.start_step) {
    throw WindowNotCovered("trajectory does not contain the window start step");
  }
  const std::size_t base = static_cast<std::size_t>(it - recs.begin());
  const std::size_t span = static_cast<std::size_t>(w.end_step - w.start_step);
  if (base + span >= recs.size() || recs[base + span].step != w.end_step) {
    throw WindowNotCovered("trajectory does not cover every step in the window");
  }
  return base;
}

bool tangents_tainted(const Trajectory& traj, const AveragingWindow& w) {
  return traj.tangent_overflow_step && *traj.tangent_overflow_step <= w.end_step;
}

}  // namespace

ObjectiveResult time_average(const Trajectory& traj, const AveragingWindow& w) {
  const std::size_t base = window_base(traj, w);
  KahanSum sx, sa, sb;
  const std::size_t count = static_cast<std::size_t>(w.end_step - w.start_step) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const TrajectoryRecord& r = traj.records[base + i];
    sx.add(r.x);
    sa.add(r.d_alpha);
    sb.add(r.d_beta);
  }
  const double divisor = static_cast<double>(w.end_step - w.start_step);
  return {sx.value() / divisor, sa.value() / divisor, sb.value() / divisor,
          !tangents_tainted(traj, w)};
}

std::vector<RunningAveragePoint> running_average_series(const Trajectory& traj,
                                                        const AveragingWindow& w) {
  const std::size_t base = window_base(traj, w);
  std::vector<RunningAveragePoint> series;
  series.reserve(static_cast<std::size_t>(w.end_step - w.start_step));
  KahanSum sx, sa, sb;
  {
    const TrajectoryRecord& r0 = traj.records[base];
    sx.add(r0.x);
    sa.add(r0.d_alpha);
    sb.add(r0.d_beta);
  }
  for (std::int64_t n = w.start_step + 1; n <= w.end_step; ++n) {
    const TrajectoryRecord& r =
        traj.records[base + static_cast<std::size_t>(n - w.start_step)];
    sx.add(r.x);
    sa.add(r.d_alpha);
    sb.add(r.d_beta);
    const double divisor = static_cast<double>(n - w.start_step);
    series.push_back({n, sx.value() / divisor, sa.value() / divisor, sb.value() / divisor});
  }
  return series;
}

}  // namespace stiffsense
