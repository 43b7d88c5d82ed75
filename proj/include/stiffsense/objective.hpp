#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stiffsense/integrators.hpp"

// Time-averaged objective J = x_ave over [start_step, end_step] with the
// transient skipped, and its exact tangent derivatives. The divisor is
// (end_step - start_step) while the inclusive sum has one more term; this
// matches the defining formula as printed, not a true arithmetic mean.

namespace stiffsense {

struct AveragingWindow {
  std::int64_t start_step = 2000;
  std::int64_t end_step = 100000;
};

struct ObjectiveResult {
  double J = 0.0;
  double dJ_dalpha = 0.0;
  double dJ_dbeta = 0.0;
  // false when the tangent columns froze at or before end_step; the dJ
  // values are then computed from frozen values and should not be trusted.
  bool valid = true;
};

struct WindowNotCovered : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compensated (Kahan) accumulation in a fixed order. Deterministic; keeps
// the objective's rounding error well below the finite-difference
// truncation probed by the verification harness.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Requires the trajectory to hold every step in [start_step, end_step]
// (record_stride 1 over the window); throws WindowNotCovered otherwise.
ObjectiveResult time_average(const Trajectory& traj, const AveragingWindow& w);

struct RunningAveragePoint {
  std::int64_t step;
  double J;
  double dJ_dalpha;
  double dJ_dbeta;
};

// Partial averages over [start_step, n] with divisor (n - start_step); the
// first emitted point is n = start_step + 1 and the final point equals
// time_average bit-for-bit.
std::vector<RunningAveragePoint> running_average_series(const Trajectory& traj,
                                                        const AveragingWindow& w);

}  // namespace stiffsense
