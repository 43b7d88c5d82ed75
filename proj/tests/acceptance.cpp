// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Defaults throughout: alpha = beta = 1, sigma = 1e-4,
// 100000 explicit Euler steps, averaging window [2000, 100000].

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "stiffsense/adjoint.hpp"
#include "stiffsense/integrators.hpp"
#include "stiffsense/objective.hpp"
#include "stiffsense/regime.hpp"
#include "stiffsense/verify.hpp"

using namespace stiffsense;

namespace {

const ModelParams kUnit{1.0, 1.0, 1e-4};
const AveragingWindow kWindow{2000, 100000};

SimConfig case_cfg(double dt, IntegratorKind kind = IntegratorKind::ExplicitEuler) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.integrator = kind;
  return cfg;
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

#define EXPECT(cond, ...)                                       \
  do {                                                          \
    if (!(cond)) {                                              \
      out.ok = false;                                           \
      char buf_[256];                                           \
      std::snprintf(buf_, sizeof buf_, __VA_ARGS__);            \
      if (!out.detail.empty()) out.detail += "; ";              \
      out.detail += buf_;                                       \
    }                                                           \
  } while (0)

Outcome criterion1_steady_state() {
  Outcome out;
  const Trajectory traj = simulate(kUnit, case_cfg(1.0));
  EXPECT(traj.status.kind == StatusKind::Completed, "run did not complete");
  const double ex = std::fabs(traj.records.back().x - 1.0);
  const double ed = std::fabs(traj.records.back().d_alpha - 1.0);
  EXPECT(ex < 1e-9, "|x_N - 1| = %.3e >= 1e-9", ex);
  EXPECT(ed < 1e-6, "|xd_N - 1| = %.3e >= 1e-6", ed);
  if (out.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "|x_N-1|=%.2e |xd_N-1|=%.2e", ex, ed);
    out.detail = buf;
  }
  return out;
}

Outcome criterion2_derivative_spike() {
  Outcome out;
  const Trajectory traj = simulate(kUnit, case_cfg(1.0));
  double peak = -1e300;
  std::int64_t at = -1;
  for (const TrajectoryRecord& r : traj.records) {
    if (r.d_alpha > peak) {
      peak = r.d_alpha;
      at = r.step;
    }
  }
  EXPECT(peak >= 1480.0 && peak <= 1520.0, "peak xd = %.4f outside [1480,1520]", peak);
  EXPECT(at >= 10000 && at <= 10035, "peak step = %lld outside [10000,10035]",
         static_cast<long long>(at));
  if (out.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "peak=%.2f at step %lld", peak,
                  static_cast<long long>(at));
    out.detail = buf;
  }
  return out;
}

Outcome criterion3_case_ii() {
  Outcome out;
  const SimConfig cfg = case_cfg(2.0);
  const Trajectory traj = simulate(kUnit, cfg);
  const RegimeReport report = classify(traj, kUnit, cfg);
  EXPECT(report.regime == Regime::Oscillating, "regime is not oscillating");

  double env_early = 0.0, env_late = 0.0;
  double tan_early = 0.0, tan_late = 0.0;
  for (const TrajectoryRecord& r : traj.records) {
    if (r.step >= 20000 && r.step <= 30000) env_early = std::max(env_early, std::fabs(r.x - 1.0));
    if (r.step >= 90000 && r.step <= 100000) env_late = std::max(env_late, std::fabs(r.x - 1.0));
    if (r.step >= 20000 && r.step <= 40000) tan_early = std::max(tan_early, std::fabs(r.d_alpha));
    if (r.step >= 80000 && r.step <= 100000) tan_late = std::max(tan_late, std::fabs(r.d_alpha));
  }
  EXPECT(env_late < env_early, "envelope grew: %.3e vs %.3e", env_late, env_early);
  EXPECT(tan_late > tan_early, "tangent amplitude shrank: %.3e vs %.3e", tan_late, tan_early);

  const auto series = running_average_series(traj, kWindow);
  std::size_t incs = 0, decs = 0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    if (series[i].step < 10000) continue;
    if (series[i + 1].J > series[i].J) ++incs;
    if (series[i + 1].J < series[i].J) ++decs;
  }
  EXPECT(incs == 0 || decs == 0, "running J not monotone after 10000 (%zu up, %zu down)",
         incs, decs);
  return out;
}

Outcome criterion4_case_iii() {
  Outcome out;
  const SimConfig cfg = case_cfg(2.8);
  const Trajectory traj = simulate(kUnit, cfg);
  const RegimeReport report = classify(traj, kUnit, cfg);
  EXPECT(report.regime == Regime::Chaotic, "regime is not chaotic");
  EXPECT(report.lyapunov > 0.01, "lyapunov %.4f <= 0.01", report.lyapunov);

  EXPECT(traj.records.back().step == cfg.n_steps, "primal did not complete");
  for (const TrajectoryRecord& r : traj.records) {
    if (r.step >= 5000 && !(std::fabs(r.x) < 2.0)) {
      EXPECT(false, "|x| >= 2 at step %lld", static_cast<long long>(r.step));
      break;
    }
  }
  EXPECT(traj.status.kind == StatusKind::TangentOverflow, "no tangent overflow");
  EXPECT(traj.status.step > 0 && traj.status.step < 20000,
         "overflow step %lld outside (0, 20000)", static_cast<long long>(traj.status.step));
  if (out.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "lyapunov=%.3f overflow at %lld", report.lyapunov,
                  static_cast<long long>(traj.status.step));
    out.detail = buf;
  }
  return out;
}

Outcome criterion5_case_iv() {
  Outcome out;
  const SimConfig cfg = case_cfg(5.0);
  const Trajectory traj = simulate(kUnit, cfg);
  const RegimeReport report = classify(traj, kUnit, cfg);
  EXPECT(report.regime == Regime::Divergent, "regime is not divergent");
  EXPECT(traj.status.kind == StatusKind::PrimalOverflow, "no primal overflow");
  EXPECT(traj.status.step < cfg.n_steps, "overflow step not before N");
  if (out.ok) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "overflow at %lld", static_cast<long long>(traj.status.step));
    out.detail = buf;
  }
  return out;
}

Outcome criterion6_tangent_adjoint() {
  Outcome out;
  const SimConfig cfg = case_cfg(1.0);
  const Trajectory traj = simulate(kUnit, cfg);
  const ObjectiveResult tangent = time_average(traj, kWindow);
  const AdjointResult adj = adjoint_gradient(traj, kUnit, cfg, kWindow);
  const double ea = relative_error(tangent.dJ_dalpha, adj.dJ_dalpha);
  const double eb = relative_error(tangent.dJ_dbeta, adj.dJ_dbeta);
  EXPECT(ea < 1e-10, "alpha rel err %.3e >= 1e-10", ea);
  EXPECT(eb < 1e-10, "beta rel err %.3e >= 1e-10", eb);
  if (out.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "rel errs %.1e / %.1e", ea, eb);
    out.detail = buf;
  }
  return out;
}

Outcome criterion7_tangent_fd() {
  Outcome out;
  const SimConfig cfg = case_cfg(1.0);
  const Trajectory traj = simulate(kUnit, cfg);
  const ObjectiveResult tangent = time_average(traj, kWindow);

  const FdGradient fd = fd_gradient(kUnit, cfg, kWindow, 1e-6);
  if (!fd.d_alpha || !fd.d_beta) {
    EXPECT(false, "finite differences undefined");
    return out;
  }
  const double ea = relative_error(tangent.dJ_dalpha, *fd.d_alpha);
  const double eb = relative_error(tangent.dJ_dbeta, *fd.d_beta);
  EXPECT(ea < 1e-4, "alpha rel err %.3e >= 1e-4", ea);
  EXPECT(eb < 1e-4, "beta rel err %.3e >= 1e-4", eb);

  const FdGradient coarse = fd_gradient(kUnit, cfg, kWindow, 1e-5);
  const FdGradient fine = fd_gradient(kUnit, cfg, kWindow, 5e-6);
  const double factor = std::fabs(*coarse.d_alpha - tangent.dJ_dalpha) /
                        std::fabs(*fine.d_alpha - tangent.dJ_dalpha);
  EXPECT(factor >= 3.0 && factor <= 5.0, "halving factor %.3f outside [3,5]", factor);
  if (out.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "rel errs %.1e / %.1e, halving factor %.2f", ea, eb, factor);
    out.detail = buf;
  }
  return out;
}

Outcome criterion8_fixed_point_family() {
  Outcome out;
  for (const double alpha : {0.5, 1.0, 2.0}) {
    for (const double beta : {0.5, 1.0, 2.0}) {
      const ModelParams p{alpha, beta, 1e-4};
      const Trajectory traj = simulate(p, case_cfg(beta / (alpha * alpha)));
      const TrajectoryRecord& last = traj.records.back();
      const double ex = std::fabs(last.x - alpha / beta);
      const double ea = std::fabs(last.d_alpha - 1.0 / beta);
      const double eb = std::fabs(last.d_beta + alpha / (beta * beta));
      EXPECT(ex < 1e-8, "a=%.1f b=%.1f: |x-x*|=%.2e", alpha, beta, ex);
      EXPECT(ea < 1e-5, "a=%.1f b=%.1f: |xd_a-1/b|=%.2e", alpha, beta, ea);
      EXPECT(eb < 1e-5, "a=%.1f b=%.1f: |xd_b+a/b^2|=%.2e", alpha, beta, eb);
    }
  }
  return out;
}

Outcome criterion9_implicit_remedy() {
  Outcome out;
  const SimConfig cfg = case_cfg(2.8, IntegratorKind::ImplicitEuler);
  const Trajectory traj = simulate(kUnit, cfg);
  EXPECT(traj.status.kind == StatusKind::Completed, "implicit run did not complete");
  const RegimeReport report = classify(traj, kUnit, cfg);
  EXPECT(report.regime == Regime::Monotone, "regime is not monotone");
  const double err = std::fabs(traj.records.back().x - 1.0);
  EXPECT(err < 1e-8, "|x_N - 1| = %.3e >= 1e-8", err);
  if (out.ok) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "|x_N-1|=%.1e", err);
    out.detail = buf;
  }
  return out;
}

Outcome criterion10_objective_closeness() {
  Outcome out;
  double js[3];
  const double dts[3] = {1.0, 2.0, 2.8};
  for (int i = 0; i < 3; ++i) {
    const Trajectory traj = simulate(kUnit, case_cfg(dts[i]));
    js[i] = time_average(traj, kWindow).J;
    EXPECT(js[i] >= 0.85 && js[i] <= 1.05, "J(%.1f) = %.4f outside [0.85,1.05]", dts[i], js[i]);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      EXPECT(std::fabs(js[i] - js[j]) < 0.1, "|J(%.1f)-J(%.1f)| = %.3f >= 0.1", dts[i],
             dts[j], std::fabs(js[i] - js[j]));
    }
  }
  if (out.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "J = %.4f / %.4f / %.4f", js[0], js[1], js[2]);
    out.detail = buf;
  }
  return out;
}

Outcome criterion11_property_suites() {
  Outcome out;

  // Dual-number product rule, tolerance 0.
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const TangentScalar a{dist(rng), dist(rng), dist(rng)};
    const TangentScalar b{dist(rng), dist(rng), dist(rng)};
    const TangentScalar ab = a * b;
    if (ab.d_alpha != a.value * b.d_alpha + b.value * a.d_alpha ||
        ab.d_beta != a.value * b.d_beta + b.value * a.d_beta) {
      EXPECT(false, "product rule mismatch at trial %d", i);
      break;
    }
  }

  // Chain rule against the analytic partials, relative 1e-14.
  std::uniform_real_distribution<double> xd(0.0, 2.0);
  std::uniform_real_distribution<double> pd(0.1, 3.0);
  std::uniform_real_distribution<double> sd(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const ModelParams p{pd(rng), pd(rng), 1e-9};
    const double x = xd(rng);
    const double s = sd(rng);
    const TangentScalar got = rhs_tangent({x, s, 0.0}, p);
    const RhsPartials d = rhs_partials(x, p);
    const double want = d.df_dx * s + d.df_dalpha;
    if (std::fabs(got.d_alpha - want) >
        1e-14 * std::max({std::fabs(got.d_alpha), std::fabs(want), 1.0})) {
      EXPECT(false, "chain rule mismatch at trial %d", i);
      break;
    }
  }

  // Determinism: bit-identical reruns.
  for (const double dt : {1.0, 2.8}) {
    const Trajectory a = simulate(kUnit, case_cfg(dt));
    const Trajectory b = simulate(kUnit, case_cfg(dt));
    const bool same = a.records.size() == b.records.size() &&
                      std::memcmp(a.records.data(), b.records.data(),
                                  a.records.size() * sizeof(TrajectoryRecord)) == 0;
    EXPECT(same, "rerun at dt=%.1f not bit-identical", dt);
  }

  // Lyapunov sign tracks the tangent's fate.
  for (const double dt : {1.0, 2.0, 2.8}) {
    const SimConfig cfg = case_cfg(dt);
    const Trajectory traj = simulate(kUnit, cfg);
    const RegimeReport report = classify(traj, kUnit, cfg);
    const bool chaotic = report.lyapunov > 0.01;
    const bool overflowed = traj.status.kind == StatusKind::TangentOverflow;
    EXPECT(chaotic == overflowed, "dt=%.1f: lyapunov gate %d but overflow %d", dt,
           static_cast<int>(chaotic), static_cast<int>(overflowed));
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "case-i-steady-state", criterion1_steady_state},
      {2, "case-i-derivative-spike", criterion2_derivative_spike},
      {3, "case-ii-oscillating", criterion3_case_ii},
      {4, "case-iii-chaotic", criterion4_case_iii},
      {5, "case-iv-divergent", criterion5_case_iv},
      {6, "tangent-adjoint-equivalence", criterion6_tangent_adjoint},
      {7, "tangent-fd-agreement", criterion7_tangent_fd},
      {8, "fixed-point-family", criterion8_fixed_point_family},
      {9, "implicit-euler-remedy", criterion9_implicit_remedy},
      {10, "objective-closeness", criterion10_objective_closeness},
      {11, "property-suites", criterion11_property_suites},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const Outcome out = c.run();
    std::printf("%s %2d %-28s%s%s\n", out.ok ? "PASS" : "FAIL", c.id, c.name,
                out.detail.empty() ? "" : "  ", out.detail.c_str());
    if (!out.ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
