#include "stiffsense/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stiffsense/adjoint.hpp"
#include "stiffsense/integrators.hpp"
#include "stiffsense/io.hpp"
#include "stiffsense/objective.hpp"
#include "stiffsense/regime.hpp"
#include "stiffsense/verify.hpp"

namespace stiffsense::cli {

namespace {

constexpr int kOk = 0;
constexpr int kBoundFailed = 1;
constexpr int kInvalidInput = 2;
constexpr int kOverflow = 3;

struct CommonOpts {
  ModelParams params;
  SimConfig cfg;
  AveragingWindow window;
  std::string integrator_name = "explicit";
  std::string config_file;
};

// Flags shared by simulate/classify/sweep/verify. The returned subcommand
// pointer set is only needed for config-file precedence checks.
void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_dt = true) {
  cmd->add_option("--alpha", o.params.alpha, "surface-area coefficient (> 0)");
  cmd->add_option("--beta", o.params.beta, "volume coefficient (> 0)");
  cmd->add_option("--sigma", o.params.sigma, "initial radius (0 < sigma < alpha/beta)");
  if (with_dt) cmd->add_option("--dt", o.cfg.dt, "time step (> 0)");
  cmd->add_option("--steps", o.cfg.n_steps, "number of steps (>= 1)");
  cmd->add_option("--integrator", o.integrator_name, "explicit | implicit");
  cmd->add_option("--overflow-guard", o.cfg.overflow_guard, "overflow magnitude threshold");
  cmd->add_option("--newton-tol", o.cfg.newton_tol, "Newton residual tolerance");
  cmd->add_option("--newton-max-iter", o.cfg.newton_max_iter, "Newton iteration budget");
  cmd->add_option("--stride", o.cfg.record_stride, "record every k-th step");
  cmd->add_option("--avg-start", o.window.start_step, "averaging window start step");
  cmd->add_option("--avg-end", o.window.end_step, "averaging window end step");
  cmd->add_option("--config", o.config_file,
                  "JSON config file; explicit flags take precedence");
}

// Precedence: flags > config file > defaults.
int apply_config_file(CLI::App* cmd, CommonOpts& o) {
  if (o.config_file.empty()) return kOk;
  std::ifstream in(o.config_file);
  if (!in) {
    std::cerr << "error: cannot open config file " << o.config_file << "\n";
    return kInvalidInput;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config file: " << e.what() << "\n";
    return kInvalidInput;
  }

  const auto unset = [&](const char* flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() == 0;
  };
  try {
    if (j.contains("alpha") && unset("--alpha")) o.params.alpha = j["alpha"].get<double>();
    if (j.contains("beta") && unset("--beta")) o.params.beta = j["beta"].get<double>();
    if (j.contains("sigma") && unset("--sigma")) o.params.sigma = j["sigma"].get<double>();
    if (j.contains("dt") && unset("--dt")) o.cfg.dt = j["dt"].get<double>();
    if (j.contains("steps") && unset("--steps")) o.cfg.n_steps = j["steps"].get<std::int64_t>();
    if (j.contains("integrator") && unset("--integrator")) {
      o.integrator_name = j["integrator"].get<std::string>();
    }
    if (j.contains("overflow_guard") && unset("--overflow-guard")) {
      o.cfg.overflow_guard = j["overflow_guard"].get<double>();
    }
    if (j.contains("newton_tol") && unset("--newton-tol")) {
      o.cfg.newton_tol = j["newton_tol"].get<double>();
    }
    if (j.contains("newton_max_iter") && unset("--newton-max-iter")) {
      o.cfg.newton_max_iter = j["newton_max_iter"].get<int>();
    }
    if (j.contains("stride") && unset("--stride")) {
      o.cfg.record_stride = j["stride"].get<std::int64_t>();
    }
    if (j.contains("avg_start") && unset("--avg-start")) {
      o.window.start_step = j["avg_start"].get<std::int64_t>();
    }
    if (j.contains("avg_end") && unset("--avg-end")) {
      o.window.end_step = j["avg_end"].get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}

// Validates everything and fills in window defaults relative to n_steps.
int resolve_common(CLI::App* cmd, CommonOpts& o) {
  if (const int rc = apply_config_file(cmd, o); rc != kOk) return rc;

  if (o.integrator_name == "explicit" || o.integrator_name == "explicit_euler") {
    o.cfg.integrator = IntegratorKind::ExplicitEuler;
  } else if (o.integrator_name == "implicit" || o.integrator_name == "implicit_euler") {
    o.cfg.integrator = IntegratorKind::ImplicitEuler;
  } else {
    std::cerr << "error: unknown integrator '" << o.integrator_name << "'\n";
    return kInvalidInput;
  }

  if (auto err = check_params(o.params)) {
    std::cerr << "error: " << *err << "\n";
    return kInvalidInput;
  }
  if (auto err = check_config(o.cfg)) {
    std::cerr << "error: " << *err << "\n";
    return kInvalidInput;
  }

  const CLI::Option* end_opt = cmd->get_option_no_throw("--avg-end");
  const bool end_given = end_opt != nullptr && end_opt->count() > 0;
  if (!end_given && o.window.end_step > o.cfg.n_steps) {
    o.window.end_step = o.cfg.n_steps;
  }
  const CLI::Option* start_opt = cmd->get_option_no_throw("--avg-start");
  const bool start_given = start_opt != nullptr && start_opt->count() > 0;
  if (!start_given && o.window.start_step >= o.window.end_step) {
    o.window.start_step = 0;
  }
  if (!(o.window.start_step >= 0 && o.window.start_step < o.window.end_step &&
        o.window.end_step <= o.cfg.n_steps)) {
    std::cerr << "error: averaging window must satisfy 0 <= start < end <= steps\n";
    return kInvalidInput;
  }
  return kOk;
}

std::optional<ObjectiveResult> try_objective(const Trajectory& traj,
                                             const AveragingWindow& w) {
  try {
    return time_average(traj, w);
  } catch (const WindowNotCovered&) {
    return std::nullopt;
  }
}

int status_exit_code(const TrajectoryStatus& s) {
  return s.kind == StatusKind::Completed ? kOk : kOverflow;
}

// ---------------------------------------------------------------- simulate

int run_simulate(CLI::App* cmd, CommonOpts& o, const std::string& out_csv,
                 const std::string& manifest_path) {
  if (const int rc = resolve_common(cmd, o); rc != kOk) return rc;

  const Trajectory traj = simulate(o.params, o.cfg);
  write_trajectory_csv(out_csv, traj);

  nlohmann::json manifest = {
      {"params", params_to_json(o.params)},
      {"config", config_to_json(o.cfg)},
      {"window", window_to_json(o.window)},
      {"status", status_to_json(traj.status)},
      {"regime", nullptr},
      {"outputs", {out_csv, manifest_path}},
      {"tangent_overflow_step",
       traj.tangent_overflow_step ? nlohmann::json(*traj.tangent_overflow_step)
                                  : nlohmann::json(nullptr)},
  };
  if (const auto obj = try_objective(traj, o.window)) {
    manifest["objective"] = objective_to_json(*obj);
  } else {
    manifest["objective"] = nullptr;
  }

  std::ofstream out(manifest_path);
  if (!out) {
    std::cerr << "error: cannot open " << manifest_path << " for writing\n";
    return kInvalidInput;
  }
  out << manifest.dump(2) << "\n";
  return status_exit_code(traj.status);
}

// ---------------------------------------------------------------- classify

int run_classify(CLI::App* cmd, CommonOpts& o) {
  if (const int rc = resolve_common(cmd, o); rc != kOk) return rc;
  const Trajectory traj = simulate(o.params, o.cfg);
  const RegimeReport report = classify(traj, o.params, o.cfg);
  std::cout << regime_report_to_json(report).dump(2) << "\n";
  return kOk;
}

// ------------------------------------------------------------------- sweep

struct SweepRow {
  double dt = 0.0;
  Regime regime = Regime::Monotone;
  double lyapunov = 0.0;
  std::optional<double> J;
  std::optional<double> dJ_dalpha;
  std::optional<double> dJ_dbeta;
  TrajectoryStatus status;
};

unsigned sweep_thread_count(std::size_t rows) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STIFFSENSE_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap >= 1) n = static_cast<unsigned>(cap);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, rows));
}

int run_sweep(CLI::App* cmd, CommonOpts& o, double dt_min, double dt_max,
              std::int64_t dt_count, const std::string& out_csv) {
  o.cfg.dt = dt_min;  // placate validation; per-row dt set below
  if (const int rc = resolve_common(cmd, o); rc != kOk) return rc;
  if (!(dt_min > 0.0) || !(dt_min < dt_max) || dt_count < 2) {
    std::cerr << "error: sweep needs 0 < dt-min < dt-max and dt-count >= 2\n";
    return kInvalidInput;
  }

  std::vector<double> grid(static_cast<std::size_t>(dt_count));
  const double span = (dt_max - dt_min) / static_cast<double>(dt_count - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = (i + 1 == grid.size()) ? dt_max : dt_min + static_cast<double>(i) * span;
  }

  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      SimConfig cfg = o.cfg;
      cfg.dt = grid[i];
      SweepRow& row = rows[i];
      row.dt = grid[i];
      const Trajectory traj = simulate(o.params, cfg);
      row.status = traj.status;
      const RegimeReport report = classify(traj, o.params, cfg);
      row.regime = report.regime;
      row.lyapunov = report.lyapunov;
      if (const auto obj = try_objective(traj, o.window)) {
        row.J = obj->J;
        if (obj->valid) {
          row.dJ_dalpha = obj->dJ_dalpha;
          row.dJ_dbeta = obj->dJ_dbeta;
        }
      }
    }
  };

  const unsigned n_threads = sweep_thread_count(grid.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::ofstream out(out_csv);
  if (!out) {
    std::cerr << "error: cannot open " << out_csv << " for writing\n";
    return kInvalidInput;
  }
  const auto cell = [](const std::optional<double>& v) {
    return v && std::isfinite(*v) ? format_double(*v) : std::string();
  };
  out << "dt,regime,lyapunov,J,dJ_dalpha,dJ_dbeta,status\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.dt) << ',' << regime_name(row.regime) << ','
        << (std::isfinite(row.lyapunov) ? format_double(row.lyapunov) : std::string())
        << ',' << cell(row.J) << ',' << cell(row.dJ_dalpha) << ',' << cell(row.dJ_dbeta)
        << ',' << status_token(row.status) << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------------ verify

int run_verify(CLI::App* cmd, CommonOpts& o, double h_rel, std::optional<double> tol_fd,
               std::optional<double> tol_adjoint) {
  if (const int rc = resolve_common(cmd, o); rc != kOk) return rc;
  if (!(h_rel > 0.0)) {
    std::cerr << "error: --h-rel must be > 0\n";
    return kInvalidInput;
  }

  const GradientComparison cmp = compare_gradients(o.params, o.cfg, o.window, h_rel);
  std::cout << comparison_to_json(cmp).dump(2) << "\n";

  bool ok = true;
  if (tol_fd) {
    ok = ok && cmp.tangent_valid && cmp.fd.d_alpha && cmp.fd.d_beta &&
         cmp.rel_err_tangent_fd_alpha <= *tol_fd && cmp.rel_err_tangent_fd_beta <= *tol_fd;
  }
  if (tol_adjoint) {
    ok = ok && cmp.tangent_valid && cmp.adjoint_valid &&
         cmp.rel_err_tangent_adjoint_alpha <= *tol_adjoint &&
         cmp.rel_err_tangent_adjoint_beta <= *tol_adjoint;
  }
  return ok ? kOk : kBoundFailed;
}

// --------------------------------------------------------------- reproduce

void write_series_csv(const std::filesystem::path& path, const char* header,
                      const std::vector<RunningAveragePoint>& series, bool with_dalpha) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << header << '\n';
  for (const RunningAveragePoint& pt : series) {
    out << pt.step << ',' << format_double(pt.J);
    if (with_dalpha) out << ',' << format_double(pt.dJ_dalpha);
    out << '\n';
  }
}

void write_column_csv(const std::filesystem::path& path, const char* header,
                      const Trajectory& traj, bool want_x,
                      std::optional<std::int64_t> stop_before = std::nullopt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << header << '\n';
  for (const TrajectoryRecord& r : traj.records) {
    if (stop_before && r.step >= *stop_before) break;
    out << r.step << ',' << format_double(r.time) << ','
        << format_double(want_x ? r.x : r.d_alpha) << '\n';
  }
}

int run_reproduce(int case_id, const std::string& out_dir) {
  if (case_id < 1 || case_id > 4) {
    std::cerr << "error: case must be one of 1, 2, 3, 4\n";
    return kInvalidInput;
  }
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  const ModelParams params;          // alpha = beta = 1, sigma = 1e-4
  SimConfig cfg;                     // 100000 explicit steps
  const AveragingWindow window;      // [2000, 100000]
  const double case_dt[] = {1.0, 2.0, 2.8, 5.0};
  cfg.dt = case_dt[case_id - 1];

  const Trajectory traj = simulate(params, cfg);
  std::vector<std::string> outputs;
  const auto emit = [&](const std::filesystem::path& p) {
    outputs.push_back(p.string());
    return p;
  };

  switch (case_id) {
    case 1: {
      std::ofstream out(emit(dir / "fig1.csv"));
      out << "step,time,x,xd_alpha\n";
      for (const TrajectoryRecord& r : traj.records) {
        out << r.step << ',' << format_double(r.time) << ',' << format_double(r.x) << ','
            << format_double(r.d_alpha) << '\n';
      }
      write_series_csv(emit(dir / "fig2.csv"), "step,J,dJ_dalpha",
                       running_average_series(traj, window), true);
      break;
    }
    case 2: {
      write_column_csv(emit(dir / "fig3.csv"), "step,time,x", traj, true);
      write_column_csv(emit(dir / "fig4.csv"), "step,time,xd_alpha", traj, false);
      write_series_csv(emit(dir / "fig5.csv"), "step,J,dJ_dalpha",
                       running_average_series(traj, window), true);
      break;
    }
    case 3: {
      write_column_csv(emit(dir / "fig6.csv"), "step,time,x", traj, true);
      write_series_csv(emit(dir / "fig7.csv"), "step,J",
                       running_average_series(traj, window), false);
      // Tangent values are meaningful only up to the overflow step.
      write_column_csv(emit(dir / "fig8.csv"), "step,time,xd_alpha", traj, false,
                       traj.tangent_overflow_step);
      SimConfig other = cfg;
      other.dt = 1.0;
      const auto s1 = running_average_series(simulate(params, other), window);
      other.dt = 2.0;
      const auto s2 = running_average_series(simulate(params, other), window);
      const auto s3 = running_average_series(traj, window);
      std::ofstream out(emit(dir / "fig9.csv"));
      out << "step,J_dt_1.0,J_dt_2.0,J_dt_2.8\n";
      for (std::size_t i = 0; i < s3.size(); ++i) {
        out << s3[i].step << ',' << format_double(s1[i].J) << ','
            << format_double(s2[i].J) << ',' << format_double(s3[i].J) << '\n';
      }
      break;
    }
    case 4: {
      write_column_csv(emit(dir / "case4_x.csv"), "step,time,x", traj, true);
      break;
    }
    default:
      break;
  }

  const std::filesystem::path manifest_path =
      dir / ("reproduce_case" + std::to_string(case_id) + "_manifest.json");
  outputs.push_back(manifest_path.string());
  const nlohmann::json manifest = {
      {"case", case_id},
      {"params", params_to_json(params)},
      {"config", config_to_json(cfg)},
      {"window", window_to_json(window)},
      {"status", status_to_json(traj.status)},
      {"outputs", outputs},
  };
  std::ofstream out(manifest_path);
  out << manifest.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Sensitivity laboratory for the stiff flame-propagation ODE"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  std::string sim_csv = "trajectory.csv";
  std::string sim_manifest = "manifest.json";
  CLI::App* sim = app.add_subcommand("simulate", "run one simulation, write CSV + manifest");
  add_common_flags(sim, sim_opts);
  sim->add_option("--out", sim_csv, "trajectory CSV path");
  sim->add_option("--manifest", sim_manifest, "manifest JSON path");

  CommonOpts cls_opts;
  CLI::App* cls = app.add_subcommand("classify", "simulate and print the regime report");
  add_common_flags(cls, cls_opts);

  CommonOpts sweep_opts;
  double dt_min = 0.0;
  double dt_max = 0.0;
  std::int64_t dt_count = 0;
  std::string sweep_csv = "sweep.csv";
  CLI::App* swp = app.add_subcommand("sweep", "run a dt grid, write one summary row per dt");
  add_common_flags(swp, sweep_opts, /*with_dt=*/false);
  swp->add_option("--dt-min", dt_min, "grid start")->required();
  swp->add_option("--dt-max", dt_max, "grid end")->required();
  swp->add_option("--dt-count", dt_count, "grid size (>= 2)")->required();
  swp->add_option("--out", sweep_csv, "summary CSV path");

  CommonOpts ver_opts;
  double h_rel = 1e-6;
  double tol_fd_value = 0.0;
  double tol_adjoint_value = 0.0;
  CLI::App* ver = app.add_subcommand("verify", "compare tangent, adjoint and FD gradients");
  add_common_flags(ver, ver_opts);
  ver->add_option("--h-rel", h_rel, "relative FD step");
  CLI::Option* tol_fd_opt = ver->add_option("--tol-fd", tol_fd_value,
                                            "required tangent-vs-FD relative agreement");
  CLI::Option* tol_adj_opt = ver->add_option("--tol-adjoint", tol_adjoint_value,
                                             "required tangent-vs-adjoint relative agreement");

  int case_id = 0;
  std::string out_dir = ".";
  CLI::App* rep = app.add_subcommand("reproduce", "write figure data for one canned case");
  rep->add_option("case", case_id, "case number (1-4)")->required();
  rep->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (sim->parsed()) return run_simulate(sim, sim_opts, sim_csv, sim_manifest);
    if (cls->parsed()) return run_classify(cls, cls_opts);
    if (swp->parsed()) return run_sweep(swp, sweep_opts, dt_min, dt_max, dt_count, sweep_csv);
    if (ver->parsed()) {
      return run_verify(ver, ver_opts, h_rel,
                        tol_fd_opt->count() ? std::optional<double>(tol_fd_value)
                                            : std::nullopt,
                        tol_adj_opt->count() ? std::optional<double>(tol_adjoint_value)
                                             : std::nullopt);
    }
    if (rep->parsed()) return run_reproduce(case_id, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace stiffsense::cli
