#include "stiffsense/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stiffsense {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Monotone: return "monotone";
    case Regime::Oscillating: return "oscillating";
    case Regime::Chaotic: return "chaotic";
    case Regime::Divergent: return "divergent";
  }
  return "unknown";
}

std::string_view status_kind_name(StatusKind k) {
  switch (k) {
    case StatusKind::Completed: return "completed";
    case StatusKind::PrimalOverflow: return "primal_overflow";
    case StatusKind::TangentOverflow: return "tangent_overflow";
    case StatusKind::NewtonFailed: return "newton_failed";
  }
  return "unknown";
}

std::string status_token(const TrajectoryStatus& s) {
  std::string token(status_kind_name(s.kind));
  if (s.kind != StatusKind::Completed) {
    token += ':';
    token += std::to_string(s.step);
  }
  return token;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "step,time,x,xd_alpha,xd_beta\n";
  for (const TrajectoryRecord& r : traj.records) {
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.x) << ','
        << format_double(r.d_alpha) << ',' << format_double(r.d_beta) << '\n';
  }
}

std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    std::string_view column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path.string());

  std::size_t target = std::string::npos;
  {
    std::stringstream header(line);
    std::string cell;
    for (std::size_t i = 0; std::getline(header, cell, ','); ++i) {
      if (cell == column) target = i;
    }
  }
  if (target == std::string::npos) {
    throw std::runtime_error("column not found: " + std::string(column));
  }

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    for (std::size_t i = 0; std::getline(row, cell, ','); ++i) {
      if (i == target) {
        values.push_back(std::strtod(cell.c_str(), nullptr));
        break;
      }
    }
  }
  return values;
}

namespace {

// JSON cannot carry NaN/inf; nlohmann would emit them verbatim, so map
// non-finite diagnostics to null explicitly.
nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json optional_to_json(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

}  // namespace

nlohmann::json params_to_json(const ModelParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"sigma", p.sigma}};
}

nlohmann::json config_to_json(const SimConfig& cfg) {
  return {{"dt", cfg.dt},
          {"n_steps", cfg.n_steps},
          {"integrator", cfg.integrator == IntegratorKind::ExplicitEuler
                             ? "explicit_euler"
                             : "implicit_euler"},
          {"overflow_guard", cfg.overflow_guard},
          {"newton_tol", cfg.newton_tol},
          {"newton_max_iter", cfg.newton_max_iter},
          {"record_stride", cfg.record_stride}};
}

nlohmann::json window_to_json(const AveragingWindow& w) {
  return {{"start_step", w.start_step}, {"end_step", w.end_step}};
}

nlohmann::json status_to_json(const TrajectoryStatus& s) {
  nlohmann::json j = {{"kind", status_kind_name(s.kind)}};
  if (s.kind == StatusKind::Completed) {
    j["step"] = nullptr;
  } else {
    j["step"] = s.step;
  }
  return j;
}

nlohmann::json objective_to_json(const ObjectiveResult& r) {
  return {{"J", finite_or_null(r.J)},
          {"dJ_dalpha", finite_or_null(r.dJ_dalpha)},
          {"dJ_dbeta", finite_or_null(r.dJ_dbeta)},
          {"valid", r.valid}};
}

nlohmann::json regime_report_to_json(const RegimeReport& r) {
  return {{"regime", regime_name(r.regime)},
          {"lyapunov", finite_or_null(r.lyapunov)},
          {"window", {{"start_step", r.window_start}, {"end_step", r.window_end}}},
          {"sign_flip_fraction", r.sign_flip_fraction},
          {"envelope_ratio", finite_or_null(r.envelope_ratio)}};
}

nlohmann::json comparison_to_json(const GradientComparison& c) {
  return {{"tangent",
           {{"d_alpha", finite_or_null(c.tangent_d_alpha)},
            {"d_beta", finite_or_null(c.tangent_d_beta)},
            {"valid", c.tangent_valid}}},
          {"adjoint",
           {{"d_alpha", finite_or_null(c.adjoint_d_alpha)},
            {"d_beta", finite_or_null(c.adjoint_d_beta)},
            {"valid", c.adjoint_valid}}},
          {"finite_difference",
           {{"d_alpha", optional_to_json(c.fd.d_alpha)},
            {"d_beta", optional_to_json(c.fd.d_beta)},
            {"valid_alpha", c.fd.d_alpha.has_value()},
            {"valid_beta", c.fd.d_beta.has_value()}}},
          {"h_used", {{"alpha", c.fd.h_alpha}, {"beta", c.fd.h_beta}}},
          {"rel_err_tangent_fd",
           {{"alpha", finite_or_null(c.rel_err_tangent_fd_alpha)},
            {"beta", finite_or_null(c.rel_err_tangent_fd_beta)}}},
          {"rel_err_tangent_adjoint",
           {{"alpha", finite_or_null(c.rel_err_tangent_adjoint_alpha)},
            {"beta", finite_or_null(c.rel_err_tangent_adjoint_beta)}}}};
}

}  // namespace stiffsense
