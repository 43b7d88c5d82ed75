#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "stiffsense/io.hpp"
#include "test_helpers.hpp"

using namespace stiffsense;
namespace fs = std::filesystem;

TEST_CASE("format_double round-trips every value it prints") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(std::strtod(format_double(1e-4).c_str(), nullptr) == 1e-4);
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("status and regime tokens") {
  CHECK(status_token({StatusKind::Completed, -1}) == "completed");
  CHECK(status_token({StatusKind::TangentOverflow, 10323}) == "tangent_overflow:10323");
  CHECK(status_token({StatusKind::PrimalOverflow, 7}) == "primal_overflow:7");
  CHECK(status_token({StatusKind::NewtonFailed, 3}) == "newton_failed:3");
  CHECK(regime_name(Regime::Monotone) == "monotone");
  CHECK(regime_name(Regime::Divergent) == "divergent");
}

TEST_CASE("trajectory CSV round-trips bitwise") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> xs(200);
  for (double& v : xs) v = dist(rng);
  const Trajectory traj = stiffsense::testing::make_synthetic(xs, 0.25);

  const fs::path path =
      fs::temp_directory_path() / ("stiffsense_io_" + std::to_string(::getpid()) + ".csv");
  write_trajectory_csv(path, traj);
  const auto back = read_csv_column(path, "x");
  REQUIRE(back.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(back[i] == xs[i]);
  const auto times = read_csv_column(path, "time");
  CHECK(times[3] == 0.75);
  fs::remove(path);
}

TEST_CASE("non-finite diagnostics become JSON null") {
  RegimeReport r;
  r.regime = Regime::Divergent;
  r.lyapunov = std::numeric_limits<double>::quiet_NaN();
  r.envelope_ratio = std::numeric_limits<double>::infinity();
  const nlohmann::json j = regime_report_to_json(r);
  CHECK(j["lyapunov"].is_null());
  CHECK(j["envelope_ratio"].is_null());
  CHECK(j["regime"] == "divergent");
}
