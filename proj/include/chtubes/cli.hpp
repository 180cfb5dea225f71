#pragma once

// Command-line front end. run_cli is the whole program minus process
// plumbing, so tests can drive it with in-memory streams.

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chtubes/io.hpp"

namespace chtubes {

enum ExitCode : int { kExitOk = 0, kExitVerificationFailure = 1, kExitInputError = 2 };

struct RunConfig {
  int n = 3;
  double c = -4.0;
  int k = 2;
  double phi = std::numbers::pi / 2.0;
  std::optional<double> r;
  double r_min = 0.05;
  double r_max = 2.0;
  int rows = 100;
  double step = 1e-4;
  double fd_step = 1e-3;
  std::optional<double> tol;
  std::uint64_t seed = 20240601;
  std::string out = "-";
  std::string format = "csv";
  std::string input;
};

// Throws GeometryError(InvalidArgument) when the configuration cannot be run.
void validate(const RunConfig& config, std::string_view command);

struct SweepRow {
  double r = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
  std::optional<double> lambda4;
  int mult1 = 0, mult2 = 0, mult3 = 0, mult4 = 0;
  double b1sq = 0.0, b2sq = 0.0;
  int g = 0, h = 0;
  std::optional<double> detD;
  double detD_expected = 0.0;
  std::string classify_status;
};

// Uniform grid on [r_min, r_max]; the node nearest the special radius is
// moved onto it when that radius lies inside the range.
std::vector<double> sweep_radii(const RunConfig& config);
SweepRow sweep_row(const SubmanifoldSpec& spec, double r, double step);
// Rows are computed in parallel and returned in grid order.
std::vector<SweepRow> compute_sweep(const RunConfig& config);

extern const char* const kSweepHeader;
std::string sweep_csv(const std::vector<SweepRow>& rows);
Json sweep_json(const std::vector<SweepRow>& rows);

struct ModelCheck {
  CurvatureReport curvature;
  double geodesic_residual = 0.0;   // RK4 vs closed form in a root-space plane
  double speed_residual = 0.0;      // | |gamma'| - 1 |
  double transport_residual = 0.0;  // Gram matrix drift of a transported frame
  double velocity_residual = 0.0;   // transported velocity vs geodesic velocity
  bool passed = false;
};

ModelCheck verify_model(const RunConfig& config);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chtubes
