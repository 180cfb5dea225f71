#include "chtubes/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "chtubes/errors.hpp"
#include "chtubes/jacobi.hpp"
#include "chtubes/numlab.hpp"

namespace chtubes {

namespace {

constexpr double kGeodesicTol = 1e-8;
constexpr double kTransportTol = 1e-10;
constexpr double kResidualTol = 1e-3;
constexpr double kMinOrder = 1.8;
constexpr double kCurveTol = 1e-9;

std::string csv_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty() || config.out == "-") {
    out << text;
    return;
  }
  std::ofstream file(config.out, std::ios::binary);
  if (!file) fail(ErrorKind::InvalidArgument, "cannot open output file " + config.out);
  file << text;
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Singular:
    case ErrorKind::RankDeficient: return false;
    default: return true;
  }
}

}  // namespace

const char* const kSweepHeader =
    "r,lambda1,lambda2,lambda3,lambda4,mult1,mult2,mult3,mult4,b1sq,b2sq,g,h,detD,detD_expected,classify_status";

void validate(const RunConfig& config, std::string_view command) {
  ModelParams::make(config.n, config.c);
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::InvalidArgument, what);
  };
  require(std::isfinite(config.c), "c must be finite");
  require(config.step > 0.0, "--step must be positive");
  require(config.fd_step > 0.0, "--fd-step must be positive");
  if (config.tol) require(*config.tol > 0.0, "--tol must be positive");
  require(config.format == "csv" || config.format == "json", "--format must be csv or json");
  const bool needs_negative = command == "verify-model" || command == "construct" || command == "sweep" ||
                              command == "residuals";
  if (needs_negative) require(config.c < 0.0, std::string(command) + " requires c < 0");
  if (command == "sweep") {
    require(config.rows >= 2, "--rows must be at least 2");
    require(config.r_min >= 0.0 && config.r_max > config.r_min, "need 0 <= r-min < r-max");
  }
  if (command == "nonexistence") require(config.rows >= 2, "--rows must be at least 2");
  if (config.r) require(*config.r >= 0.0, "--r must be nonnegative");
}

std::vector<double> sweep_radii(const RunConfig& config) {
  std::vector<double> radii(static_cast<std::size_t>(config.rows));
  const double cell = (config.r_max - config.r_min) / (config.rows - 1);
  for (int i = 0; i < config.rows; ++i) radii[static_cast<std::size_t>(i)] = config.r_min + i * cell;
  const double special = special_radius(config.c);
  if (special >= config.r_min && special <= config.r_max) {
    const auto nearest = static_cast<std::size_t>(std::lround((special - config.r_min) / cell));
    radii[std::min(nearest, radii.size() - 1)] = special;
  }
  return radii;
}

SweepRow sweep_row(const SubmanifoldSpec& spec, double r, double step) {
  SweepRow row;
  row.r = r;
  const double c = spec.params.c;
  row.detD_expected = sech_cubed(r, c);
  const TubeGerm tube = tube_shape_operator(spec, r, step);
  const ClassificationResult cls = classify(tube.germ);
  row.g = cls.g;
  row.h = cls.h;
  row.classify_status = std::string(to_string(cls.model));
  if (!cls.reason.empty()) row.classify_status += ":" + sanitize(cls.reason);
  if (cls.observed) {
    const EigenStructure& es = *cls.observed;
    row.lambda1 = es.lambda1;
    row.lambda2 = es.lambda2;
    row.lambda3 = es.lambda3;
    row.lambda4 = es.lambda4;
    const auto mult = [&](std::size_t i) { return i < es.multiplicities.size() ? es.multiplicities[i] : 0; };
    row.mult1 = mult(0);
    row.mult2 = mult(1);
    row.mult3 = mult(2);
    row.mult4 = mult(3);
    row.b1sq = es.b1sq();
    row.b2sq = es.b2sq();
    row.detD = D_matrix(r, es.b1, es.b2, es.lambda1, es.lambda2, c).determinant();
  }
  return row;
}

std::vector<SweepRow> compute_sweep(const RunConfig& config) {
  validate(config, "sweep");
  const SubmanifoldSpec spec = build_submanifold(ModelParams{config.n, config.c}, config.k, config.phi);
  const std::vector<double> radii = sweep_radii(config);
  std::vector<SweepRow> rows(radii.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < radii.size(); i = next++) {
      try {
        rows[i] = sweep_row(spec, radii[i], config.step);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < count; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const auto& row : rows) {
    out << format_double(row.r) << ',' << format_double(row.lambda1) << ',' << format_double(row.lambda2) << ','
        << format_double(row.lambda3) << ',' << csv_field(row.lambda4) << ',' << row.mult1 << ',' << row.mult2
        << ',' << row.mult3 << ',' << row.mult4 << ',' << format_double(row.b1sq) << ','
        << format_double(row.b2sq) << ',' << row.g << ',' << row.h << ',' << csv_field(row.detD) << ','
        << format_double(row.detD_expected) << ',' << row.classify_status << '\n';
  }
  return out.str();
}

Json sweep_json(const std::vector<SweepRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back(Json{{"r", row.r},
                       {"lambda1", row.lambda1},
                       {"lambda2", row.lambda2},
                       {"lambda3", row.lambda3},
                       {"lambda4", row.lambda4 ? Json(*row.lambda4) : Json(nullptr)},
                       {"mult1", row.mult1},
                       {"mult2", row.mult2},
                       {"mult3", row.mult3},
                       {"mult4", row.mult4},
                       {"b1sq", row.b1sq},
                       {"b2sq", row.b2sq},
                       {"g", row.g},
                       {"h", row.h},
                       {"detD", row.detD ? Json(*row.detD) : Json(nullptr)},
                       {"detD_expected", row.detD_expected},
                       {"classify_status", row.classify_status}});
  }
  return out;
}

ModelCheck verify_model(const RunConfig& config) {
  validate(config, "verify-model");
  const SolvableModel model(ModelParams{config.n, config.c});
  ModelCheck check;
  check.curvature = verify_curvature(model, 200, config.seed, config.tol.value_or(1e-10));

  // Geodesics in the totally geodesic plane spanned by B and e_1 have a closed form.
  const Vec u = model.e(0);
  for (double t : {0.5, 1.0, 2.0}) {
    const TangentVector end = model.geodesic(TangentVector{model.identity(), u}, t, config.step);
    const Point exact = model.geodesic_from_identity_in_root_space(u, t);
    check.geodesic_residual = std::max(check.geodesic_residual, (end.base.coords - exact.coords).cwiseAbs().maxCoeff());
    check.speed_residual = std::max(check.speed_residual, std::abs(end.vec.norm() - 1.0));
  }

  // Parallel transport of a seeded frame along a seeded direction.
  const Mat draws = gaussian_samples(model.dim(), model.dim() + 1, config.seed);
  const Vec w = draws.col(0).normalized();
  const Mat frame = draws.rightCols(model.dim());
  const TangentVector start{model.identity(), w};
  const Mat moved = model.parallel_transport(start, frame, 1.0, config.step);
  check.transport_residual = max_abs(moved.transpose() * moved - frame.transpose() * frame);
  const Vec vel = model.parallel_transport(start, w, 1.0, config.step);
  check.velocity_residual = (vel - model.geodesic(start, 1.0, config.step).vec).cwiseAbs().maxCoeff();

  check.passed = check.curvature.passed && check.geodesic_residual < kGeodesicTol &&
                 check.speed_residual < kGeodesicTol && check.transport_residual < kTransportTol &&
                 check.velocity_residual < kTransportTol;
  return check;
}

namespace {

int cmd_verify_model(const RunConfig& config, std::ostream& out) {
  const ModelCheck check = verify_model(config);
  Json report{{"n", config.n},
              {"c", config.c},
              {"curvature", curvature_report_to_json(check.curvature)},
              {"geodesic_residual", check.geodesic_residual},
              {"speed_residual", check.speed_residual},
              {"transport_residual", check.transport_residual},
              {"velocity_residual", check.velocity_residual},
              {"passed", check.passed}};
  emit(config, report.dump(2) + "\n", out);
  return check.passed ? kExitOk : kExitVerificationFailure;
}

int cmd_construct(const RunConfig& config, std::ostream& out) {
  validate(config, "construct");
  const SubmanifoldSpec spec = build_submanifold(ModelParams{config.n, config.c}, config.k, config.phi);
  if (!config.r) {
    emit(config, spec_to_json(spec).dump(2) + "\n", out);
    return kExitOk;
  }
  const TubeGerm tube = tube_shape_operator(spec, *config.r, config.step);
  Json doc = germ_to_json(tube.germ);
  emit(config, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  const std::vector<SweepRow> rows = compute_sweep(config);
  if (config.format == "json") {
    emit(config, sweep_json(rows).dump(2) + "\n", out);
  } else {
    emit(config, sweep_csv(rows), out);
  }
  return kExitOk;
}

int cmd_classify(const RunConfig& config, std::ostream& out) {
  std::ifstream file(config.input);
  if (!file) fail(ErrorKind::InvalidArgument, "cannot read germ file " + config.input);
  Json doc;
  try {
    doc = Json::parse(file);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
  const HypersurfaceGerm germ = germ_from_json(doc);
  ClassifyOptions options;
  if (config.tol) options.residual_tol = *config.tol;
  const ClassificationResult result = classify(germ, options);
  emit(config, classification_to_json(result).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_residuals(const RunConfig& config, std::ostream& out) {
  validate(config, "residuals");
  const double r = config.r.value_or(0.7);
  const SubmanifoldSpec spec = build_submanifold(ModelParams{config.n, config.c}, config.k, config.phi);
  const ResidualSuite suite =
      residual_suite([&](double h) { return tube_chart(spec, r, h); }, config.fd_step);
  const double tol = config.tol.value_or(kResidualTol);
  const bool passed = suite.max_fine() < tol && suite.min_order() >= kMinOrder;
  Json report = residual_suite_to_json(suite);
  report["n"] = config.n;
  report["k"] = config.k;
  report["r"] = r;
  report["tol"] = tol;
  report["min_order_required"] = kMinOrder;
  report["passed"] = passed;
  emit(config, report.dump(2) + "\n", out);
  return passed ? kExitOk : kExitVerificationFailure;
}

int cmd_nonexistence(const RunConfig& config, std::ostream& out) {
  validate(config, "nonexistence");
  NonexistenceGrid grid;
  grid.lambda2_points = config.rows;
  grid.lambda3_points = config.rows;
  grid.curve_points = config.rows;
  const NonexistenceReport report = nonexistence_scan(config.c, grid);
  bool expected = false;
  std::ostringstream text;
  if (config.c > 0.0) {
    expected = report.system_feasible == 0 && report.relaxed_feasible == 0 && report.curve_feasible == 0 &&
               report.certificate;
    text << report.system_feasible << " feasible / " << report.grid_points << " grid ("
         << report.relaxed_feasible << " with both b_i^2 in (0,1) before imposing consistency)\n";
  } else {
    expected = report.curve_feasible > 0 && report.curve_max_deviation < kCurveTol;
    text << report.curve_feasible << " feasible / " << report.curve_points << " curve points\n";
  }
  if (config.format == "json") {
    Json doc = nonexistence_to_json(report);
    doc["expected_outcome"] = expected;
    emit(config, doc.dump(2) + "\n", out);
  } else {
    text << report.certificate_text << '\n';
    emit(config, text.str(), out);
  }
  return expected ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Real hypersurfaces with constant principal curvatures in complex hyperbolic space"};
  app.require_subcommand(1);
  RunConfig config;
  double r_value = 0.0;
  double tol_value = 0.0;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--n", config.n, "complex dimension (n >= 2)");
    sub->add_option("--c", config.c, "holomorphic sectional curvature (nonzero)");
    sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--out", config.out, "output path ('-' for stdout)");
    sub->add_option("--tol", tol_value, "verification tolerance");
  };
  const auto geometry = [&](CLI::App* sub) {
    sub->add_option("--k", config.k, "codimension of the ruled orbit W");
    sub->add_option("--phi", config.phi, "Kahler angle of w-perp in (0, pi/2]");
    sub->add_option("--step", config.step, "RK4 step");
  };

  CLI::App* verify = app.add_subcommand("verify-model", "check the curvature, geodesics and transport of the model");
  common(verify);
  verify->add_option("--step", config.step, "RK4 step");
  CLI::App* construct = app.add_subcommand("construct", "emit a W spec, or a tube germ with --r");
  common(construct);
  geometry(construct);
  construct->add_option("--r", r_value, "tube radius");
  CLI::App* sweep = app.add_subcommand("sweep", "tube spectra over a radius grid");
  common(sweep);
  geometry(sweep);
  sweep->add_option("--r-min", config.r_min, "first radius");
  sweep->add_option("--r-max", config.r_max, "last radius");
  sweep->add_option("--rows", config.rows, "number of radii");
  sweep->add_option("--format", config.format, "csv or json");
  CLI::App* classify_cmd = app.add_subcommand("classify", "classify a germ JSON file");
  common(classify_cmd);
  classify_cmd->add_option("germ", config.input, "germ JSON path")->required();
  CLI::App* residuals = app.add_subcommand("residuals", "finite-difference structure equation residuals");
  common(residuals);
  geometry(residuals);
  residuals->add_option("--r", r_value, "tube radius (default 0.7)");
  residuals->add_option("--fd-step", config.fd_step, "finite-difference step");
  CLI::App* nonexistence = app.add_subcommand("nonexistence", "scan the eigenvalue constraints for solutions");
  common(nonexistence);
  nonexistence->add_option("--rows", config.rows, "grid points per axis");
  nonexistence->add_option("--format", config.format, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto given = [&](const char* name) {
    const CLI::Option* opt = chosen->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--r")) config.r = r_value;
  if (given("--tol")) config.tol = tol_value;
  if (chosen == nonexistence) {
    if (!given("--rows")) config.rows = 1000;
    if (config.format == "text") config.format = "csv";
  }

  try {
    if (chosen == verify) return cmd_verify_model(config, out);
    if (chosen == construct) return cmd_construct(config, out);
    if (chosen == sweep) return cmd_sweep(config, out);
    if (chosen == classify_cmd) return cmd_classify(config, out);
    if (chosen == residuals) return cmd_residuals(config, out);
    if (chosen == nonexistence) return cmd_nonexistence(config, out);
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.kind()) ? kExitInputError : kExitVerificationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailure;
  }
  return kExitInputError;
}

}  // namespace chtubes
