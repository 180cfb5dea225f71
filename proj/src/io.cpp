#include "chtubes/io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "chtubes/errors.hpp"

namespace chtubes {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Mat matrix_from_json(const Json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array() || j.at(field).empty()) {
    fail(ErrorKind::InvalidArgument, std::string("missing or empty matrix field \"") + field + "\"");
  }
  const Json& rows = j.at(field);
  const auto cols = rows.at(0).is_array() ? rows.at(0).size() : 0;
  if (cols == 0) fail(ErrorKind::InvalidArgument, std::string("field \"") + field + "\" must be an array of rows");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      fail(ErrorKind::InvalidArgument, std::string("ragged rows in \"") + field + "\"");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!rows[i][k].is_number()) fail(ErrorKind::InvalidArgument, std::string("non-numeric entry in \"") + field + "\"");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
    }
  }
  return m;
}

Vec vector_from_json(const Json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    fail(ErrorKind::InvalidArgument, std::string("missing vector field \"") + field + "\"");
  }
  const Json& arr = j.at(field);
  Vec v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) fail(ErrorKind::InvalidArgument, std::string("non-numeric entry in \"") + field + "\"");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

Json germ_to_json(const HypersurfaceGerm& germ) {
  return Json{{"n", germ.params.n},
              {"c", germ.params.c},
              {"normal", vector_to_json(germ.normal)},
              {"tangent_basis", matrix_to_json(germ.tangent_basis.transpose())},
              {"shape", matrix_to_json(germ.shape)},
              {"J", matrix_to_json(germ.jmat)}};
}

HypersurfaceGerm germ_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "germ JSON must be an object");
  if (!j.contains("n") || !j.at("n").is_number_integer()) fail(ErrorKind::InvalidArgument, "germ needs integer \"n\"");
  if (!j.contains("c") || !j.at("c").is_number()) fail(ErrorKind::InvalidArgument, "germ needs numeric \"c\"");
  HypersurfaceGerm germ;
  germ.params = ModelParams::make(j.at("n").get<int>(), j.at("c").get<double>());
  germ.normal = vector_from_json(j, "normal");
  germ.tangent_basis = matrix_from_json(j, "tangent_basis").transpose();
  germ.shape = matrix_from_json(j, "shape");
  germ.jmat = matrix_from_json(j, "J");
  const GermCheck check = check_germ(germ);
  if (!check.dimensions_ok) fail(ErrorKind::InvalidArgument, "germ has inconsistent dimensions");
  return germ;
}

Json spec_to_json(const SubmanifoldSpec& spec) {
  return Json{{"n", spec.params.n},
              {"c", spec.params.c},
              {"k", spec.k()},
              {"phi", spec.phi()},
              {"dim", spec.dim()},
              {"wperp_basis", matrix_to_json(spec.wperp.basis.transpose())},
              {"tangent_basis", matrix_to_json(spec.tangent.transpose())},
              {"z", vector_to_json(spec.zvec)}};
}

Json classification_to_json(const ClassificationResult& result) {
  Json residuals = Json::object();
  for (const auto& [name, value] : result.residuals) residuals[name] = value;
  Json eigenvalues = Json::array();
  for (double v : result.eigenvalues) eigenvalues.push_back(v);
  return Json{{"model", std::string(to_string(result.model))},
              {"g", result.g},
              {"h", result.h},
              {"k", result.k},
              {"r", result.r},
              {"branch", result.branch ? std::string(to_string(*result.branch)) : std::string("none")},
              {"residuals", residuals},
              {"reason", result.reason},
              {"flipped", result.flipped},
              {"eigenvalues", eigenvalues}};
}

Json curvature_report_to_json(const CurvatureReport& report) {
  return Json{{"max_residual", report.max_residual},
              {"min_sectional", report.min_sectional},
              {"max_sectional", report.max_sectional},
              {"holomorphic_residual", report.holomorphic_residual},
              {"totally_real_residual", report.totally_real_residual},
              {"samples", report.samples},
              {"passed", report.passed},
              {"failure", report.failure}};
}

Json nonexistence_to_json(const NonexistenceReport& report) {
  return Json{{"c", report.c},
              {"grid_points", report.grid_points},
              {"singular_points", report.singular_points},
              {"unordered_points", report.unordered_points},
              {"system_feasible", report.system_feasible},
              {"relaxed_feasible", report.relaxed_feasible},
              {"curve_points", report.curve_points},
              {"curve_feasible", report.curve_feasible},
              {"curve_max_deviation", report.curve_max_deviation},
              {"max_discriminant", report.max_discriminant},
              {"certificate", report.certificate},
              {"certificate_text", report.certificate_text}};
}

Json residual_suite_to_json(const ResidualSuite& suite) {
  Json entries = Json::array();
  for (const auto& e : suite.entries) {
    entries.push_back(Json{{"name", e.name},
                           {"coarse", e.coarse},
                           {"fine", e.fine},
                           {"order", e.order},
                           {"at_noise_floor", e.at_noise_floor}});
  }
  return Json{{"fd_step", suite.fd_step},
              {"coarse_step", 2.0 * suite.fd_step},
              {"max_fine", suite.max_fine()},
              {"min_order", suite.min_order()},
              {"entries", entries}};
}

}  // namespace chtubes
