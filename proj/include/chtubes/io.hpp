#pragma once

// JSON and CSV serialisation of germs, submanifold specs, classification
// results and verification reports.

#include <string>

#include "json.hpp"

#include "chtubes/ambient_model.hpp"
#include "chtubes/construction.hpp"
#include "chtubes/germ.hpp"
#include "chtubes/numlab.hpp"
#include "chtubes/spectral.hpp"

namespace chtubes {

using Json = nlohmann::json;

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

Json matrix_to_json(const Mat& m);  // array of rows
Json vector_to_json(const Vec& v);
Mat matrix_from_json(const Json& j, const char* field);
Vec vector_from_json(const Json& j, const char* field);

// {"n", "c", "normal", "tangent_basis" (rows = basis vectors), "shape", "J"}.
Json germ_to_json(const HypersurfaceGerm& germ);
// Throws InvalidArgument on missing fields or inconsistent shapes.
HypersurfaceGerm germ_from_json(const Json& j);

// {"n", "c", "k", "phi", "wperp_basis", "tangent_basis", "z"}; bases as rows.
Json spec_to_json(const SubmanifoldSpec& spec);

// {"model", "g", "h", "k", "r", "branch", "residuals", "reason", "flipped", "eigenvalues"}.
Json classification_to_json(const ClassificationResult& result);

Json curvature_report_to_json(const CurvatureReport& report);
Json nonexistence_to_json(const NonexistenceReport& report);
Json residual_suite_to_json(const ResidualSuite& suite);

}  // namespace chtubes
