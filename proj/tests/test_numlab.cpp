#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chtubes/construction.hpp"
#include "chtubes/errors.hpp"
#include "chtubes/jacobi.hpp"
#include "chtubes/numlab.hpp"
#include "chtubes/spectral.hpp"

using namespace chtubes;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

SubmanifoldSpec w4() { return build_submanifold(ModelParams::make(3, -4.0), 2, kHalfPi); }

}  // namespace

TEST_CASE("tube chart centre lies on the normal geodesic") {
  const SubmanifoldSpec spec = w4();
  const double r = 0.7;
  const ChartImmersion chart = tube_chart(spec, r);
  CHECK(chart.domain_dim == 5);
  const SolvableModel m(spec.params);
  const Point rk = m.geodesic(TangentVector{m.identity(), spec.wperp.basis.col(0)}, r).base;
  const Vec centre = chart.map(chart.center.cast<long double>()).cast<double>();
  CHECK((centre - rk.coords).norm() < 1e-10);

  CHECK_THROWS_AS(tube_chart(spec, 0.0), GeometryError);
  CHECK_THROWS_AS(tube_chart(spec, 4.0), GeometryError);
}

TEST_CASE("small radius equidistant chart approaches W") {
  const SubmanifoldSpec spec = build_submanifold(ModelParams::make(2, -4.0), 1, kHalfPi);
  const ChartImmersion at_zero = tube_chart(spec, 0.0);
  const ChartImmersion near = tube_chart(spec, 1e-6);
  LVec u = LVec::Zero(3);
  u << 0.1L, -0.2L, 0.3L;
  CHECK((at_zero.map(u) - near.map(u)).cast<double>().norm() < 1e-5);
}

TEST_CASE("finite-difference germ agrees with the Jacobi germ") {
  const SubmanifoldSpec spec = w4();
  const double r = 0.7;
  const NumericGeometry fd = numeric_geometry(tube_chart(spec, r));
  const PrincipalDecomposition numeric = principal_decomposition(fd.germ, 1e-4);
  const PrincipalDecomposition exact = principal_decomposition(tube_shape_operator(spec, r).germ);
  REQUIRE(numeric.g == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(numeric.groups[i].value - exact.groups[i].value) < 1e-5);
  CHECK(classify(fd.germ, ClassifyOptions{1e-4, 1e-4}).model == Model::Tube);
}

TEST_CASE("horosphere structure equations") {
  const ModelParams p = ModelParams::make(3, -4.0);
  GermField field(horosphere_chart(p));
  const std::vector<double> values = principal_decomposition(field.germ(field.origin()), 1e-6).eigenvalues();
  REQUIRE(values.size() == 5);
  CHECK(std::abs(values.front() - 1.0) < 1e-8);
  CHECK(std::abs(values.back() - 2.0) < 1e-8);
  const GaussCodazziReport report = gauss_codazzi_residuals(field);
  CHECK(report.gauss < 1e-4);
  CHECK(report.codazzi < 1e-4);
}

TEST_CASE("tube structure equations and sensitivity") {
  const SubmanifoldSpec spec = w4();
  GermField field(tube_chart(spec, 0.7));
  const GaussCodazziReport report = gauss_codazzi_residuals(field);
  CHECK(report.gauss < 1e-4);
  CHECK(report.codazzi < 1e-4);

  GermField scaled(tube_chart(spec, 0.7), 1.01);
  const GaussCodazziReport off = gauss_codazzi_residuals(scaled);
  CHECK(off.codazzi >= report.codazzi + 1e-2);
}

TEST_CASE("lemma residuals on the tube") {
  GermField field(tube_chart(w4(), 0.7));
  const LemmaCodazziReport codazzi = lemma_codazzi_residuals(field);
  CHECK(codazzi.real_subspace < 1e-4);
  CHECK(codazzi.two_spaces < 1e-4);
  CHECK(codazzi.three_spaces < 1e-4);
  const LemmaGaussReport gauss = lemma_gauss_residual(field);
  CHECK(gauss.u1_u2 < 1e-3);
  CHECK(gauss.u1_a < 1e-3);
  CHECK(gauss.pairs > 0);
  const NablaFormulaReport nabla = nabla_formula_residuals(field);
  CHECK(nabla.max() < 1e-3);
}

TEST_CASE("lemma residuals need a catalog germ") {
  GermField field(horosphere_chart(ModelParams::make(3, -4.0)));
  CHECK_THROWS_AS(lemma_gauss_residual(field), GeometryError);
}

TEST_CASE("invalid charts") {
  CHECK_THROWS_AS(GermField(horosphere_chart(ModelParams::make(3, -4.0), 1e-7)), GeometryError);
  ChartImmersion flat = horosphere_chart(ModelParams::make(2, -4.0));
  flat.map = [](const LVec& u) {
    LVec out = LVec::Zero(4);
    out(2) = u(0) + u(1) + u(2);
    return out;
  };
  try {
    GermField field(flat);
    FAIL("expected a rank-deficient chart to be rejected");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == ErrorKind::RankDeficient);
  }
}

TEST_CASE("residual suite converges at second order") {
  const SubmanifoldSpec spec = w4();
  const ResidualSuite suite =
      residual_suite([&](double h) { return tube_chart(spec, 0.7, h); }, 1e-3);
  CHECK(suite.max_fine() < 1e-3);
  CHECK(suite.min_order() >= 1.8);
  CHECK(suite.entries.size() == 11);
}
