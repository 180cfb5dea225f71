#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chtubes/construction.hpp"
#include "chtubes/errors.hpp"
#include "chtubes/jacobi.hpp"
#include "chtubes/spectral.hpp"

using namespace chtubes;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

ErrorKind kind_of(auto&& call) {
  try {
    call();
  } catch (const GeometryError& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("f and g functions") {
  CHECK(f_function(0.7, -4.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(g_function(0.7, -4.0, 0.0)) < 1e-15);
  const double r = 0.8, c = -4.0;
  const double l3 = lambda3_at_radius(r, c);
  CHECK(std::abs(f_function(l3, c, r) - 1.0 / std::cosh(r)) < 1e-14);
  const double rstar = std::log(2.0 + std::sqrt(3.0)) / 2.0;
  CHECK(std::abs(f_function(std::sqrt(3.0), c, rstar)) < 1e-14);
  CHECK_THROWS_AS(f_function(0.1, 1.0, 0.5), GeometryError);

  // Derivatives against central differences.
  const double h = 1e-5;
  CHECK(std::abs(f_derivative(0.3, c, 0.4) - (f_function(0.3, c, 0.4 + h) - f_function(0.3, c, 0.4 - h)) / (2 * h)) <
        1e-8);
  CHECK(std::abs(g_derivative(0.3, c, 0.4) - (g_function(0.3, c, 0.4 + h) - g_function(0.3, c, 0.4 - h)) / (2 * h)) <
        1e-8);
}

TEST_CASE("closed-form Jacobi coefficients") {
  const JacobiClosed start = jacobi_closed(0.4, 0.6, -4.0, 0.0);
  CHECK(start.tangential == doctest::Approx(1.0));
  CHECK(start.hopf == doctest::Approx(0.0));
  const JacobiClosed perp = jacobi_closed(0.4, 0.0, -4.0, 0.9);
  CHECK(perp.tangential == doctest::Approx(f_function(0.4, -4.0, 0.9)));
  CHECK(perp.hopf == 0.0);
}

TEST_CASE("Jacobi ODE oracle") {
  const SolvableModel m(ModelParams::make(3, -4.0));
  const Mat& j = m.j_matrix();
  const double c = -4.0, t = 1.1;
  const Vec u = m.B();

  SUBCASE("zero data stays zero") {
    const JacobiState s = jacobi_ode_oracle(c, j, u, Vec::Zero(6), Vec::Zero(6), t);
    CHECK(s.zeta.norm() == 0.0);
    CHECK(s.dzeta.norm() == 0.0);
  }
  SUBCASE("J gamma' grows at rate sqrt(-c)") {
    const Vec ju = j * u;
    const JacobiState s = jacobi_ode_oracle(c, j, u, ju, Vec::Zero(6), t);
    CHECK((s.zeta - std::cosh(2.0 * t) * ju).norm() < 1e-10);
  }
  SUBCASE("eigen data matches the closed form at fourth order") {
    const double lambda = 0.3, b = 0.6;
    // v = b J u + sqrt(1-b^2) w, so <v, J gamma'> = b.
    const Vec v = b * (j * u) + std::sqrt(1.0 - b * b) * m.e(1);
    const JacobiClosed cl = jacobi_closed(lambda, b, c, t);
    const Vec exact = cl.tangential * v + cl.hopf * (j * u);
    const Vec dz0 = -lambda * v;
    const double e1 = (jacobi_ode_oracle(c, j, u, v, dz0, t, 0.05).zeta - exact).norm();
    const double e2 = (jacobi_ode_oracle(c, j, u, v, dz0, t, 0.025).zeta - exact).norm();
    CHECK((jacobi_ode_oracle(c, j, u, v, dz0, t, 1e-3).zeta - exact).norm() < 1e-10);
    CHECK(std::log2(e1 / e2) > 3.5);
  }
  CHECK_THROWS_AS(jacobi_ode_oracle(c, j, u, u, u, t, 0.0), GeometryError);
}

TEST_CASE("D and C matrices") {
  const double c = -4.0;
  const EigenStructure es = eigen_structure_from_lambda3(0.5, c);
  const Mat d0 = D_matrix(0.0, es.b1, es.b2, es.lambda1, es.lambda2, c);
  CHECK((d0 - Mat::Identity(2, 2)).norm() < 1e-15);
  const double r = std::atanh(0.5);
  CHECK(std::abs(D_matrix(r, es.b1, es.b2, es.lambda1, es.lambda2, c).determinant() - 0.649519052838329) < 1e-12);
  CHECK(std::abs(sech_cubed(r, c) - 0.649519052838329) < 1e-12);

  const double b = 1.0 / std::sqrt(2.0);
  const EigenStructure k1 = eigen_structure_from_lambda3(0.0, c);
  const CMatrixResult cm = C_matrix(focal_radius(0.0, c), b, b, k1.lambda1, k1.lambda2, c);
  Mat expected(2, 2);
  expected << -1.0, 0.0, 0.0, 1.0;
  CHECK((cm.closed - expected).norm() < 1e-15);
  CHECK(cm.difference < 1e-10);
  CHECK((cm.numeric * cm.numeric - Mat::Identity(2, 2)).norm() < 1e-10);
  CHECK(std::abs(cm.numeric.trace()) < 1e-10);
}

TEST_CASE("radii") {
  CHECK(focal_radius(0.0, -4.0) == 0.0);
  CHECK(std::abs(focal_radius(0.5, -4.0) - 0.5493061443340549) < 1e-14);
  CHECK(kind_of([] { focal_radius(1.0, -4.0); }) == ErrorKind::OutOfRange);
  CHECK(std::abs(special_radius(-4.0) - 0.6584789484624084) < 1e-12);
  CHECK(std::abs(special_radius(-1.0) - 1.3169578969248168) < 1e-12);
  CHECK(std::abs(focal_radius(lambda3_at_radius(1.3, -1.0), -1.0) - 1.3) < 1e-12);
}

TEST_CASE("focal rank") {
  const int n = 3;
  const double c = -4.0;
  const EigenStructure es = eigen_structure_from_lambda3(0.5, c, std::nullopt, CatalogDims{n, 2});
  const double r = focal_radius(es.lambda3, c);
  CHECK(focal_rank(es, n, c, r) == 4);
  CHECK(focal_rank(es, n, c, r / 2.0) == 5);
  CHECK(focal_rank(es, n, c, 0.0) == 5);
  const FocalData data = focal_data(es, n, c, r);
  CHECK(data.rank == 4);
  CHECK(data.k == 2);
}

TEST_CASE("tube shape operator against the catalog") {
  const ModelParams p = ModelParams::make(3, -4.0);
  const SubmanifoldSpec spec = build_submanifold(p, 2, kHalfPi);
  const double r = 0.7;
  const TubeGerm tube = tube_shape_operator(spec, r);
  const PrincipalDecomposition d = principal_decomposition(tube.germ);
  REQUIRE(d.g == 4);
  CHECK(d.h == 2);
  const EigenStructure es = eigen_structure_from_lambda3(std::tanh(r), -4.0);
  CHECK(std::abs(d.groups[0].value - es.lambda1) < 1e-8);
  CHECK(std::abs(d.groups[1].value - es.lambda3) < 1e-8);
  // Beyond the special radius lambda4 = coth(r) lies below lambda2.
  CHECK(std::abs(d.groups[2].value - 1.0 / std::tanh(r)) < 1e-8);
  CHECK(std::abs(d.groups[3].value - es.lambda2) < 1e-8);
  CHECK(d.groups[0].multiplicity() == 1);
  CHECK(d.groups[1].multiplicity() == 2);
  CHECK(d.groups[2].multiplicity() == 1);
  CHECK(d.groups[3].multiplicity() == 1);

  const TubeGerm special = tube_shape_operator(spec, special_radius(-4.0));
  CHECK(principal_decomposition(special.germ).g == 3);
}

TEST_CASE("equidistant hypersurfaces have three principal curvatures") {
  const ModelParams p = ModelParams::make(2, -4.0);
  const SubmanifoldSpec spec = build_submanifold(p, 1, kHalfPi);
  for (double r : {0.0, 0.3, 1.2}) {
    CAPTURE(r);
    CHECK(principal_decomposition(tube_shape_operator(spec, r).germ).g == 3);
  }
}

TEST_CASE("focal shape check") {
  const ModelParams p = ModelParams::make(3, -4.0);
  const SubmanifoldSpec spec = build_submanifold(p, 2, kHalfPi);
  const FocalShapeReport report = focal_shape_check(spec, 0.7);
  CHECK(report.pass);
  CHECK(report.residual < 1e-6);
}
