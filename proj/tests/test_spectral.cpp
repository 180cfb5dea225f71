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

HypersurfaceGerm tube_germ(int n, int k, double r, double c = -4.0) {
  const SubmanifoldSpec spec = build_submanifold(ModelParams::make(n, c), k, kHalfPi);
  return tube_shape_operator(spec, r).germ;
}

// n = 2 germ at the identity with normal B, so J xi = Z.
HypersurfaceGerm hand_germ(const Mat& shape) {
  const SolvableModel m(ModelParams::make(2, -4.0));
  HypersurfaceGerm germ;
  germ.params = m.params();
  germ.normal = m.B();
  germ.jmat = m.j_matrix();
  germ.tangent_basis.resize(4, 3);
  germ.tangent_basis << m.Z(), m.e(0), m.Je(0);
  germ.shape = shape;
  return germ;
}

}  // namespace

TEST_CASE("catalog eigen structures") {
  const EigenStructure k1 = eigen_structure_from_lambda3(0.0, -4.0);
  CHECK(k1.lambda1 == doctest::Approx(-1.0));
  CHECK(k1.lambda2 == doctest::Approx(1.0));
  CHECK(k1.b1sq() == doctest::Approx(0.5));
  CHECK(k1.b2sq() == doctest::Approx(0.5));
  CHECK(k1.branch == Branch::G3_K1);

  const EigenStructure big = eigen_structure_from_lambda3(1.0 / std::sqrt(3.0), -4.0);
  CHECK(std::abs(big.lambda1) < 1e-14);
  CHECK(big.lambda2 == doctest::Approx(std::sqrt(3.0)));
  CHECK(big.b1sq() == doctest::Approx(1.0 / 9.0));
  CHECK(big.b2sq() == doctest::Approx(8.0 / 9.0));
  CHECK(big.branch == Branch::G3_KBIG);

  const EigenStructure g4 = eigen_structure_from_lambda3(0.5, -4.0);
  CHECK(g4.lambda1 == doctest::Approx(-0.151388).epsilon(1e-6));
  CHECK(g4.lambda2 == doctest::Approx(1.651388).epsilon(1e-6));
  REQUIRE(g4.lambda4.has_value());
  CHECK(*g4.lambda4 == doctest::Approx(2.0));
  CHECK(g4.branch == Branch::G4);

  CHECK(kind_of([] { eigen_structure_from_lambda3(0.5, 4.0); }) == ErrorKind::NoRealSolution);
}

TEST_CASE("constraint residuals") {
  EigenStructure es = eigen_structure_from_lambda3(0.5, -4.0);
  CHECK(constraint_residuals(es, -4.0).max() < 1e-12);
  CHECK(constraint_residuals(es, -4.0).ordered);
  es.lambda2 += 1e-6;
  const ConstraintResiduals perturbed = constraint_residuals(es, -4.0);
  CHECK(perturbed.quadratic > 1e-7);
  CHECK(perturbed.quadratic < 1e-5);
}

TEST_CASE("principal decomposition") {
  Mat shape = Mat::Zero(3, 3);
  shape.diagonal() << 1.0, 1.0, 2.0;
  const PrincipalDecomposition hopf = principal_decomposition(hand_germ(shape));
  CHECK(hopf.g == 2);
  CHECK(hopf.h == 1);
  CHECK(kind_of([&] { hopf_frame_extract(hand_germ(shape), hopf); }) == ErrorKind::NotApplicable);

  const PrincipalDecomposition tube = principal_decomposition(tube_germ(3, 2, 0.7));
  CHECK(tube.g == 4);
  CHECK(tube.h == 2);
  CHECK(principal_decomposition(tube_germ(3, 2, special_radius(-4.0))).g == 3);
}

TEST_CASE("Hopf frame identities on tube germs") {
  const double r = focal_radius(0.5, -4.0);
  const HypersurfaceGerm germ = tube_germ(3, 2, r);
  const PrincipalDecomposition d = principal_decomposition(germ);
  const HopfFrame frame = hopf_frame_extract(germ, d);
  const EigenStructure es = eigen_structure_from_lambda3(0.5, -4.0);
  CHECK(std::abs(frame.b1 * frame.b1 - es.b1sq()) < 1e-8);
  const LemmaAReport lemma = lemma_A_check(germ, d, frame);
  CHECK(lemma.max() < 1e-9);
  CHECK(lemma.ju1_u2 < 1e-12);
  CHECK(lemma.ordered);

  HopfFrame swapped = frame;
  std::swap(swapped.u1, swapped.u2);
  std::swap(swapped.b1, swapped.b2);
  std::swap(swapped.group1, swapped.group2);
  CHECK(lemma_A_check(germ, d, swapped).max() > 1e-3);

  const TotallyRealReport real = totally_real_check(germ, d, frame);
  CHECK(real.pass);
  // Conjugating J by the swap Je_1 <-> e_2 makes span{e_1, e_2} complex.
  HypersurfaceGerm rotated = germ;
  Mat swap = Mat::Identity(6, 6);
  swap.col(3).swap(swap.col(4));
  rotated.jmat = swap * germ.jmat * swap.transpose();
  CHECK_FALSE(totally_real_check(rotated, principal_decomposition(rotated), frame).pass);
}

TEST_CASE("W^{2n-1} germ has b1 = b2") {
  const HypersurfaceGerm germ = tube_germ(2, 1, 0.0);
  const PrincipalDecomposition d = principal_decomposition(germ);
  const HopfFrame frame = hopf_frame_extract(germ, d);
  CHECK(std::abs(std::abs(frame.b1) - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(std::abs(frame.b2) - 1.0 / std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("classification round trips") {
  const ClassificationResult tube = classify(tube_germ(3, 2, 0.7));
  CHECK(tube.model == Model::Tube);
  CHECK(tube.k == 2);
  CHECK(std::abs(tube.r - 0.7) < 1e-6);
  CHECK(tube.reason.empty());

  const ClassificationResult eq = classify(tube_germ(2, 1, 0.3));
  CHECK(eq.model == Model::Equidistant);
  CHECK(std::abs(eq.r - 0.3) < 1e-6);

  // Reversing the normal is undone by the orientation convention.
  const ClassificationResult flipped = classify(tube_germ(3, 2, 0.7).flipped());
  CHECK(flipped.model == Model::Tube);
  CHECK(flipped.flipped);
  CHECK(std::abs(flipped.r - 0.7) < 1e-6);
}

TEST_CASE("classification rejects non-catalog germs") {
  Mat shape = Mat::Zero(3, 3);
  shape.diagonal() << 1.0, 1.0, 2.0;
  const ClassificationResult hopf = classify(hand_germ(shape));
  CHECK(hopf.model == Model::Unclassified);
  CHECK(hopf.reason == "hopf");

  HypersurfaceGerm random = tube_germ(3, 2, 0.7);
  const Mat a = gaussian_samples(5, 5, 99);
  random.shape = 0.5 * (a + a.transpose());
  CHECK(classify(random).model == Model::Unclassified);
}

TEST_CASE("nonexistence scan") {
  NonexistenceGrid grid;
  grid.lambda2_points = grid.lambda3_points = 200;
  grid.curve_points = 200;
  const NonexistenceReport positive = nonexistence_scan(4.0, grid);
  CHECK(positive.system_feasible == 0);
  CHECK(positive.relaxed_feasible == 0);
  CHECK(positive.curve_feasible == 0);
  CHECK(positive.certificate);
  CHECK(positive.max_discriminant < 0.0);

  const NonexistenceReport negative = nonexistence_scan(-4.0, grid);
  CHECK(negative.curve_feasible > 0);
  CHECK(negative.curve_max_deviation < 1e-9);
  CHECK_FALSE(negative.certificate);
}
