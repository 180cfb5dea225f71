#pragma once

#include <string>

#include "chtubes/ambient_model.hpp"
#include "chtubes/linalg.hpp"

namespace chtubes {

// Pointwise data of a real hypersurface: all ambient vectors are given in an
// orthonormal frame of the ambient tangent space, `shape` is the shape
// operator S X = -nabla_X xi written in `tangent_basis`.
struct HypersurfaceGerm {
  ModelParams params;
  Vec normal;
  Mat tangent_basis;  // 2n x (2n-1), orthonormal columns
  Mat shape;          // (2n-1) x (2n-1), symmetric
  Mat jmat;           // 2n x 2n, J^2 = -id

  int dim() const { return static_cast<int>(tangent_basis.cols()); }
  Vec hopf_vector() const { return jmat * normal; }
  // Same hypersurface with the opposite unit normal (all principal curvatures negate).
  HypersurfaceGerm flipped() const;
};

struct GermCheck {
  double shape_asymmetry = 0.0;
  double j_square = 0.0;      // |J^2 + id|
  double j_orthogonal = 0.0;  // |J^T J - id|
  double normal_unit = 0.0;
  double basis_orthonormal = 0.0;
  double basis_normal = 0.0;  // |tangent_basis^T normal|
  bool dimensions_ok = false;

  bool ok(double tol) const;
  std::string describe(double tol) const;
};

GermCheck check_germ(const HypersurfaceGerm& germ);

}  // namespace chtubes
