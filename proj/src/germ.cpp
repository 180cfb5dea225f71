#include "chtubes/germ.hpp"

#include <sstream>

namespace chtubes {

HypersurfaceGerm HypersurfaceGerm::flipped() const {
  HypersurfaceGerm out = *this;
  out.normal = -normal;
  out.shape = -shape;
  return out;
}

bool GermCheck::ok(double tol) const {
  return dimensions_ok && shape_asymmetry <= tol && j_square <= tol && j_orthogonal <= tol &&
         normal_unit <= tol && basis_orthonormal <= tol && basis_normal <= tol;
}

std::string GermCheck::describe(double tol) const {
  std::ostringstream out;
  if (!dimensions_ok) return "inconsistent dimensions";
  if (shape_asymmetry > tol) out << "shape not symmetric (" << shape_asymmetry << ") ";
  if (j_square > tol) out << "J^2 != -id (" << j_square << ") ";
  if (j_orthogonal > tol) out << "J not orthogonal (" << j_orthogonal << ") ";
  if (normal_unit > tol) out << "normal not unit (" << normal_unit << ") ";
  if (basis_orthonormal > tol) out << "tangent basis not orthonormal (" << basis_orthonormal << ") ";
  if (basis_normal > tol) out << "tangent basis not orthogonal to normal (" << basis_normal << ") ";
  return out.str();
}

GermCheck check_germ(const HypersurfaceGerm& germ) {
  GermCheck check;
  const int dim = germ.params.dim();
  check.dimensions_ok = germ.normal.size() == dim && germ.tangent_basis.rows() == dim &&
                        germ.tangent_basis.cols() == dim - 1 && germ.shape.rows() == dim - 1 &&
                        germ.shape.cols() == dim - 1 && germ.jmat.rows() == dim && germ.jmat.cols() == dim;
  if (!check.dimensions_ok) return check;
  const Mat id = Mat::Identity(dim, dim);
  check.shape_asymmetry = max_abs(germ.shape - germ.shape.transpose());
  check.j_square = max_abs(germ.jmat * germ.jmat + id);
  check.j_orthogonal = max_abs(germ.jmat.transpose() * germ.jmat - id);
  check.normal_unit = std::abs(germ.normal.norm() - 1.0);
  check.basis_orthonormal =
      max_abs(germ.tangent_basis.transpose() * germ.tangent_basis - Mat::Identity(dim - 1, dim - 1));
  check.basis_normal = max_abs(germ.tangent_basis.transpose() * germ.normal);
  return check;
}

}  // namespace chtubes
