#pragma once

// Complex hyperbolic space CH^n(c) realized as the solvable group AN with a
// left-invariant metric. The Lie algebra basis is ordered
//   (B, Z, e_1, Je_1, ..., e_{n-1}, Je_{n-1})
// and is orthonormal. With a = sqrt(-c)/2 the structure constants are
//   [B, U] = a U,  [B, Z] = 2a Z,  [U, V] = 2a <JU, V> Z   (U, V in g_alpha).
// Points use global coordinates (s, x, v) meaning exp(v + xZ) * exp(sB).

#include <cstdint>
#include <string>
#include <vector>

#include "chtubes/linalg.hpp"

namespace chtubes {

struct ModelParams {
  int n = 2;
  double c = -4.0;

  // Throws InvalidArgument unless n >= 2 and c != 0.
  static ModelParams make(int n, double c);

  int dim() const { return 2 * n; }
};

using AlgebraElement = Vec;

struct Point {
  Vec coords;
};

// A tangent vector at `base`, with components in the left-translated
// orthonormal frame.
struct TangentVector {
  Point base;
  Vec vec;
};

// Matrix of J on the ordered basis; JB = Z, JZ = -B, Je_i = Je_i, J(Je_i) = -e_i.
Mat complex_structure(int n);

// R(X,Y)Z = (c/4)(<Y,Z>X - <X,Z>Y + <JY,Z>JX - <JX,Z>JY - 2<JX,Y>JZ) on
// orthonormal components. Valid for any c != 0.
Vec curvature_closed_form(double c, const Mat& j, const Vec& x, const Vec& y, const Vec& z);

// Same, for tangent vectors; throws MismatchedBase when the base points differ.
TangentVector curvature_closed_form(const ModelParams& params, const TangentVector& x,
                                    const TangentVector& y, const TangentVector& z);

class SolvableModel {
 public:
  // Requires c < 0.
  explicit SolvableModel(ModelParams params);

  const ModelParams& params() const { return params_; }
  int dim() const { return params_.dim(); }
  double c() const { return params_.c; }
  // sqrt(-c)/2: the A-eigenvalue on g_alpha.
  double root_scale() const { return a_; }

  Vec basis(int i) const;
  Vec B() const { return basis(0); }
  Vec Z() const { return basis(1); }
  // e_i and Je_i for i in [0, n-2].
  Vec e(int i) const { return basis(2 + 2 * i); }
  Vec Je(int i) const { return basis(3 + 2 * i); }

  const Mat& j_matrix() const { return j_; }
  Vec j_action(const Vec& x) const { return j_ * x; }
  double inner(const Vec& x, const Vec& y) const { return x.dot(y); }

  Vec bracket(const Vec& x, const Vec& y) const;
  // Levi-Civita connection on left-invariant fields (Koszul formula).
  Vec koszul(const Vec& x, const Vec& y) const;
  // Matrix of y -> koszul(x, y).
  Mat koszul_matrix(const Vec& x) const;
  // R(x,y)z = [nabla_x, nabla_y]z - nabla_[x,y] z from the connection.
  Vec curvature_from_koszul(const Vec& x, const Vec& y, const Vec& z) const;
  // Matrix of z -> R(z, w)w, built from curvature_from_koszul.
  Mat jacobi_operator(const Vec& w) const;
  Vec curvature_closed_form(const Vec& x, const Vec& y, const Vec& z) const {
    return chtubes::curvature_closed_form(params_.c, j_, x, y, z);
  }
  double sectional_curvature(const Vec& x, const Vec& y) const;

  Point identity() const;
  Point multiply(const Point& p, const Point& q) const;
  Point inverse(const Point& p) const;
  // Columns: coordinate velocities of the left-translated basis at p.
  Mat frame_matrix(const Point& p) const;
  // Coordinate Jacobian of q -> p*q (independent of q).
  Mat left_multiplication_jacobian(const Point& p) const;
  // Coordinate metric at p.
  Mat metric_at(const Point& p) const;
  TangentVector left_translate_differential(const Point& p, const Vec& v) const {
    return TangentVector{p, v};
  }
  Vec coordinate_velocity(const TangentVector& v) const { return frame_matrix(v.base) * v.vec; }

  // Fixed-step RK4 geodesic; the returned velocity is in the frame at the end point.
  TangentVector geodesic(const TangentVector& initial, double t, double step = 1e-4) const;
  // Parallel transport of `v` (frame components at initial.base) along the
  // geodesic with initial velocity `initial`.
  Vec parallel_transport(const TangentVector& initial, const Vec& v, double t,
                         double step = 1e-4) const;
  // Transports every column of `vs` in one integration.
  Mat parallel_transport(const TangentVector& initial, const Mat& vs, double t,
                         double step = 1e-4) const;

  // Closed-form geodesic from the identity along a unit vector of g_alpha:
  // it stays in the totally geodesic RH^2 spanned by B and that vector.
  Point geodesic_from_identity_in_root_space(const Vec& unit, double t) const;

 private:
  ModelParams params_;
  double a_;
  Mat j_;
  std::vector<Mat> bracket_;  // bracket_[i] * y = [e_i, y]
  std::vector<Mat> koszul_;   // koszul_[i] * y = nabla_{e_i} y
};

struct CurvatureReport {
  double max_residual = 0.0;
  double min_sectional = 0.0;
  double max_sectional = 0.0;
  double holomorphic_residual = 0.0;
  double totally_real_residual = 0.0;
  int samples = 0;
  bool passed = false;
  std::string failure;
};

// Compares curvature_from_koszul with the closed form on seeded random
// triples and checks the pinching c <= K <= c/4.
CurvatureReport verify_curvature(const SolvableModel& model, int samples = 200,
                                 std::uint64_t seed = 20240601, double tol = 1e-10);

}  // namespace chtubes
