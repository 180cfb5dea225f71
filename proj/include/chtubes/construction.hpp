#pragma once

// Constant Kahler angle subspaces of g_alpha and the ruled minimal orbits
// S.o with Lie algebra s = a + w + g_{2alpha}, where w^perp = g_alpha - w.

#include <cstdint>
#include <vector>

#include "chtubes/ambient_model.hpp"
#include "chtubes/linalg.hpp"

namespace chtubes {

struct KahlerAngleSubspace {
  Mat basis;  // orthonormal columns in algebra coordinates, spanning w^perp
  double phi = 0.0;
  int k = 0;
};

struct SubmanifoldSpec {
  ModelParams params;
  KahlerAngleSubspace wperp;
  Mat tangent;  // orthonormal columns spanning s = a + w + g_{2alpha}, B and Z first
  Vec zvec;     // the unit vector Z spanning g_{2alpha}

  int k() const { return wperp.k; }
  double phi() const { return wperp.phi; }
  int dim() const { return static_cast<int>(tangent.cols()); }
};

// Second fundamental form at the base point: components[i](a, b) is
// <II(t_a, t_b), nu_i> with t the tangent basis and nu the normal basis.
struct SecondFundamentalForm {
  Mat tangent_basis;
  Mat normal_basis;
  std::vector<Mat> components;

  Vec operator()(const Vec& x, const Vec& y) const;  // ambient vectors in, ambient normal out
  Vec trace() const;                                 // sum over the tangent basis
  Mat shape_operator(const Vec& normal) const;       // S_nu in the tangent basis
};

// w^perp of dimension k with constant Kahler angle phi. For phi < pi/2 the
// span is {e_i, cos(phi) Je_i + sin(phi) e_{i+1}} over consecutive pairs.
KahlerAngleSubspace constant_kahler_angle_subspace(const ModelParams& params, int k, double phi);

// arccos(|proj_W(Jv)| / |Jv|) for v in W (orthonormal columns).
double kahler_angle(const Mat& j, const Vec& v, const Mat& w, double membership_tol = 1e-9);

// Largest |kahler_angle - phi| over `samples` seeded unit vectors of the span.
double kahler_angle_deviation(const Mat& j, const KahlerAngleSubspace& sub, int samples,
                              std::uint64_t seed);

SubmanifoldSpec build_submanifold(const ModelParams& params, int k, double phi);

// Largest component of a bracket of tangent basis elements outside the span.
double subalgebra_closure_residual(const SolvableModel& model, const SubmanifoldSpec& spec);

SecondFundamentalForm orbit_second_fundamental_form(const SolvableModel& model,
                                                    const SubmanifoldSpec& spec);

// Trivial symmetric bilinear extension of II(Z, P^xi) = sin(phi) sqrt(-c)/2 xi,
// with P^xi the unit vector along the tangent projection of J xi.
SecondFundamentalForm rigidity_extension(const SubmanifoldSpec& spec);

struct RigidityReport {
  bool pass = false;
  double residual = 0.0;
  double entry = 0.0;  // sin(phi) sqrt(-c)/2
};

RigidityReport rigidity_form_check(const SecondFundamentalForm& form, const SubmanifoldSpec& spec,
                                   double tol = 1e-10);

// Orthonormal basis of the maximal complex subspace T ∩ J T of the tangent space.
Mat maximal_holomorphic_subspace(const SubmanifoldSpec& spec);

}  // namespace chtubes
