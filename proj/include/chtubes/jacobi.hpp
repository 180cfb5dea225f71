#pragma once

// Jacobi fields along normal geodesics of the ruled orbits W^{2n-k}: closed
// forms f, g, the focal matrices D(t) and C(r), tube shape operators, focal
// rank and the special radius (1/sqrt(-c)) log(2 + sqrt 3).

#include "chtubes/ambient_model.hpp"
#include "chtubes/construction.hpp"
#include "chtubes/germ.hpp"
#include "chtubes/linalg.hpp"

namespace chtubes {

struct EigenStructure;

// With tau = t sqrt(-c)/2 and a = sqrt(-c)/2:
//   f(t) = cosh(tau) - (lambda/a) sinh(tau)
//   g(t) = (cosh(tau) - 1)(1 + 2 cosh(tau) - (lambda/a) sinh(tau))
// All throw InvalidArgument for c >= 0.
double f_function(double lambda, double c, double t);
double g_function(double lambda, double c, double t);
double f_derivative(double lambda, double c, double t);
double g_derivative(double lambda, double c, double t);

struct JacobiCoefficients {
  double lambda = 0.0;
  double c = -4.0;

  double f(double t) const { return f_function(lambda, c, t); }
  double g(double t) const { return g_function(lambda, c, t); }
  double df(double t) const { return f_derivative(lambda, c, t); }
  double dg(double t) const { return g_derivative(lambda, c, t); }
};

struct JacobiClosed {
  double tangential = 0.0;  // coefficient of the parallel translate of v
  double hopf = 0.0;        // coefficient of J(gamma')
};

// zeta_v(t) = f(t) B_v(t) + <v, J xi> g(t) J gamma'(t) for an eigenvector v of S.
JacobiClosed jacobi_closed(double lambda, double hopf_component, double c, double t);

struct JacobiState {
  Vec zeta;
  Vec dzeta;
};

// Integrates zeta'' + R(zeta, u) u = 0 in a parallel frame along the geodesic
// with unit velocity u (J and u are constant in such a frame).
JacobiState jacobi_ode_oracle(double c, const Mat& j, const Vec& velocity, const Vec& zeta0,
                              const Vec& dzeta0, double t, double step = 1e-4);

// Matrix of z -> R(z, u) u from the closed-form curvature tensor.
Mat jacobi_operator_closed(double c, const Mat& j, const Vec& u);

Mat D_matrix(double t, double b1, double b2, double lambda1, double lambda2, double c);
Mat D_prime(double t, double b1, double b2, double lambda1, double lambda2, double c);
double sech_cubed(double t, double c);

struct CMatrixResult {
  Mat numeric;  // -D'(r) D(r)^{-1}
  Mat closed;   // (sqrt(-c)/2) [[-2 b1 b2, b1^2 - b2^2], [b1^2 - b2^2, 2 b1 b2]]
  double difference = 0.0;
};

// Throws Singular when D(r) is not invertible.
CMatrixResult C_matrix(double r, double b1, double b2, double lambda1, double lambda2, double c);

// r = (2/sqrt(-c)) artanh(2 lambda3/sqrt(-c)); OutOfRange unless 0 <= lambda3 < sqrt(-c)/2.
double focal_radius(double lambda3, double c);
// Inverse of focal_radius: (sqrt(-c)/2) tanh(r sqrt(-c)/2).
double lambda3_at_radius(double r, double c);
// (1/sqrt(-c)) log(2 + sqrt 3).
double special_radius(double c);

struct FocalData {
  double r = 0.0;
  Mat D;
  Mat C;
  int rank = 0;
  int k = 0;
};

// Rank of the focal map at distance r built from the f-values and det D(r);
// `es` must carry its multiplicities.
int focal_rank(const EigenStructure& es, int n, double c, double r, double tol = 1e-9);
FocalData focal_data(const EigenStructure& es, int n, double c, double r);

struct TubeGerm {
  HypersurfaceGerm germ;  // normal points back towards W
  Point point;            // foot point on the tube
  Vec eta;                // initial unit normal of W at the identity
};

// Shape operator of the tube of radius r around W at gamma_eta(r), with eta
// the first basis vector of w^perp, from Jacobi fields integrated by RK4.
TubeGerm tube_shape_operator(const SubmanifoldSpec& spec, double r, double step = 1e-4);

struct FocalShapeReport {
  double residual = 0.0;  // |S_eta - expected| on T_o W
  double radius = 0.0;
  bool pass = false;
};

// Propagates the tube germ at distance r back to W and compares the shape
// operator of W in the direction of arrival with -(sqrt(-c)/2)(J eta (x) JA + JA (x) J eta),
// where JA is the parallel translate of JA from the tube.
FocalShapeReport focal_shape_check(const SubmanifoldSpec& spec, double r, double step = 1e-4,
                                   double tol = 1e-6);

}  // namespace chtubes
