#include "chtubes/jacobi.hpp"

#include <cmath>

#include "chtubes/errors.hpp"
#include "chtubes/ode.hpp"
#include "chtubes/spectral.hpp"

namespace chtubes {

namespace {

double root_scale(double c) {
  if (!(c < 0.0)) fail(ErrorKind::InvalidArgument, "Jacobi closed forms require c < 0");
  return std::sqrt(-c) / 2.0;
}

}  // namespace

double f_function(double lambda, double c, double t) {
  const double a = root_scale(c);
  const double tau = a * t;
  return std::cosh(tau) - (lambda / a) * std::sinh(tau);
}

double g_function(double lambda, double c, double t) {
  const double a = root_scale(c);
  const double tau = a * t;
  const double ch = std::cosh(tau);
  return (ch - 1.0) * (1.0 + 2.0 * ch - (lambda / a) * std::sinh(tau));
}

double f_derivative(double lambda, double c, double t) {
  const double a = root_scale(c);
  const double tau = a * t;
  return a * std::sinh(tau) - lambda * std::cosh(tau);
}

double g_derivative(double lambda, double c, double t) {
  const double a = root_scale(c);
  const double tau = a * t;
  const double ch = std::cosh(tau);
  const double sh = std::sinh(tau);
  return a * sh * (1.0 + 2.0 * ch - (lambda / a) * sh) + (ch - 1.0) * (2.0 * a * sh - lambda * ch);
}

JacobiClosed jacobi_closed(double lambda, double hopf_component, double c, double t) {
  return JacobiClosed{f_function(lambda, c, t), hopf_component * g_function(lambda, c, t)};
}

Mat jacobi_operator_closed(double c, const Mat& j, const Vec& u) {
  // R(z, u) u = (c/4)(|u|^2 z - <z,u> u + 3 <z,Ju> Ju)
  const Vec ju = j * u;
  const auto d = u.size();
  return (c / 4.0) * (u.squaredNorm() * Mat::Identity(d, d) - u * u.transpose() + 3.0 * ju * ju.transpose());
}

JacobiState jacobi_ode_oracle(double c, const Mat& j, const Vec& velocity, const Vec& zeta0,
                              const Vec& dzeta0, double t, double step) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "integration step must be positive");
  const auto d = zeta0.size();
  if (velocity.size() != d || dzeta0.size() != d || j.rows() != d) {
    fail(ErrorKind::InvalidArgument, "Jacobi data dimensions differ");
  }
  const Mat rop = jacobi_operator_closed(c, j, velocity);
  Vec state(2 * d);
  state << zeta0, dzeta0;
  const auto rhs = [&](const Vec& x) {
    Vec dx(2 * d);
    dx.head(d) = x.tail(d);
    dx.tail(d) = -rop * x.head(d);
    return dx;
  };
  const Vec out = integrate_rk4(state, t, step, rhs);
  return JacobiState{out.head(d), out.tail(d)};
}

Mat D_matrix(double t, double b1, double b2, double lambda1, double lambda2, double c) {
  Mat d(2, 2);
  const double g1 = g_function(lambda1, c, t);
  const double g2 = g_function(lambda2, c, t);
  d << f_function(lambda1, c, t) + b1 * b1 * g1, b1 * b2 * g2,
      b1 * b2 * g1, f_function(lambda2, c, t) + b2 * b2 * g2;
  return d;
}

Mat D_prime(double t, double b1, double b2, double lambda1, double lambda2, double c) {
  Mat d(2, 2);
  const double g1 = g_derivative(lambda1, c, t);
  const double g2 = g_derivative(lambda2, c, t);
  d << f_derivative(lambda1, c, t) + b1 * b1 * g1, b1 * b2 * g2,
      b1 * b2 * g1, f_derivative(lambda2, c, t) + b2 * b2 * g2;
  return d;
}

double sech_cubed(double t, double c) {
  const double s = 1.0 / std::cosh(root_scale(c) * t);
  return s * s * s;
}

CMatrixResult C_matrix(double r, double b1, double b2, double lambda1, double lambda2, double c) {
  const double a = root_scale(c);
  const Mat d = D_matrix(r, b1, b2, lambda1, lambda2, c);
  if (std::abs(d.determinant()) < 1e-14 * (1.0 + d.cwiseAbs().maxCoeff())) {
    fail(ErrorKind::Singular, "D(r) is singular");
  }
  CMatrixResult out;
  out.numeric = -D_prime(r, b1, b2, lambda1, lambda2, c) * d.inverse();
  out.closed = Mat(2, 2);
  out.closed << -2.0 * b1 * b2, b1 * b1 - b2 * b2, b1 * b1 - b2 * b2, 2.0 * b1 * b2;
  out.closed *= a;
  out.difference = max_abs(out.numeric - out.closed);
  return out;
}

double focal_radius(double lambda3, double c) {
  const double a = root_scale(c);
  if (!(lambda3 >= 0.0) || !(lambda3 < a)) {
    fail(ErrorKind::OutOfRange, "focal radius needs 0 <= lambda3 < sqrt(-c)/2");
  }
  return std::atanh(lambda3 / a) / a;
}

double lambda3_at_radius(double r, double c) {
  const double a = root_scale(c);
  return a * std::tanh(a * r);
}

double special_radius(double c) {
  if (!(c < 0.0)) fail(ErrorKind::InvalidArgument, "special radius requires c < 0");
  return std::log(2.0 + std::sqrt(3.0)) / std::sqrt(-c);
}

int focal_rank(const EigenStructure& es, int n, double c, double r, double tol) {
  if (es.multiplicities.empty()) fail(ErrorKind::InvalidArgument, "focal rank needs multiplicities");
  if (r == 0.0) return 2 * n - 1;
  int rank = 0;
  if (std::abs(D_matrix(r, es.b1, es.b2, es.lambda1, es.lambda2, c).determinant()) > tol) rank += 2;
  const auto block = [&](double lambda, int mult) {
    if (mult > 0 && std::abs(f_function(lambda, c, r)) > tol) rank += mult;
  };
  block(es.lambda3, es.multiplicities[2]);
  if (es.branch == Branch::G4 && es.lambda4) block(*es.lambda4, es.multiplicities[3]);
  if (es.branch == Branch::G3_KBIG) block(es.lambda2, es.multiplicities[1] - 1);
  return rank;
}

FocalData focal_data(const EigenStructure& es, int n, double c, double r) {
  FocalData out;
  out.r = r;
  out.k = es.k;
  out.D = D_matrix(r, es.b1, es.b2, es.lambda1, es.lambda2, c);
  out.C = C_matrix(r, es.b1, es.b2, es.lambda1, es.lambda2, c).numeric;
  out.rank = focal_rank(es, n, c, r);
  return out;
}

TubeGerm tube_shape_operator(const SubmanifoldSpec& spec, double r, double step) {
  if (!(r >= 0.0)) fail(ErrorKind::InvalidArgument, "tube radius must be nonnegative");
  const SolvableModel model(spec.params);
  const int d = model.dim();
  const int m = d - 1;
  const int dim_w = spec.dim();
  const Vec eta = spec.wperp.basis.col(0);
  const Mat s_eta = orbit_second_fundamental_form(model, spec).shape_operator(eta);

  TubeGerm out;
  out.eta = eta;
  if (r == 0.0) {
    if (spec.k() != 1) fail(ErrorKind::Singular, "a tube of radius 0 is a hypersurface only for k = 1");
    out.point = model.identity();
    out.germ = HypersurfaceGerm{spec.params, -eta, spec.tangent, -s_eta, model.j_matrix()};
    return out;
  }

  // Initial Jacobi data: tangent fields zeta = v, zeta' = -S_eta v; normal fields
  // zeta = 0, zeta' = w for w in w^perp orthogonal to eta.
  Mat z0 = Mat::Zero(d, m);
  Mat y0 = Mat::Zero(d, m);
  for (int i = 0; i < dim_w; ++i) {
    z0.col(i) = spec.tangent.col(i);
    y0.col(i) = -spec.tangent * s_eta.col(i);
  }
  for (int i = 1; i < spec.k(); ++i) y0.col(dim_w + i - 1) = spec.wperp.basis.col(i);

  // State: point, velocity, then the fields and their covariant derivatives,
  // all in the left-invariant frame.
  Vec state(2 * d + 2 * d * m);
  state.head(d) = model.identity().coords;
  state.segment(d, d) = eta;
  state.segment(2 * d, d * m) = Eigen::Map<const Vec>(z0.data(), d * m);
  state.segment(2 * d + d * m, d * m) = Eigen::Map<const Vec>(y0.data(), d * m);
  const Mat& j = model.j_matrix();
  const double c = model.c();
  const auto rhs = [&](const Vec& x) {
    Vec dx(x.size());
    const Vec w = x.segment(d, d);
    const Mat nw = model.koszul_matrix(w);
    const Mat rop = jacobi_operator_closed(c, j, w);
    const Eigen::Map<const Mat> z(x.data() + 2 * d, d, m);
    const Eigen::Map<const Mat> y(x.data() + 2 * d + d * m, d, m);
    dx.head(d) = model.frame_matrix(Point{x.head(d)}) * w;
    dx.segment(d, d) = -nw * w;
    Eigen::Map<Mat>(dx.data() + 2 * d, d, m) = y - nw * z;
    Eigen::Map<Mat>(dx.data() + 2 * d + d * m, d, m) = -rop * z - nw * y;
    return dx;
  };
  const Vec end = integrate_rk4(state, r, step, rhs);

  const Vec w = end.segment(d, d).normalized();
  const Mat zr = Eigen::Map<const Mat>(end.data() + 2 * d, d, m);
  const Mat yr = Eigen::Map<const Mat>(end.data() + 2 * d + d * m, d, m);
  const Mat t = orthogonal_complement(w, d);
  const Mat zt = t.transpose() * zr;
  Eigen::FullPivLU<Mat> lu(zt);
  lu.setThreshold(1e-10);
  if (lu.rank() < m) fail(ErrorKind::Singular, "Jacobi fields are degenerate: focal point reached");

  // With xi = -gamma' pointing back to W, S zeta = nabla_zeta gamma' = zeta'.
  const Mat shape = (t.transpose() * yr) * lu.inverse();
  out.point = Point{end.head(d)};
  out.germ = HypersurfaceGerm{spec.params, -w, t, shape, j};
  return out;
}

FocalShapeReport focal_shape_check(const SubmanifoldSpec& spec, double r, double step, double tol) {
  const SolvableModel model(spec.params);
  const TubeGerm tube = tube_shape_operator(spec, r, step);
  const HypersurfaceGerm& germ = tube.germ;
  const PrincipalDecomposition decomp = principal_decomposition(germ);
  const HopfFrame frame = hopf_frame_extract(germ, decomp);

  // Follow the normal geodesic from the tube back to W.
  const TangentVector start{tube.point, germ.normal};
  const TangentVector arrival = model.geodesic(start, r, step);
  const Vec ja = model.parallel_transport(start, Vec(germ.jmat * frame.a), r, step);
  const Vec eta_r = arrival.vec.normalized();

  const double a = model.root_scale();
  const Vec u = model.j_matrix() * eta_r;
  const Mat expected = -a * (u * ja.transpose() + ja * u.transpose());
  const Mat s_w = orbit_second_fundamental_form(model, spec).shape_operator(eta_r);

  FocalShapeReport report;
  report.radius = r;
  report.residual = max_abs(s_w - spec.tangent.transpose() * expected * spec.tangent);
  report.residual = std::max(report.residual, arrival.base.coords.cwiseAbs().maxCoeff());
  report.pass = report.residual < tol;
  return report;
}

}  // namespace chtubes
