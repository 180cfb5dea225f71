#include "chtubes/ambient_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chtubes/errors.hpp"
#include "chtubes/ode.hpp"

namespace chtubes {

ModelParams ModelParams::make(int n, double c) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "complex dimension n must be >= 2");
  if (c == 0.0 || !std::isfinite(c)) fail(ErrorKind::InvalidArgument, "curvature c must be nonzero");
  return ModelParams{n, c};
}

Mat complex_structure(int n) {
  const int dim = 2 * n;
  Mat j = Mat::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    j(2 * i + 1, 2 * i) = 1.0;
    j(2 * i, 2 * i + 1) = -1.0;
  }
  return j;
}

Vec curvature_closed_form(double c, const Mat& j, const Vec& x, const Vec& y, const Vec& z) {
  const Vec jx = j * x;
  const Vec jy = j * y;
  const Vec jz = j * z;
  return (c / 4.0) * (y.dot(z) * x - x.dot(z) * y + jy.dot(z) * jx - jx.dot(z) * jy -
                      2.0 * jx.dot(y) * jz);
}

TangentVector curvature_closed_form(const ModelParams& params, const TangentVector& x,
                                    const TangentVector& y, const TangentVector& z) {
  const auto same = [](const Point& p, const Point& q) {
    return p.coords.size() == q.coords.size() && (p.coords - q.coords).cwiseAbs().maxCoeff() == 0.0;
  };
  if (!same(x.base, y.base) || !same(x.base, z.base)) {
    fail(ErrorKind::MismatchedBase, "curvature arguments must share a base point");
  }
  const Mat j = complex_structure(params.n);
  return TangentVector{x.base, curvature_closed_form(params.c, j, x.vec, y.vec, z.vec)};
}

SolvableModel::SolvableModel(ModelParams params) : params_(params) {
  params_ = ModelParams::make(params.n, params.c);
  if (params_.c >= 0.0) {
    fail(ErrorKind::InvalidArgument, "the solvable model requires c < 0");
  }
  a_ = std::sqrt(-params_.c) / 2.0;
  const int dim = params_.dim();
  j_ = complex_structure(params_.n);

  // Structure constants: bracket_[i](k, j) = <[e_i, e_j], e_k>.
  bracket_.assign(dim, Mat::Zero(dim, dim));
  for (int u = 2; u < dim; ++u) {
    bracket_[0](u, u) = a_;
    bracket_[u](u, 0) = -a_;
  }
  bracket_[0](1, 1) = 2.0 * a_;
  bracket_[1](1, 0) = -2.0 * a_;
  for (int u = 2; u < dim; ++u) {
    for (int v = 2; v < dim; ++v) {
      bracket_[u](1, v) = 2.0 * a_ * j_(v, u);  // <J e_u, e_v>
    }
  }

  // Koszul: <nabla_X Y, W> = 1/2 (<[X,Y],W> - <[Y,W],X> + <[W,X],Y>).
  koszul_.assign(dim, Mat::Zero(dim, dim));
  const auto structure = [&](int i, int j, int k) { return bracket_[i](k, j); };
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        koszul_[i](k, j) = 0.5 * (structure(i, j, k) - structure(j, k, i) + structure(k, i, j));
      }
    }
  }
}

Vec SolvableModel::basis(int i) const {
  if (i < 0 || i >= dim()) fail(ErrorKind::OutOfRange, "basis index out of range");
  return Vec::Unit(dim(), i);
}

Vec SolvableModel::bracket(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (x(i) != 0.0) out += x(i) * (bracket_[i] * y);
  }
  return out;
}

Mat SolvableModel::koszul_matrix(const Vec& x) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    if (x(i) != 0.0) out += x(i) * koszul_[i];
  }
  return out;
}

Vec SolvableModel::koszul(const Vec& x, const Vec& y) const { return koszul_matrix(x) * y; }

Vec SolvableModel::curvature_from_koszul(const Vec& x, const Vec& y, const Vec& z) const {
  return koszul(x, koszul(y, z)) - koszul(y, koszul(x, z)) - koszul(bracket(x, y), z);
}

Mat SolvableModel::jacobi_operator(const Vec& w) const {
  const Mat nw = koszul_matrix(w);
  Mat out(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    const Vec ei = Vec::Unit(dim(), i);
    out.col(i) = koszul(ei, nw * w) - nw * koszul(ei, w) - koszul(bracket(ei, w), w);
  }
  return out;
}

double SolvableModel::sectional_curvature(const Vec& x, const Vec& y) const {
  const double area = x.squaredNorm() * y.squaredNorm() - std::pow(x.dot(y), 2);
  if (area <= 0.0) fail(ErrorKind::InvalidArgument, "sectional curvature needs independent vectors");
  return curvature_from_koszul(x, y, y).dot(x) / area;
}

Point SolvableModel::identity() const { return Point{Vec::Zero(dim())}; }

Point SolvableModel::multiply(const Point& p, const Point& q) const {
  const int m = dim() - 2;
  const double s1 = p.coords(0);
  const Vec v1 = p.coords.tail(m);
  const Vec v2 = q.coords.tail(m);
  const Mat j_alpha = j_.bottomRightCorner(m, m);
  Point out{Vec(dim())};
  out.coords(0) = s1 + q.coords(0);
  out.coords(1) = p.coords(1) + std::exp(2.0 * a_ * s1) * q.coords(1) +
                  a_ * std::exp(a_ * s1) * (j_alpha * v1).dot(v2);
  out.coords.tail(m) = v1 + std::exp(a_ * s1) * v2;
  return out;
}

Point SolvableModel::inverse(const Point& p) const {
  const int m = dim() - 2;
  const double s = p.coords(0);
  Point out{Vec(dim())};
  out.coords(0) = -s;
  out.coords(1) = -std::exp(-2.0 * a_ * s) * p.coords(1);
  out.coords.tail(m) = -std::exp(-a_ * s) * p.coords.tail(m);
  return out;
}

Mat SolvableModel::frame_matrix(const Point& p) const {
  const int m = dim() - 2;
  const double s = p.coords(0);
  const Vec jv = j_.bottomRightCorner(m, m) * p.coords.tail(m);
  Mat e = Mat::Zero(dim(), dim());
  e(0, 0) = 1.0;
  e(1, 1) = std::exp(2.0 * a_ * s);
  for (int u = 0; u < m; ++u) {
    e(1, 2 + u) = a_ * std::exp(a_ * s) * jv(u);
    e(2 + u, 2 + u) = std::exp(a_ * s);
  }
  return e;
}

Mat SolvableModel::left_multiplication_jacobian(const Point& p) const {
  const int m = dim() - 2;
  const double s = p.coords(0);
  const Vec jv = j_.bottomRightCorner(m, m) * p.coords.tail(m);
  Mat d = Mat::Zero(dim(), dim());
  d(0, 0) = 1.0;
  d(1, 1) = std::exp(2.0 * a_ * s);
  d.block(1, 2, 1, m) = a_ * std::exp(a_ * s) * jv.transpose();
  d.bottomRightCorner(m, m) = std::exp(a_ * s) * Mat::Identity(m, m);
  return d;
}

Mat SolvableModel::metric_at(const Point& p) const {
  const Mat inv = frame_matrix(p).inverse();
  return inv.transpose() * inv;
}

TangentVector SolvableModel::geodesic(const TangentVector& initial, double t, double step) const {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "geodesic step must be positive");
  if (initial.vec.norm() == 0.0) fail(ErrorKind::InvalidArgument, "geodesic needs a nonzero velocity");
  const int d = dim();
  Vec state(2 * d);
  state << initial.base.coords, initial.vec;
  const auto rhs = [&](const Vec& x) {
    Vec dx(2 * d);
    const Point p{x.head(d)};
    const Vec w = x.tail(d);
    dx.head(d) = frame_matrix(p) * w;
    dx.tail(d) = -koszul(w, w);
    return dx;
  };
  const Vec out = integrate_rk4(state, t, step, rhs);
  return TangentVector{Point{out.head(d)}, out.tail(d)};
}

Mat SolvableModel::parallel_transport(const TangentVector& initial, const Mat& vs, double t,
                                      double step) const {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "transport step must be positive");
  const int d = dim();
  const auto cols = vs.cols();
  // Only the velocity matters: the connection is left-invariant.
  Vec state(d + d * cols);
  state.head(d) = initial.vec;
  for (Eigen::Index k = 0; k < cols; ++k) state.segment(d + d * k, d) = vs.col(k);
  const auto rhs = [&](const Vec& x) {
    Vec dx(x.size());
    const Vec w = x.head(d);
    const Mat nw = koszul_matrix(w);
    dx.head(d) = -nw * w;
    for (Eigen::Index k = 0; k < cols; ++k) dx.segment(d + d * k, d) = -nw * x.segment(d + d * k, d);
    return dx;
  };
  const Vec out = integrate_rk4(state, t, step, rhs);
  Mat result(d, cols);
  for (Eigen::Index k = 0; k < cols; ++k) result.col(k) = out.segment(d + d * k, d);
  return result;
}

Vec SolvableModel::parallel_transport(const TangentVector& initial, const Vec& v, double t,
                                      double step) const {
  return parallel_transport(initial, Mat(v), t, step).col(0);
}

Point SolvableModel::geodesic_from_identity_in_root_space(const Vec& unit, double t) const {
  if (std::abs(unit(0)) > 1e-12 || std::abs(unit(1)) > 1e-12 || std::abs(unit.norm() - 1.0) > 1e-12) {
    fail(ErrorKind::InvalidArgument, "direction must be a unit vector of g_alpha");
  }
  Point out{Vec::Zero(dim())};
  out.coords(0) = -std::log(std::cosh(a_ * t)) / a_;
  out.coords.tail(dim() - 2) = (std::tanh(a_ * t) / a_) * unit.tail(dim() - 2);
  return out;
}

CurvatureReport verify_curvature(const SolvableModel& model, int samples, std::uint64_t seed,
                                 double tol) {
  CurvatureReport report;
  report.samples = samples;
  const int d = model.dim();
  const double c = model.c();
  const Mat& j = model.j_matrix();
  const Mat draws = gaussian_samples(d, 3 * samples, seed);
  report.min_sectional = 1e300;
  report.max_sectional = -1e300;
  std::ostringstream failure;

  for (int s = 0; s < samples; ++s) {
    const Vec x = draws.col(3 * s);
    const Vec y = draws.col(3 * s + 1);
    const Vec z = draws.col(3 * s + 2);
    const double residual =
        (model.curvature_from_koszul(x, y, z) - model.curvature_closed_form(x, y, z)).cwiseAbs().maxCoeff();
    if (residual > report.max_residual) {
      report.max_residual = residual;
      if (residual >= tol && failure.tellp() == 0) {
        failure << "curvature mismatch " << residual << " at x=" << x.transpose() << " y=" << y.transpose()
                << " z=" << z.transpose();
      }
    }

    const double k = model.sectional_curvature(x, y);
    report.min_sectional = std::min(report.min_sectional, k);
    report.max_sectional = std::max(report.max_sectional, k);

    report.holomorphic_residual =
        std::max(report.holomorphic_residual, std::abs(model.sectional_curvature(x, j * x) - c));

    if (d >= 4) {
      // Totally real plane: y orthogonal to x and Jx.
      const Vec xn = x.normalized();
      Vec yr = y - xn.dot(y) * xn - (j * xn).dot(y) * (j * xn);
      report.totally_real_residual =
          std::max(report.totally_real_residual, std::abs(model.sectional_curvature(xn, yr) - c / 4.0));
    }
  }

  const double pinch = 1e-9;
  if (failure.tellp() == 0 && (report.min_sectional < c - pinch || report.max_sectional > c / 4.0 + pinch)) {
    failure << "sectional curvature outside [c, c/4]: [" << report.min_sectional << ", "
            << report.max_sectional << "]";
  }
  if (failure.tellp() == 0 && report.holomorphic_residual >= tol) {
    failure << "holomorphic sectional curvature differs from c by " << report.holomorphic_residual;
  }
  if (failure.tellp() == 0 && report.totally_real_residual >= tol) {
    failure << "totally real sectional curvature differs from c/4 by " << report.totally_real_residual;
  }
  report.failure = failure.str();
  report.passed = report.failure.empty();
  return report;
}

}  // namespace chtubes
