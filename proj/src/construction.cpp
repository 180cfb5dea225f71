#include "chtubes/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chtubes/errors.hpp"

namespace chtubes {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

bool is_right_angle(double phi) { return std::abs(phi - kHalfPi) <= 1e-9; }

}  // namespace

Vec SecondFundamentalForm::operator()(const Vec& x, const Vec& y) const {
  const Vec xt = tangent_basis.transpose() * x;
  const Vec yt = tangent_basis.transpose() * y;
  Vec out = Vec::Zero(normal_basis.rows());
  for (std::size_t i = 0; i < components.size(); ++i) {
    out += xt.dot(components[i] * yt) * normal_basis.col(static_cast<Eigen::Index>(i));
  }
  return out;
}

Vec SecondFundamentalForm::trace() const {
  Vec out = Vec::Zero(normal_basis.rows());
  for (std::size_t i = 0; i < components.size(); ++i) {
    out += components[i].trace() * normal_basis.col(static_cast<Eigen::Index>(i));
  }
  return out;
}

Mat SecondFundamentalForm::shape_operator(const Vec& normal) const {
  const Vec coeff = normal_basis.transpose() * normal;
  Mat out = Mat::Zero(tangent_basis.cols(), tangent_basis.cols());
  for (std::size_t i = 0; i < components.size(); ++i) {
    out += coeff(static_cast<Eigen::Index>(i)) * components[i];
  }
  return out;
}

KahlerAngleSubspace constant_kahler_angle_subspace(const ModelParams& params, int k, double phi) {
  const ModelParams p = ModelParams::make(params.n, params.c);
  if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  if (k > p.n - 1) fail(ErrorKind::DimensionTooLarge, "k must be at most n-1");
  if (!(phi > 0.0) || phi > kHalfPi + 1e-9) {
    fail(ErrorKind::InvalidArgument, "Kahler angle must lie in (0, pi/2]");
  }
  const bool real = is_right_angle(phi);
  if (k % 2 == 1 && !real) {
    fail(ErrorKind::OddDimensionNonReal, "odd-dimensional constant Kahler angle subspaces are real");
  }

  const int dim = p.dim();
  KahlerAngleSubspace out;
  out.k = k;
  out.phi = real ? kHalfPi : phi;
  out.basis = Mat::Zero(dim, k);
  const auto e = [&](int i) { return Vec::Unit(dim, 2 + 2 * i); };
  const auto je = [&](int i) { return Vec::Unit(dim, 3 + 2 * i); };
  if (real) {
    for (int i = 0; i < k; ++i) out.basis.col(i) = e(i);
  } else {
    for (int pair = 0; pair < k / 2; ++pair) {
      out.basis.col(2 * pair) = e(2 * pair);
      out.basis.col(2 * pair + 1) = std::cos(phi) * je(2 * pair) + std::sin(phi) * e(2 * pair + 1);
    }
  }

  const Mat j = complex_structure(p.n);
  if (kahler_angle_deviation(j, out, 64, 7) > 1e-9) {
    fail(ErrorKind::InvalidArgument, "constructed subspace does not have constant Kahler angle");
  }
  return out;
}

double kahler_angle(const Mat& j, const Vec& v, const Mat& w, double membership_tol) {
  const double norm = v.norm();
  if (norm <= membership_tol) fail(ErrorKind::InvalidArgument, "kahler_angle needs a nonzero vector");
  if ((v - project(w, v)).norm() > membership_tol * std::max(1.0, norm)) {
    fail(ErrorKind::InvalidArgument, "vector does not lie in the subspace");
  }
  const Vec jv = j * v;
  const double ratio = std::clamp(project(w, jv).norm() / jv.norm(), 0.0, 1.0);
  return std::acos(ratio);
}

double kahler_angle_deviation(const Mat& j, const KahlerAngleSubspace& sub, int samples,
                              std::uint64_t seed) {
  const Mat coeffs = gaussian_samples(sub.k, samples, seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec v = (sub.basis * coeffs.col(s)).normalized();
    worst = std::max(worst, std::abs(kahler_angle(j, v, sub.basis) - sub.phi));
  }
  return worst;
}

SubmanifoldSpec build_submanifold(const ModelParams& params, int k, double phi) {
  SubmanifoldSpec spec;
  spec.params = ModelParams::make(params.n, params.c);
  spec.wperp = constant_kahler_angle_subspace(spec.params, k, phi);
  const int dim = spec.params.dim();

  // w = g_alpha minus w^perp
  Mat root_space(dim, dim - 2);
  root_space.setZero();
  root_space.bottomRows(dim - 2).setIdentity();
  Mat both(dim, k + dim - 2);
  both << spec.wperp.basis, root_space;
  const Mat w = orthonormalize(both).rightCols(dim - 2 - k);

  spec.tangent = Mat(dim, dim - k);
  spec.tangent.col(0) = Vec::Unit(dim, 0);
  spec.tangent.col(1) = Vec::Unit(dim, 1);
  spec.tangent.rightCols(dim - 2 - k) = w;
  spec.zvec = Vec::Unit(dim, 1);

  SolvableModel model(spec.params);
  if (subalgebra_closure_residual(model, spec) > 1e-9) {
    fail(ErrorKind::InvalidArgument, "tangent space is not closed under the bracket");
  }
  return spec;
}

double subalgebra_closure_residual(const SolvableModel& model, const SubmanifoldSpec& spec) {
  double worst = 0.0;
  for (int a = 0; a < spec.dim(); ++a) {
    for (int b = 0; b < spec.dim(); ++b) {
      const Vec br = model.bracket(spec.tangent.col(a), spec.tangent.col(b));
      worst = std::max(worst, (br - project(spec.tangent, br)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

SecondFundamentalForm orbit_second_fundamental_form(const SolvableModel& model,
                                                    const SubmanifoldSpec& spec) {
  SecondFundamentalForm form;
  form.tangent_basis = spec.tangent;
  form.normal_basis = spec.wperp.basis;
  const int m = spec.dim();
  form.components.assign(spec.k(), Mat::Zero(m, m));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      // Left-invariant fields of S are tangent to the orbit, so II is the
      // normal part of the left-invariant connection.
      const Vec nab = model.koszul(spec.tangent.col(a), spec.tangent.col(b));
      for (int i = 0; i < spec.k(); ++i) form.components[i](a, b) = nab.dot(spec.wperp.basis.col(i));
    }
  }
  return form;
}

SecondFundamentalForm rigidity_extension(const SubmanifoldSpec& spec) {
  const int m = spec.dim();
  const Mat j = complex_structure(spec.params.n);
  const double entry = std::sin(spec.phi()) * std::sqrt(-spec.params.c) / 2.0;
  SecondFundamentalForm form;
  form.tangent_basis = spec.tangent;
  form.normal_basis = spec.wperp.basis;
  form.components.assign(spec.k(), Mat::Zero(m, m));
  const Vec z = spec.tangent.transpose() * spec.zvec;
  for (int i = 0; i < spec.k(); ++i) {
    const Vec jxi = j * spec.wperp.basis.col(i);
    const Vec p = (spec.tangent.transpose() * jxi).normalized();
    form.components[i] = entry * (z * p.transpose() + p * z.transpose());
  }
  return form;
}

RigidityReport rigidity_form_check(const SecondFundamentalForm& form, const SubmanifoldSpec& spec,
                                   double tol) {
  const SecondFundamentalForm expected = rigidity_extension(spec);
  RigidityReport report;
  report.entry = std::sin(spec.phi()) * std::sqrt(-spec.params.c) / 2.0;
  if (form.components.size() != expected.components.size()) {
    report.residual = 1e300;
    return report;
  }
  // Compare as bilinear maps on ambient vectors, independent of the bases used.
  const int m = spec.dim();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Vec x = spec.tangent.col(a);
      const Vec y = spec.tangent.col(b);
      report.residual = std::max(report.residual, (form(x, y) - expected(x, y)).cwiseAbs().maxCoeff());
    }
  }
  report.pass = report.residual < tol;
  return report;
}

Mat maximal_holomorphic_subspace(const SubmanifoldSpec& spec) {
  const Mat j = complex_structure(spec.params.n);
  // v in T with Jv in T: kernel of (I - P_T) J restricted to T.
  const Mat t = spec.tangent;
  const Mat defect = (j * t) - t * (t.transpose() * j * t);
  Eigen::JacobiSVD<Mat> svd(defect, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-9) ++rank;
  }
  const Mat kernel = svd.matrixV().rightCols(t.cols() - rank);
  return orthonormalize(t * kernel);
}

}  // namespace chtubes
