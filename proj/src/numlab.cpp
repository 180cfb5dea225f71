#include "chtubes/numlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chtubes/errors.hpp"

namespace chtubes {

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kTubeHorizon = 3.0;

// Group law in (s, x, v) coordinates:
// (s1, x1, v1)(s2, x2, v2) = (s1 + s2, x1 + e^{2a s1} x2 + a e^{a s1} <J v1, v2>, v1 + e^{a s1} v2).
LVec multiply_coords(long double a, const LMat& j, const LVec& p, const LVec& q) {
  const auto d = p.size();
  const long double e1 = std::exp(a * p(0));
  LVec v1 = p;
  LVec v2 = q;
  v1.head(2).setZero();
  v2.head(2).setZero();
  LVec out(d);
  out(0) = p(0) + q(0);
  out(1) = p(1) + e1 * e1 * q(1) + a * e1 * (j * v1).dot(v2);
  out.tail(d - 2) = v1.tail(d - 2) + e1 * v2.tail(d - 2);
  return out;
}

// Applies q to every index of a rank-`rank` tensor with m entries per index.
std::vector<double> transform_tensor(std::vector<double> t, int rank, const Mat& q, int m) {
  for (int axis = 0; axis < rank; ++axis) {
    std::vector<double> out(t.size(), 0.0);
    long stride = 1;
    for (int k = axis + 1; k < rank; ++k) stride *= m;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      const long idx = (static_cast<long>(flat) / stride) % m;
      const long base = static_cast<long>(flat) - idx * stride;
      for (int b = 0; b < m; ++b) out[static_cast<std::size_t>(base + b * stride)] += q(idx, b) * t[flat];
    }
    t = std::move(out);
  }
  return t;
}

double max_abs_entry(const std::vector<double>& t) {
  double worst = 0.0;
  for (double v : t) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace

ChartImmersion tube_chart(const SubmanifoldSpec& spec, double r, double fd_step) {
  if (!(r > 0.0) && !(r == 0.0 && spec.k() == 1)) {
    fail(ErrorKind::InvalidArgument, "tube chart needs r > 0 (r = 0 only for k = 1)");
  }
  if (r > kTubeHorizon) fail(ErrorKind::OutOfRange, "tube radius beyond the horizon 3");
  if (!(fd_step > 0.0)) fail(ErrorKind::InvalidArgument, "fd_step must be positive");
  const ModelParams params = spec.params;
  if (params.c >= 0.0) fail(ErrorKind::InvalidArgument, "tube chart requires c < 0");
  const int d = params.dim();
  const int dim_w = spec.dim();
  const int k = spec.k();
  const long double a = std::sqrt(-static_cast<long double>(params.c)) / 2.0L;
  const LMat j = complex_structure(params.n).cast<long double>();
  const LMat w_basis = spec.tangent.rightCols(dim_w - 2).cast<long double>();
  const LMat nu_basis = spec.wperp.basis.cast<long double>();
  const long double rr = r;

  ChartImmersion chart;
  chart.params = params;
  chart.domain_dim = dim_w + k - 1;
  chart.center = Vec::Zero(chart.domain_dim);
  chart.fd_step = fd_step;
  chart.map = [=](const LVec& u) {
    LVec q = w_basis * u.segment(2, dim_w - 2);
    q(0) = u(0);
    q(1) = u(1);
    LVec eta = nu_basis.col(0);
    for (int i = 1; i < k; ++i) eta += u(dim_w + i - 1) * nu_basis.col(i);
    eta /= eta.norm();
    // Geodesic from the identity along eta in g_alpha, in closed form.
    LVec g = (std::tanh(a * rr) / a) * eta;
    g(0) = -std::log(std::cosh(a * rr)) / a;
    g(1) = 0.0L;
    return multiply_coords(a, j, q, g);
  };
  (void)d;
  return chart;
}

ChartImmersion horosphere_chart(const ModelParams& params, double fd_step) {
  const ModelParams p = ModelParams::make(params.n, params.c);
  if (!(fd_step > 0.0)) fail(ErrorKind::InvalidArgument, "fd_step must be positive");
  const int d = p.dim();
  ChartImmersion chart;
  chart.params = p;
  chart.domain_dim = d - 1;
  chart.center = Vec::Zero(d - 1);
  chart.fd_step = fd_step;
  chart.map = [d](const LVec& u) {
    LVec out = LVec::Zero(d);
    out.tail(d - 1) = u;
    return out;
  };
  return chart;
}

GermField::GermField(ChartImmersion chart, double shape_scale)
    : chart_(std::move(chart)), model_(chart_.params), shape_scale_(shape_scale) {
  if (!(chart_.fd_step > 0.0)) fail(ErrorKind::InvalidArgument, "fd_step must be positive");
  if (chart_.fd_step < 1e-6) fail(ErrorKind::InvalidArgument, "fd_step underflow (below 1e-6)");
  if (chart_.domain_dim != model_.dim() - 1) {
    fail(ErrorKind::InvalidArgument, "chart domain must have dimension 2n-1");
  }
  if (at(origin()).shape.trace() < 0.0) flip_orientation();
}

void GermField::flip_orientation() {
  orientation_ = -orientation_;
  geometry_.clear();
}

Offset GermField::shifted(const Offset& offset, int axis, int delta) const {
  Offset out = offset;
  out[static_cast<std::size_t>(axis)] += delta;
  return out;
}

const LVec& GermField::point(const Offset& offset) {
  auto it = points_.find(offset);
  if (it != points_.end()) return it->second;
  LVec param = chart_.center.cast<long double>();
  const long double h = chart_.fd_step;
  for (int i = 0; i < chart_.domain_dim; ++i) param(i) += static_cast<long double>(offset[i]) * h;
  return points_.emplace(offset, chart_.map(param)).first->second;
}

const Mat& GermField::frame(const Offset& offset) {
  auto it = frames_.find(offset);
  if (it != frames_.end()) return it->second;
  const int m = chart_.domain_dim;
  const int d = model_.dim();
  const long double h = chart_.fd_step;
  Mat diff(d, m);
  for (int i = 0; i < m; ++i) {
    const LVec delta = (point(shifted(offset, i, 1)) - point(shifted(offset, i, -1))) / (2.0L * h);
    diff.col(i) = delta.cast<double>();
  }
  const Point p{point(offset).cast<double>()};
  const Mat x = model_.frame_matrix(p).partialPivLu().solve(diff);
  if (numerical_rank(x, 1e-10) < m) fail(ErrorKind::RankDeficient, "chart is not an immersion here");
  return frames_.emplace(offset, x).first->second;
}

const Vec& GermField::raw_normal(const Offset& offset) {
  auto it = normals_.find(offset);
  if (it != normals_.end()) return it->second;
  const Mat& x = frame(offset);
  const int d = model_.dim();
  Eigen::HouseholderQR<Mat> qr(x);
  const Mat q = qr.householderQ() * Mat::Identity(d, d);
  Vec n = q.col(d - 1);
  Mat full(d, d);
  full << x, n;
  if (full.determinant() < 0.0) n = -n;
  return normals_.emplace(offset, n).first->second;
}

const PointGeometry& GermField::at(const Offset& offset) {
  auto it = geometry_.find(offset);
  if (it != geometry_.end()) return it->second;
  const int m = chart_.domain_dim;
  const double h = chart_.fd_step;
  PointGeometry g;
  g.point = Point{point(offset).cast<double>()};
  g.frame = frame(offset);
  g.metric = g.frame.transpose() * g.frame;
  g.metric_inv = g.metric.inverse();
  g.normal = orientation_ * raw_normal(offset);

  // Weingarten: S X = -nabla_X xi, with the ambient derivative of a field
  // given by frame components v as d v + koszul(X, v).
  g.second_form = Mat(m, m);
  for (int i = 0; i < m; ++i) {
    const Vec dn = orientation_ * (raw_normal(shifted(offset, i, 1)) - raw_normal(shifted(offset, i, -1))) / (2.0 * h);
    const Vec nabla = dn + model_.koszul(g.frame.col(i), g.normal);
    for (int j = 0; j < m; ++j) g.second_form(i, j) = -nabla.dot(g.frame.col(j));
  }
  g.second_form = shape_scale_ * 0.5 * (g.second_form + g.second_form.transpose());
  g.shape_mixed = g.metric_inv * g.second_form;
  g.orthonormal = orthonormalize(g.frame);
  const Mat q = g.metric_inv * g.frame.transpose() * g.orthonormal;
  g.shape = q.transpose() * g.second_form * q;
  g.shape = 0.5 * (g.shape + g.shape.transpose());
  return geometry_.emplace(offset, std::move(g)).first->second;
}

HypersurfaceGerm GermField::germ(const Offset& offset) {
  const PointGeometry& g = at(offset);
  return HypersurfaceGerm{chart_.params, g.normal, g.orthonormal, g.shape, model_.j_matrix()};
}

std::vector<Mat> GermField::christoffel(const Offset& offset) {
  const int m = chart_.domain_dim;
  const double h = chart_.fd_step;
  const PointGeometry& g = at(offset);
  // lowered(i, j, l) = <nabla_i d_j, d_l>
  std::vector<Mat> lowered(static_cast<std::size_t>(m), Mat(m, m));
  for (int i = 0; i < m; ++i) {
    const Mat dx = (frame(shifted(offset, i, 1)) - frame(shifted(offset, i, -1))) / (2.0 * h);
    for (int j = 0; j < m; ++j) {
      const Vec nabla = dx.col(j) + model_.koszul(g.frame.col(i), g.frame.col(j));
      for (int l = 0; l < m; ++l) lowered[l](i, j) = nabla.dot(g.frame.col(l));
    }
  }
  std::vector<Mat> gamma(static_cast<std::size_t>(m), Mat::Zero(m, m));
  for (int l = 0; l < m; ++l) {
    for (int p = 0; p < m; ++p) gamma[l] += g.metric_inv(l, p) * lowered[p];
    gamma[l] = 0.5 * (gamma[l] + gamma[l].transpose());
  }
  return gamma;
}

NumericGeometry numeric_geometry(const ChartImmersion& chart) {
  GermField field(chart);
  const Offset o = field.origin();
  NumericGeometry out;
  out.germ = field.germ(o);
  out.frame = field.at(o).frame;
  out.metric = field.at(o).metric;
  out.christoffel = field.christoffel(o);
  return out;
}

GaussCodazziReport gauss_codazzi_residuals(GermField& field) {
  const int m = field.domain_dim();
  const double h = field.fd_step();
  const SolvableModel& model = field.model();
  const Offset o = field.origin();
  const PointGeometry g = field.at(o);
  const std::vector<Mat> gamma = field.christoffel(o);

  std::vector<std::vector<Mat>> dgamma(static_cast<std::size_t>(m));
  std::vector<Mat> dshape(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const auto plus = field.christoffel(field.shifted(o, a, 1));
    const auto minus = field.christoffel(field.shifted(o, a, -1));
    for (int l = 0; l < m; ++l) dgamma[a].push_back((plus[l] - minus[l]) / (2.0 * h));
    dshape[a] = (field.at(field.shifted(o, a, 1)).shape_mixed - field.at(field.shifted(o, a, -1)).shape_mixed) /
                (2.0 * h);
  }

  const auto idx4 = [m](int i, int j, int k, int l) { return ((i * m + j) * m + k) * m + l; };
  const auto idx3 = [m](int i, int j, int k) { return (i * m + j) * m + k; };
  std::vector<double> gauss(static_cast<std::size_t>(m * m * m * m));
  std::vector<double> codazzi(static_cast<std::size_t>(m * m * m));
  const Mat& x = g.frame;
  const Mat& s = g.shape_mixed;
  const Mat& L = g.second_form;

  // (nabla_i S)^l_j = d_i S^l_j + Gamma^l_ip S^p_j - S^l_p Gamma^p_ij
  std::vector<Mat> nabla_s(static_cast<std::size_t>(m), Mat::Zero(m, m));
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < m; ++l) {
      for (int j = 0; j < m; ++j) {
        double v = dshape[i](l, j);
        for (int p = 0; p < m; ++p) v += gamma[l](i, p) * s(p, j) - s(l, p) * gamma[p](i, j);
        nabla_s[i](l, j) = v;
      }
    }
  }

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        // R^p_ijk = d_i Gamma^p_jk - d_j Gamma^p_ik + Gamma^q_jk Gamma^p_iq - Gamma^q_ik Gamma^p_jq
        Vec rup(m);
        for (int p = 0; p < m; ++p) {
          double v = dgamma[i][p](j, k) - dgamma[j][p](i, k);
          for (int q = 0; q < m; ++q) v += gamma[q](j, k) * gamma[p](i, q) - gamma[q](i, k) * gamma[p](j, q);
          rup(p) = v;
        }
        const Vec rbar = model.curvature_closed_form(x.col(i), x.col(j), x.col(k));
        for (int l = 0; l < m; ++l) {
          const double intrinsic = rup.dot(g.metric.col(l));
          gauss[idx4(i, j, k, l)] =
              rbar.dot(x.col(l)) - (intrinsic - L(j, k) * L(i, l) + L(i, k) * L(j, l));
        }
        const Vec diff = nabla_s[i].col(j) - nabla_s[j].col(i);
        codazzi[idx3(i, j, k)] = rbar.dot(g.normal) - diff.dot(g.metric.col(k));
      }
    }
  }

  const Mat q = g.metric_inv * x.transpose() * g.orthonormal;
  GaussCodazziReport report;
  report.gauss = max_abs_entry(transform_tensor(gauss, 4, q, m));
  report.codazzi = max_abs_entry(transform_tensor(codazzi, 3, q, m));
  return report;
}

namespace {

// Eigenvector fields near the centre: the canonical Hopf fields U1, U2, A and
// projections of the remaining centre eigenvectors onto the nearby eigenspaces.
class LemmaContext {
 public:
  explicit LemmaContext(GermField& field) : field_(field) {
    ClassifyOptions options;
    options.group_tol = kGroupTol;
    options.residual_tol = 1e-4;
    const ClassificationResult cls = classify(field.germ(field.origin()), options);
    if (cls.model == Model::Unclassified) {
      fail(ErrorKind::NotApplicable, "centre germ does not classify: " + cls.reason);
    }
    if (cls.flipped) field.flip_orientation();
    const Offset o = field.origin();
    center_ = field.at(o);
    const Local& local = data(o);
    decomp_ = local.decomp;
    frame_ = local.frame;
    c_ = field.model().c();
    build_fields();
  }

  struct FrameField {
    int group = 0;
    int canonical = -1;  // 0: U1, 1: U2, 2: A, -1: projected
    Vec center;
  };

  const std::vector<FrameField>& fields() const { return fields_; }
  const PrincipalDecomposition& decomp() const { return decomp_; }
  const HopfFrame& frame() const { return frame_; }
  const PointGeometry& center() const { return center_; }
  double c() const { return c_; }
  double value(int group) const { return decomp_.groups[group].value; }
  Vec jxi() const { return field_.model().j_matrix() * center_.normal; }
  Vec jv(const Vec& v) const { return field_.model().j_matrix() * v; }

  // Ambient frame components of a field at a lattice offset.
  Vec field_at(const FrameField& f, const Offset& offset) {
    const Local& local = data(offset);
    switch (f.canonical) {
      case 0: return local.frame.u1;
      case 1: return local.frame.u2;
      case 2: return local.frame.a;
      default: break;
    }
    const Mat& basis = local.ambient[local.match[f.group]];
    return (basis * (basis.transpose() * f.center)).normalized();
  }

  Vec coordinates(const Vec& x) const { return center_.metric_inv * center_.frame.transpose() * x; }

  // nabla_X Y at the centre for a tangent vector X and a field Y.
  Vec nabla(const Vec& x, const FrameField& y) {
    const Vec alpha = coordinates(x);
    const Offset o = field_.origin();
    Vec d = field_.model().koszul(x, field_at(y, o));
    for (int a = 0; a < alpha.size(); ++a) {
      d += alpha(a) * (field_at(y, field_.shifted(o, a, 1)) - field_at(y, field_.shifted(o, a, -1))) /
           (2.0 * field_.fd_step());
    }
    return center_.orthonormal * (center_.orthonormal.transpose() * d);
  }

  // X f at the centre for a scalar function of the lattice offset.
  template <class F>
  double derivative(const Vec& x, F&& f) {
    const Vec alpha = coordinates(x);
    const Offset o = field_.origin();
    double d = 0.0;
    for (int a = 0; a < alpha.size(); ++a) {
      d += alpha(a) * (f(field_.shifted(o, a, 1)) - f(field_.shifted(o, a, -1))) / (2.0 * field_.fd_step());
    }
    return d;
  }

  Vec normal_at(const Offset& offset) { return field_.at(offset).normal; }
  const Mat& j() const { return field_.model().j_matrix(); }
  const SolvableModel& model() const { return field_.model(); }

 private:
  static constexpr double kGroupTol = 1e-4;

  struct Local {
    PrincipalDecomposition decomp;
    HopfFrame frame;
    std::vector<Mat> ambient;  // ambient eigenspace bases
    std::vector<int> match;    // centre group -> local group
  };

  const Local& data(const Offset& offset) {
    auto it = locals_.find(offset);
    if (it != locals_.end()) return it->second;
    const HypersurfaceGerm germ = field_.germ(offset);
    Local local;
    local.decomp = principal_decomposition(germ, kGroupTol);
    if (local.decomp.h != 2) fail(ErrorKind::NotApplicable, "h != 2 near the centre");
    local.frame = hopf_frame_extract(germ, local.decomp);
    for (const auto& group : local.decomp.groups) local.ambient.push_back(germ.tangent_basis * group.basis);
    if (!locals_.empty()) {
      const auto& ref = decomp_.groups;
      if (ref.size() != local.decomp.groups.size()) {
        fail(ErrorKind::NotApplicable, "eigenvalue grouping changes across the stencil");
      }
      for (const auto& group : ref) {
        int best = 0;
        for (int i = 1; i < local.decomp.g; ++i) {
          if (std::abs(local.decomp.groups[i].value - group.value) <
              std::abs(local.decomp.groups[best].value - group.value)) {
            best = i;
          }
        }
        local.match.push_back(best);
      }
    } else {
      for (int i = 0; i < local.decomp.g; ++i) local.match.push_back(i);
    }
    return locals_.emplace(offset, std::move(local)).first->second;
  }

  void build_fields() {
    const Local& local = data(field_.origin());
    for (int gi = 0; gi < decomp_.g; ++gi) {
      const Mat& basis = local.ambient[gi];
      std::vector<Vec> canon;
      std::vector<int> tags;
      if (gi == frame_.group1) { canon.push_back(frame_.u1); tags.push_back(0); }
      if (gi == frame_.group2) { canon.push_back(frame_.u2); tags.push_back(1); }
      if (gi == frame_.a_group) { canon.push_back(frame_.a); tags.push_back(2); }
      Mat cols(basis.rows(), static_cast<Eigen::Index>(canon.size()) + basis.cols());
      for (std::size_t i = 0; i < canon.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = canon[i];
      cols.rightCols(basis.cols()) = basis;
      const Mat ortho = orthonormalize(cols, 1e-8);
      for (Eigen::Index i = 0; i < std::min<Eigen::Index>(ortho.cols(), basis.cols()); ++i) {
        FrameField f;
        f.group = gi;
        f.canonical = i < static_cast<Eigen::Index>(tags.size()) ? tags[static_cast<std::size_t>(i)] : -1;
        f.center = i < static_cast<Eigen::Index>(canon.size()) ? canon[static_cast<std::size_t>(i)] : Vec(ortho.col(i));
        fields_.push_back(f);
      }
    }
  }

  GermField& field_;
  PointGeometry center_;
  PrincipalDecomposition decomp_;
  HopfFrame frame_;
  double c_ = 0.0;
  std::vector<FrameField> fields_;
  std::map<Offset, Local> locals_;
};

}  // namespace

double LemmaCodazziReport::max() const { return std::max({real_subspace, two_spaces, three_spaces}); }

LemmaCodazziReport lemma_codazzi_residuals(GermField& field) {
  LemmaContext ctx(field);
  LemmaCodazziReport report;
  const double c = ctx.c();
  const Vec jxi = ctx.jxi();
  const Vec& xi = ctx.center().normal;
  const auto& fields = ctx.fields();

  for (int gi = 0; gi < ctx.decomp().g; ++gi) {
    if (ctx.decomp().groups[gi].hopf_projection <= ctx.decomp().tol) continue;
    for (const auto& f1 : fields) {
      if (f1.group != gi) continue;
      for (const auto& f2 : fields) {
        if (f2.group != gi) continue;
        report.real_subspace = std::max(report.real_subspace, std::abs(ctx.jv(f1.center).dot(f2.center)));
      }
    }
  }

  for (const auto& fx : fields) {
    for (const auto& fy : fields) {
      const Vec nxy = ctx.nabla(fx.center, fy);
      const Vec nyx = ctx.nabla(fy.center, fx);
      for (const auto& fz : fields) {
        const double alpha = ctx.value(fx.group);
        const double beta = ctx.value(fy.group);
        const double gamma = ctx.value(fz.group);
        const Vec& x = fx.center;
        const Vec& y = fy.center;
        const Vec& z = fz.center;
        if (fx.group == fy.group && fz.group != fx.group) {
          const double rhs = c / (4.0 * (alpha - gamma)) *
                             (ctx.jv(y).dot(z) * x.dot(jxi) + ctx.jv(x).dot(y) * z.dot(jxi) +
                              2.0 * ctx.jv(x).dot(z) * y.dot(jxi));
          report.two_spaces = std::max(report.two_spaces, std::abs(nxy.dot(z) - rhs));
        }
        const double lhs = ctx.model().curvature_closed_form(x, y, z).dot(xi);
        const double rhs = (beta - gamma) * nxy.dot(z) - (alpha - gamma) * nyx.dot(z);
        report.three_spaces = std::max(report.three_spaces, std::abs(lhs - rhs));
      }
    }
  }
  return report;
}

LemmaGaussReport lemma_gauss_residual(GermField& field) {
  LemmaContext ctx(field);
  LemmaGaussReport report;
  const double c = ctx.c();
  const Vec jxi = ctx.jxi();
  const auto& fields = ctx.fields();
  const Mat& j = ctx.j();

  for (const auto& fx : fields) {
    for (const auto& fy : fields) {
      if (fx.group == fy.group) continue;
      const double alpha = ctx.value(fx.group);
      const double beta = ctx.value(fy.group);
      const Vec& x = fx.center;
      const Vec& y = fy.center;
      const Vec nxy = ctx.nabla(x, fy);
      const Vec nyx = ctx.nabla(y, fx);
      const Vec nxx = ctx.nabla(x, fx);
      const Vec nyy = ctx.nabla(y, fy);
      const double jxy = (j * x).dot(y);
      const auto y_jxi = [&](const Offset& o) { return ctx.field_at(fy, o).dot(j * ctx.normal_at(o)); };
      const auto x_jxi = [&](const Offset& o) { return ctx.field_at(fx, o).dot(j * ctx.normal_at(o)); };
      const auto jx_y = [&](const Offset& o) { return (j * ctx.field_at(fx, o)).dot(ctx.field_at(fy, o)); };
      const double value =
          (beta - alpha) * (-c - 4.0 * alpha * beta - 2.0 * c * jxy * jxy + 8.0 * nxy.dot(nyx) - 4.0 * nxx.dot(nyy)) -
          4.0 * c * jxy * (ctx.derivative(x, y_jxi) + ctx.derivative(y, x_jxi)) -
          c * x.dot(jxi) * (3.0 * ctx.derivative(y, jx_y) + nyx.dot(j * y) - 2.0 * nxy.dot(j * y)) -
          c * y.dot(jxi) * (3.0 * ctx.derivative(x, jx_y) - nxy.dot(j * x) + 2.0 * nyx.dot(j * x));
      const double residual = std::abs(value);
      report.max_residual = std::max(report.max_residual, residual);
      ++report.pairs;
      if (fx.canonical == 0 && fy.canonical == 1) report.u1_u2 = residual;
      if (fx.canonical == 0 && fy.canonical == 2) report.u1_a = residual;
    }
  }
  return report;
}

double NablaFormulaReport::max() const { return std::max({ui_ui, ui_uj, ui_a, a_ui, a_a}); }

NablaFormulaReport nabla_formula_residuals(GermField& field) {
  LemmaContext ctx(field);
  const double c = ctx.c();
  const HopfFrame& frame = ctx.frame();
  const double lambda[3] = {ctx.value(frame.group1), ctx.value(frame.group2), ctx.value(frame.a_group)};
  const double b[2] = {frame.b1, frame.b2};
  const Vec u[2] = {frame.u1, frame.u2};
  const Vec& a = frame.a;

  const LemmaContext::FrameField* fu[2] = {nullptr, nullptr};
  const LemmaContext::FrameField* fa = nullptr;
  for (const auto& f : ctx.fields()) {
    if (f.canonical == 0) fu[0] = &f;
    if (f.canonical == 1) fu[1] = &f;
    if (f.canonical == 2) fa = &f;
  }

  NablaFormulaReport report;
  const double l3 = lambda[2];
  for (int i = 0; i < 2; ++i) {
    const int jj = 1 - i;
    // (-1)^i with the eigenvalue labels 1, 2
    const double sign_i = (i == 0) ? -1.0 : 1.0;
    const double sign_j = -sign_i;
    const double li = lambda[i];
    const double lj = lambda[jj];
    const double bi2 = b[i] * b[i];
    const double bj2 = b[jj] * b[jj];
    const double mixed = 3.0 * c * b[0] * b[1] / (4.0 * (l3 - li));
    const double coeff = li - 3.0 * c * bi2 / (4.0 * (l3 - li));

    const Vec ui_ui = sign_j * mixed * a;
    const Vec ui_uj = sign_j * coeff * a;
    const Vec ui_a = sign_i * mixed * u[i] + sign_i * coeff * u[jj];
    const Vec a_ui = sign_j / (li - lj) * (c * (2.0 * bj2 - bi2) / 4.0 + (lj - l3) * coeff) * u[jj];

    report.ui_ui = std::max(report.ui_ui, (ctx.nabla(u[i], *fu[i]) - ui_ui).norm());
    report.ui_uj = std::max(report.ui_uj, (ctx.nabla(u[i], *fu[jj]) - ui_uj).norm());
    report.ui_a = std::max(report.ui_a, (ctx.nabla(u[i], *fa) - ui_a).norm());
    report.a_ui = std::max(report.a_ui, (ctx.nabla(a, *fu[i]) - a_ui).norm());
  }
  report.a_a = ctx.nabla(a, *fa).norm();
  return report;
}

double ResidualSuite::max_fine() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.fine);
  return worst;
}

double ResidualSuite::min_order() const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    if (!e.at_noise_floor) lowest = std::min(lowest, e.order);
  }
  return lowest;
}

ResidualSuite residual_suite(const std::function<ChartImmersion(double)>& make_chart, double fd_step,
                             double noise_floor) {
  const auto evaluate = [&](double h) {
    GermField field(make_chart(h));
    std::vector<std::pair<std::string, double>> values;
    const GaussCodazziReport gc = gauss_codazzi_residuals(field);
    values.emplace_back("gauss", gc.gauss);
    values.emplace_back("codazzi", gc.codazzi);
    const LemmaCodazziReport lc = lemma_codazzi_residuals(field);
    values.emplace_back("codazzi_real_subspace", lc.real_subspace);
    values.emplace_back("codazzi_two_spaces", lc.two_spaces);
    values.emplace_back("codazzi_three_spaces", lc.three_spaces);
    const LemmaGaussReport lg = lemma_gauss_residual(field);
    values.emplace_back("lemma_gauss", lg.max_residual);
    const NablaFormulaReport nf = nabla_formula_residuals(field);
    values.emplace_back("nabla_UiUi", nf.ui_ui);
    values.emplace_back("nabla_UiUj", nf.ui_uj);
    values.emplace_back("nabla_UiA", nf.ui_a);
    values.emplace_back("nabla_AUi", nf.a_ui);
    values.emplace_back("nabla_AA", nf.a_a);
    return values;
  };
  const auto coarse = evaluate(2.0 * fd_step);
  const auto fine = evaluate(fd_step);
  ResidualSuite suite;
  suite.fd_step = fd_step;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    ResidualEntry e;
    e.name = coarse[i].first;
    e.coarse = coarse[i].second;
    e.fine = fine[i].second;
    e.at_noise_floor = e.coarse < noise_floor;
    e.order = (e.fine > 0.0 && e.coarse > 0.0) ? std::log2(e.coarse / e.fine) : 0.0;
    suite.entries.push_back(e);
  }
  return suite;
}

}  // namespace chtubes
