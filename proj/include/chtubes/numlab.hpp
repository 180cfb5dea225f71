#pragma once

// Finite-difference hypersurface laboratory. A chart immersion is sampled on a
// lattice of integer offsets times fd_step around a centre parameter; induced
// metric, unit normal, second fundamental form, Christoffel symbols and
// covariant derivatives of eigenvector fields are obtained by central
// differences, and the structure equations are evaluated as residuals.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chtubes/ambient_model.hpp"
#include "chtubes/construction.hpp"
#include "chtubes/germ.hpp"
#include "chtubes/linalg.hpp"
#include "chtubes/spectral.hpp"

namespace chtubes {

using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Chart points are evaluated in extended precision so that the third
// differences needed for curvature stay well above rounding noise.
struct ChartImmersion {
  ModelParams params;
  int domain_dim = 0;
  std::function<LVec(const LVec&)> map;  // parameter -> point coordinates (s, x, v)
  Vec center;                            // parameter of the base point
  double fd_step = 1e-3;
};

// (u_B, u_Z, u_w, theta) -> q(u) * gamma_{eta(theta)}(r), with q(u) in the group S
// generating W and eta(theta) the normalisation of eta_0 + sum theta_i nu_i.
// Requires r > 0, or r >= 0 when k = 1 (the chart then parametrises W itself).
ChartImmersion tube_chart(const SubmanifoldSpec& spec, double r, double fd_step = 1e-3);

// (x, v) -> exp(v + x Z): the horosphere through the identity.
ChartImmersion horosphere_chart(const ModelParams& params, double fd_step = 1e-3);

using Offset = std::vector<int>;

struct PointGeometry {
  Point point;
  Mat frame;        // coordinate vectors in the left-invariant frame (2n x m)
  Mat metric;       // g_ij
  Mat metric_inv;
  Vec normal;       // unit normal, consistently oriented
  Mat second_form;  // L_ij = <S d_i, d_j>
  Mat shape_mixed;  // S^l_j
  Mat orthonormal;  // orthonormal tangent basis (2n x m)
  Mat shape;        // S in the orthonormal basis
};

struct NumericGeometry {
  HypersurfaceGerm germ;
  Mat frame;
  Mat metric;
  std::vector<Mat> christoffel;  // christoffel[l](i, j) = Gamma^l_ij
};

class GermField {
 public:
  // The normal is oriented so that the mean curvature at the centre is
  // nonnegative; `shape_scale` multiplies the second fundamental form (used
  // to probe the sensitivity of the residuals).
  explicit GermField(ChartImmersion chart, double shape_scale = 1.0);

  const ChartImmersion& chart() const { return chart_; }
  const SolvableModel& model() const { return model_; }
  int domain_dim() const { return chart_.domain_dim; }
  double fd_step() const { return chart_.fd_step; }
  double orientation() const { return orientation_; }
  void flip_orientation();

  const PointGeometry& at(const Offset& offset);
  HypersurfaceGerm germ(const Offset& offset);
  std::vector<Mat> christoffel(const Offset& offset);
  Offset origin() const { return Offset(static_cast<std::size_t>(chart_.domain_dim), 0); }
  Offset shifted(const Offset& offset, int axis, int delta) const;

 private:
  const LVec& point(const Offset& offset);
  const Mat& frame(const Offset& offset);
  const Vec& raw_normal(const Offset& offset);

  ChartImmersion chart_;
  SolvableModel model_;
  double shape_scale_;
  double orientation_ = 1.0;
  std::map<Offset, LVec> points_;
  std::map<Offset, Mat> frames_;
  std::map<Offset, Vec> normals_;
  std::map<Offset, PointGeometry> geometry_;
};

// Germ and Christoffel symbols at the chart centre.
NumericGeometry numeric_geometry(const ChartImmersion& chart);

struct GaussCodazziReport {
  double gauss = 0.0;
  double codazzi = 0.0;
};

// Max over orthonormal frames at the centre of the Gauss and Codazzi residuals.
GaussCodazziReport gauss_codazzi_residuals(GermField& field);

struct LemmaCodazziReport {
  double real_subspace = 0.0;  // |<Jv, w>| on eigenspaces meeting J xi
  double two_spaces = 0.0;     // <nabla_X Y, Z> formula, X, Y in T_alpha, Z in T_beta
  double three_spaces = 0.0;   // <Rbar(X,Y)Z, xi> = (beta-gamma)<nabla_X Y,Z> - (alpha-gamma)<nabla_Y X,Z>
  double max() const;
};

struct LemmaGaussReport {
  double max_residual = 0.0;  // over unit eigenvector pairs in distinct eigenspaces
  double u1_u2 = 0.0;
  double u1_a = 0.0;
  int pairs = 0;
};

struct NablaFormulaReport {
  double ui_ui = 0.0;
  double ui_uj = 0.0;
  double ui_a = 0.0;
  double a_ui = 0.0;
  double a_a = 0.0;
  double max() const;
};

// The lemma checks classify the centre germ (h = 2, g in {3,4}) and throw
// NotApplicable otherwise; the field is re-oriented to the lambda3 >= 0 convention.
LemmaCodazziReport lemma_codazzi_residuals(GermField& field);
LemmaGaussReport lemma_gauss_residual(GermField& field);
NablaFormulaReport nabla_formula_residuals(GermField& field);

struct ResidualEntry {
  std::string name;
  double coarse = 0.0;  // at 2 fd_step
  double fine = 0.0;    // at fd_step
  double order = 0.0;   // log2(coarse / fine)
  bool at_noise_floor = false;
};

struct ResidualSuite {
  double fd_step = 0.0;
  std::vector<ResidualEntry> entries;
  double max_fine() const;
  double min_order() const;  // over entries above the noise floor
};

// Evaluates every residual at 2 fd_step and fd_step; entries whose coarse value
// is already below `noise_floor` are flagged instead of given an order.
ResidualSuite residual_suite(const std::function<ChartImmersion(double)>& make_chart, double fd_step,
                             double noise_floor = 1e-9);

}  // namespace chtubes
