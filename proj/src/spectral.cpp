#include "chtubes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "chtubes/errors.hpp"
#include "chtubes/jacobi.hpp"

namespace chtubes {

namespace {

double special_lambda3(double c) { return std::sqrt(-c) / (2.0 * std::sqrt(3.0)); }

bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(y)); }

std::vector<int> catalog_multiplicities(Branch branch, const CatalogDims& dims) {
  const int n = dims.n;
  const int k = dims.k;
  switch (branch) {
    case Branch::G4: return {1, 1, 2 * n - 2 - k, k - 1};
    case Branch::G3_K1: return {1, 1, 2 * n - 3};
    case Branch::G3_KBIG: return {1, k, 2 * n - 2 - k};
  }
  return {};
}

Mat ambient_basis(const HypersurfaceGerm& germ, const EigenGroup& group) {
  return germ.tangent_basis * group.basis;
}

}  // namespace

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::G4: return "G4";
    case Branch::G3_K1: return "G3_K1";
    case Branch::G3_KBIG: return "G3_KBIG";
  }
  return "?";
}

std::optional<Branch> branch_from_string(std::string_view name) {
  if (name == "G4") return Branch::G4;
  if (name == "G3_K1") return Branch::G3_K1;
  if (name == "G3_KBIG") return Branch::G3_KBIG;
  return std::nullopt;
}

std::string_view to_string(Model model) {
  switch (model) {
    case Model::Tube: return "tube";
    case Model::Equidistant: return "equidistant";
    case Model::Unclassified: return "unclassified";
  }
  return "?";
}

double catalog_lambda(int i, double lambda3, double c) {
  const double disc = -c - 3.0 * lambda3 * lambda3;
  if (disc < 0.0) fail(ErrorKind::NoRealSolution, "-c - 3 lambda3^2 is negative");
  const double sign = (i == 1) ? -1.0 : 1.0;
  return 0.5 * (3.0 * lambda3 + sign * std::sqrt(disc));
}

double b_squared_from_lambdas(int i, double lambda1, double lambda2, double lambda3, double c) {
  const double li = (i == 1) ? lambda1 : lambda2;
  const double lj = (i == 1) ? lambda2 : lambda1;
  return 4.0 * (lj - 2.0 * lambda3) * (li - lambda3) * (li - lambda3) / (c * (li - lj));
}

double b_squared_from_lambda3(int i, double lambda3, double c) {
  const double root = std::sqrt(-c - 3.0 * lambda3 * lambda3);
  const double sign = (i == 1) ? -1.0 : 1.0;
  return -std::pow(sign * lambda3 + root, 3) / (2.0 * c * root);
}

double quadratic_relation(double lambda1, double lambda2, double lambda3, double c) {
  return c - 4.0 * lambda1 * lambda2 + 8.0 * (lambda1 + lambda2) * lambda3 - 12.0 * lambda3 * lambda3;
}

EigenStructure eigen_structure_from_lambda3(double lambda3, double c, std::optional<Branch> hint,
                                            std::optional<CatalogDims> dims) {
  if (c >= 0.0) fail(ErrorKind::NoRealSolution, "the catalog requires c < 0");
  const double a = std::sqrt(-c) / 2.0;
  if (lambda3 < 0.0 || lambda3 >= a) {
    fail(ErrorKind::NoRealSolution, "lambda3 must satisfy 0 <= lambda3 < sqrt(-c)/2");
  }

  EigenStructure es;
  es.lambda3 = lambda3;
  es.lambda1 = catalog_lambda(1, lambda3, c);
  es.lambda2 = catalog_lambda(2, lambda3, c);
  es.b1 = std::sqrt(b_squared_from_lambda3(1, lambda3, c));
  es.b2 = std::sqrt(b_squared_from_lambda3(2, lambda3, c));

  const bool at_zero = lambda3 == 0.0;
  const bool at_special = near(lambda3, special_lambda3(c));
  Branch branch = at_zero ? Branch::G3_K1 : (at_special ? Branch::G3_KBIG : Branch::G4);
  if (hint) {
    if (*hint == Branch::G4 && (at_zero || at_special)) {
      fail(ErrorKind::InvalidArgument, "branch G4 needs lambda3 outside {0, sqrt(-c)/(2 sqrt 3)}");
    }
    if (*hint == Branch::G3_KBIG && !at_special) {
      fail(ErrorKind::InvalidArgument, "branch G3_KBIG needs lambda3 = sqrt(-c)/(2 sqrt 3)");
    }
    branch = *hint;
  }
  es.branch = branch;
  es.g = branch == Branch::G4 ? 4 : 3;
  if (branch == Branch::G4) es.lambda4 = -c / (4.0 * lambda3);
  if (branch == Branch::G3_K1) es.k = 1;

  if (dims) {
    if (dims->k < 1 || dims->k > dims->n - 1) fail(ErrorKind::InvalidArgument, "k must lie in [1, n-1]");
    if ((branch == Branch::G3_K1) != (dims->k == 1)) {
      fail(ErrorKind::InvalidArgument, "k = 1 exactly for the G3_K1 branch");
    }
    es.k = dims->k;
    es.multiplicities = catalog_multiplicities(branch, *dims);
  }
  return es;
}

double ConstraintResiduals::max() const {
  return std::max({quadratic, b1_formula, b2_formula, b_norm, lambda4_relation, kbig_relation});
}

ConstraintResiduals constraint_residuals(const EigenStructure& es, double c) {
  ConstraintResiduals r;
  r.quadratic = std::abs(quadratic_relation(es.lambda1, es.lambda2, es.lambda3, c));
  r.b1_formula = std::abs(es.b1sq() - b_squared_from_lambdas(1, es.lambda1, es.lambda2, es.lambda3, c));
  r.b2_formula = std::abs(es.b2sq() - b_squared_from_lambdas(2, es.lambda1, es.lambda2, es.lambda3, c));
  r.b_norm = std::abs(es.b1sq() + es.b2sq() - 1.0);
  if (es.branch == Branch::G4 && es.lambda4) r.lambda4_relation = std::abs(c + 4.0 * es.lambda3 * *es.lambda4);
  if (es.branch == Branch::G3_KBIG) r.kbig_relation = std::abs(c + 4.0 * es.lambda2 * es.lambda3);
  r.ordered = es.lambda1 < es.lambda3 && es.lambda3 < es.lambda2 && es.lambda3 >= 0.0;
  return r;
}

std::vector<double> PrincipalDecomposition::eigenvalues() const {
  std::vector<double> out;
  for (const auto& group : groups) out.insert(out.end(), group.members.begin(), group.members.end());
  return out;
}

PrincipalDecomposition principal_decomposition(const HypersurfaceGerm& germ, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "grouping tolerance must be positive");
  const Mat sym = 0.5 * (germ.shape + germ.shape.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  const Vec& values = solver.eigenvalues();
  const Mat& vectors = solver.eigenvectors();

  PrincipalDecomposition out;
  out.tol = tol;
  out.hopf_tangent = germ.tangent_basis.transpose() * germ.hopf_vector();
  const double threshold = tol * (1.0 + values.cwiseAbs().maxCoeff());

  std::vector<std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const bool join = i > 0 && values(i) - values(i - 1) <= threshold;
    if (!join) members.emplace_back();
    members.back().push_back(i);
    if (i > 0) {
      const double gap = values(i) - values(i - 1);
      if (gap > 0.5 * threshold && gap < 2.0 * threshold) {
        out.warning = "ambiguous eigenvalue grouping near " + std::to_string(values(i));
      }
    }
  }

  for (const auto& idx : members) {
    EigenGroup group;
    group.basis = Mat(vectors.rows(), static_cast<Eigen::Index>(idx.size()));
    double sum = 0.0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
      group.basis.col(static_cast<Eigen::Index>(m)) = vectors.col(idx[m]);
      group.members.push_back(values(idx[m]));
      sum += values(idx[m]);
    }
    group.value = sum / static_cast<double>(idx.size());
    group.hopf_projection = (group.basis.transpose() * out.hopf_tangent).norm();
    if (group.hopf_projection > tol) ++out.h;
    out.groups.push_back(std::move(group));
  }
  out.g = static_cast<int>(out.groups.size());
  return out;
}

HopfFrame hopf_frame_extract(const HypersurfaceGerm& germ, const PrincipalDecomposition& decomp) {
  if (decomp.h != 2) fail(ErrorKind::NotApplicable, "the Hopf frame needs h = 2");
  HopfFrame frame;
  for (int i = 0; i < decomp.g; ++i) {
    if (decomp.groups[i].hopf_projection <= decomp.tol) continue;
    (frame.group1 < 0 ? frame.group1 : frame.group2) = i;
  }
  // groups are ascending, so group1 carries the smaller eigenvalue
  const auto component = [&](int g) {
    const EigenGroup& group = decomp.groups[g];
    return Vec(germ.tangent_basis * (group.basis * (group.basis.transpose() * decomp.hopf_tangent)));
  };
  const Vec p1 = component(frame.group1);
  const Vec p2 = component(frame.group2);
  frame.b1 = p1.norm();
  frame.b2 = p2.norm();
  frame.u1 = p1 / frame.b1;
  frame.u2 = p2 / frame.b2;

  const Vec w = -(germ.jmat * frame.u1 + frame.b1 * germ.normal);
  frame.a = w.normalized();

  double best = -1.0;
  for (int i = 0; i < decomp.g; ++i) {
    const Mat basis = ambient_basis(germ, decomp.groups[i]);
    const double proj = (basis.transpose() * frame.a).norm();
    if (proj > best) {
      best = proj;
      frame.a_group = i;
      frame.a_membership = (frame.a - basis * (basis.transpose() * frame.a)).norm();
    }
  }
  return frame;
}

double LemmaAReport::max() const {
  return std::max({ju1, ju2, ja, ju1_u2, a_in_eigenspace, b_norm});
}

LemmaAReport lemma_A_check(const HypersurfaceGerm& germ, const PrincipalDecomposition& decomp,
                           const HopfFrame& frame) {
  if (decomp.h != 2) fail(ErrorKind::NotApplicable, "Hopf frame identities need h = 2");
  const Mat& j = germ.jmat;
  const Vec& xi = germ.normal;
  LemmaAReport report;
  report.ju1 = (j * frame.u1 - (-frame.b2 * frame.a - frame.b1 * xi)).norm();
  report.ju2 = (j * frame.u2 - (frame.b1 * frame.a - frame.b2 * xi)).norm();
  report.ja = (j * frame.a - (frame.b2 * frame.u1 - frame.b1 * frame.u2)).norm();
  report.ju1_u2 = std::abs((j * frame.u1).dot(frame.u2));
  report.a_in_eigenspace = frame.a_membership;
  report.b_norm = std::abs(frame.b1 * frame.b1 + frame.b2 * frame.b2 - 1.0);
  report.ordered = decomp.groups[frame.group1].value < decomp.groups[frame.group2].value;
  return report;
}

TotallyRealReport totally_real_check(const HypersurfaceGerm& germ, const PrincipalDecomposition& decomp,
                                     const HopfFrame& frame, double tol) {
  Mat kernel;
  if (decomp.g == 4) {
    for (int i = 0; i < decomp.g; ++i) {
      if (i != frame.group1 && i != frame.group2 && i != frame.a_group) {
        kernel = ambient_basis(germ, decomp.groups[i]);
      }
    }
  } else if (decomp.g == 3 && decomp.groups[frame.group2].multiplicity() > 1) {
    const Mat t2 = ambient_basis(germ, decomp.groups[frame.group2]);
    Mat cols(t2.rows(), t2.cols() + 1);
    cols << frame.u2, t2;
    kernel = orthonormalize(cols).rightCols(t2.cols() - 1);
  } else {
    fail(ErrorKind::NotApplicable, "totally real check applies to G4 and G3_KBIG structures");
  }
  if (kernel.cols() == 0) fail(ErrorKind::NotApplicable, "no kernel space found");

  const Mat& j = germ.jmat;
  const Mat t3 = ambient_basis(germ, decomp.groups[frame.a_group]);
  TotallyRealReport report;
  for (Eigen::Index p = 0; p < kernel.cols(); ++p) {
    const Vec jv = j * kernel.col(p);
    for (Eigen::Index q = 0; q < kernel.cols(); ++q) {
      report.real_residual = std::max(report.real_residual, std::abs(jv.dot(kernel.col(q))));
    }
    report.orthogonal_to_a = std::max(report.orthogonal_to_a, std::abs(jv.dot(frame.a)));
    report.containment = std::max(report.containment, (jv - t3 * (t3.transpose() * jv)).norm());
  }
  report.pass = report.real_residual < tol && report.orthogonal_to_a < tol && report.containment < tol;
  return report;
}

ClassificationResult classify(const HypersurfaceGerm& input, const ClassifyOptions& options) {
  ClassificationResult res;
  const GermCheck check = check_germ(input);
  if (!check.ok(1e-8)) {
    res.reason = "invalid germ: " + check.describe(1e-8);
    return res;
  }
  const double c = input.params.c;
  const double scale = std::max(1.0, std::abs(c));
  const double tol = options.residual_tol * scale;

  HypersurfaceGerm germ = input;
  PrincipalDecomposition decomp = principal_decomposition(germ, options.group_tol);
  res.g = decomp.g;
  res.h = decomp.h;
  res.eigenvalues = decomp.eigenvalues();
  if (decomp.h == 1) {
    res.reason = "hopf";
    return res;
  }
  if (decomp.h != 2) {
    res.reason = "h=" + std::to_string(decomp.h);
    return res;
  }
  if (c > 0.0) {
    res.reason = "no_real_solution: h = 2 requires c < 0";
    return res;
  }

  HopfFrame frame = hopf_frame_extract(germ, decomp);
  if (decomp.groups[frame.a_group].value < -tol) {
    germ = germ.flipped();
    decomp = principal_decomposition(germ, options.group_tol);
    frame = hopf_frame_extract(germ, decomp);
    res.flipped = true;
    res.eigenvalues = decomp.eigenvalues();
  }

  const LemmaAReport lemma = lemma_A_check(germ, decomp, frame);
  res.residuals["hopf_JU1"] = lemma.ju1;
  res.residuals["hopf_JU2"] = lemma.ju2;
  res.residuals["hopf_JA"] = lemma.ja;
  res.residuals["hopf_JU1_U2"] = lemma.ju1_u2;
  res.residuals["A_in_eigenspace"] = lemma.a_in_eigenspace;
  res.residuals["b_norm"] = lemma.b_norm;

  const auto reject = [&](const std::string& reason) {
    res.reason = reason;
    res.model = Model::Unclassified;
    return res;
  };
  if (frame.a_group == frame.group1 || frame.a_group == frame.group2) return reject("lemma_A: A in T_lambda1 + T_lambda2");

  EigenStructure observed;
  const auto& groups = decomp.groups;
  observed.lambda1 = groups[frame.group1].value;
  observed.lambda2 = groups[frame.group2].value;
  observed.lambda3 = groups[frame.a_group].value;
  observed.b1 = frame.b1;
  observed.b2 = frame.b2;
  observed.g = decomp.g;
  int lambda4_group = -1;
  if (decomp.g == 4) {
    for (int i = 0; i < 4; ++i) {
      if (i != frame.group1 && i != frame.group2 && i != frame.a_group) lambda4_group = i;
    }
    observed.lambda4 = groups[lambda4_group].value;
    observed.branch = Branch::G4;
    observed.k = groups[lambda4_group].multiplicity() + 1;
    observed.multiplicities = {groups[frame.group1].multiplicity(), groups[frame.group2].multiplicity(),
                               groups[frame.a_group].multiplicity(), groups[lambda4_group].multiplicity()};
  } else if (decomp.g == 3) {
    const int m2 = groups[frame.group2].multiplicity();
    observed.branch = m2 == 1 ? Branch::G3_K1 : Branch::G3_KBIG;
    observed.k = m2 == 1 ? 1 : m2;
    observed.multiplicities = {groups[frame.group1].multiplicity(), m2, groups[frame.a_group].multiplicity()};
  }
  res.observed = observed;

  const ConstraintResiduals cr = constraint_residuals(observed, c);
  res.residuals["quadratic"] = cr.quadratic;
  res.residuals["b1_formula"] = cr.b1_formula;
  res.residuals["b2_formula"] = cr.b2_formula;
  if (observed.branch == Branch::G4) res.residuals["lambda4_relation"] = cr.lambda4_relation;
  if (observed.branch == Branch::G3_KBIG) res.residuals["kbig_relation"] = cr.kbig_relation;

  if (decomp.g != 3 && decomp.g != 4) return reject("g=" + std::to_string(decomp.g));
  if (!lemma.ordered) return reject("lemma_A: label order");
  if (lemma.max() > tol) {
    for (const auto& [name, value] : res.residuals) {
      if (value > tol) return reject(name);
    }
  }
  if (groups[frame.group1].multiplicity() != 1) return reject("dim_T_lambda1");
  if (decomp.g == 4 && groups[frame.group2].multiplicity() != 1) return reject("dim_T_lambda2");

  double lambda3 = observed.lambda3;
  if (lambda3 < 0.0) lambda3 = 0.0;
  const double a = std::sqrt(-c) / 2.0;
  if (lambda3 >= a) return reject("lambda3_range");

  const EigenStructure closed = eigen_structure_from_lambda3(lambda3, c, Branch::G3_K1);
  res.residuals["lambda1_closed"] = std::abs(closed.lambda1 - observed.lambda1);
  res.residuals["lambda2_closed"] = std::abs(closed.lambda2 - observed.lambda2);

  const int n = input.params.n;
  if (observed.k < 1 || observed.k > n - 1) return reject("k_range");
  const auto expected_mult = catalog_multiplicities(observed.branch, CatalogDims{n, observed.k});
  res.residuals["multiplicity"] = expected_mult == observed.multiplicities ? 0.0 : 1.0;

  if (observed.branch != Branch::G3_K1) {
    const TotallyRealReport tr = totally_real_check(germ, decomp, frame, tol);
    res.residuals["totally_real"] = tr.real_residual;
    res.residuals["totally_real_A"] = tr.orthogonal_to_a;
    res.residuals["totally_real_containment"] = tr.containment;
  }

  for (const auto& [name, value] : res.residuals) {
    if (!(value <= tol)) return reject(name);
  }

  res.branch = observed.branch;
  res.k = observed.k;
  res.r = focal_radius(lambda3, c);
  res.model = observed.k == 1 ? Model::Equidistant : Model::Tube;
  return res;
}

NonexistenceReport nonexistence_scan(double c, const NonexistenceGrid& grid) {
  if (c == 0.0) fail(ErrorKind::InvalidArgument, "c must be nonzero");
  if (grid.lambda2_points < 2 || grid.lambda3_points < 2 || grid.curve_points < 2) {
    fail(ErrorKind::InvalidArgument, "grid needs at least two points per axis");
  }
  NonexistenceReport report;
  report.c = c;
  const double extent = grid.extent > 0.0 ? grid.extent : 2.0 * std::sqrt(std::abs(c));

  // Stage 1: lambda1 from the quadratic relation (linear in lambda1), then the
  // overdetermined linear system in (b1^2, b2^2).
  const double eps = 1e-9 * (1.0 + extent);
  for (int p = 0; p < grid.lambda2_points; ++p) {
    const double l2 = -extent + 2.0 * extent * p / (grid.lambda2_points - 1);
    for (int q = 0; q < grid.lambda3_points; ++q) {
      const double l3 = -extent + 2.0 * extent * q / (grid.lambda3_points - 1);
      ++report.grid_points;
      const double denom = 4.0 * l2 - 8.0 * l3;
      if (std::abs(denom) < eps) {
        ++report.singular_points;
        continue;
      }
      const double l1 = (c + 8.0 * l2 * l3 - 12.0 * l3 * l3) / denom;
      if (std::abs(l1 - l2) < eps || std::abs(l3 - l1) < eps || std::abs(l3 - l2) < eps) {
        ++report.singular_points;
        continue;
      }
      if (l1 > l2) {
        ++report.unordered_points;
        continue;
      }
      const double r1 = b_squared_from_lambdas(1, l1, l2, l3, c);
      const double r2 = b_squared_from_lambdas(2, l1, l2, l3, c);
      if (r1 > 0.0 && r1 < 1.0 && r2 > 0.0 && r2 < 1.0) ++report.relaxed_feasible;
      Eigen::Matrix<double, 3, 2> m;
      Eigen::Vector3d rhs;
      const double lam[3] = {0.0, l1, l2};
      for (int i = 1; i <= 2; ++i) {
        const int j = 3 - i;
        const double li = lam[i];
        const double lj = lam[j];
        m(i - 1, i - 1) = c * (-li + 3.0 * lj - 2.0 * l3) / (4.0 * (li - lj) * (l3 - li));
        m(i - 1, j - 1) = -c / (2.0 * (li - lj));
        rhs(i - 1) = -(2.0 * li * l3 - lj * l3 - li * lj) / (li - lj);
      }
      m.row(2) << 1.0, 1.0;
      rhs(2) = 1.0;
      const Eigen::Vector2d b = m.colPivHouseholderQr().solve(rhs);
      const double residual = (m * b - rhs).norm();
      const double scale = 1.0 + m.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
      if (residual > 1e-9 * scale) continue;
      if (b(0) > 0.0 && b(0) < 1.0 && b(1) > 0.0 && b(1) < 1.0) ++report.system_feasible;
    }
  }

  // Stage 2: the quadratic relation together with the Gauss relation
  // c - 4 l1 l2 + 14 l3 (l1 + l2) - 30 l3^2 = 0 is linear in (l1 + l2, l1 l2).
  report.max_discriminant = -std::numeric_limits<double>::infinity();
  for (int q = 0; q < grid.curve_points; ++q) {
    const double l3 = extent * q / (grid.curve_points - 1);
    ++report.curve_points;
    double sum = 0.0;
    double product = c / 4.0;
    if (l3 != 0.0) {
      Eigen::Matrix2d m;
      m << 8.0 * l3, -4.0, 14.0 * l3, -4.0;
      const Eigen::Vector2d rhs(-c + 12.0 * l3 * l3, -c + 30.0 * l3 * l3);
      const Eigen::Vector2d sol = m.partialPivLu().solve(rhs);
      sum = sol(0);
      product = sol(1);
    }
    const double disc = sum * sum - 4.0 * product;
    report.max_discriminant = std::max(report.max_discriminant, disc);
    if (disc <= 0.0) continue;
    const double l1 = 0.5 * (sum - std::sqrt(disc));
    const double l2 = 0.5 * (sum + std::sqrt(disc));
    report.curve_max_deviation = std::max(
        {report.curve_max_deviation, std::abs(l1 - catalog_lambda(1, l3, c)), std::abs(l2 - catalog_lambda(2, l3, c))});
    const double b1sq = b_squared_from_lambdas(1, l1, l2, l3, c);
    const double b2sq = b_squared_from_lambdas(2, l1, l2, l3, c);
    if (b1sq > 0.0 && b1sq < 1.0 && b2sq > 0.0 && b2sq < 1.0) ++report.curve_feasible;
  }

  std::ostringstream text;
  if (c > 0.0) {
    report.certificate = report.max_discriminant < 0.0;
    text << "c = " << c << " > 0: lambda1 + lambda2 = 3 lambda3 forces discriminant -c - 3 lambda3^2 <= -c < 0 "
         << "for every real lambda3, so lambda1 and lambda2 are not real; "
         << "grid maximum " << report.max_discriminant;
  } else {
    text << "c = " << c << " < 0: discriminant -c - 3 lambda3^2 is positive for lambda3^2 < -c/3";
  }
  report.certificate_text = text.str();
  return report;
}

}  // namespace chtubes
