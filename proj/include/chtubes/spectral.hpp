#pragma once

// Eigenvalue structure of real hypersurfaces of CH^n(c) with constant
// principal curvatures whose Hopf vector J xi has two nontrivial projections
// onto the principal curvature spaces, and a pointwise classifier for germs.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chtubes/germ.hpp"
#include "chtubes/linalg.hpp"

namespace chtubes {

enum class Branch { G4, G3_K1, G3_KBIG };

std::string_view to_string(Branch branch);
std::optional<Branch> branch_from_string(std::string_view name);

struct EigenStructure {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  std::optional<double> lambda4;
  double b1 = 0.0;
  double b2 = 0.0;
  int g = 0;
  Branch branch = Branch::G4;
  int k = 0;                        // 0 when unknown
  std::vector<int> multiplicities;  // empty when the dimensions are unknown

  double b1sq() const { return b1 * b1; }
  double b2sq() const { return b2 * b2; }
};

struct CatalogDims {
  int n = 0;
  int k = 0;
};

// lambda_i = (3 lambda3 + (-1)^i sqrt(-c - 3 lambda3^2)) / 2, i in {1, 2}.
double catalog_lambda(int i, double lambda3, double c);
// b_i^2 = 4 (lambda_j - 2 lambda3)(lambda_i - lambda3)^2 / (c (lambda_i - lambda_j)).
double b_squared_from_lambdas(int i, double lambda1, double lambda2, double lambda3, double c);
// b_i^2 = -((-1)^i lambda3 + sqrt(-c - 3 lambda3^2))^3 / (2 c sqrt(-c - 3 lambda3^2)).
double b_squared_from_lambda3(int i, double lambda3, double c);
// c - 4 lambda1 lambda2 + 8 (lambda1 + lambda2) lambda3 - 12 lambda3^2.
double quadratic_relation(double lambda1, double lambda2, double lambda3, double c);

// Catalog record for a given lambda3. Without a hint the branch is G3_K1 at
// lambda3 = 0, G3_KBIG at lambda3 = sqrt(-c)/(2 sqrt 3) and G4 otherwise.
// Throws NoRealSolution for c > 0 or lambda3 outside [0, sqrt(-c)/2).
EigenStructure eigen_structure_from_lambda3(double lambda3, double c,
                                            std::optional<Branch> hint = std::nullopt,
                                            std::optional<CatalogDims> dims = std::nullopt);

struct ConstraintResiduals {
  double quadratic = 0.0;
  double b1_formula = 0.0;
  double b2_formula = 0.0;
  double b_norm = 0.0;
  double lambda4_relation = 0.0;  // |c + 4 lambda3 lambda4| (G4)
  double kbig_relation = 0.0;     // |c + 4 lambda2 lambda3| (G3_KBIG)
  bool ordered = false;           // lambda1 < lambda3 < lambda2 and lambda3 >= 0

  double max() const;
};

ConstraintResiduals constraint_residuals(const EigenStructure& es, double c);

struct EigenGroup {
  double value = 0.0;
  Mat basis;  // orthonormal columns in tangent-basis coordinates
  std::vector<double> members;
  double hopf_projection = 0.0;  // |projection of J xi|

  int multiplicity() const { return static_cast<int>(basis.cols()); }
};

struct PrincipalDecomposition {
  std::vector<EigenGroup> groups;  // ascending by value
  int g = 0;
  int h = 0;
  double tol = 0.0;
  Vec hopf_tangent;  // J xi in tangent-basis coordinates
  std::string warning;

  std::vector<double> eigenvalues() const;
};

// Groups eigenvalues lying within tol * (1 + max|lambda|) of their neighbour.
PrincipalDecomposition principal_decomposition(const HypersurfaceGerm& germ, double tol = 1e-7);

struct HopfFrame {
  Vec u1, u2, a;  // ambient vectors
  double b1 = 0.0, b2 = 0.0;
  int group1 = -1, group2 = -1;  // group indices of lambda1 and lambda2
  int a_group = -1;              // group containing A
  double a_membership = 0.0;     // |A - P_{a_group} A|
};

// Throws NotApplicable unless h = 2. U1 belongs to the smaller eigenvalue.
HopfFrame hopf_frame_extract(const HypersurfaceGerm& germ, const PrincipalDecomposition& decomp);

struct LemmaAReport {
  double ju1 = 0.0;     // |JU1 - (-b2 A - b1 xi)|
  double ju2 = 0.0;     // |JU2 - (b1 A - b2 xi)|
  double ja = 0.0;      // |JA - (b2 U1 - b1 U2)|
  double ju1_u2 = 0.0;  // |<JU1, U2>|
  double a_in_eigenspace = 0.0;
  double b_norm = 0.0;  // |b1^2 + b2^2 - 1|
  bool ordered = false; // the labels satisfy lambda1 < lambda2

  double max() const;
};

LemmaAReport lemma_A_check(const HypersurfaceGerm& germ, const PrincipalDecomposition& decomp,
                           const HopfFrame& frame);

struct TotallyRealReport {
  double real_residual = 0.0;  // max |<Jv, w>| on the kernel space
  double orthogonal_to_a = 0.0;
  double containment = 0.0;    // |J v - P_{lambda3} J v|
  bool pass = false;
};

// G4: the lambda4 space; G3_KBIG: T_lambda2 minus R U2. Throws NotApplicable otherwise.
TotallyRealReport totally_real_check(const HypersurfaceGerm& germ, const PrincipalDecomposition& decomp,
                                     const HopfFrame& frame, double tol = 1e-7);

enum class Model { Tube, Equidistant, Unclassified };
std::string_view to_string(Model model);

struct ClassificationResult {
  Model model = Model::Unclassified;
  int g = 0;
  int h = 0;
  int k = 0;
  double r = 0.0;
  std::optional<Branch> branch;
  std::map<std::string, double> residuals;
  std::string reason;  // empty on success
  bool flipped = false;
  std::optional<EigenStructure> observed;
  std::vector<double> eigenvalues;  // after orientation fixing
};

struct ClassifyOptions {
  double group_tol = 1e-7;
  double residual_tol = 1e-6;
};

ClassificationResult classify(const HypersurfaceGerm& germ, const ClassifyOptions& options = {});

struct NonexistenceGrid {
  int lambda2_points = 1000;
  int lambda3_points = 1000;
  int curve_points = 1000;
  double extent = 0.0;  // box half-width; 0 means 2 sqrt(|c|)
};

struct NonexistenceReport {
  double c = 0.0;
  long grid_points = 0;
  long singular_points = 0;   // vanishing denominators
  long unordered_points = 0;  // lambda1 >= lambda2 (labels swapped; covered by symmetry)
  long system_feasible = 0;  // grid points with a solution b1^2, b2^2 in (0,1)
  long relaxed_feasible = 0; // grid points where both b_i^2 formulas alone land in (0,1)
  long curve_points = 0;
  long curve_feasible = 0;
  double curve_max_deviation = 0.0;  // vs the closed-form lambda1, lambda2
  double max_discriminant = 0.0;     // max of -c - 3 lambda3^2 over the curve grid
  bool certificate = false;          // c > 0 and every discriminant negative
  std::string certificate_text;
};

// Scans a (lambda2, lambda3) grid, solving the quadratic relation for lambda1
// and the linear system for (b1^2, b2^2), then the lambda3 curve obtained by
// adding the relation lambda1 + lambda2 = 3 lambda3 from the Gauss equation.
NonexistenceReport nonexistence_scan(double c, const NonexistenceGrid& grid = {});

}  // namespace chtubes
