#include "chtubes/linalg.hpp"

#include <random>

#include "chtubes/errors.hpp"

namespace chtubes {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OddDimensionNonReal: return "OddDimensionNonReal";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::NoRealSolution: return "NoRealSolution";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::MismatchedBase: return "MismatchedBase";
    case ErrorKind::RankDeficient: return "RankDeficient";
  }
  return "Unknown";
}

Mat orthonormalize(const Mat& cols, double tol) {
  Mat out(cols.rows(), 0);
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Vec v = cols.col(j);
    // two passes of modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < out.cols(); ++i) v -= out.col(i).dot(v) * out.col(i);
    }
    const double norm = v.norm();
    if (norm <= tol) continue;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = v / norm;
  }
  return out;
}

Mat orthogonal_complement(const Mat& cols, int dim) {
  Mat all(dim, cols.cols() + dim);
  all << cols, Mat::Identity(dim, dim);
  const Mat basis = orthonormalize(all, 1e-9);
  const auto rank = orthonormalize(cols, 1e-9).cols();
  return basis.rightCols(basis.cols() - rank);
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

int numerical_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++rank;
  }
  return rank;
}

Mat gaussian_samples(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

}  // namespace chtubes
