#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace chtubes {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Orthonormal basis (columns) of the column span of `cols`; columns whose
// residual falls below `tol` are dropped.
Mat orthonormalize(const Mat& cols, double tol = 1e-12);

// Orthonormal basis of the orthogonal complement of span(cols) in R^dim.
Mat orthogonal_complement(const Mat& cols, int dim);

// Projection of v onto the span of the orthonormal columns of `basis`.
inline Vec project(const Mat& basis, const Vec& v) { return basis * (basis.transpose() * v); }

double max_abs(const Mat& m);

// Numerical rank via singular values relative to the largest one.
int numerical_rank(const Mat& m, double rel_tol);

// Deterministic normal samples; the generator is seeded per call.
Mat gaussian_samples(int rows, int cols, std::uint64_t seed);

}  // namespace chtubes
