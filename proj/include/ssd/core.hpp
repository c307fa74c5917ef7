#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "ssd/error.hpp"

namespace ssd {

// Column-major storage internally; serialization is row-major (see matrix_io).
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Columns with Euclidean norm below this are treated as zero.
inline constexpr double kZeroColumnTolerance = 1e-14;

struct CoherenceReport {
  double mu = 0.0;
  double welch = 0.0;
  std::size_t column_count = 0;
  std::size_t row_count = 0;
};

// Throws kInvalidDimension on an empty matrix and kInvalidParameter on
// NaN/Inf entries.
void require_finite(const DenseMatrix& m, const char* what);

DenseMatrix make_identity_base(std::size_t n);

// Orthonormal type-II DCT; row k is frequency k.
DenseMatrix make_dct_base(std::size_t n);

// sqrt((L-M)/(M(L-1))) for L > M >= 1, else 0.
double welch_bound(std::size_t rows, std::size_t cols);

CoherenceReport mutual_coherence(const DenseMatrix& q);

// Psi^T Phi^T Phi Psi, symmetrized as (B + B^T)/2.
DenseMatrix equivalent_gram(const DenseMatrix& phi, const DenseMatrix& psi);

// Returns a copy of `m` with every column scaled to unit Euclidean norm.
// Zero columns raise kZeroColumn.
DenseMatrix normalize_columns(const DenseMatrix& m);

}  // namespace ssd
