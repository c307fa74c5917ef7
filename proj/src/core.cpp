#include "ssd/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ssd {

void require_finite(const DenseMatrix& m, const char* what) {
  if (m.size() == 0) {
    throw Error(ErrorCode::kInvalidDimension, std::string(what) + " is empty");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(what) + " contains non-finite entries");
  }
}

DenseMatrix make_identity_base(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidDimension, "base dimension must be >= 1");
  const auto size = static_cast<Eigen::Index>(n);
  return DenseMatrix::Identity(size, size);
}

DenseMatrix make_dct_base(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidDimension, "base dimension must be >= 1");
  const auto size = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  DenseMatrix a(size, size);
  const double dc = 1.0 / std::sqrt(nd);
  const double ac = std::sqrt(2.0 / nd);
  for (Eigen::Index j = 0; j < size; ++j) a(0, j) = dc;
  for (Eigen::Index k = 1; k < size; ++k) {
    for (Eigen::Index j = 0; j < size; ++j) {
      a(k, j) = ac * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) /
                              (2.0 * nd));
    }
  }
  return a;
}

double welch_bound(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols <= rows) return 0.0;
  const double m = static_cast<double>(rows);
  const double l = static_cast<double>(cols);
  return std::sqrt((l - m) / (m * (l - 1.0)));
}

CoherenceReport mutual_coherence(const DenseMatrix& q) {
  if (q.cols() < 2 || q.rows() < 1) {
    throw Error(ErrorCode::kInvalidDimension, "coherence needs at least 2 columns");
  }
  const Vector norms = q.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (!(norms(j) >= kZeroColumnTolerance)) {
      throw Error(ErrorCode::kZeroColumn, "column " + std::to_string(j) + " has zero norm",
                  static_cast<std::size_t>(j));
    }
  }
  const DenseMatrix unit = q * norms.cwiseInverse().asDiagonal();
  const DenseMatrix gram = unit.transpose() * unit;
  double mu = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(gram(i, j)));
  }
  CoherenceReport report;
  // Rounding can push a parallel pair a hair above 1.
  report.mu = std::min(mu, 1.0);
  report.row_count = static_cast<std::size_t>(q.rows());
  report.column_count = static_cast<std::size_t>(q.cols());
  report.welch = welch_bound(report.row_count, report.column_count);
  return report;
}

DenseMatrix equivalent_gram(const DenseMatrix& phi, const DenseMatrix& psi) {
  if (phi.cols() != psi.rows()) {
    throw Error(ErrorCode::kInvalidDimension,
                "sensing matrix has " + std::to_string(phi.cols()) +
                    " columns but dictionary has " + std::to_string(psi.rows()) + " rows");
  }
  const DenseMatrix b = phi * psi;
  DenseMatrix g = b.transpose() * b;
  // Exact symmetry: each pair is written from the same averaged value.
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double s = 0.5 * (g(i, j) + g(j, i));
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

DenseMatrix normalize_columns(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double n = m.col(j).norm();
    if (!(n >= kZeroColumnTolerance)) {
      throw Error(ErrorCode::kZeroColumn, "column " + std::to_string(j) + " has zero norm",
                  static_cast<std::size_t>(j));
    }
    out.col(j) /= n;
  }
  return out;
}

}  // namespace ssd
