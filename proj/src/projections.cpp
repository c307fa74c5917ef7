#include "ssd/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace ssd {
namespace {

void check_xi(double xi) {
  if (!(xi >= 0.0 && xi < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "xi must lie in [0, 1), got " + std::to_string(xi));
  }
}

void check_kappa(std::size_t kappa, Eigen::Index cols) {
  if (kappa == 0 || kappa > static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::kInvalidParameter,
                "kappa must lie in [1, " + std::to_string(cols) + "], got " +
                    std::to_string(kappa));
  }
}

}  // namespace

bool TargetGram::is_member(const DenseMatrix& g, double xi) {
  if (g.rows() != g.cols() || g.size() == 0) return false;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (g(j, j) != 1.0) return false;
    for (Eigen::Index i = 0; i < j; ++i) {
      if (g(i, j) != g(j, i)) return false;
      if (!(std::abs(g(i, j)) <= xi + kGramCapSlack)) return false;
    }
  }
  return true;
}

TargetGram TargetGram::from_dense(DenseMatrix g, double xi) {
  check_xi(xi);
  if (!is_member(g, xi)) {
    throw Error(ErrorCode::kInvalidParameter, "matrix is not a relaxed-ETF Gram for this xi");
  }
  return TargetGram(std::move(g), xi);
}

TargetGram TargetGram::identity(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::kInvalidDimension, "Gram dimension must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  return TargetGram(DenseMatrix::Identity(n, n), 0.0);
}

bool SparseSensingMatrix::is_member(const DenseMatrix& phi, std::size_t kappa) {
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    std::size_t nnz = 0;
    for (Eigen::Index j = 0; j < phi.cols(); ++j) nnz += phi(i, j) != 0.0;
    if (nnz > kappa) return false;
  }
  return true;
}

SparseSensingMatrix SparseSensingMatrix::from_dense(DenseMatrix phi, std::size_t kappa) {
  check_kappa(kappa, phi.cols());
  if (!is_member(phi, kappa)) {
    throw Error(ErrorCode::kInvalidParameter,
                "a row has more than " + std::to_string(kappa) + " non-zeros");
  }
  return SparseSensingMatrix(std::move(phi), kappa);
}

TargetGram project_gram(const DenseMatrix& g_in, double xi) {
  if (g_in.rows() != g_in.cols() || g_in.size() == 0) {
    throw Error(ErrorCode::kInvalidDimension, "Gram projection needs a non-empty square matrix");
  }
  check_xi(xi);
  DenseMatrix g(g_in.rows(), g_in.cols());
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    g(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double s = 0.5 * (g_in(i, j) + g_in(j, i));
      const double mag = std::min(std::abs(s), xi);
      const double clipped = mag == 0.0 ? 0.0 : std::copysign(mag, s);
      g(i, j) = clipped;
      g(j, i) = clipped;
    }
  }
  return TargetGram(std::move(g), xi);
}

SparseSensingMatrix project_row_sparse(const DenseMatrix& z, std::size_t kappa) {
  check_kappa(kappa, z.cols());
  const auto cols = static_cast<std::size_t>(z.cols());
  DenseMatrix out = DenseMatrix::Zero(z.rows(), z.cols());
  std::vector<Eigen::Index> order(cols);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(z(i, a)) > std::abs(z(i, b));
    });
    for (std::size_t r = 0; r < kappa; ++r) out(i, order[r]) = z(i, order[r]);
  }
  return SparseSensingMatrix(std::move(out), kappa);
}

}  // namespace ssd
