#pragma once

#include <cstddef>

#include "ssd/core.hpp"

namespace ssd {

// Slack allowed on the off-diagonal cap when validating a TargetGram.
inline constexpr double kGramCapSlack = 1e-12;

// Symmetric L x L matrix with unit diagonal and |off-diagonal| <= xi.
class TargetGram {
 public:
  // Validates every invariant; throws kInvalidParameter on violation.
  static TargetGram from_dense(DenseMatrix g, double xi);

  static TargetGram identity(std::size_t dim);

  const DenseMatrix& matrix() const noexcept { return g_; }
  double xi() const noexcept { return xi_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(g_.rows()); }

  static bool is_member(const DenseMatrix& g, double xi);

 private:
  TargetGram(DenseMatrix g, double xi) : g_(std::move(g)), xi_(xi) {}
  friend TargetGram project_gram(const DenseMatrix& g_in, double xi);

  DenseMatrix g_;
  double xi_;
};

// M x N matrix with at most kappa non-zeros in every row, stored dense.
class SparseSensingMatrix {
 public:
  static SparseSensingMatrix from_dense(DenseMatrix phi, std::size_t kappa);

  const DenseMatrix& matrix() const noexcept { return phi_; }
  std::size_t kappa() const noexcept { return kappa_; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(phi_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(phi_.cols()); }

  static bool is_member(const DenseMatrix& phi, std::size_t kappa);

 private:
  SparseSensingMatrix(DenseMatrix phi, std::size_t kappa)
      : phi_(std::move(phi)), kappa_(kappa) {}
  friend SparseSensingMatrix project_row_sparse(const DenseMatrix& z, std::size_t kappa);

  DenseMatrix phi_;
  std::size_t kappa_;
};

// Orthogonal projection onto the relaxed-ETF Gram set: symmetrize, reset the
// diagonal to 1, clip off-diagonal magnitudes at xi keeping the sign.
TargetGram project_gram(const DenseMatrix& g_in, double xi);

// Keeps the kappa largest magnitudes of each row. Equal magnitudes keep the
// lower column index.
SparseSensingMatrix project_row_sparse(const DenseMatrix& z, std::size_t kappa);

}  // namespace ssd
