#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ssd/core.hpp"

namespace ssd {

struct RecoveryResult {
  // Length-L coefficient vector, non-zero only on `support`.
  Vector coefficients;
  // Selected columns in selection order.
  std::vector<std::size_t> support;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

// Orthogonal matching pursuit for min ||y - D s||_2 s.t. ||s||_0 <= k.
//
// Atoms are selected by |d_i^T r| / ||d_i||, so the non-uniform column norms
// of an equivalent dictionary Phi * Psi do not bias the choice; ties go to
// the lowest index. Coefficients are the minimum-norm least-squares fit on
// the support. Stops after k atoms or once the residual norm drops below
// `tol` (default 1e-10 * ||y||).
RecoveryResult omp(const Vector& y, const DenseMatrix& d, std::size_t k,
                   std::optional<double> tol = std::nullopt);

}  // namespace ssd
