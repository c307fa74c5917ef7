#pragma once

#include <cstddef>

#include "ssd/core.hpp"
#include "ssd/extended_real.hpp"
#include "ssd/projections.hpp"

namespace ssd {

// The effective dictionary Psi = A * Psi_bar (N x L) and the trade-off
// weight lambda of the robustness term lambda * ||Phi||_F^2.
class ObjectiveContext {
 public:
  ObjectiveContext(DenseMatrix psi, double lambda);

  const DenseMatrix& psi() const noexcept { return psi_; }
  double lambda() const noexcept { return lambda_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(psi_.rows()); }
  std::size_t l() const noexcept { return static_cast<std::size_t>(psi_.cols()); }

 private:
  DenseMatrix psi_;
  double lambda_;
};

// f(Phi, G) = ||G - Psi^T Phi^T Phi Psi||_F^2 + lambda ||Phi||_F^2.
//
// The DenseMatrix overloads take unconstrained arguments (finite-difference
// checks perturb entries off the feasible sets); the typed overloads are the
// ones the designer calls.
double objective_value(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx);
double objective_value(const SparseSensingMatrix& phi, const TargetGram& g,
                       const ObjectiveContext& ctx);

// 2 lambda Phi - 4 Phi Psi G Psi^T + 4 Phi Psi Psi^T Phi^T Phi Psi Psi^T.
DenseMatrix gradient_phi(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx);
DenseMatrix gradient_phi(const SparseSensingMatrix& phi, const TargetGram& g,
                         const ObjectiveContext& ctx);

// 2 (G - Psi^T Phi^T Phi Psi).
DenseMatrix gradient_g(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx);
DenseMatrix gradient_g(const SparseSensingMatrix& phi, const TargetGram& g,
                       const ObjectiveContext& ctx);

// f plus the indicators of the row-sparse set and the relaxed-ETF Gram set.
ExtendedReal rho_value(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx,
                       std::size_t kappa, double xi);

}  // namespace ssd
