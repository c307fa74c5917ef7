#include "ssd/objective.hpp"

#include <cmath>
#include <string>

namespace ssd {
namespace {

void check_dims(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx) {
  if (static_cast<std::size_t>(phi.cols()) != ctx.n()) {
    throw Error(ErrorCode::kInvalidDimension,
                "sensing matrix has " + std::to_string(phi.cols()) + " columns, dictionary has " +
                    std::to_string(ctx.n()) + " rows");
  }
  if (static_cast<std::size_t>(g.rows()) != ctx.l() || g.rows() != g.cols()) {
    throw Error(ErrorCode::kInvalidDimension,
                "Gram must be " + std::to_string(ctx.l()) + " x " + std::to_string(ctx.l()));
  }
}

}  // namespace

ObjectiveContext::ObjectiveContext(DenseMatrix psi, double lambda)
    : psi_(std::move(psi)), lambda_(lambda) {
  require_finite(psi_, "dictionary");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw Error(ErrorCode::kInvalidParameter, "lambda must be a finite value >= 0");
  }
}

double objective_value(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx) {
  check_dims(phi, g, ctx);
  const DenseMatrix b = phi * ctx.psi();
  const DenseMatrix residual = g - b.transpose() * b;
  return residual.squaredNorm() + ctx.lambda() * phi.squaredNorm();
}

double objective_value(const SparseSensingMatrix& phi, const TargetGram& g,
                       const ObjectiveContext& ctx) {
  return objective_value(phi.matrix(), g.matrix(), ctx);
}

DenseMatrix gradient_phi(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx) {
  check_dims(phi, g, ctx);
  // With B = Phi Psi the two Gram terms collapse to 4 (B B^T B - B G) Psi^T.
  const DenseMatrix b = phi * ctx.psi();
  const DenseMatrix inner = (b * b.transpose()) * b - b * g;
  return 2.0 * ctx.lambda() * phi + 4.0 * inner * ctx.psi().transpose();
}

DenseMatrix gradient_phi(const SparseSensingMatrix& phi, const TargetGram& g,
                         const ObjectiveContext& ctx) {
  return gradient_phi(phi.matrix(), g.matrix(), ctx);
}

DenseMatrix gradient_g(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx) {
  check_dims(phi, g, ctx);
  const DenseMatrix b = phi * ctx.psi();
  return 2.0 * (g - b.transpose() * b);
}

DenseMatrix gradient_g(const SparseSensingMatrix& phi, const TargetGram& g,
                       const ObjectiveContext& ctx) {
  return gradient_g(phi.matrix(), g.matrix(), ctx);
}

ExtendedReal rho_value(const DenseMatrix& phi, const DenseMatrix& g, const ObjectiveContext& ctx,
                       std::size_t kappa, double xi) {
  check_dims(phi, g, ctx);
  if (!SparseSensingMatrix::is_member(phi, kappa) || !TargetGram::is_member(g, xi)) {
    return ExtendedReal::infinity();
  }
  return ExtendedReal::finite(objective_value(phi, g, ctx));
}

}  // namespace ssd
