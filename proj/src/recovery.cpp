#include "ssd/recovery.hpp"

#include <cmath>
#include <string>

namespace ssd {

RecoveryResult omp(const Vector& y, const DenseMatrix& d, std::size_t k,
                   std::optional<double> tol) {
  if (y.size() != d.rows()) {
    throw Error(ErrorCode::kInvalidDimension,
                "measurement has " + std::to_string(y.size()) + " entries, dictionary has " +
                    std::to_string(d.rows()) + " rows");
  }
  if (k == 0 || k > static_cast<std::size_t>(d.rows())) {
    throw Error(ErrorCode::kInvalidParameter,
                "sparsity must lie in [1, " + std::to_string(d.rows()) + "], got " +
                    std::to_string(k));
  }
  const Vector norms = d.colwise().norm().transpose();
  std::vector<bool> selectable(static_cast<std::size_t>(d.cols()));
  bool any_atom = false;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    selectable[static_cast<std::size_t>(j)] = norms(j) >= kZeroColumnTolerance;
    any_atom = any_atom || selectable[static_cast<std::size_t>(j)];
  }
  if (!any_atom) throw Error(ErrorCode::kDegenerateDictionary, "dictionary has no non-zero column");

  const double stop = tol.value_or(1e-10 * y.norm());
  RecoveryResult result;
  result.coefficients = Vector::Zero(d.cols());
  Vector residual = y;
  result.residual_norm = residual.norm();
  Vector fit;

  while (result.support.size() < k && result.residual_norm > 0.0 &&
         result.residual_norm >= stop) {
    const Vector corr = d.transpose() * residual;
    Eigen::Index best = -1;
    double best_score = -1.0;
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (!selectable[static_cast<std::size_t>(j)]) continue;
      const double score = std::abs(corr(j)) / norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;
    selectable[static_cast<std::size_t>(best)] = false;
    result.support.push_back(static_cast<std::size_t>(best));

    DenseMatrix sub(d.rows(), static_cast<Eigen::Index>(result.support.size()));
    for (std::size_t i = 0; i < result.support.size(); ++i) {
      sub.col(static_cast<Eigen::Index>(i)) = d.col(static_cast<Eigen::Index>(result.support[i]));
    }
    fit = sub.completeOrthogonalDecomposition().solve(y);
    residual = y - sub * fit;
    result.residual_norm = residual.norm();
    ++result.iterations;
  }
  for (std::size_t i = 0; i < result.support.size(); ++i) {
    result.coefficients(static_cast<Eigen::Index>(result.support[i])) =
        fit(static_cast<Eigen::Index>(i));
  }
  return result;
}

}  // namespace ssd
