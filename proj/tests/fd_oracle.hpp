#pragma once

#include <algorithm>
#include <cmath>

#include "ssd/core.hpp"

namespace ssd::testing {

// Naive-loop evaluation of ||G - Psi^T Phi^T Phi Psi||_F^2 + lambda ||Phi||_F^2.
inline double naive_objective(const DenseMatrix& phi, const DenseMatrix& g, const DenseMatrix& psi,
                              double lambda) {
  const Eigen::Index m = phi.rows(), n = phi.cols(), l = psi.cols();
  double total = 0.0;
  for (Eigen::Index a = 0; a < l; ++a) {
    for (Eigen::Index b = 0; b < l; ++b) {
      double gram = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        double pa = 0.0, pb = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
          pa += phi(i, p) * psi(p, a);
          pb += phi(i, p) * psi(p, b);
        }
        gram += pa * pb;
      }
      const double r = g(a, b) - gram;
      total += r * r;
    }
  }
  double reg = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index p = 0; p < n; ++p) reg += phi(i, p) * phi(i, p);
  }
  return total + lambda * reg;
}

// Central differences of `f` around `x`, entry by entry.
template <typename F>
DenseMatrix central_differences(const DenseMatrix& x, F&& f, double h = 1e-6) {
  DenseMatrix grad(x.rows(), x.cols());
  DenseMatrix probe = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      probe(i, j) = x(i, j) + h;
      const double up = f(probe);
      probe(i, j) = x(i, j) - h;
      const double down = f(probe);
      probe(i, j) = x(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

// Largest entrywise error relative to the gradient's magnitude.
inline double max_relative_error(const DenseMatrix& analytic, const DenseMatrix& numeric) {
  const double scale = std::max(numeric.cwiseAbs().maxCoeff(), 1e-12);
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace ssd::testing
