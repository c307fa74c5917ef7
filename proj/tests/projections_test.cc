#include <cmath>

#include "gtest/gtest.h"
#include "projection_oracles.hpp"
#include "ssd/projections.hpp"
#include "test_util.hpp"

namespace ssd {
namespace {

using testing::random_matrix;

DenseMatrix symmetric(Eigen::Index n, std::uint64_t seed) {
  const DenseMatrix a = random_matrix(n, n, seed);
  return a + a.transpose();
}

TEST(ProjectGram, ClipsAndResetsDiagonal) {
  DenseMatrix in(2, 2);
  in << 2, 0.5,
        0.5, 2;
  DenseMatrix want(2, 2);
  want << 1, 0.2,
          0.2, 1;
  EXPECT_EQ(project_gram(in, 0.2).matrix(), want);

  in << 1, -0.5,
        -0.5, 1;
  want << 1, -0.2,
          -0.2, 1;
  EXPECT_EQ(project_gram(in, 0.2).matrix(), want);
}

TEST(ProjectGram, ZeroXiGivesIdentity) {
  const TargetGram g = project_gram(random_matrix(3, 3, 4), 0.0);
  EXPECT_EQ(g.matrix(), DenseMatrix::Identity(3, 3));
  // No negative zeros leak through.
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_FALSE(std::signbit(g.matrix()(i, j)));
  }
}

TEST(ProjectGram, Errors) {
  try {
    project_gram(random_matrix(2, 3, 1), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDimension);
  }
  for (double xi : {-0.1, 1.0, 1.5}) {
    try {
      project_gram(symmetric(3, 1), xi);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
    }
  }
}

TEST(ProjectGram, MembershipIdempotenceNonexpansive) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const double xi = 0.04 * static_cast<double>(seed % 20);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 9);
    const DenseMatrix x = symmetric(n, seed);
    const DenseMatrix y = symmetric(n, seed + 100);
    const TargetGram px = project_gram(x, xi);
    const TargetGram py = project_gram(y, xi);
    EXPECT_TRUE(TargetGram::is_member(px.matrix(), xi));
    EXPECT_EQ(project_gram(px.matrix(), xi).matrix(), px.matrix());
    EXPECT_LE((px.matrix() - py.matrix()).norm(), (x - y).norm() + 1e-12);
  }
}

TEST(ProjectGram, SymmetrizesAsymmetricInput) {
  DenseMatrix in(2, 2);
  in << 1, 0.1,
        0.3, 1;
  const TargetGram g = project_gram(in, 0.5);
  EXPECT_DOUBLE_EQ(g.matrix()(0, 1), 0.2);
  EXPECT_EQ(g.matrix()(0, 1), g.matrix()(1, 0));
}

TEST(TargetGramType, FromDenseValidates) {
  EXPECT_NO_THROW(TargetGram::from_dense(DenseMatrix::Identity(3, 3), 0.0));
  DenseMatrix g = DenseMatrix::Identity(2, 2);
  g(0, 1) = g(1, 0) = 0.3;
  EXPECT_THROW(TargetGram::from_dense(g, 0.2), Error);
  g(1, 0) = 0.1;
  EXPECT_THROW(TargetGram::from_dense(g, 0.5), Error);
}

TEST(ProjectRowSparse, Examples) {
  DenseMatrix z(2, 3);
  z << 3, -1, 2,
       0, 5, -4;
  DenseMatrix want(2, 3);
  want << 3, 0, 2,
          0, 5, -4;
  EXPECT_EQ(project_row_sparse(z, 2).matrix(), want);

  DenseMatrix ties(1, 3);
  ties << 1, 1, 1;
  DenseMatrix tie_want(1, 3);
  tie_want << 1, 1, 0;
  EXPECT_EQ(project_row_sparse(ties, 2).matrix(), tie_want);

  DenseMatrix signed_ties(1, 4);
  signed_ties << 0.5, -2, 2, 1;
  DenseMatrix signed_want(1, 4);
  signed_want << 0, -2, 2, 0;
  EXPECT_EQ(project_row_sparse(signed_ties, 2).matrix(), signed_want);
}

TEST(ProjectRowSparse, KappaOutOfRange) {
  for (std::size_t kappa : {0u, 4u}) {
    try {
      project_row_sparse(random_matrix(2, 3, 1), kappa);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
    }
  }
}

TEST(ProjectRowSparse, JointBruteForceTwoBySix) {
  const DenseMatrix z = random_matrix(2, 6, 77);
  const SparseSensingMatrix p = project_row_sparse(z, 3);
  const double oracle = testing::brute_force_row_sparse_distance(z, 3);
  EXPECT_NEAR((z - p.matrix()).norm(), oracle, 1e-12);
}

TEST(ProjectRowSparse, OptimalAgainstEverySupport) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index cols = 2 + static_cast<Eigen::Index>(seed % 7);
    const std::size_t kappa = 1 + seed % std::min<std::size_t>(4, static_cast<std::size_t>(cols));
    const DenseMatrix z = random_matrix(3, cols, seed + 300);
    const SparseSensingMatrix p = project_row_sparse(z, kappa);
    EXPECT_TRUE(SparseSensingMatrix::is_member(p.matrix(), kappa));
    const double got = (z - p.matrix()).norm();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double row_got = (z.row(i) - p.matrix().row(i)).squaredNorm();
      for (unsigned mask : testing::subsets_of_size(static_cast<std::size_t>(cols), kappa)) {
        EXPECT_LE(row_got, testing::dropped_energy(z, i, mask) + 1e-12);
      }
    }
    EXPECT_NEAR(got, testing::brute_force_row_sparse_distance(z, kappa), 1e-12);
  }
}

TEST(ProjectRowSparse, Idempotent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SparseSensingMatrix p = project_row_sparse(random_matrix(5, 9, seed), 4);
    EXPECT_EQ(project_row_sparse(p.matrix(), 4).matrix(), p.matrix());
  }
}

TEST(SparseSensingMatrixType, FromDenseValidates) {
  DenseMatrix phi(1, 3);
  phi << 1, 0, 2;
  EXPECT_NO_THROW(SparseSensingMatrix::from_dense(phi, 2));
  EXPECT_THROW(SparseSensingMatrix::from_dense(phi, 1), Error);
  EXPECT_THROW(SparseSensingMatrix::from_dense(phi, 0), Error);
  EXPECT_THROW(SparseSensingMatrix::from_dense(phi, 4), Error);
}

}  // namespace
}  // namespace ssd
