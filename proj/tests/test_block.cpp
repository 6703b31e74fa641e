#include <gtest/gtest.h>

#include <random>

#include "badmm/block.hpp"
#include "badmm/errors.hpp"
#include "helpers.hpp"

using namespace badmm;
using badmm::testing::mat;
using badmm::testing::random_mat;
using badmm::testing::random_vec;
using badmm::testing::vec;

TEST(BlockSizes, OffsetsAndTotal) {
  BlockSizes s({2, 3, 1});
  EXPECT_EQ(s.count(), 3);
  EXPECT_EQ(s.total(), 6);
  EXPECT_EQ(s.offset(0), 0);
  EXPECT_EQ(s.offset(1), 2);
  EXPECT_EQ(s.offset(2), 5);
  EXPECT_EQ(BlockSizes::uniform(3, 4).total(), 12);
}

TEST(BlockSizes, RejectsEmptyOrZero) {
  EXPECT_THROW(BlockSizes(std::vector<Index>{}), ShapeError);
  EXPECT_THROW(BlockSizes({2, 0}), ShapeError);
}

TEST(BlockVector, SlicesShareStorage) {
  BlockVector x(BlockSizes({2, 1, 2}), vec({1, 2, 3, 4, 5}));
  x.block(1)[0] = 30;
  EXPECT_EQ(x.data()[2], 30);
  EXPECT_EQ(x.before(1).size(), 2);
  EXPECT_EQ(x.after(1).size(), 2);
  EXPECT_EQ(x.after(2).size(), 0);
  EXPECT_EQ(x.before(0).size(), 0);
  EXPECT_DOUBLE_EQ(x.after(1)[0], 4);
}

TEST(BlockVector, LengthMustMatch) { EXPECT_THROW(BlockVector(BlockSizes({2}), vec({1, 2, 3})), ShapeError); }

TEST(BlockLinearMap, ApplyZero) {
  BlockLinearMap A({Mat::Ones(1, 1), Mat::Ones(1, 1)});
  BlockVector x(BlockSizes({1, 1}));
  EXPECT_EQ(A.apply(x), Vec::Zero(1));
}

TEST(BlockLinearMap, ApplyIdentity) {
  BlockLinearMap A({Mat::Identity(2, 2)});
  BlockVector x(BlockSizes({2}), vec({3, -1}));
  EXPECT_EQ(A.apply(x), vec({3, -1}));
}

TEST(BlockLinearMap, ApplyTwoColumns) {
  BlockLinearMap A({mat(2, 1, {1, 0}), mat(2, 1, {0, 2})});
  BlockVector x(BlockSizes({1, 1}), vec({1, 1}));
  Mat dense = mat(2, 2, {1, 0, 0, 2});
  EXPECT_EQ(A.apply(x), dense * vec({1, 1}));
  EXPECT_EQ(A.apply(x), vec({1, 2}));
}

TEST(BlockLinearMap, AdjointExamples) {
  BlockLinearMap I({Mat::Identity(1, 1)});
  EXPECT_EQ(I.adjoint_apply(vec({5})).data(), vec({5}));
  BlockLinearMap A({mat(2, 1, {1, 0}), mat(2, 1, {0, 2})});
  EXPECT_EQ(A.adjoint_apply(Vec::Zero(2)).data(), Vec::Zero(2));
  BlockVector at = A.adjoint_apply(vec({1, 1}));
  Mat dense = mat(2, 2, {1, 0, 0, 2});
  EXPECT_EQ(at.data(), dense.transpose() * vec({1, 1}));
  EXPECT_EQ(at.block(0)[0], 1);
  EXPECT_EQ(at.block(1)[0], 2);
}

TEST(BlockLinearMap, ShapeErrors) {
  EXPECT_THROW(BlockLinearMap({Mat::Ones(2, 1), Mat::Ones(3, 1)}), ShapeError);
  BlockLinearMap A({Mat::Ones(2, 1), Mat::Ones(2, 2)});
  EXPECT_THROW(A.apply(BlockVector(BlockSizes({2, 1}))), ShapeError);
  EXPECT_THROW(A.adjoint_apply(Vec::Zero(3)), ShapeError);
}

TEST(BlockNorms, IdentityBlock) {
  BlockNorms n = block_norms(BlockLinearMap({Mat::Identity(2, 2)}));
  EXPECT_NEAR(n.block[0], 1.0, 1e-14);
  EXPECT_NEAR(n.dagger_sq, 1.0, 1e-14);
  EXPECT_NEAR(n.nu_plus, 1.0, 1e-14);
}

TEST(BlockNorms, ScalarWithZeroBlock) {
  BlockNorms n = block_norms(BlockLinearMap({Mat::Constant(1, 1, 2.0), Mat::Zero(1, 1)}));
  EXPECT_NEAR(n.dagger_sq, 4.0, 1e-14);
  EXPECT_NEAR(n.nu_plus, 2.0, 1e-14);
}

TEST(BlockNorms, ZeroMapIsDegenerate) {
  EXPECT_THROW(block_norms(BlockLinearMap({Mat::Zero(2, 1), Mat::Zero(2, 3)})), DegenerateOperatorError);
}

TEST(BlockNorms, DqpMapAgainstDenseSvd) {
  // B = 3, n = 1: rows x1 - x3 and x2 - x3.
  BlockLinearMap A({mat(2, 1, {1, 0}), mat(2, 1, {0, 1}), mat(2, 1, {-1, -1})});
  Mat S = mat(2, 3, {1, 0, -1, 0, 1, -1});
  Eigen::JacobiSVD<Mat> svd(S);
  // Singular values of S are sqrt(3) and 1.
  EXPECT_NEAR(svd.singularValues()[1], 1.0, 1e-14);
  EXPECT_NEAR(block_norms(A).nu_plus, svd.singularValues()[1], 1e-12);
  EXPECT_NEAR(block_norms(A).sigma_max, std::sqrt(3.0), 1e-12);
}

TEST(BlockNorms, LargerDqpMapAgainstGramEigenvalues) {
  // B = 3, n = 10; A A^T has eigenvalues 1 and 3, each ten times.
  const Index n = 10;
  Mat I = Mat::Identity(n, n), Z = Mat::Zero(n, n);
  Mat A0(2 * n, n), A1(2 * n, n), A2(2 * n, n);
  A0 << I, Z;
  A1 << Z, I;
  A2 << -I, -I;
  BlockNorms bn = block_norms(BlockLinearMap({A0, A1, A2}));
  EXPECT_NEAR(bn.nu_plus, 1.0, 1e-12);
  EXPECT_NEAR(bn.sigma_max, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(bn.dagger_sq, 4.0, 1e-12);
}

TEST(BlockNorms, TinySingularValuesIgnored) {
  Mat S = mat(2, 2, {1, 0, 0, 1e-12});
  BlockNorms n = block_norms(BlockLinearMap({S}));
  EXPECT_NEAR(n.nu_plus, 1.0, 1e-14);
}

TEST(BlockLinearMapProperty, AdjointIdentity) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(1, 4);
    int B = dim(g), l = dim(g);
    std::vector<Index> sz;
    std::vector<Mat> blocks;
    for (int t = 0; t < B; ++t) {
      sz.push_back(dim(g));
      blocks.push_back(random_mat(g, l, sz.back(), -3, 3));
    }
    BlockLinearMap A(blocks);
    BlockVector x(BlockSizes(sz), random_vec(g, A.column_sizes().total(), -5, 5));
    Vec u = random_vec(g, l, -5, 5);
    double lhs = A.apply(x).dot(u);
    double rhs = x.data().dot(A.adjoint_apply(u).data());
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST(BlockLinearMapProperty, NuPlusLowerBoundOnRange) {
  std::mt19937_64 g(12);
  for (int trial = 0; trial < 100; ++trial) {
    // Rank-deficient maps exercise the "positive" part of nu_plus.
    Mat U = random_mat(g, 4, 2, -1, 1), V = random_mat(g, 2, 5, -1, 1);
    Mat S = U * V;
    BlockLinearMap A({S.leftCols(2), S.rightCols(3)});
    BlockNorms n = block_norms(A);
    for (int k = 0; k < 5; ++k) {
      BlockVector x(A.column_sizes(), random_vec(g, 5, -2, 2));
      Vec u = A.apply(x);
      EXPECT_LE(n.nu_plus * u.norm(), A.adjoint_apply(u).norm() * (1 + 1e-10) + 1e-14);
    }
  }
}

TEST(BlockLinearMapProperty, DaggerNormMatchesPowerIteration) {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Mat> blocks{random_mat(g, 3, 2, -1, 1), random_mat(g, 3, 3, -1, 1), random_mat(g, 3, 1, -1, 1)};
    BlockNorms n = block_norms(BlockLinearMap(blocks));
    double sum = 0.0;
    for (size_t t = 0; t < blocks.size(); ++t) {
      Mat G = blocks[t].transpose() * blocks[t];
      Vec v = Vec::Ones(G.rows());
      double est = 0.0;
      for (int it = 0; it < 2000; ++it) {
        Vec w = G * v;
        est = w.norm();
        v = w / est;
      }
      EXPECT_NEAR(n.block[t], std::sqrt(est), 1e-8);
      sum += est;
    }
    EXPECT_NEAR(n.dagger_sq, sum, 1e-8 * (1 + sum));
  }
}

TEST(SpectralNorm, MatchesLargestSingularValue) {
  EXPECT_NEAR(spectral_norm(mat(2, 2, {3, 0, 0, -4})), 4.0, 1e-14);
  EXPECT_EQ(spectral_norm(Mat::Zero(2, 3)), 0.0);
}
