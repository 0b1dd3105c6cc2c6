#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "rpca/errors.hpp"
#include "rpca/randomized_pca.hpp"

using namespace rpca;

namespace {

Matrix gaussian(int m, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(m, d);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < d; ++c) x(r, c) = normal(rng);
  return x;
}

void expect_orthonormal(const PCAModel& model) {
  const Eigen::MatrixXd gram = model.components * model.components.transpose();
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-8);
}

}  // namespace

TEST(RandomizedPca, PointsOnXAxis) {
  Matrix x(5, 2);
  x << -2, 0, -1, 0, 0, 0, 1.5, 0, 4, 0;
  Rng rng = make_rng(1);
  auto model = fit_randomized_pca(x, 1, {}, rng);
  EXPECT_NEAR(std::abs(model.components(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(model.components(0, 1), 0.0, 1e-12);
  EXPECT_GT(model.components(0, 0), 0.0);  // sign convention
  EXPECT_NEAR(model.explained_variance_ratio[0], 1.0, 1e-12);
}

TEST(RandomizedPca, FullRankReconstructionRecoversCenteredPoints) {
  Matrix x = gaussian(30, 6, 11);
  Rng rng = make_rng(2);
  auto model = fit_randomized_pca(x, 6, {}, rng);
  Matrix coords = project(model, x);
  Matrix rebuilt = coords * model.components;
  Matrix centered = x.rowwise() - model.mean.transpose();
  EXPECT_LE((rebuilt - centered).norm() / centered.norm(), 1e-6);
}

TEST(RandomizedPca, MatchesExactSubspaceOn50x10) {
  Matrix x = gaussian(50, 10, 3);
  Rng rng = make_rng(4);
  auto model = fit_randomized_pca(x, 3, {10, 4}, rng);
  const auto exact = oracle::exact_top_components(x, 3);
  EXPECT_LT(oracle::max_principal_angle(model.components.transpose(), exact), 1e-3);
  expect_orthonormal(model);

  // Projections agree with the exact basis up to per-component sign.
  Matrix ours = project(model, x);
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd theirs = centered * exact;
  for (int c = 0; c < 3; ++c) {
    const double sign = ours.col(c).dot(theirs.col(c)) < 0 ? -1.0 : 1.0;
    EXPECT_LT((ours.col(c) - sign * theirs.col(c)).cwiseAbs().maxCoeff(), 1e-3);
  }

  // Explained variance equals the exact top eigenvalues.
  const auto eig = oracle::exact_eigenvalues_desc(x);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(model.explained_variance[c], eig[c], 1e-8 * eig[0]);
}

TEST(RandomizedPca, WideDataWithMoreColumnsThanRows) {
  Matrix x = gaussian(12, 40, 5);
  Rng rng = make_rng(6);
  auto model = fit_randomized_pca(x, 5, {}, rng);
  EXPECT_EQ(model.components.rows(), 5);
  EXPECT_EQ(model.components.cols(), 40);
  expect_orthonormal(model);
  for (int i = 1; i < 5; ++i) EXPECT_GE(model.explained_variance[i - 1], model.explained_variance[i]);
  EXPECT_LE(model.explained_variance_ratio.sum(), 1.0 + 1e-8);
}

TEST(RandomizedPca, ProjectMeanGivesZeroAndIdentityBasisIsVerbatim) {
  Matrix x = gaussian(20, 4, 7);
  Rng rng = make_rng(8);
  auto model = fit_randomized_pca(x, 2, {}, rng);
  Matrix mean_row = model.mean.transpose();
  EXPECT_LE(project(model, mean_row).cwiseAbs().maxCoeff(), 1e-15);

  PCAModel identity;
  identity.mean = Vector::Zero(4);
  identity.components = Matrix::Identity(2, 4);
  Matrix coords = project(identity, x);
  EXPECT_EQ(coords, x.leftCols(2));
}

TEST(RandomizedPca, CumulativeRatios) {
  Rng data_rng = make_rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix iso(4000, 2);
  for (int r = 0; r < iso.rows(); ++r) iso.row(r) << normal(data_rng), normal(data_rng);
  Rng rng = make_rng(10);
  Vector cum = cumulative_explained_variance(iso, 2, {}, rng);
  EXPECT_NEAR(cum[0], 0.5, 0.03);
  EXPECT_NEAR(cum[1], 1.0, 1e-9);

  Matrix rank1(30, 3);
  for (int r = 0; r < 30; ++r) rank1.row(r) << r, 2.0 * r, -0.5 * r;
  Vector cum1 = cumulative_explained_variance(rank1, 2, {}, rng);
  EXPECT_NEAR(cum1[0], 1.0, 1e-9);
  EXPECT_NEAR(cum1[1], 1.0, 1e-9);
}

TEST(RandomizedPca, ParameterAndDegenerateErrors) {
  Rng rng = make_rng(1);
  Matrix one(1, 3);
  one << 1, 2, 3;
  EXPECT_THROW(fit_randomized_pca(one, 1, {}, rng), DegenerateInputError);
  Matrix x = gaussian(5, 3, 1);
  EXPECT_THROW(fit_randomized_pca(x, 4, {}, rng), ParameterError);
  EXPECT_THROW(fit_randomized_pca(x, 0, {}, rng), ParameterError);
  auto model = fit_randomized_pca(x, 2, {}, rng);
  Matrix wrong(2, 4);
  wrong.setZero();
  EXPECT_THROW(project(model, wrong), ParameterError);
}

TEST(RandomizedPca, DeterministicForFixedSeed) {
  Matrix x = gaussian(40, 15, 12);
  Rng a = make_rng(99), b = make_rng(99);
  auto ma = fit_randomized_pca(x, 4, {}, a);
  auto mb = fit_randomized_pca(x, 4, {}, b);
  EXPECT_EQ(ma.components, mb.components);
  EXPECT_EQ(ma.explained_variance, mb.explained_variance);
}

TEST(RandomizedPca, PropertyOrthonormalSortedAndBounded) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> dim(2, 48);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = dim(gen), d = dim(gen);
    const int p = std::uniform_int_distribution<int>(1, std::min(m, d))(gen);
    Matrix x = oracle::spectral_points(m, d, gen);
    Rng rng = make_rng(static_cast<std::uint64_t>(trial));
    auto model = fit_randomized_pca(x, static_cast<std::size_t>(p), {}, rng);
    expect_orthonormal(model);
    for (int i = 0; i < p; ++i) {
      EXPECT_GE(model.explained_variance[i], 0.0);
      if (i > 0) EXPECT_GE(model.explained_variance[i - 1], model.explained_variance[i]);
    }
    EXPECT_LE(model.explained_variance_ratio.sum(), 1.0 + 1e-8);
  }
}
