#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "support/oracles.hpp"
#include "rpca/baselines.hpp"
#include "rpca/errors.hpp"
#include "rpca/metrics.hpp"

using namespace rpca;

namespace {

Matrix line(std::initializer_list<double> values) {
  Matrix x(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index r = 0;
  for (double v : values) x(r++, 0) = v;
  return x;
}

}  // namespace

TEST(Knn, KthDistanceOnLine) {
  auto scores = knn_outlier_score(line({0, 1, 2, 10}), {1, KnnVariant::kKthDistance});
  EXPECT_EQ(std::vector<double>(scores.begin(), scores.end()), (std::vector<double>{1, 1, 1, 8}));
}

TEST(Knn, SumOfDistancesOnLine) {
  auto scores = knn_outlier_score(line({0, 1, 2, 10}), {2, KnnVariant::kSumOfDistances});
  EXPECT_EQ(std::vector<double>(scores.begin(), scores.end()), (std::vector<double>{3, 2, 3, 17}));
}

TEST(Knn, SymmetricPair) {
  Matrix x(2, 3);
  x << 0, 1, 2, 3, -1, 5;
  auto scores = knn_outlier_score(x, {1, KnnVariant::kKthDistance});
  EXPECT_DOUBLE_EQ(scores[0], scores[1]);
  EXPECT_DOUBLE_EQ(scores[0], (x.row(0) - x.row(1)).norm());
}

TEST(Knn, MatchesPairwiseOracle) {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> size(3, 60), width(1, 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = size(gen), d = width(gen);
    Matrix x(n, d);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < d; ++c) x(r, c) = normal(gen);
    const auto k = std::uniform_int_distribution<std::size_t>(1, static_cast<std::size_t>(n - 1))(gen);
    for (bool sum : {false, true}) {
      auto ours = knn_outlier_score(
          x, {k, sum ? KnnVariant::kSumOfDistances : KnnVariant::kKthDistance}, trial % 3 + 1);
      auto theirs = oracle::knn_scores_pairwise(x, k, sum);
      for (int i = 0; i < n; ++i) EXPECT_NEAR(ours[i], theirs[static_cast<std::size_t>(i)], 1e-12);
    }
  }
}

TEST(Knn, RejectsBadK) {
  Matrix x = line({0, 1, 2});
  EXPECT_THROW(knn_outlier_score(x, {3, KnnVariant::kKthDistance}), ParameterError);
  EXPECT_THROW(knn_outlier_score(x, {0, KnnVariant::kKthDistance}), ParameterError);
}

TEST(IForest, AveragePathLength) {
  EXPECT_DOUBLE_EQ(average_path_length(0), 0.0);
  EXPECT_DOUBLE_EQ(average_path_length(1), 0.0);
  EXPECT_DOUBLE_EQ(average_path_length(2), 1.0);
  // 2 (1 + 1/2) - 2 * 2/3
  EXPECT_NEAR(average_path_length(3), 3.0 - 4.0 / 3.0, 1e-15);
  double h = 0.0;
  for (int i = 1; i < 256; ++i) h += 1.0 / i;
  EXPECT_NEAR(average_path_length(256), 2.0 * h - 2.0 * 255.0 / 256.0, 1e-12);
}

TEST(IForest, IdenticalPointsGiveSingleNodeTreesAndScoreOne) {
  Matrix x = Matrix::Constant(40, 3, 1.5);
  auto model = fit_iforest(x, 20, 16, 3);
  for (const auto& tree : model.trees) EXPECT_EQ(tree.nodes.size(), 1u);
  auto scores = iforest_score(model, x);
  for (Eigen::Index i = 0; i < scores.size(); ++i) EXPECT_DOUBLE_EQ(scores[i], 1.0);
}

TEST(IForest, DuplicatedInliersScoreBelowIsolatedPoint) {
  Matrix x = Matrix::Zero(21, 2);
  x.row(20) << 9.0, 9.0;
  auto model = fit_iforest(x, 50, 21, 2);
  auto scores = iforest_score(model, x);
  for (Eigen::Index i = 0; i < 20; ++i) EXPECT_LT(scores[i], scores[20]);
  // The coincident leaf counts its unbuilt subtree: depth 1 + c(20).
  for (const auto& tree : model.trees) {
    EXPECT_DOUBLE_EQ(path_length(tree, x.row(0).data()), 1.0 + average_path_length(20));
    EXPECT_DOUBLE_EQ(path_length(tree, x.row(20).data()), 1.0);
  }
}

TEST(IForest, ShallowIsolationScoresHigher) {
  Matrix x(9, 1);
  x << 0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 100;
  auto model = fit_iforest(x, 200, 9, 5);
  auto scores = iforest_score(model, x);
  Eigen::Index top = 0;
  scores.maxCoeff(&top);
  EXPECT_EQ(top, 8);
  EXPECT_TRUE((scores.array() > 0.0).all());
  EXPECT_TRUE((scores.array() <= 1.0).all());

  // Path length ordering matches score ordering tree by tree.
  std::vector<double> mean_h(9, 0.0);
  for (const auto& tree : model.trees)
    for (Eigen::Index i = 0; i < 9; ++i) mean_h[static_cast<std::size_t>(i)] += path_length(tree, x.row(i).data());
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (mean_h[static_cast<std::size_t>(i)] < mean_h[static_cast<std::size_t>(j)]) EXPECT_GT(scores[i], scores[j]);
}

TEST(IForest, TreesRespectHeightLimitAndSubsample) {
  auto data = generate_synthetic(300, 0, 4, 8.0, 1);
  auto model = fit_iforest(data.features, 10, 64, 9);
  EXPECT_EQ(model.subsample_size, 64u);
  for (const auto& tree : model.trees) {
    EXPECT_EQ(tree.nodes.front().size, 64u);
    // Depth via explicit walk.
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [at, depth] = stack.back();
      stack.pop_back();
      const auto& node = tree.nodes[static_cast<std::size_t>(at)];
      EXPECT_LE(depth, 6);
      if (!node.is_leaf()) {
        stack.push_back({node.left, depth + 1});
        stack.push_back({node.right, depth + 1});
      }
    }
  }
  auto clamped = fit_iforest(data.features, 2, 1000, 9);
  EXPECT_EQ(clamped.subsample_size, 300u);
}

TEST(IForest, PlantedOutliersRankOnTop) {
  int good_seeds = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto data = generate_synthetic(100, 5, 4, 8.0, seed);
    auto model = fit_iforest(data.features, 100, 256, seed);
    auto scores = iforest_score(model, data.features);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
    bool all_outliers = true;
    for (int r = 0; r < 5; ++r) all_outliers = all_outliers && order[static_cast<std::size_t>(r)] >= 100;
    good_seeds += all_outliers ? 1 : 0;
  }
  EXPECT_GE(good_seeds, 4);
}

TEST(IForest, DeterministicAndWorkerInvariant) {
  auto data = generate_synthetic(200, 10, 3, 6.0, 2);
  auto a = iforest_score(fit_iforest(data.features, 30, 64, 4), data.features, 1);
  auto b = iforest_score(fit_iforest(data.features, 30, 64, 4), data.features, 4);
  EXPECT_EQ(a, b);
}

TEST(IForest, Errors) {
  Matrix x = line({0, 1, 2, 3});
  EXPECT_THROW(fit_iforest(x, 0, 4, 1), ParameterError);
  EXPECT_THROW(fit_iforest(x, 5, 1, 1), ParameterError);
  auto model = fit_iforest(x, 5, 4, 1);
  Matrix wrong = Matrix::Zero(1, 2);
  EXPECT_THROW(iforest_score(model, wrong), ParameterError);
}
