#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpca/errors.hpp"
#include "rpca/rpca_tree.hpp"

using namespace rpca;

namespace {

Matrix two_gaussians(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double offset = r % 2 == 0 ? 0.0 : 6.0;
    for (Eigen::Index c = 0; c < 3; ++c) x(r, c) = offset + normal(rng);
  }
  return x;
}

Matrix uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = u(rng);
  return x;
}

// Walks the tree from the root and records which leaf each training index
// sits in; fails on duplicates.
std::vector<std::size_t> leaf_of_each_point(const RPCATree& tree) {
  std::vector<std::size_t> owner(tree.n_train(), SIZE_MAX);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t at = stack.back();
    stack.pop_back();
    const auto& node = tree.node(at);
    if (node.is_leaf()) {
      for (auto idx : node.members) {
        EXPECT_EQ(owner[idx], SIZE_MAX) << "index " << idx << " in two leaves";
        owner[idx] = at;
      }
      continue;
    }
    EXPECT_EQ(tree.node(static_cast<std::size_t>(node.left)).depth, node.depth + 1);
    EXPECT_EQ(tree.node(static_cast<std::size_t>(node.right)).depth, node.depth + 1);
    stack.push_back(static_cast<std::size_t>(node.left));
    stack.push_back(static_cast<std::size_t>(node.right));
  }
  return owner;
}

void check_structure(const RPCATree& tree, const Matrix& x, std::size_t k) {
  const auto owner = leaf_of_each_point(tree);
  std::uint32_t deepest = 0;
  for (auto leaf : tree.leaf_indices()) {
    const auto& node = tree.node(leaf);
    EXPECT_FALSE(node.members.empty());
    if (!node.degenerate) EXPECT_LE(node.members.size(), k);
    deepest = std::max(deepest, node.depth);
  }
  EXPECT_EQ(tree.max_depth(), deepest);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    ASSERT_NE(owner[i], SIZE_MAX) << "index " << i << " in no leaf";
    EXPECT_EQ(tree.route(x.row(static_cast<Eigen::Index>(i)).transpose()), owner[i]) << "point " << i;
  }
}

}  // namespace

TEST(RpcaTree, SmallNodeIsASingleLeaf) {
  Matrix x = uniform(5, 2, 1);
  Rng rng = make_rng(1);
  auto tree = fit_tree(x, {1, 10, {}}, rng);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.max_depth(), 0u);
  EXPECT_EQ(tree.node(0).members.size(), 5u);
  Vector far(2);
  far << 100, -100;
  EXPECT_EQ(tree.route(far), 0u);
}

TEST(RpcaTree, TwoSeparatedPointsSplitOnce) {
  Matrix x(2, 2);
  x << 0, 0, 10, 0;
  Rng rng = make_rng(3);
  auto tree = fit_tree(x, {1, 1, {}}, rng);
  ASSERT_EQ(tree.nodes().size(), 3u);
  EXPECT_EQ(tree.max_depth(), 1u);
  for (auto leaf : tree.leaf_indices()) {
    EXPECT_EQ(tree.node(leaf).depth, 1u);
    EXPECT_EQ(tree.node(leaf).members.size(), 1u);
  }
  check_structure(tree, x, 1);
}

TEST(RpcaTree, MixturePartitionCapacityAndRouting) {
  Matrix x = two_gaussians(200, 17);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (std::size_t p : {1u, 2u, 3u, 5u}) {
      Rng rng = make_rng(seed);
      auto tree = fit_tree(x, {p, 10, {}}, rng);
      check_structure(tree, x, 10);
    }
  }
}

TEST(RpcaTree, IdenticalPointsBecomeDegenerateLeaf) {
  Matrix x = Matrix::Constant(30, 4, 2.5);
  Rng rng = make_rng(5);
  auto tree = fit_tree(x, {1, 3, {}}, rng);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_TRUE(tree.node(0).degenerate);
  EXPECT_EQ(tree.node(0).members.size(), 30u);
}

TEST(RpcaTree, DuplicatedClustersStillPartition) {
  // Heavy duplication makes one-sided Laplace splits likely, exercising the
  // retry and median fallbacks.
  Matrix x(60, 2);
  for (Eigen::Index r = 0; r < 60; ++r) {
    if (r < 50) {
      x.row(r) << 1.0, 1.0;
    } else {
      x.row(r) << 1.0 + static_cast<double>(r - 49), 1.0;
    }
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng = make_rng(seed);
    auto tree = fit_tree(x, {1, 2, {}}, rng);
    check_structure(tree, x, 2);
    std::size_t degenerate = 0;
    for (auto leaf : tree.leaf_indices()) degenerate += tree.node(leaf).degenerate ? 1 : 0;
    EXPECT_GE(degenerate, 1u);
  }
}

TEST(RpcaTree, ComponentCountShrinksToNodeSize) {
  Matrix x = uniform(40, 2, 9);
  Rng rng = make_rng(2);
  auto tree = fit_tree(x, {8, 1, {}}, rng);
  for (const auto& node : tree.nodes()) {
    if (node.split) {
      EXPECT_LE(node.split->pca.n_components(), 2u);
      EXPECT_EQ(static_cast<std::size_t>(node.split->thresholds.size()), node.split->pca.n_components());
    }
  }
  check_structure(tree, x, 1);
}

TEST(RpcaTree, DepthIsLogarithmicOnUniformPoints) {
  Matrix x = uniform(1024, 4, 21);
  std::vector<std::uint32_t> depths;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng = make_rng(seed);
    auto tree = fit_tree(x, {1, 1, {}}, rng);
    EXPECT_LE(tree.max_depth(), 1023u);
    depths.push_back(tree.max_depth());
  }
  std::nth_element(depths.begin(), depths.begin() + 10, depths.end());
  EXPECT_LE(depths[10], 40u);
}

TEST(RpcaTree, DeterministicPerSeed) {
  Matrix x = two_gaussians(150, 4);
  Rng a = make_rng(42), b = make_rng(42), c = make_rng(43);
  auto ta = fit_tree(x, {2, 5, {}}, a);
  auto tb = fit_tree(x, {2, 5, {}}, b);
  auto tc = fit_tree(x, {2, 5, {}}, c);
  EXPECT_TRUE(ta == tb);
  EXPECT_FALSE(ta == tc);
}

TEST(RpcaTree, Errors) {
  Rng rng = make_rng(1);
  Matrix empty(0, 3);
  EXPECT_THROW(fit_tree(empty, {1, 10, {}}, rng), ValidationError);
  Matrix x = uniform(10, 3, 1);
  EXPECT_THROW(fit_tree(x, {0, 10, {}}, rng), ParameterError);
  EXPECT_THROW(fit_tree(x, {1, 0, {}}, rng), ParameterError);
  auto tree = fit_tree(x, {1, 2, {}}, rng);
  Vector wrong = Vector::Zero(2);
  EXPECT_THROW(tree.route(wrong), ParameterError);
}

TEST(SplitRule, TiesGoRight) {
  SplitRule rule;
  rule.pca.mean = Vector::Zero(2);
  rule.pca.components = Matrix::Identity(2, 2);
  rule.thresholds = Vector::Zero(2);
  double scratch[2];
  const double tie[2] = {-1.0, 1.0};  // one left vote, one right vote
  const double both_left[2] = {-1.0, -1.0};
  const double on_threshold[2] = {0.0, -1.0};  // PC_i < s_i is strict
  EXPECT_EQ(rule.goes_left(tie, scratch), !kTieGoesRight);
  EXPECT_TRUE(rule.goes_left(both_left, scratch));
  EXPECT_FALSE(rule.goes_left(on_threshold, scratch));
}
