#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "rpca/rpca_tree.hpp"

namespace rpca {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t p = 1;
  std::size_t k = 10;
  std::uint64_t seed = 1;
  RandomizedPcaOptions pca;
};

/// Which training points enter the per-leaf mean distance when scoring the
/// training set itself. kInclusive counts the point's own zero distance;
/// kExclusive drops it (a leaf holding only the point then contributes 0).
enum class LeafDistanceMode { kInclusive, kExclusive };

/// Per-query outlier evidence. score = probability * mean_distance.
struct ScoreReport {
  Vector probability;
  Vector mean_distance;
  Vector score;
};

/// Ensemble of RPCA trees sharing one immutable copy of the training matrix.
class RPCAForest {
 public:
  RPCAForest(std::shared_ptr<const Matrix> training, std::vector<RPCATree> trees, ForestParams params);

  const Matrix& training() const { return *training_; }
  std::shared_ptr<const Matrix> training_ptr() const { return training_; }
  const std::vector<RPCATree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  std::size_t size() const { return trees_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(training_->cols()); }

  /// Forest made of the listed trees (in the given order), same training data.
  RPCAForest subset(const std::vector<std::size_t>& tree_ids) const;

 private:
  std::shared_ptr<const Matrix> training_;
  std::vector<RPCATree> trees_;
  ForestParams params_;
};

/// Tree t is grown from make_rng(params.seed, t), so the result does not
/// depend on `workers` (0 = hardware concurrency).
RPCAForest fit_forest(const Matrix& features, const ForestParams& params, std::size_t workers = 1);

/// Mean over trees of 1 - depth(leaf)/max_depth(tree). A single-leaf tree
/// contributes 0.
Vector outlier_probability(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries,
                           std::size_t workers = 1);

/// Mean over trees of the average Euclidean distance from the query to the
/// training points of its leaf.
Vector mean_leaf_distance(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries,
                          std::size_t workers = 1);

ScoreReport score(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries,
                  std::size_t workers = 1);

/// Scores every training row. With kInclusive this equals
/// score(forest, forest.training()).
ScoreReport score_training(const RPCAForest& forest, LeafDistanceMode mode = LeafDistanceMode::kInclusive,
                           std::size_t workers = 1);

/// Training indices sharing a leaf with `query` in any tree, ascending, with
/// the number of trees in which each one does.
std::vector<std::pair<std::size_t, std::size_t>> approx_neighbors(const RPCAForest& forest,
                                                                  const Eigen::Ref<const Vector>& query);

}  // namespace rpca
