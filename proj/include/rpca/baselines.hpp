#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rpca/dataset.hpp"

namespace rpca {

enum class KnnVariant { kKthDistance, kSumOfDistances };

struct KnnScoreConfig {
  std::size_t k = 10;
  KnnVariant variant = KnnVariant::kKthDistance;
};

/// Exact brute-force KNN outlier score over the rows of `features`, each
/// point excluded from its own neighbour set. kKthDistance is the distance
/// to the k-th neighbour, kSumOfDistances the sum over the k nearest.
/// Throws ParameterError unless 1 <= k < n.
Vector knn_outlier_score(const Matrix& features, const KnnScoreConfig& config, std::size_t workers = 1);

/// Average path length of an unsuccessful binary-search-tree lookup among n
/// keys: 2 H(n-1) - 2 (n-1)/n, with c(1) = 0 and c(2) = 1.
double average_path_length(std::size_t n);

struct IsolationNode {
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t feature = 0;
  double cut = 0.0;
  std::uint32_t size = 0;    // training points reaching an external node
  bool truncated = false;    // external node stopped by the height limit

  bool is_leaf() const { return left < 0; }
};

struct IsolationTree {
  std::vector<IsolationNode> nodes;  // index 0 is the root
};

struct IsolationForestModel {
  std::vector<IsolationTree> trees;
  std::size_t subsample_size = 0;
  std::size_t n_trees = 0;
  std::size_t dim = 0;
};

/// Isolation forest: each tree is grown on a subsample drawn without
/// replacement, cutting a uniformly chosen non-constant feature at a uniform
/// point between its node min and max, until nodes are singletons, all
/// points coincide, or the height limit ceil(log2(subsample_size)) is hit.
/// subsample_size above n is clamped to n.
IsolationForestModel fit_iforest(const Matrix& features, std::size_t n_trees, std::size_t subsample_size,
                                 std::uint64_t seed);

/// Path length of `point` in one tree: edges walked plus c(size) for the
/// external node reached. A tree that is a single node returns 0.
double path_length(const IsolationTree& tree, const double* point);

/// 2^(-E[h] / c(subsample_size)); higher is more anomalous.
Vector iforest_score(const IsolationForestModel& model, const Eigen::Ref<const Matrix>& queries,
                     std::size_t workers = 1);

}  // namespace rpca
