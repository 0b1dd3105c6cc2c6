#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rpca/randomized_pca.hpp"

namespace rpca {

/// A point with more left votes than right votes goes left; ties go right.
inline constexpr bool kTieGoesRight = true;

/// Fresh Laplace draws attempted before falling back to a median split.
inline constexpr int kSplitRetries = 3;

/// Per-node projection plus one threshold per component.
///
/// Majority rule: each component votes left when the projected coordinate is
/// below its threshold. Median rule (degenerate fallback): only component 0
/// is consulted, left when below thresholds[0].
struct SplitRule {
  enum class Kind : std::uint8_t { kMajorityVote, kMedian };

  PCAModel pca;
  Vector thresholds;
  Kind kind = Kind::kMajorityVote;

  /// True when `point` (length d) belongs to the left child. `scratch` must
  /// hold at least pca.n_components() doubles.
  bool goes_left(const double* point, double* scratch) const;
};

struct RPCATreeNode {
  static constexpr std::int32_t kNone = -1;

  std::uint32_t depth = 0;
  std::int32_t left = kNone;
  std::int32_t right = kNone;
  std::optional<SplitRule> split;         // internal nodes only
  std::vector<std::uint32_t> members;     // leaf nodes only, training row indices
  bool degenerate = false;                // leaf kept above capacity (identical points)

  bool is_leaf() const { return left == kNone; }
};

struct TreeParams {
  std::size_t p = 1;
  std::size_t k = 10;
  RandomizedPcaOptions pca;
};

/// Nodes are stored flat; index 0 is the root. Depth is counted in edges.
class RPCATree {
 public:
  RPCATree() = default;
  RPCATree(std::vector<RPCATreeNode> nodes, TreeParams params, std::size_t dim,
           std::size_t n_train);

  const std::vector<RPCATreeNode>& nodes() const { return nodes_; }
  const RPCATreeNode& node(std::size_t i) const { return nodes_.at(i); }
  const TreeParams& params() const { return params_; }
  std::size_t dim() const { return dim_; }
  std::size_t n_train() const { return n_train_; }
  std::uint32_t max_depth() const { return max_depth_; }

  std::vector<std::size_t> leaf_indices() const;

  /// Leaf reached by `point`; throws ParameterError on a length mismatch.
  std::size_t route(const Eigen::Ref<const Vector>& point) const;
  /// Unchecked variant for hot loops: `point` must have dim() entries.
  std::size_t route(const double* point) const;

  bool operator==(const RPCATree& other) const;

 private:
  std::vector<RPCATreeNode> nodes_;
  TreeParams params_;
  std::size_t dim_ = 0;
  std::size_t n_train_ = 0;
  std::uint32_t max_depth_ = 0;
  std::size_t max_components_ = 0;
};

/// Grows one tree over all rows of `features`.
///
/// Nodes with at most k points become leaves. Otherwise the node's points are
/// projected onto p' = min(p, m - 1, d) randomized principal components,
/// one Laplace(mean, std) threshold is drawn per component, and each point
/// moves to the side holding the majority of its component votes. A split
/// that leaves one side empty is redrawn up to kSplitRetries times, then
/// replaced by a median cut on the first component. Nodes whose points are
/// all identical become leaves flagged `degenerate`.
///
/// Throws ValidationError on an empty matrix and ParameterError if p or k
/// is zero.
RPCATree fit_tree(const Matrix& features, const TreeParams& params, Rng& rng);

}  // namespace rpca
