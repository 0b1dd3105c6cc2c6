#include "rpca/rpca_tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "rpca/errors.hpp"

namespace rpca {

namespace {

bool vote_left(const double* coords, const SplitRule& rule) {
  if (rule.kind == SplitRule::Kind::kMedian) return coords[0] < rule.thresholds[0];
  std::size_t left = 0;
  const auto p = static_cast<std::size_t>(rule.thresholds.size());
  for (std::size_t i = 0; i < p; ++i) {
    if (coords[i] < rule.thresholds[static_cast<Eigen::Index>(i)]) ++left;
  }
  const std::size_t right = p - left;
  if (left == right) return !kTieGoesRight;
  return left > right;
}

bool all_rows_identical(const Matrix& features, const std::vector<std::uint32_t>& rows) {
  const auto first = features.row(rows.front());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (features.row(rows[i]) != first) return false;
  }
  return true;
}

// Threshold on the first component that splits the node as close to the
// middle as possible while leaving both sides nonempty.
std::optional<double> median_threshold(const Matrix& coords) {
  std::vector<double> values(static_cast<std::size_t>(coords.rows()));
  for (Eigen::Index i = 0; i < coords.rows(); ++i) values[static_cast<std::size_t>(i)] = coords(i, 0);
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  const std::size_t mid = m / 2;
  std::optional<std::size_t> best;
  for (std::size_t j = 1; j < m; ++j) {
    if (values[j - 1] < values[j]) {
      auto gap = [mid](std::size_t a) { return a > mid ? a - mid : mid - a; };
      if (!best || gap(j) < gap(*best)) best = j;
    }
  }
  if (!best) return std::nullopt;
  return values[*best];
}

bool models_equal(const PCAModel& a, const PCAModel& b) {
  return a.mean == b.mean && a.components == b.components &&
         a.explained_variance == b.explained_variance &&
         a.explained_variance_ratio == b.explained_variance_ratio;
}

}  // namespace

bool SplitRule::goes_left(const double* point, double* scratch) const {
  project_point(pca, point, scratch);
  return vote_left(scratch, *this);
}

RPCATree::RPCATree(std::vector<RPCATreeNode> nodes, TreeParams params, std::size_t dim,
                   std::size_t n_train)
    : nodes_(std::move(nodes)), params_(params), dim_(dim), n_train_(n_train) {
  if (nodes_.empty()) throw ParameterError("RPCATree needs at least one node");
  for (const auto& n : nodes_) {
    if (n.is_leaf()) {
      max_depth_ = std::max(max_depth_, n.depth);
    } else {
      if (!n.split) throw ParameterError("internal node without split rule");
      max_components_ = std::max(max_components_, n.split->pca.n_components());
    }
  }
}

std::vector<std::size_t> RPCATree::leaf_indices() const {
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) leaves.push_back(i);
  }
  return leaves;
}

std::size_t RPCATree::route(const Eigen::Ref<const Vector>& point) const {
  if (static_cast<std::size_t>(point.size()) != dim_) {
    throw ParameterError("route: query has " + std::to_string(point.size()) +
                         " coordinates, tree expects " + std::to_string(dim_));
  }
  return route(point.data());
}

std::size_t RPCATree::route(const double* point) const {
  std::array<double, 16> small{};
  std::vector<double> large;
  double* scratch = small.data();
  if (max_components_ > small.size()) {
    large.resize(max_components_);
    scratch = large.data();
  }
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const auto& n = nodes_[at];
    at = static_cast<std::size_t>(n.split->goes_left(point, scratch) ? n.left : n.right);
  }
  return at;
}

bool RPCATree::operator==(const RPCATree& other) const {
  if (dim_ != other.dim_ || n_train_ != other.n_train_ || nodes_.size() != other.nodes_.size() ||
      params_.p != other.params_.p || params_.k != other.params_.k) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& a = nodes_[i];
    const auto& b = other.nodes_[i];
    if (a.depth != b.depth || a.left != b.left || a.right != b.right || a.members != b.members ||
        a.degenerate != b.degenerate || a.split.has_value() != b.split.has_value()) {
      return false;
    }
    if (a.split && (a.split->kind != b.split->kind || a.split->thresholds != b.split->thresholds ||
                    !models_equal(a.split->pca, b.split->pca))) {
      return false;
    }
  }
  return true;
}

RPCATree fit_tree(const Matrix& features, const TreeParams& params, Rng& rng) {
  const auto n = static_cast<std::size_t>(features.rows());
  const auto d = static_cast<std::size_t>(features.cols());
  if (n == 0 || d == 0) throw ValidationError("fit_tree: empty dataset");
  if (params.p < 1) throw ParameterError("fit_tree: p must be >= 1");
  if (params.k < 1) throw ParameterError("fit_tree: k must be >= 1");

  std::vector<RPCATreeNode> nodes(1);
  std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> work;
  {
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    work.emplace_back(0, std::move(all));
  }

  auto make_leaf = [&](std::size_t at, std::vector<std::uint32_t> rows, bool degenerate) {
    nodes[at].members = std::move(rows);
    nodes[at].degenerate = degenerate;
  };

  Matrix subset;
  Matrix coords;
  while (!work.empty()) {
    auto [at, rows] = std::move(work.back());
    work.pop_back();
    const std::size_t m = rows.size();

    if (m <= params.k) {
      make_leaf(at, std::move(rows), false);
      continue;
    }
    if (all_rows_identical(features, rows)) {
      make_leaf(at, std::move(rows), true);
      continue;
    }
    const std::size_t p_eff = std::min({params.p, m - 1, d});
    if (p_eff < 1) {
      make_leaf(at, std::move(rows), true);
      continue;
    }

    subset.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < m; ++i) subset.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);

    SplitRule rule;
    rule.pca = fit_randomized_pca(subset, p_eff, params.pca, rng);
    coords = project(rule.pca, subset);

    const auto pe = static_cast<Eigen::Index>(p_eff);
    Vector centre = coords.colwise().mean().transpose();
    Vector spread(pe);
    for (Eigen::Index c = 0; c < pe; ++c) {
      spread[c] = std::sqrt((coords.col(c).array() - centre[c]).square().mean());
    }

    std::vector<std::uint8_t> left_side(m);
    auto assign = [&]() {
      std::size_t left_count = 0;
      for (std::size_t i = 0; i < m; ++i) {
        left_side[i] = vote_left(coords.row(static_cast<Eigen::Index>(i)).data(), rule) ? 1 : 0;
        left_count += left_side[i];
      }
      return left_count;
    };

    rule.thresholds.resize(pe);
    bool balanced = false;
    for (int attempt = 0; attempt <= kSplitRetries && !balanced; ++attempt) {
      for (Eigen::Index c = 0; c < pe; ++c) rule.thresholds[c] = sample_laplace(rng, centre[c], spread[c]);
      const std::size_t left_count = assign();
      balanced = left_count > 0 && left_count < m;
    }
    if (!balanced) {
      auto cut = median_threshold(coords);
      if (!cut) {
        make_leaf(at, std::move(rows), true);
        continue;
      }
      rule.kind = SplitRule::Kind::kMedian;
      rule.thresholds.setConstant(*cut);
      assign();
    }

    std::vector<std::uint32_t> left_rows;
    std::vector<std::uint32_t> right_rows;
    for (std::size_t i = 0; i < m; ++i) (left_side[i] ? left_rows : right_rows).push_back(rows[i]);

    const auto depth = nodes[at].depth + 1;
    const auto left_at = nodes.size();
    nodes.emplace_back().depth = depth;
    nodes.emplace_back().depth = depth;
    nodes[at].left = static_cast<std::int32_t>(left_at);
    nodes[at].right = static_cast<std::int32_t>(left_at + 1);
    nodes[at].split = std::move(rule);
    // Right pushed first so the left subtree is expanded first.
    work.emplace_back(left_at + 1, std::move(right_rows));
    work.emplace_back(left_at, std::move(left_rows));
  }

  return RPCATree(std::move(nodes), params, d, n);
}

}  // namespace rpca
