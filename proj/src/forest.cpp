#include "rpca/forest.hpp"

#include <limits>
#include <map>
#include <string>

#include "rpca/errors.hpp"
#include "rpca/parallel.hpp"

namespace rpca {

namespace {

void check_queries(const RPCAForest& forest, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != forest.dim()) {
    throw ParameterError("queries have " + std::to_string(cols) + " columns, forest expects " +
                         std::to_string(forest.dim()));
  }
}

double depth_term(const RPCATree& tree, const RPCATreeNode& leaf) {
  if (tree.max_depth() == 0) return 0.0;
  return 1.0 - static_cast<double>(leaf.depth) / static_cast<double>(tree.max_depth());
}

constexpr std::uint32_t kSkipNone = std::numeric_limits<std::uint32_t>::max();

// Mean distance from `query` to the leaf's training members, optionally
// skipping one training row.
double leaf_distance(const Matrix& training, const RPCATreeNode& leaf, const double* query,
                     std::uint32_t skip) {
  const Eigen::Index d = training.cols();
  const Eigen::Map<const Eigen::RowVectorXd> q(query, d);
  double total = 0.0;
  std::size_t count = 0;
  for (auto member : leaf.members) {
    if (member == skip) continue;
    total += (training.row(member) - q).norm();
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

struct Wanted {
  bool probability = true;
  bool distance = true;
};

ScoreReport accumulate(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries, Wanted wanted,
                       bool exclude_self, std::size_t workers) {
  check_queries(forest, queries.cols());
  const Eigen::Index m = queries.rows();
  const double trees = static_cast<double>(forest.size());
  ScoreReport report;
  report.probability = Vector::Zero(m);
  report.mean_distance = Vector::Zero(m);

  parallel_for(static_cast<std::size_t>(m), workers, [&](std::size_t i) {
    const double* q = queries.row(static_cast<Eigen::Index>(i)).data();
    const std::uint32_t skip = exclude_self ? static_cast<std::uint32_t>(i) : kSkipNone;
    double prob = 0.0;
    double dist = 0.0;
    for (const auto& tree : forest.trees()) {
      const auto& leaf = tree.node(tree.route(q));
      if (wanted.probability) prob += depth_term(tree, leaf);
      if (wanted.distance) dist += leaf_distance(forest.training(), leaf, q, skip);
    }
    report.probability[static_cast<Eigen::Index>(i)] = prob / trees;
    report.mean_distance[static_cast<Eigen::Index>(i)] = dist / trees;
  });

  report.score = report.probability.cwiseProduct(report.mean_distance);
  return report;
}

}  // namespace

RPCAForest::RPCAForest(std::shared_ptr<const Matrix> training, std::vector<RPCATree> trees,
                       ForestParams params)
    : training_(std::move(training)), trees_(std::move(trees)), params_(params) {
  if (!training_) throw ParameterError("forest needs training data");
  if (trees_.empty()) throw ParameterError("forest needs at least one tree");
  for (const auto& t : trees_) {
    if (t.dim() != dim() || t.n_train() != static_cast<std::size_t>(training_->rows())) {
      throw ParameterError("tree was not fitted on this training matrix");
    }
  }
  params_.n_trees = trees_.size();
}

RPCAForest RPCAForest::subset(const std::vector<std::size_t>& tree_ids) const {
  std::vector<RPCATree> picked;
  picked.reserve(tree_ids.size());
  for (auto id : tree_ids) picked.push_back(trees_.at(id));
  return RPCAForest(training_, std::move(picked), params_);
}

RPCAForest fit_forest(const Matrix& features, const ForestParams& params, std::size_t workers) {
  if (params.n_trees < 1) throw ParameterError("fit_forest: n_trees must be >= 1");
  if (features.rows() < 1 || features.cols() < 1) throw ValidationError("fit_forest: empty dataset");
  auto training = std::make_shared<const Matrix>(features);
  TreeParams tree_params{params.p, params.k, params.pca};

  std::vector<std::optional<RPCATree>> slots(params.n_trees);
  parallel_for(params.n_trees, workers, [&](std::size_t t) {
    Rng rng = make_rng(params.seed, t);
    slots[t] = fit_tree(*training, tree_params, rng);
  });

  std::vector<RPCATree> trees;
  trees.reserve(slots.size());
  for (auto& s : slots) trees.push_back(std::move(*s));
  return RPCAForest(std::move(training), std::move(trees), params);
}

Vector outlier_probability(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries,
                           std::size_t workers) {
  return accumulate(forest, queries, {true, false}, false, workers).probability;
}

Vector mean_leaf_distance(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries,
                          std::size_t workers) {
  return accumulate(forest, queries, {false, true}, false, workers).mean_distance;
}

ScoreReport score(const RPCAForest& forest, const Eigen::Ref<const Matrix>& queries, std::size_t workers) {
  return accumulate(forest, queries, {}, false, workers);
}

ScoreReport score_training(const RPCAForest& forest, LeafDistanceMode mode, std::size_t workers) {
  return accumulate(forest, forest.training(), {}, mode == LeafDistanceMode::kExclusive, workers);
}

std::vector<std::pair<std::size_t, std::size_t>> approx_neighbors(const RPCAForest& forest,
                                                                  const Eigen::Ref<const Vector>& query) {
  if (static_cast<std::size_t>(query.size()) != forest.dim()) {
    throw ParameterError("approx_neighbors: query has " + std::to_string(query.size()) +
                         " coordinates, forest expects " + std::to_string(forest.dim()));
  }
  std::map<std::size_t, std::size_t> counts;
  for (const auto& tree : forest.trees()) {
    for (auto member : tree.node(tree.route(query.data())).members) ++counts[member];
  }
  return {counts.begin(), counts.end()};
}

}  // namespace rpca
