#include "rpca/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rpca/errors.hpp"
#include "rpca/parallel.hpp"
#include "rpca/random.hpp"

namespace rpca {

Vector knn_outlier_score(const Matrix& features, const KnnScoreConfig& config, std::size_t workers) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (config.k < 1 || config.k >= n) {
    throw ParameterError("knn_outlier_score: k = " + std::to_string(config.k) + " must lie in [1, " +
                         std::to_string(n) + ")");
  }
  Vector scores(static_cast<Eigen::Index>(n));
  parallel_for(n, workers, [&](std::size_t i) {
    std::vector<double> dist;
    dist.reserve(n - 1);
    const auto row = features.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.push_back((features.row(static_cast<Eigen::Index>(j)) - row).norm());
    }
    const auto kth = dist.begin() + static_cast<std::ptrdiff_t>(config.k);
    std::partial_sort(dist.begin(), kth, dist.end());
    scores[static_cast<Eigen::Index>(i)] = config.variant == KnnVariant::kKthDistance
                                               ? *(kth - 1)
                                               : std::accumulate(dist.begin(), kth, 0.0);
  });
  return scores;
}

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  double harmonic = 0.0;
  for (std::size_t i = 1; i < n; ++i) harmonic += 1.0 / static_cast<double>(i);
  const double m = static_cast<double>(n);
  return 2.0 * harmonic - 2.0 * (m - 1.0) / m;
}

namespace {

IsolationTree grow_isolation_tree(const Matrix& features, std::vector<std::uint32_t> rows,
                                  std::uint32_t height_limit, Rng& rng) {
  IsolationTree tree;
  tree.nodes.emplace_back();
  struct Pending {
    std::size_t at;
    std::uint32_t depth;
    std::vector<std::uint32_t> rows;
  };
  std::vector<Pending> work;
  work.push_back({0, 0, std::move(rows)});
  const auto d = static_cast<std::size_t>(features.cols());
  std::vector<double> lo(d), hi(d);
  std::vector<std::uint32_t> splittable;

  while (!work.empty()) {
    Pending job = std::move(work.back());
    work.pop_back();
    auto& node = tree.nodes[job.at];
    node.size = static_cast<std::uint32_t>(job.rows.size());
    if (job.rows.size() <= 1) continue;
    if (job.depth >= height_limit) {
      node.truncated = true;
      continue;
    }

    std::fill(lo.begin(), lo.end(), std::numeric_limits<double>::infinity());
    std::fill(hi.begin(), hi.end(), -std::numeric_limits<double>::infinity());
    for (auto r : job.rows) {
      for (std::size_t c = 0; c < d; ++c) {
        const double v = features(r, static_cast<Eigen::Index>(c));
        lo[c] = std::min(lo[c], v);
        hi[c] = std::max(hi[c], v);
      }
    }
    splittable.clear();
    for (std::size_t c = 0; c < d; ++c) {
      if (lo[c] < hi[c]) splittable.push_back(static_cast<std::uint32_t>(c));
    }
    if (splittable.empty()) continue;  // coincident points

    std::uniform_int_distribution<std::size_t> pick(0, splittable.size() - 1);
    const auto feature = splittable[pick(rng)];
    std::uniform_real_distribution<double> where(lo[feature], hi[feature]);
    double cut = where(rng);
    if (cut <= lo[feature]) cut = std::nextafter(lo[feature], hi[feature]);

    std::vector<std::uint32_t> left_rows, right_rows;
    for (auto r : job.rows) {
      (features(r, static_cast<Eigen::Index>(feature)) < cut ? left_rows : right_rows).push_back(r);
    }
    const auto left_at = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& parent = tree.nodes[job.at];
    parent.feature = feature;
    parent.cut = cut;
    parent.left = static_cast<std::int32_t>(left_at);
    parent.right = static_cast<std::int32_t>(left_at + 1);
    work.push_back({left_at + 1, job.depth + 1, std::move(right_rows)});
    work.push_back({left_at, job.depth + 1, std::move(left_rows)});
  }
  return tree;
}

}  // namespace

IsolationForestModel fit_iforest(const Matrix& features, std::size_t n_trees, std::size_t subsample_size,
                                 std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (n_trees < 1) throw ParameterError("fit_iforest: n_trees must be >= 1");
  if (subsample_size < 2) throw ParameterError("fit_iforest: subsample_size must be >= 2");
  if (n < 1 || features.cols() < 1) throw ValidationError("fit_iforest: empty dataset");

  IsolationForestModel model;
  model.subsample_size = std::min(subsample_size, n);
  model.n_trees = n_trees;
  model.dim = static_cast<std::size_t>(features.cols());
  const auto height_limit =
      static_cast<std::uint32_t>(std::ceil(std::log2(static_cast<double>(model.subsample_size))));

  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  model.trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng = make_rng(seed, t);
    std::vector<std::uint32_t> sample;
    sample.reserve(model.subsample_size);
    std::sample(all.begin(), all.end(), std::back_inserter(sample), model.subsample_size, rng);
    model.trees.push_back(grow_isolation_tree(features, std::move(sample), height_limit, rng));
  }
  return model;
}

double path_length(const IsolationTree& tree, const double* point) {
  std::size_t at = 0;
  double depth = 0.0;
  while (!tree.nodes[at].is_leaf()) {
    const auto& node = tree.nodes[at];
    at = static_cast<std::size_t>(point[node.feature] < node.cut ? node.left : node.right);
    depth += 1.0;
  }
  // A tree that never split holds no information; every query gets 0.
  if (at == 0) return 0.0;
  return depth + average_path_length(tree.nodes[at].size);
}

Vector iforest_score(const IsolationForestModel& model, const Eigen::Ref<const Matrix>& queries,
                     std::size_t workers) {
  if (static_cast<std::size_t>(queries.cols()) != model.dim) {
    throw ParameterError("iforest_score: queries have " + std::to_string(queries.cols()) +
                         " columns, model expects " + std::to_string(model.dim));
  }
  if (model.trees.empty()) throw ParameterError("iforest_score: empty model");
  const double norm = average_path_length(model.subsample_size);
  Vector scores(queries.rows());
  parallel_for(static_cast<std::size_t>(queries.rows()), workers, [&](std::size_t i) {
    const double* q = queries.row(static_cast<Eigen::Index>(i)).data();
    double total = 0.0;
    for (const auto& tree : model.trees) total += path_length(tree, q);
    const double mean = total / static_cast<double>(model.trees.size());
    scores[static_cast<Eigen::Index>(i)] = std::exp2(-mean / norm);
  });
  return scores;
}

}  // namespace rpca
