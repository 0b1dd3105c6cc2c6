#include "rpca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpca/baselines.hpp"
#include "rpca/errors.hpp"

namespace rpca {

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ParameterError("roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(scores[i])) throw ParameterError("roc_auc: non-finite score");
    if (labels[i] > 1) throw ParameterError("roc_auc: labels must be 0 or 1");
    n_pos += labels[i];
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("roc_auc: need both outliers and inliers");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the average rank keeps tied ranks integral.
  double positive_rank_sum_x2 = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    const double rank_x2 = static_cast<double>(start + 1 + end);
    for (std::size_t i = start; i < end; ++i) {
      if (labels[order[i]]) positive_rank_sum_x2 += rank_x2;
    }
    start = end;
  }
  const double pos = static_cast<double>(n_pos);
  const double u = positive_rank_sum_x2 / 2.0 - pos * (pos + 1.0) / 2.0;
  return u / (pos * static_cast<double>(n_neg));
}

double roc_auc(const Vector& scores, const Labels& labels) {
  return roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                 std::span<const std::uint8_t>(labels));
}

void to_json(nlohmann::json& j, const EvaluationResult& r) {
  j = nlohmann::json{{"method_id", r.method_id}, {"dataset", r.dataset}, {"params", r.params},
                     {"seed", r.seed},           {"auc", r.auc},         {"n_pos", r.n_pos},
                     {"n_neg", r.n_neg}};
}

Method parse_method(const std::string& name) {
  if (name == "rpca_forest" || name == "rpca") return Method::kRpcaForest;
  if (name == "iforest") return Method::kIForest;
  if (name == "knn") return Method::kKnn;
  if (name == "knnw") return Method::kKnnw;
  throw ParameterError("unknown method '" + name + "' (expected rpca_forest, iforest, knn, knnw)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kRpcaForest: return "rpca_forest";
    case Method::kIForest: return "iforest";
    case Method::kKnn: return "knn";
    case Method::kKnnw: return "knnw";
  }
  return "unknown";
}

Vector fit_and_score(const Dataset& data, const MethodConfig& config, std::uint64_t seed) {
  switch (config.method) {
    case Method::kRpcaForest: {
      ForestParams params = config.forest;
      params.seed = seed;
      auto forest = fit_forest(data.features, params, config.workers);
      return score_training(forest, config.leaf_mode, config.workers).score;
    }
    case Method::kIForest: {
      auto model = fit_iforest(data.features, config.forest.n_trees, config.iforest_subsample, seed);
      return iforest_score(model, data.features, config.workers);
    }
    case Method::kKnn:
      return knn_outlier_score(data.features, {config.knn_k, KnnVariant::kKthDistance}, config.workers);
    case Method::kKnnw:
      return knn_outlier_score(data.features, {config.knn_k, KnnVariant::kSumOfDistances}, config.workers);
  }
  throw ParameterError("unsupported method");
}

namespace {

std::map<std::string, std::string> describe(const MethodConfig& config) {
  std::map<std::string, std::string> params;
  switch (config.method) {
    case Method::kRpcaForest:
      params["p"] = std::to_string(config.forest.p);
      params["k"] = std::to_string(config.forest.k);
      params["trees"] = std::to_string(config.forest.n_trees);
      params["oversampling"] = std::to_string(config.forest.pca.oversampling);
      params["power_iters"] = std::to_string(config.forest.pca.power_iters);
      if (config.leaf_mode == LeafDistanceMode::kExclusive) params["leaf_mode"] = "exclusive";
      break;
    case Method::kIForest:
      params["trees"] = std::to_string(config.forest.n_trees);
      params["subsample"] = std::to_string(config.iforest_subsample);
      break;
    case Method::kKnn:
    case Method::kKnnw:
      params["k"] = std::to_string(config.knn_k);
      break;
  }
  return params;
}

}  // namespace

EvaluationResult evaluate(const Dataset& data, const MethodConfig& config, std::uint64_t seed) {
  if (!data.labeled()) throw ValidationError("dataset '" + data.name + "' has no labels to evaluate against");
  EvaluationResult result;
  result.method_id = method_name(config.method);
  result.dataset = data.name;
  result.params = describe(config);
  result.seed = std::to_string(seed);
  result.auc = roc_auc(fit_and_score(data, config, seed), *data.labels);
  result.n_pos = data.outlier_count();
  result.n_neg = data.size() - result.n_pos;
  return result;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double population_std(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean = mean_of(values);
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(values.size()));
}

std::vector<CurvePoint> forest_size_curve(const Dataset& data, const MethodConfig& config,
                                          const std::vector<std::size_t>& sizes, std::size_t repeats,
                                          std::uint64_t seed) {
  if (!data.labeled()) throw ValidationError("forest_size_curve needs a labeled dataset");
  if (repeats < 1) throw ParameterError("forest_size_curve: repeats must be >= 1");
  if (sizes.empty()) throw ParameterError("forest_size_curve: sizes must be nonempty");
  if (config.method != Method::kRpcaForest && config.method != Method::kIForest) {
    throw ParameterError("forest_size_curve supports rpca_forest and iforest only");
  }
  const std::size_t largest = *std::max_element(sizes.begin(), sizes.end());
  if (largest < 1 || *std::min_element(sizes.begin(), sizes.end()) < 1) {
    throw ParameterError("forest_size_curve: sizes must be >= 1");
  }

  std::vector<CurvePoint> curve(sizes.size());
  for (std::size_t s = 0; s < sizes.size(); ++s) curve[s].size = sizes[s];

  std::vector<std::size_t> all(largest);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t r = 0; r < repeats; ++r) {
    const std::uint64_t run_seed = seed + r;
    std::optional<RPCAForest> forest;
    std::optional<IsolationForestModel> iforest;
    if (config.method == Method::kRpcaForest) {
      ForestParams params = config.forest;
      params.n_trees = largest;
      params.seed = run_seed;
      forest = fit_forest(data.features, params, config.workers);
    } else {
      iforest = fit_iforest(data.features, largest, config.iforest_subsample, run_seed);
    }

    for (std::size_t s = 0; s < sizes.size(); ++s) {
      Rng rng = make_rng(run_seed, 0x9e3779b9u + s);
      std::vector<std::size_t> picked;
      std::sample(all.begin(), all.end(), std::back_inserter(picked), sizes[s], rng);
      Vector scores;
      if (forest) {
        scores = score_training(forest->subset(picked), config.leaf_mode, config.workers).score;
      } else {
        IsolationForestModel part = *iforest;
        part.trees.clear();
        for (auto id : picked) part.trees.push_back(iforest->trees[id]);
        part.n_trees = picked.size();
        scores = iforest_score(part, data.features, config.workers);
      }
      curve[s].aucs.push_back(roc_auc(scores, *data.labels));
    }
  }
  for (auto& point : curve) {
    point.mean_auc = mean_of(point.aucs);
    point.std_auc = population_std(point.aucs);
  }
  return curve;
}

}  // namespace rpca
