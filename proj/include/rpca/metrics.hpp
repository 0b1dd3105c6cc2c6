#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "rpca/dataset.hpp"
#include "rpca/forest.hpp"

namespace rpca {

/// Area under the ROC curve for "higher score = outlier": the Mann-Whitney
/// probability that a random outlier outscores a random inlier, ties
/// counting one half (average ranks). Throws UndefinedMetricError when
/// either class is absent and ParameterError on non-finite scores or a
/// length mismatch.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);
double roc_auc(const Vector& scores, const Labels& labels);

struct EvaluationResult {
  std::string method_id;
  std::string dataset;
  std::map<std::string, std::string> params;
  std::string seed;  // integer seed, or "mean" for a summary row
  double auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

void to_json(nlohmann::json& j, const EvaluationResult& r);

enum class Method { kRpcaForest, kIForest, kKnn, kKnnw };

Method parse_method(const std::string& name);
std::string method_name(Method method);

/// Settings shared by every method an experiment can run.
struct MethodConfig {
  Method method = Method::kRpcaForest;
  ForestParams forest;            // rpca_forest (n_trees also used by iforest)
  std::size_t knn_k = 10;         // knn / knnw
  std::size_t iforest_subsample = 256;
  LeafDistanceMode leaf_mode = LeafDistanceMode::kInclusive;
  std::size_t workers = 1;
};

/// Fits `config.method` on `data` with `seed` and returns the training-set
/// outlier scores.
Vector fit_and_score(const Dataset& data, const MethodConfig& config, std::uint64_t seed);

/// Fits, scores and evaluates one run. Throws ValidationError if `data` is
/// unlabeled.
EvaluationResult evaluate(const Dataset& data, const MethodConfig& config, std::uint64_t seed);

struct CurvePoint {
  std::size_t size = 0;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // population standard deviation over repeats
  std::vector<double> aucs;
};

/// AUC as a function of ensemble size. Each repeat r fits max(sizes) trees
/// from seed + r, then for every size evaluates a uniformly drawn subset of
/// that many trees (kept in fitted order). Only kRpcaForest and kIForest are
/// accepted.
std::vector<CurvePoint> forest_size_curve(const Dataset& data, const MethodConfig& config,
                                          const std::vector<std::size_t>& sizes, std::size_t repeats,
                                          std::uint64_t seed);

double mean_of(std::span<const double> values);
double population_std(std::span<const double> values);

}  // namespace rpca
