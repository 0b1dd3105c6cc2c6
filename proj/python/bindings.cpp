#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rpca/baselines.hpp"
#include "rpca/errors.hpp"
#include "rpca/forest.hpp"
#include "rpca/metrics.hpp"
#include "rpca/randomized_pca.hpp"
#include "rpca/serialization.hpp"

namespace py = pybind11;
using namespace rpca;

namespace {

LeafDistanceMode parse_leaf_mode(const std::string& mode) {
  if (mode == "inclusive") return LeafDistanceMode::kInclusive;
  if (mode == "exclusive") return LeafDistanceMode::kExclusive;
  throw ParameterError("leaf_mode must be 'inclusive' or 'exclusive'");
}

KnnVariant parse_knn_variant(const std::string& variant) {
  if (variant == "kth") return KnnVariant::kKthDistance;
  if (variant == "sum") return KnnVariant::kSumOfDistances;
  throw ParameterError("variant must be 'kth' or 'sum'");
}

py::dict report_dict(const ScoreReport& report) {
  py::dict out;
  out["probability"] = report.probability;
  out["mean_distance"] = report.mean_distance;
  out["score"] = report.score;
  return out;
}

Labels to_labels(const std::vector<int>& raw) {
  Labels labels;
  labels.reserve(raw.size());
  for (int v : raw) {
    if (v != 0 && v != 1) throw ParameterError("labels must be 0 or 1");
    labels.push_back(static_cast<std::uint8_t>(v));
  }
  return labels;
}

// Fitted forest plus the parameters it was grown with.
class PyForest {
 public:
  PyForest(std::size_t n_trees, std::size_t p, std::size_t k, std::uint64_t seed, std::size_t oversampling,
           std::size_t power_iters) {
    params_.n_trees = n_trees;
    params_.p = p;
    params_.k = k;
    params_.seed = seed;
    params_.pca.oversampling = oversampling;
    params_.pca.power_iters = power_iters;
  }

  PyForest& fit(const Matrix& features, std::size_t workers) {
    py::gil_scoped_release release;
    forest_.emplace(fit_forest(features, params_, workers));
    return *this;
  }

  py::dict score(const Matrix& queries, std::size_t workers) const {
    ScoreReport report;
    {
      py::gil_scoped_release release;
      report = rpca::score(fitted(), queries, workers);
    }
    return report_dict(report);
  }

  py::dict score_training(const std::string& leaf_mode, std::size_t workers) const {
    const auto mode = parse_leaf_mode(leaf_mode);
    ScoreReport report;
    {
      py::gil_scoped_release release;
      report = rpca::score_training(fitted(), mode, workers);
    }
    return report_dict(report);
  }

  std::vector<std::pair<std::size_t, std::size_t>> neighbors(const Vector& query) const {
    return approx_neighbors(fitted(), query);
  }

  std::vector<std::uint32_t> max_depths() const {
    std::vector<std::uint32_t> depths;
    for (const auto& tree : fitted().trees()) depths.push_back(tree.max_depth());
    return depths;
  }

  void save(const std::filesystem::path& path) const { save_forest(path, fitted()); }

  static PyForest load(const std::filesystem::path& path, const Matrix& training) {
    auto forest = load_forest(path, std::make_shared<const Matrix>(training));
    const auto& p = forest.params();
    PyForest out(p.n_trees, p.p, p.k, p.seed, p.pca.oversampling, p.pca.power_iters);
    out.forest_.emplace(std::move(forest));
    return out;
  }

  const ForestParams& params() const { return params_; }
  bool is_fitted() const { return forest_.has_value(); }

 private:
  const RPCAForest& fitted() const {
    if (!forest_) throw ValidationError("forest is not fitted; call fit() first");
    return *forest_;
  }

  ForestParams params_;
  std::optional<RPCAForest> forest_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "RPCA forest outlier detection";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, std::optional<std::string> label_column, bool normalize) {
        CsvOptions options;
        options.normalize = normalize;
        if (label_column) {
          const auto& text = *label_column;
          const bool numeric = !text.empty() && text.find_first_not_of("0123456789") == std::string::npos;
          options.label_column = numeric ? ColumnRef(static_cast<std::size_t>(std::stoull(text))) : ColumnRef(text);
        }
        Dataset data = load_csv(path, options);
        py::dict out;
        out["features"] = data.features;
        out["labels"] = data.labels ? py::cast(std::vector<int>(data.labels->begin(), data.labels->end()))
                                    : py::none();
        out["name"] = data.name;
        out["feature_names"] = data.feature_names;
        return out;
      },
      py::arg("path"), py::arg("label_column") = py::none(), py::arg("normalize") = false,
      "Load a CSV file. Returns a dict with features, labels (or None), name and feature_names.");

  m.def(
      "randomized_pca",
      [](const Matrix& points, std::size_t p, std::uint64_t seed, std::size_t oversampling,
         std::size_t power_iters) {
        Rng rng = make_rng(seed);
        const auto model = fit_randomized_pca(points, p, {oversampling, power_iters}, rng);
        py::dict out;
        out["mean"] = model.mean;
        out["components"] = model.components;
        out["explained_variance"] = model.explained_variance;
        out["explained_variance_ratio"] = model.explained_variance_ratio;
        return out;
      },
      py::arg("points"), py::arg("p"), py::arg("seed") = 1, py::arg("oversampling") = 10,
      py::arg("power_iters") = 2);

  py::class_<PyForest>(m, "RPCAForest")
      .def(py::init<std::size_t, std::size_t, std::size_t, std::uint64_t, std::size_t, std::size_t>(),
           py::arg("n_trees") = 100, py::arg("p") = 1, py::arg("k") = 10, py::arg("seed") = 1,
           py::arg("oversampling") = 10, py::arg("power_iters") = 2)
      .def("fit", &PyForest::fit, py::arg("features"), py::arg("workers") = 1, py::return_value_policy::reference)
      .def("score", &PyForest::score, py::arg("queries"), py::arg("workers") = 1,
           "Dict of probability, mean_distance and score arrays for each query row.")
      .def("score_training", &PyForest::score_training, py::arg("leaf_mode") = "inclusive", py::arg("workers") = 1)
      .def("approx_neighbors", &PyForest::neighbors, py::arg("query"))
      .def("max_depths", &PyForest::max_depths)
      .def("save", &PyForest::save, py::arg("path"))
      .def_static("load", &PyForest::load, py::arg("path"), py::arg("training"))
      .def_property_readonly("fitted", &PyForest::is_fitted)
      .def_property_readonly("n_trees", [](const PyForest& f) { return f.params().n_trees; })
      .def_property_readonly("p", [](const PyForest& f) { return f.params().p; })
      .def_property_readonly("k", [](const PyForest& f) { return f.params().k; })
      .def_property_readonly("seed", [](const PyForest& f) { return f.params().seed; });

  m.def(
      "knn_outlier_score",
      [](const Matrix& features, std::size_t k, const std::string& variant, std::size_t workers) {
        return knn_outlier_score(features, {k, parse_knn_variant(variant)}, workers);
      },
      py::arg("features"), py::arg("k") = 10, py::arg("variant") = "kth", py::arg("workers") = 1);

  m.def(
      "iforest_score",
      [](const Matrix& features, std::size_t n_trees, std::size_t subsample, std::uint64_t seed,
         std::size_t workers) {
        return iforest_score(fit_iforest(features, n_trees, subsample, seed), features, workers);
      },
      py::arg("features"), py::arg("n_trees") = 100, py::arg("subsample") = 256, py::arg("seed") = 1,
      py::arg("workers") = 1, "Fit an isolation forest and score its training rows.");

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        const Labels converted = to_labels(labels);
        return roc_auc(std::span<const double>(scores), std::span<const std::uint8_t>(converted));
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "evaluate",
      [](const Matrix& features, const std::vector<int>& labels, const std::string& method, std::size_t n_trees,
         std::size_t p, std::size_t k, std::uint64_t seed, std::size_t workers) {
        Dataset data;
        data.features = features;
        data.labels = to_labels(labels);
        data.name = "array";
        data.validate();
        MethodConfig config;
        config.method = parse_method(method);
        config.forest.n_trees = n_trees;
        config.forest.p = p;
        config.forest.k = k;
        config.knn_k = k;
        config.workers = workers;
        return evaluate(data, config, seed).auc;
      },
      py::arg("features"), py::arg("labels"), py::arg("method") = "rpca_forest", py::arg("n_trees") = 100,
      py::arg("p") = 1, py::arg("k") = 10, py::arg("seed") = 1, py::arg("workers") = 1,
      "Fit `method` on the rows, score them and return the ROC AUC against `labels`.");
}
