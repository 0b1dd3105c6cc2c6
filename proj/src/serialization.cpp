#include "rpca/serialization.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "rpca/errors.hpp"

namespace rpca {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "rpca-forest";

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ValidationError("matrix data length mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace

std::uint64_t training_checksum(const Matrix& features) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= p[i];
      hash *= 1099511628211ull;
    }
  };
  const std::int64_t shape[2] = {features.rows(), features.cols()};
  mix(shape, sizeof(shape));
  mix(features.data(), sizeof(double) * static_cast<std::size_t>(features.size()));
  return hash;
}

json tree_to_json(const RPCATree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    json node{{"depth", n.depth}};
    if (n.is_leaf()) {
      node["members"] = n.members;
      if (n.degenerate) node["degenerate"] = true;
    } else {
      const auto& s = *n.split;
      node["left"] = n.left;
      node["right"] = n.right;
      node["rule"] = s.kind == SplitRule::Kind::kMedian ? "median" : "vote";
      node["thresholds"] = vector_to_json(s.thresholds);
      node["mean"] = vector_to_json(s.pca.mean);
      node["components"] = matrix_to_json(s.pca.components);
      node["explained_variance"] = vector_to_json(s.pca.explained_variance);
      node["explained_variance_ratio"] = vector_to_json(s.pca.explained_variance_ratio);
    }
    nodes.push_back(std::move(node));
  }
  const auto& p = tree.params();
  return {{"dim", tree.dim()},
          {"n_train", tree.n_train()},
          {"p", p.p},
          {"k", p.k},
          {"oversampling", p.pca.oversampling},
          {"power_iters", p.pca.power_iters},
          {"nodes", std::move(nodes)}};
}

RPCATree tree_from_json(const json& doc) {
  TreeParams params;
  params.p = doc.at("p").get<std::size_t>();
  params.k = doc.at("k").get<std::size_t>();
  params.pca.oversampling = doc.at("oversampling").get<std::size_t>();
  params.pca.power_iters = doc.at("power_iters").get<std::size_t>();
  const auto dim = doc.at("dim").get<std::size_t>();
  const auto n_train = doc.at("n_train").get<std::size_t>();

  std::vector<RPCATreeNode> nodes;
  for (const auto& j : doc.at("nodes")) {
    RPCATreeNode n;
    n.depth = j.at("depth").get<std::uint32_t>();
    if (j.contains("members")) {
      n.members = j.at("members").get<std::vector<std::uint32_t>>();
      n.degenerate = j.value("degenerate", false);
    } else {
      n.left = j.at("left").get<std::int32_t>();
      n.right = j.at("right").get<std::int32_t>();
      SplitRule rule;
      rule.kind = j.at("rule").get<std::string>() == "median" ? SplitRule::Kind::kMedian
                                                              : SplitRule::Kind::kMajorityVote;
      rule.thresholds = vector_from_json(j.at("thresholds"));
      rule.pca.mean = vector_from_json(j.at("mean"));
      rule.pca.components = matrix_from_json(j.at("components"));
      rule.pca.explained_variance = vector_from_json(j.at("explained_variance"));
      rule.pca.explained_variance_ratio = vector_from_json(j.at("explained_variance_ratio"));
      if (rule.pca.dim() != dim || static_cast<std::size_t>(rule.pca.components.cols()) != dim ||
          rule.thresholds.size() != rule.pca.components.rows()) {
        throw ValidationError("split rule shape does not match tree dimension");
      }
      n.split = std::move(rule);
    }
    nodes.push_back(std::move(n));
  }
  for (const auto& n : nodes) {
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= nodes.size() ||
                         static_cast<std::size_t>(n.right) >= nodes.size())) {
      throw ValidationError("child reference out of range");
    }
    for (auto m : n.members) {
      if (m >= n_train) throw ValidationError("leaf member index out of range");
    }
  }
  return RPCATree(std::move(nodes), params, dim, n_train);
}

json forest_to_json(const RPCAForest& forest) {
  json trees = json::array();
  for (const auto& t : forest.trees()) trees.push_back(tree_to_json(t));
  const auto& p = forest.params();
  return {{"format", kFormatName},
          {"version", kForestFormatVersion},
          {"params",
           {{"n_trees", p.n_trees},
            {"p", p.p},
            {"k", p.k},
            {"seed", p.seed},
            {"oversampling", p.pca.oversampling},
            {"power_iters", p.pca.power_iters}}},
          {"training",
           {{"rows", forest.training().rows()},
            {"cols", forest.training().cols()},
            {"checksum", training_checksum(forest.training())}}},
          {"trees", std::move(trees)}};
}

RPCAForest forest_from_json(const json& doc, std::shared_ptr<const Matrix> training) {
  if (doc.value("format", "") != kFormatName) throw ValidationError("not a forest document");
  const int version = doc.at("version").get<int>();
  if (version != kForestFormatVersion) {
    throw ValidationError("unsupported forest format version " + std::to_string(version));
  }
  const auto& info = doc.at("training");
  if (!training || info.at("rows").get<Eigen::Index>() != training->rows() ||
      info.at("cols").get<Eigen::Index>() != training->cols() ||
      info.at("checksum").get<std::uint64_t>() != training_checksum(*training)) {
    throw ValidationError("training data does not match the data this forest was fitted on");
  }
  const auto& pj = doc.at("params");
  ForestParams params;
  params.n_trees = pj.at("n_trees").get<std::size_t>();
  params.p = pj.at("p").get<std::size_t>();
  params.k = pj.at("k").get<std::size_t>();
  params.seed = pj.at("seed").get<std::uint64_t>();
  params.pca.oversampling = pj.at("oversampling").get<std::size_t>();
  params.pca.power_iters = pj.at("power_iters").get<std::size_t>();

  std::vector<RPCATree> trees;
  for (const auto& t : doc.at("trees")) trees.push_back(tree_from_json(t));
  return RPCAForest(std::move(training), std::move(trees), params);
}

void save_forest(const std::filesystem::path& path, const RPCAForest& forest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << forest_to_json(forest).dump();
  if (!out) throw IoError("write failed: " + path.string());
}

RPCAForest load_forest(const std::filesystem::path& path, std::shared_ptr<const Matrix> training) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return forest_from_json(doc, std::move(training));
}

}  // namespace rpca
