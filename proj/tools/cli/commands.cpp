#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rpca/baselines.hpp"
#include "rpca/errors.hpp"
#include "rpca/randomized_pca.hpp"
#include "rpca/serialization.hpp"

namespace rpca::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::string param_or_blank(const EvaluationResult& r, const std::string& key) {
  auto it = r.params.find(key);
  return it == r.params.end() ? "" : it->second;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) {
    part.erase(0, part.find_first_not_of(" \t"));
    part.erase(part.find_last_not_of(" \t") + 1);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::uint64_t parse_unsigned(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw ParameterError("expected a non-negative integer, got '" + text + "'");
  }
  if (used != text.size()) throw ParameterError("expected a non-negative integer, got '" + text + "'");
  return v;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Output stream owned for the duration of one command.
class Sink {
 public:
  explicit Sink(const std::optional<std::filesystem::path>& path) {
    if (path) {
      file_.open(*path);
      if (!file_) throw IoError("cannot write " + path->string());
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish(const std::optional<std::filesystem::path>& path) {
    stream().flush();
    if (!stream()) throw IoError("write failed" + (path ? ": " + path->string() : std::string()));
  }

 private:
  std::ofstream file_;
};

void summarize(std::ostream& err, const std::vector<EvaluationResult>& rows) {
  for (const auto& r : rows) {
    if (r.seed == "mean") {
      err << r.method_id << " on " << r.dataset << ": mean AUC " << fmt(r.auc) << "\n";
    }
  }
}

}  // namespace

Dataset load_dataset(const RunConfig& config) {
  if (!config.dataset) throw ValidationError("--dataset is required for '" + config.command + "'");
  CsvOptions options;
  options.normalize = config.normalize;
  options.name = config.dataset_name;
  if (config.label_column) {
    const auto& c = *config.label_column;
    bool numeric = !c.empty() && std::all_of(c.begin(), c.end(), [](unsigned char ch) { return std::isdigit(ch); });
    if (numeric) {
      options.label_column = static_cast<std::size_t>(std::stoull(c));
    } else {
      options.label_column = c;
    }
  }
  return load_csv(*config.dataset, options);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(text, ',')) {
    auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(parse_unsigned(part));
      continue;
    }
    const auto lo = parse_unsigned(part.substr(0, dash));
    const auto hi = parse_unsigned(part.substr(dash + 1));
    if (hi < lo) throw ParameterError("empty seed range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ParameterError("seed list is empty");
  return seeds;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> values;
  for (auto v : parse_seed_list(text)) values.push_back(static_cast<std::size_t>(v));
  return values;
}

std::vector<EvaluationResult> run_eval(const RunConfig& config, const Dataset& data) {
  if (!data.labeled()) throw ValidationError("eval needs a labeled dataset");
  if (config.seeds.empty()) throw ParameterError("eval needs at least one seed");
  std::vector<EvaluationResult> rows;
  std::vector<double> aucs;
  for (auto seed : config.seeds) {
    rows.push_back(evaluate(data, config.method, seed));
    aucs.push_back(rows.back().auc);
  }
  EvaluationResult summary = rows.front();
  summary.seed = "mean";
  summary.auc = mean_of(aucs);
  rows.push_back(summary);
  return rows;
}

std::vector<EvaluationResult> run_sweep(const RunConfig& config, const Dataset& data) {
  if (!data.labeled()) throw ValidationError("sweep needs a labeled dataset");
  if (config.p_grid.empty() || config.k_grid.empty()) throw ParameterError("sweep grid is empty");
  std::vector<EvaluationResult> rows;
  for (auto p : config.p_grid) {
    for (auto k : config.k_grid) {
      MethodConfig method = config.method;
      method.method = Method::kRpcaForest;
      method.forest.p = p;
      method.forest.k = k;
      for (auto seed : config.seeds) rows.push_back(evaluate(data, method, seed));
    }
  }
  return rows;
}

VarianceRow explained_variance_row(const RunConfig& config, const Dataset& data) {
  if (config.p_grid.empty()) throw ParameterError("sweep grid is empty");
  const std::size_t cap = std::min(data.size(), data.dim());
  VarianceRow row;
  row.dataset = data.name;
  row.p_low = std::min(*std::min_element(config.p_grid.begin(), config.p_grid.end()), cap);
  row.p_high = std::min(*std::max_element(config.p_grid.begin(), config.p_grid.end()), cap);
  Rng rng = make_rng(config.seeds.empty() ? kDefaultSeed : config.seeds.front(), 0xe7a1u);
  Vector cumulative = cumulative_explained_variance(data.features, row.p_high, config.method.forest.pca, rng);
  row.cumulative_low = cumulative[static_cast<Eigen::Index>(row.p_low - 1)];
  row.cumulative_high = cumulative[static_cast<Eigen::Index>(row.p_high - 1)];
  row.gap = std::abs(row.cumulative_high - row.cumulative_low);
  return row;
}

std::vector<CurvePoint> run_curve(const RunConfig& config, const Dataset& data) {
  std::vector<std::size_t> sizes = config.sizes;
  if (sizes.empty()) sizes = {1, 2, 5, 10, 20, 50, 100};
  const std::uint64_t seed = config.seeds.empty() ? kDefaultSeed : config.seeds.front();
  return forest_size_curve(data, config.method, sizes, config.repeats, seed);
}

std::vector<BenchRow> run_bench(const RunConfig& config) {
  if (config.sizes.empty()) throw ValidationError("bench needs a nonempty list of dataset sizes");
  if (config.bench_runs < 1) throw ParameterError("bench needs at least one run");
  const std::uint64_t seed = config.seeds.empty() ? kDefaultSeed : config.seeds.front();
  std::vector<BenchRow> rows;
  for (auto n : config.sizes) {
    Dataset data = generate_synthetic(n, 0, config.dim, 8.0, seed);
    BenchRow row;
    row.n = n;
    row.d = config.dim;
    row.trees = config.method.forest.n_trees;
    std::vector<double> rpca_times, knn_times;
    for (std::size_t run = 0; run < config.bench_runs; ++run) {
      ForestParams params = config.method.forest;
      params.seed = seed;
      auto start = std::chrono::steady_clock::now();
      auto forest = fit_forest(data.features, params, config.method.workers);
      auto report = score_training(forest, config.method.leaf_mode, config.method.workers);
      rpca_times.push_back(elapsed_seconds(start));
      row.rpca_score_mean = report.score.mean();

      start = std::chrono::steady_clock::now();
      auto knn = knn_outlier_score(data.features, {config.method.knn_k, KnnVariant::kKthDistance},
                                   config.method.workers);
      knn_times.push_back(elapsed_seconds(start));
      row.knn_score_mean = knn.mean();
    }
    row.rpca_seconds = median(rpca_times);
    row.knn_seconds = median(knn_times);
    rows.push_back(row);
  }
  return rows;
}

void write_eval(std::ostream& out, const std::vector<EvaluationResult>& rows, Format format) {
  if (format == Format::kJson) {
    out << json(rows).dump(2) << "\n";
    return;
  }
  out << "method,dataset,p,k,trees,seed,auc\n";
  for (const auto& r : rows) {
    out << r.method_id << ',' << r.dataset << ',' << param_or_blank(r, "p") << ',' << param_or_blank(r, "k")
        << ',' << param_or_blank(r, "trees") << ',' << r.seed << ',' << fmt(r.auc) << '\n';
  }
}

void write_curve(std::ostream& out, const std::string& method, const std::string& dataset,
                 const std::vector<CurvePoint>& curve, Format format) {
  if (format == Format::kJson) {
    json doc = json::array();
    for (const auto& c : curve) {
      doc.push_back({{"method", method}, {"dataset", dataset}, {"size", c.size},
                     {"mean_auc", c.mean_auc}, {"std_auc", c.std_auc}, {"aucs", c.aucs}});
    }
    out << doc.dump(2) << "\n";
    return;
  }
  out << "method,dataset,size,mean_auc,std_auc\n";
  for (const auto& c : curve) {
    out << method << ',' << dataset << ',' << c.size << ',' << fmt(c.mean_auc) << ',' << fmt(c.std_auc) << '\n';
  }
}

void write_bench(std::ostream& out, const std::vector<BenchRow>& rows, Format format) {
  if (format == Format::kJson) {
    json doc = json::array();
    for (const auto& r : rows) {
      doc.push_back({{"n", r.n}, {"d", r.d}, {"trees", r.trees}, {"rpca_seconds", r.rpca_seconds},
                     {"knn_seconds", r.knn_seconds}, {"rpca_score_mean", r.rpca_score_mean},
                     {"knn_score_mean", r.knn_score_mean}});
    }
    out << doc.dump(2) << "\n";
    return;
  }
  out << "n,d,trees,rpca_seconds,knn_seconds,rpca_score_mean,knn_score_mean\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << r.trees << ',' << fmt(r.rpca_seconds) << ',' << fmt(r.knn_seconds) << ','
        << fmt(r.rpca_score_mean) << ',' << fmt(r.knn_score_mean) << '\n';
  }
}

void write_variance(std::ostream& out, const std::vector<VarianceRow>& rows, Format format) {
  if (format == Format::kJson) {
    json doc = json::array();
    for (const auto& r : rows) {
      doc.push_back({{"dataset", r.dataset}, {"p_low", r.p_low}, {"cumulative_low", r.cumulative_low},
                     {"p_high", r.p_high}, {"cumulative_high", r.cumulative_high}, {"gap", r.gap}});
    }
    out << doc.dump(2) << "\n";
    return;
  }
  out << "dataset,p_low,cumulative_low,p_high,cumulative_high,gap\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.p_low << ',' << fmt(r.cumulative_low) << ',' << r.p_high << ','
        << fmt(r.cumulative_high) << ',' << fmt(r.gap) << '\n';
  }
}

void write_scores(std::ostream& out, const ScoreReport& report, const std::optional<Labels>& labels,
                  Format format) {
  const auto m = report.score.size();
  if (format == Format::kJson) {
    auto as_vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    json doc{{"probability", as_vec(report.probability)},
             {"mean_distance", as_vec(report.mean_distance)},
             {"score", as_vec(report.score)}};
    if (labels) doc["label"] = *labels;
    out << doc.dump(2) << "\n";
    return;
  }
  out << "index,probability,mean_distance,score" << (labels ? ",label" : "") << "\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    out << i << ',' << fmt(report.probability[i]) << ',' << fmt(report.mean_distance[i]) << ','
        << fmt(report.score[i]);
    if (labels) out << ',' << static_cast<int>((*labels)[static_cast<std::size_t>(i)]);
    out << '\n';
  }
}

int run(const RunConfig& config, std::ostream& err) {
  try {
    const auto& cmd = config.command;
    if (cmd == "bench") {
      auto rows = run_bench(config);
      Sink sink(config.out);
      write_bench(sink.stream(), rows, config.format);
      sink.finish(config.out);
      return 0;
    }

    Dataset data = load_dataset(config);
    if (cmd == "fit") {
      if (!config.out) throw ValidationError("fit needs --out for the model file");
      ForestParams params = config.method.forest;
      params.seed = config.seeds.empty() ? kDefaultSeed : config.seeds.front();
      auto forest = fit_forest(data.features, params, config.method.workers);
      save_forest(*config.out, forest);
      err << "fitted " << forest.size() << " trees on " << data.name << " (" << data.size() << " x "
          << data.dim() << ")\n";
    } else if (cmd == "score") {
      if (!config.model) throw ValidationError("score needs --model");
      auto training = std::make_shared<const Matrix>(data.features);
      auto forest = load_forest(*config.model, training);
      auto report = score_training(forest, config.method.leaf_mode, config.method.workers);
      Sink sink(config.out);
      write_scores(sink.stream(), report, data.labels, config.format);
      sink.finish(config.out);
    } else if (cmd == "eval") {
      auto rows = run_eval(config, data);
      Sink sink(config.out);
      write_eval(sink.stream(), rows, config.format);
      sink.finish(config.out);
      summarize(err, rows);
    } else if (cmd == "sweep") {
      auto rows = run_sweep(config, data);
      Sink sink(config.out);
      write_eval(sink.stream(), rows, config.format);
      sink.finish(config.out);
      if (config.variance_out) {
        Sink vsink(config.variance_out);
        write_variance(vsink.stream(), {explained_variance_row(config, data)}, config.format);
        vsink.finish(config.variance_out);
      }
    } else if (cmd == "curve") {
      auto curve = run_curve(config, data);
      Sink sink(config.out);
      write_curve(sink.stream(), method_name(config.method.method), data.name, curve, config.format);
      sink.finish(config.out);
    } else {
      throw ParameterError("unknown command '" + cmd + "'");
    }
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rpca::cli
