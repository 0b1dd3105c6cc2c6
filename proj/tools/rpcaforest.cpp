// rpcaforest: fit, score and evaluate RPCA forests and baselines from the shell.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cli/commands.hpp"
#include "rpca/errors.hpp"

namespace {

using rpca::cli::RunConfig;

struct RawFlags {
  std::string method = "rpca_forest";
  std::string seeds = "1-5";
  std::string format = "csv";
  std::string p_grid = "1,5";
  std::string k_grid = "10,20";
  std::string sizes;
  std::string leaf_mode = "inclusive";
};

void add_data_flags(CLI::App& cmd, RunConfig& config) {
  cmd.add_option("--dataset", config.dataset, "CSV file with one row per point");
  cmd.add_option("--label-column", config.label_column, "label column index or header name");
  cmd.add_option("--name", config.dataset_name, "dataset name (defaults to the file stem)");
  cmd.add_flag("--normalize", config.normalize, "min-max scale every feature column to [0, 1]");
}

void add_model_flags(CLI::App& cmd, RunConfig& config, RawFlags& raw) {
  auto& m = config.method;
  cmd.add_option("--method", raw.method, "rpca_forest | iforest | knn | knnw")->capture_default_str();
  cmd.add_option("--trees", m.forest.n_trees, "number of trees")->capture_default_str();
  cmd.add_option("--p", m.forest.p, "principal components per node")->capture_default_str();
  cmd.add_option("--k", m.forest.k, "leaf capacity (RPCA) / neighbour count (KNN)")->capture_default_str();
  cmd.add_option("--seeds", raw.seeds, "seed list, e.g. 1-5 or 1,3,7")->capture_default_str();
  cmd.add_option("--workers", m.workers, "worker threads (0 = all cores)")->capture_default_str();
  cmd.add_option("--oversampling", m.forest.pca.oversampling, "randomized SVD oversampling")->capture_default_str();
  cmd.add_option("--power-iters", m.forest.pca.power_iters, "randomized SVD power iterations")->capture_default_str();
  cmd.add_option("--subsample", m.iforest_subsample, "isolation forest subsample size")->capture_default_str();
  cmd.add_option("--leaf-mode", raw.leaf_mode, "inclusive | exclusive self-distance in leaf means")
      ->capture_default_str();
}

void add_output_flags(CLI::App& cmd, RunConfig& config, RawFlags& raw) {
  cmd.add_option("--out", config.out, "output file (stdout when omitted)");
  cmd.add_option("--format", raw.format, "csv | json")->capture_default_str();
}

void finalize(RunConfig& config, const RawFlags& raw) {
  config.method.method = rpca::parse_method(raw.method);
  config.method.knn_k = config.method.forest.k;
  config.seeds = rpca::cli::parse_seed_list(raw.seeds);
  if (raw.format == "csv") {
    config.format = rpca::cli::Format::kCsv;
  } else if (raw.format == "json") {
    config.format = rpca::cli::Format::kJson;
  } else {
    throw rpca::ParameterError("--format must be csv or json");
  }
  if (raw.leaf_mode == "inclusive") {
    config.method.leaf_mode = rpca::LeafDistanceMode::kInclusive;
  } else if (raw.leaf_mode == "exclusive") {
    config.method.leaf_mode = rpca::LeafDistanceMode::kExclusive;
  } else {
    throw rpca::ParameterError("--leaf-mode must be inclusive or exclusive");
  }
  config.p_grid = rpca::cli::parse_count_list(raw.p_grid);
  config.k_grid = rpca::cli::parse_count_list(raw.k_grid);
  if (!raw.sizes.empty()) config.sizes = rpca::cli::parse_count_list(raw.sizes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RPCA forest outlier detection"};
  app.require_subcommand(1);

  RunConfig config;
  RawFlags raw;

  auto* fit = app.add_subcommand("fit", "fit a forest and save it as JSON");
  auto* score = app.add_subcommand("score", "score the training points of a saved forest");
  auto* eval = app.add_subcommand("eval", "fit, score and report ROC AUC per seed");
  auto* sweep = app.add_subcommand("sweep", "evaluate RPCA forests over a (p, k) grid");
  auto* curve = app.add_subcommand("curve", "AUC versus number of trees");
  auto* bench = app.add_subcommand("bench", "runtime scaling on synthetic data");

  for (auto* cmd : {fit, score, eval, sweep, curve}) add_data_flags(*cmd, config);
  for (auto* cmd : {fit, score, eval, sweep, curve, bench}) {
    add_model_flags(*cmd, config, raw);
    add_output_flags(*cmd, config, raw);
  }
  score->add_option("--model", config.model, "forest JSON written by 'fit'")->required();
  sweep->add_option("--p-grid", raw.p_grid, "component counts")->capture_default_str();
  sweep->add_option("--k-grid", raw.k_grid, "leaf capacities")->capture_default_str();
  sweep->add_option("--variance-out", config.variance_out, "explained-variance companion table");
  curve->add_option("--sizes", raw.sizes, "forest sizes, e.g. 1,5,10,20,100");
  curve->add_option("--repeats", config.repeats, "random tree subsets per size")->capture_default_str();
  bench->add_option("--sizes", raw.sizes, "dataset sizes, e.g. 500,1000,2000")->required();
  bench->add_option("--dim", config.dim, "feature count")->capture_default_str();
  bench->add_option("--runs", config.bench_runs, "timed runs per size (median reported)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  config.command = app.get_subcommands().front()->get_name();
  try {
    finalize(config, raw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rpca::cli::run(config, std::cerr);
}
