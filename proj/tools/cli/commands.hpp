#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rpca/dataset.hpp"
#include "rpca/metrics.hpp"

namespace rpca::cli {

enum class Format { kCsv, kJson };

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Everything a subcommand needs. Defaults reproduce the reference
/// configuration: 100 trees, p = 1, k = 10, seeds 1..5.
struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> dataset;
  std::optional<std::string> label_column;
  std::optional<std::string> dataset_name;
  bool normalize = false;

  MethodConfig method;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  std::vector<std::size_t> p_grid{1, 5};
  std::vector<std::size_t> k_grid{10, 20};
  std::vector<std::size_t> sizes;
  std::size_t repeats = 5;
  std::size_t dim = 100;
  std::size_t bench_runs = 3;

  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> variance_out;
  Format format = Format::kCsv;
};

struct VarianceRow {
  std::string dataset;
  std::size_t p_low = 1;
  double cumulative_low = 0.0;
  std::size_t p_high = 5;
  double cumulative_high = 0.0;
  double gap = 0.0;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t trees = 0;
  double rpca_seconds = 0.0;  // median over runs, fit + score
  double knn_seconds = 0.0;   // median over runs
  double rpca_score_mean = 0.0;
  double knn_score_mean = 0.0;
};

Dataset load_dataset(const RunConfig& config);

/// Parses "1,2,5" or "1-5" (inclusive range), or a mix such as "1-3,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<std::size_t> parse_count_list(const std::string& text);

/// One row per seed followed by a summary row with seed "mean".
std::vector<EvaluationResult> run_eval(const RunConfig& config, const Dataset& data);

/// One row per (p, k, seed), p outermost.
std::vector<EvaluationResult> run_sweep(const RunConfig& config, const Dataset& data);

/// Cumulative explained-variance ratio of the whole dataset at the smallest
/// and largest p of the sweep grid (each clamped to min(n, d)).
VarianceRow explained_variance_row(const RunConfig& config, const Dataset& data);

std::vector<CurvePoint> run_curve(const RunConfig& config, const Dataset& data);

/// Wall-clock scaling on synthetic data of width config.dim, one row per
/// entry of config.sizes. Throws ValidationError on an empty size list.
std::vector<BenchRow> run_bench(const RunConfig& config);

void write_eval(std::ostream& out, const std::vector<EvaluationResult>& rows, Format format);
void write_curve(std::ostream& out, const std::string& method, const std::string& dataset,
                 const std::vector<CurvePoint>& curve, Format format);
void write_bench(std::ostream& out, const std::vector<BenchRow>& rows, Format format);
void write_variance(std::ostream& out, const std::vector<VarianceRow>& rows, Format format);
void write_scores(std::ostream& out, const ScoreReport& report, const std::optional<Labels>& labels,
                  Format format);

/// Full command dispatch; returns the process exit code (0 ok, 1 validation
/// error, 2 I/O error). Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& err);

}  // namespace rpca::cli
