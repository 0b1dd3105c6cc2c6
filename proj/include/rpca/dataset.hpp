#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace rpca {

/// Row-major point matrix: one observation per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<std::uint8_t>;

/// Feature matrix with optional binary outlier labels (0 = inlier, 1 = outlier).
struct Dataset {
  Matrix features;
  std::optional<Labels> labels;
  std::string name;
  std::vector<std::string> feature_names;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  bool labeled() const { return labels.has_value(); }
  std::size_t outlier_count() const;

  /// Throws ValidationError unless n >= 1, d >= 1, all values finite and
  /// labels (if any) have length n with entries in {0, 1}.
  void validate() const;
};

/// Label column selector: zero-based index or header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct CsvOptions {
  std::optional<ColumnRef> label_column;
  bool normalize = false;
  std::optional<std::string> name;
};

/// Reads a comma-separated file. A first row containing a non-numeric
/// field (other than a yes/no label token) is treated as a header. When no
/// label column is given, the last column becomes the label column if every
/// value in it is one of 0, 1, "no", "yes".
///
/// Parse failures and ragged rows raise IoError with the row/column;
/// non-finite values and empty files raise ValidationError.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Min-max scales each column to [0, 1] in place; constant columns map to 0.
void normalize_min_max(Matrix& features);

/// i.i.d. standard normal inliers followed by outliers whose mean is shifted
/// by `outlier_shift` along a random unit direction. Deterministic in `seed`.
Dataset generate_synthetic(std::size_t n_inliers, std::size_t n_outliers, std::size_t dim,
                           double outlier_shift, std::uint64_t seed);

}  // namespace rpca
