#include "rpca/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rpca/errors.hpp"
#include "rpca/random.hpp"

namespace rpca {

namespace {

std::string_view trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\"'");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\"'");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto field = trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    fields.emplace_back(field);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<std::uint8_t> parse_label(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "0" || lower == "no") return 0;
  if (lower == "1" || lower == "yes") return 1;
  if (auto v = parse_number(s)) {
    if (*v == 0.0) return 0;
    if (*v == 1.0) return 1;
  }
  return std::nullopt;
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
}

}  // namespace

std::size_t Dataset::outlier_count() const {
  if (!labels) return 0;
  return static_cast<std::size_t>(std::count(labels->begin(), labels->end(), std::uint8_t{1}));
}

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) {
    throw ValidationError("dataset '" + name + "' is empty");
  }
  if (!features.allFinite()) {
    throw ValidationError("dataset '" + name + "' contains non-finite values");
  }
  if (labels) {
    if (labels->size() != size()) throw ValidationError("label count does not match row count");
    for (auto l : *labels) {
      if (l > 1) throw ValidationError("labels must be 0 or 1");
    }
  }
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  for (std::size_t line_no = 0; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    rows.push_back(split_row(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ValidationError(path.string() + ": empty file");

  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw IoError(path.string() + ": " + location(line_numbers[r], 0) + ": expected " +
                    std::to_string(width) + " fields, found " + std::to_string(rows[r].size()));
    }
  }

  std::vector<std::string> header;
  bool has_header = std::any_of(rows.front().begin(), rows.front().end(), [](const std::string& f) {
    return !parse_number(f) && !parse_label(f);
  });
  if (has_header) {
    header = rows.front();
    rows.erase(rows.begin());
    line_numbers.erase(line_numbers.begin());
  }
  if (rows.empty()) throw ValidationError(path.string() + ": no data rows");

  std::optional<std::size_t> label_col;
  if (options.label_column) {
    if (auto* idx = std::get_if<std::size_t>(&*options.label_column)) {
      label_col = *idx;
    } else {
      const auto& wanted = std::get<std::string>(*options.label_column);
      auto it = std::find(header.begin(), header.end(), wanted);
      if (it == header.end()) {
        // A numeric string is accepted as an index.
        auto as_index = parse_number(wanted);
        if (!as_index || *as_index < 0 || std::floor(*as_index) != *as_index) {
          throw ValidationError(path.string() + ": no column named '" + wanted + "'");
        }
        label_col = static_cast<std::size_t>(*as_index);
      } else {
        label_col = static_cast<std::size_t>(it - header.begin());
      }
    }
    if (*label_col >= width) {
      throw ValidationError(path.string() + ": label column " + std::to_string(*label_col) +
                            " out of range for " + std::to_string(width) + " columns");
    }
  } else if (width > 1) {
    bool binary = std::all_of(rows.begin(), rows.end(),
                              [&](const auto& row) { return parse_label(row.back()).has_value(); });
    if (binary) label_col = width - 1;
  }

  const std::size_t n = rows.size();
  const std::size_t d = width - (label_col ? 1 : 0);
  if (d == 0) throw ValidationError(path.string() + ": no feature columns");

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (label_col) data.labels.emplace(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const auto& field = rows[r][c];
      if (label_col && c == *label_col) {
        auto label = parse_label(field);
        if (!label) {
          throw ValidationError(path.string() + ": " + location(line_numbers[r], c) +
                                ": label '" + field + "' is not one of 0, 1, no, yes");
        }
        (*data.labels)[r] = *label;
        continue;
      }
      auto value = parse_number(field);
      if (!value) {
        throw IoError(path.string() + ": " + location(line_numbers[r], c) + ": cannot parse '" +
                      field + "' as a number");
      }
      if (!std::isfinite(*value)) {
        throw ValidationError(path.string() + ": " + location(line_numbers[r], c) +
                              ": non-finite value");
      }
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_col++)) = *value;
    }
  }

  for (std::size_t c = 0; c < width; ++c) {
    if (label_col && c == *label_col) continue;
    data.feature_names.push_back(has_header ? header[c] : "x" + std::to_string(c));
  }
  data.name = options.name.value_or(path.stem().string());
  if (options.normalize) normalize_min_max(data.features);
  data.validate();
  return data;
}

void normalize_min_max(Matrix& features) {
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    auto col = features.col(c);
    const double lo = col.minCoeff();
    const double span = col.maxCoeff() - lo;
    if (span > 0.0) {
      col = (col.array() - lo) / span;
      // Pin the endpoints exactly so a second pass is a no-op.
      for (Eigen::Index r = 0; r < col.size(); ++r) col[r] = std::clamp(col[r], 0.0, 1.0);
    } else {
      col.setZero();
    }
  }
}

Dataset generate_synthetic(std::size_t n_inliers, std::size_t n_outliers, std::size_t dim,
                           double outlier_shift, std::uint64_t seed) {
  if (n_inliers < 1) throw ParameterError("generate_synthetic: n_inliers must be >= 1");
  if (dim < 1) throw ParameterError("generate_synthetic: dim must be >= 1");
  if (!(outlier_shift > 0.0)) throw ParameterError("generate_synthetic: outlier_shift must be > 0");

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);

  Vector direction(d);
  do {
    for (Eigen::Index j = 0; j < d; ++j) direction[j] = normal(rng);
  } while (direction.norm() == 0.0);
  direction /= direction.norm();

  const std::size_t n = n_inliers + n_outliers;
  Dataset data;
  data.name = "synthetic";
  data.features.resize(static_cast<Eigen::Index>(n), d);
  data.labels.emplace(n, std::uint8_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.features.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index j = 0; j < d; ++j) row[j] = normal(rng);
    if (i >= n_inliers) {
      row += outlier_shift * direction.transpose();
      (*data.labels)[i] = 1;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) data.feature_names.push_back("x" + std::to_string(j));
  return data;
}

}  // namespace rpca
