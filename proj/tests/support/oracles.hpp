#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace rpca::oracle {

using Dense = Eigen::MatrixXd;

/// Top-p eigenvectors (as columns, d x p) of the sample covariance of
/// `points`, from a dense symmetric eigensolver.
inline Dense exact_top_components(const Dense& points, int p) {
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Dense centered = points.rowwise() - mean;
  const Dense cov = centered.transpose() * centered / static_cast<double>(points.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Dense> solver(cov);
  // Eigenvalues ascend; take the last p columns, largest first.
  return solver.eigenvectors().rightCols(p).rowwise().reverse();
}

inline Eigen::VectorXd exact_eigenvalues_desc(const Dense& points) {
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Dense centered = points.rowwise() - mean;
  const Dense cov = centered.transpose() * centered / static_cast<double>(points.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Dense> solver(cov);
  return solver.eigenvalues().reverse();
}

/// Largest principal angle (radians) between the column spans of a and b.
inline double max_principal_angle(const Dense& a, const Dense& b) {
  Eigen::HouseholderQR<Dense> qa(a), qb(b);
  const Dense ua = qa.householderQ() * Dense::Identity(a.rows(), a.cols());
  const Dense ub = qb.householderQ() * Dense::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Dense> svd(ua.transpose() * ub);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::clamp(smallest, -1.0, 1.0));
}

/// ROC AUC by sweeping every distinct score as a threshold (descending) and
/// integrating TPR over FPR with the trapezoid rule.
inline double roc_auc_sweep(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  double pos = 0, neg = 0;
  for (auto l : labels) (l ? pos : neg) += 1;
  std::map<double, std::pair<double, double>, std::greater<>> by_threshold;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& cell = by_threshold[scores[i]];
    (labels[i] ? cell.first : cell.second) += 1;
  }
  double tp = 0, fp = 0, area = 0;
  double prev_tpr = 0, prev_fpr = 0;
  for (const auto& [threshold, counts] : by_threshold) {
    tp += counts.first;
    fp += counts.second;
    const double tpr = tp / pos, fpr = fp / neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

/// Full O(n^2) pairwise distance table, then per-row sort.
inline std::vector<double> knn_scores_pairwise(const Dense& x, std::size_t k, bool sum) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<double>> table(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double diff = x(static_cast<Eigen::Index>(i), c) - x(static_cast<Eigen::Index>(j), c);
        sq += diff * diff;
      }
      table[i][j] = table[j][i] = std::sqrt(sq);
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(table[i][j]);
    }
    std::sort(row.begin(), row.end());
    double acc = 0;
    for (std::size_t t = 0; t < k; ++t) acc += row[t];
    out[i] = sum ? acc : row[k - 1];
  }
  return out;
}

/// Points whose covariance spectrum decays like real tabular data: Gaussian
/// latent factors with log-uniform scales, randomly rotated, plus noise.
inline Dense spectral_points(int m, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-2.0, 1.0);
  Dense latent(m, d), rotation(d, d);
  for (int c = 0; c < d; ++c) {
    const double s = std::pow(10.0, log_scale(rng));
    for (int r = 0; r < m; ++r) latent(r, c) = s * normal(rng);
  }
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) rotation(r, c) = normal(rng);
  Eigen::HouseholderQR<Dense> qr(rotation);
  const Dense q = qr.householderQ();
  return latent * q.transpose();
}

}  // namespace rpca::oracle
