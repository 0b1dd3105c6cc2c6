#include "rpca/randomized_pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "rpca/errors.hpp"

namespace rpca {

namespace {

using Dense = Eigen::MatrixXd;

Dense orthonormal_basis(const Dense& block) {
  Eigen::HouseholderQR<Dense> qr(block);
  return qr.householderQ() * Dense::Identity(block.rows(), block.cols());
}

}  // namespace

PCAModel fit_randomized_pca(const Eigen::Ref<const Matrix>& points, std::size_t p,
                            const RandomizedPcaOptions& options, Rng& rng) {
  const auto m = static_cast<std::size_t>(points.rows());
  const auto d = static_cast<std::size_t>(points.cols());
  if (m < 2) throw DegenerateInputError("randomized PCA needs at least 2 points, got " + std::to_string(m));
  const std::size_t rank_cap = std::min(m, d);
  if (p < 1 || p > rank_cap) {
    throw ParameterError("component count " + std::to_string(p) + " outside [1, " +
                         std::to_string(rank_cap) + "]");
  }

  PCAModel model;
  model.mean = points.colwise().mean().transpose();
  const Dense centered = points.rowwise() - model.mean.transpose();

  const std::size_t width = p + std::min(options.oversampling, rank_cap - p);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dense test_matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(width));
  for (Eigen::Index r = 0; r < test_matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < test_matrix.cols(); ++c) test_matrix(r, c) = normal(rng);
  }

  Dense range = orthonormal_basis(centered * test_matrix);
  for (std::size_t it = 0; it < options.power_iters; ++it) {
    Dense co_range = orthonormal_basis(centered.transpose() * range);
    range = orthonormal_basis(centered * co_range);
  }

  const Dense reduced = range.transpose() * centered;
  Eigen::JacobiSVD<Dense> svd(reduced, Eigen::ComputeThinV);
  const auto& singular = svd.singularValues();
  const auto& right = svd.matrixV();

  const auto k = static_cast<Eigen::Index>(p);
  model.components = right.leftCols(k).transpose();
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::Index pivot = 0;
    model.components.row(r).cwiseAbs().maxCoeff(&pivot);
    if (model.components(r, pivot) < 0) model.components.row(r) *= -1.0;
  }

  const double dof = static_cast<double>(m - 1);
  model.explained_variance = singular.head(k).array().square() / dof;
  model.explained_variance = model.explained_variance.cwiseMax(0.0);
  const double total = centered.squaredNorm() / dof;
  if (total > 0.0) {
    model.explained_variance_ratio = (model.explained_variance / total).cwiseMin(1.0);
  } else {
    model.explained_variance_ratio = Vector::Zero(k);
  }
  return model;
}

void project_point(const PCAModel& model, const double* point, double* out) {
  const Eigen::Index d = model.mean.size();
  for (Eigen::Index j = 0; j < model.components.rows(); ++j) {
    const double* axis = model.components.row(j).data();
    double acc = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) acc += (point[c] - model.mean[c]) * axis[c];
    out[j] = acc;
  }
}

Matrix project(const PCAModel& model, const Eigen::Ref<const Matrix>& points) {
  if (static_cast<std::size_t>(points.cols()) != model.dim()) {
    throw ParameterError("project: points have " + std::to_string(points.cols()) +
                         " columns, model expects " + std::to_string(model.dim()));
  }
  Matrix out(points.rows(), model.components.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    project_point(model, points.row(i).data(), out.row(i).data());
  }
  return out;
}

Vector cumulative_explained_variance(const Eigen::Ref<const Matrix>& points, std::size_t p,
                                     const RandomizedPcaOptions& options, Rng& rng) {
  PCAModel model = fit_randomized_pca(points, p, options, rng);
  Vector cumulative(model.explained_variance_ratio.size());
  double running = 0.0;
  for (Eigen::Index i = 0; i < cumulative.size(); ++i) {
    running += model.explained_variance_ratio[i];
    cumulative[i] = running;
  }
  return cumulative;
}

}  // namespace rpca
