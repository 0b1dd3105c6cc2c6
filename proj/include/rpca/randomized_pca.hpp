#pragma once

#include <cstddef>

#include "rpca/dataset.hpp"
#include "rpca/random.hpp"

namespace rpca {

/// Randomized range-finder settings. `oversampling` is capped at
/// min(m, d) - p per fit.
struct RandomizedPcaOptions {
  std::size_t oversampling = 10;
  std::size_t power_iters = 2;
};

/// Top-p principal directions of a point set.
///
/// `components` holds one unit-norm direction per row (p x d), sorted by
/// decreasing explained variance. Each row's largest-magnitude entry is
/// positive.
struct PCAModel {
  Vector mean;
  Matrix components;
  Vector explained_variance;
  Vector explained_variance_ratio;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t n_components() const { return static_cast<std::size_t>(components.rows()); }
};

/// Randomized SVD of the mean-centred points (Gaussian test matrix, power
/// iterations with QR re-orthonormalization, small dense SVD of the
/// projected block). Never forms the d x d covariance.
///
/// Throws DegenerateInputError when fewer than 2 rows are given and
/// ParameterError unless 1 <= p <= min(m, d).
PCAModel fit_randomized_pca(const Eigen::Ref<const Matrix>& points, std::size_t p,
                            const RandomizedPcaOptions& options, Rng& rng);

/// Coordinates of `point` in the model's component basis. This is the single
/// projection routine used for both tree fitting and routing, so split
/// decisions made at fit time reproduce bit-for-bit at query time.
void project_point(const PCAModel& model, const double* point, double* out);

/// (points - mean) * components^T; row order preserved.
Matrix project(const PCAModel& model, const Eigen::Ref<const Matrix>& points);

/// Running sums of the explained-variance ratios for components 1..p.
Vector cumulative_explained_variance(const Eigen::Ref<const Matrix>& points, std::size_t p,
                                     const RandomizedPcaOptions& options, Rng& rng);

}  // namespace rpca
