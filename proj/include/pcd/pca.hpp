#pragma once

// Principal component projection fitted on one point set, applied to others.

#include "pcd/geometry.hpp"

namespace pcd {

struct Pca {
  Point mean;
  Eigen::MatrixXd components;  // d x k, columns are unit eigenvectors
  Eigen::VectorXd variances;   // all d eigenvalues, descending

  int out_dim() const { return static_cast<int>(components.cols()); }
  Point transform(const Point& x) const;
  PointSet transform(const PointSet& xs) const;
  /// Fraction of total variance carried by the kept components.
  double explained() const;
};

/// Eigenvectors of the sample covariance, descending eigenvalue; each
/// component's largest-magnitude loading is made positive. Components with
/// (numerically) zero variance are dropped.
Pca fit_pca(const PointSet& xs, int target_dim);

}  // namespace pcd
