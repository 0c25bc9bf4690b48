#include "pcd/pca.hpp"

#include <algorithm>

namespace pcd {

Point Pca::transform(const Point& x) const { return components.transpose() * (x - mean); }

PointSet Pca::transform(const PointSet& xs) const {
  PointSet out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(transform(x));
  return out;
}

double Pca::explained() const {
  const double total = variances.sum();
  if (total <= 0.0) return 1.0;
  return variances.head(out_dim()).sum() / total;
}

Pca fit_pca(const PointSet& xs, int target_dim) {
  if (xs.size() < 2) throw Error(Errc::InsufficientPoints, "PCA needs at least two points");
  const int d = static_cast<int>(xs[0].size());
  if (target_dim < 1 || target_dim > d) throw Error(Errc::InvalidArgument, "target dimension must lie in [1, d]");
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) x.row(i) = xs[i].transpose();
  Pca p;
  p.mean = x.colwise().mean().transpose();
  x.rowwise() -= p.mean.transpose();
  const Eigen::MatrixXd cov = x.transpose() * x / (n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // Eigen returns ascending order
  p.variances = es.eigenvalues().reverse().cwiseMax(0.0);
  Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();
  const double floor = 1e-12 * std::max(1.0, p.variances[0]);
  int keep = 0;
  while (keep < target_dim && p.variances[keep] > floor) ++keep;
  keep = std::max(keep, 1);
  p.components = vecs.leftCols(keep);
  for (int k = 0; k < keep; ++k) {
    Eigen::Index i;
    p.components.col(k).cwiseAbs().maxCoeff(&i);
    if (p.components(i, k) < 0) p.components.col(k) *= -1.0;
  }
  return p;
}

}  // namespace pcd
