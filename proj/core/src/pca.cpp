#include "lense/pca.hpp"

#include "lense/errors.hpp"

namespace lense {

Pca2 Pca2::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1 || rows.cols() < 2) throw DomainError("PCA needs at least one row of two or more columns");
  Pca2 p;
  p.mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - p.mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / std::max<double>(1.0, rows.rows() - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index d = cov.cols();
  // eigenvalues ascend; take the last two
  p.components.resize(d, 2);
  p.components.col(0) = solver.eigenvectors().col(d - 1);
  p.components.col(1) = solver.eigenvectors().col(d - 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    p.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (p.components(arg, c) < 0) p.components.col(c) *= -1.0;
  }
  return p;
}

Eigen::MatrixXd Pca2::project(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.cols()) throw ValidationError("PCA input width mismatch");
  return (rows.rowwise() - mean) * components;
}

}  // namespace lense
