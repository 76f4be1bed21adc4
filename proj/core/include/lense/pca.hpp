#pragma once

#include <Eigen/Dense>

namespace lense {

/// Principal-component projection to two dimensions. Each component's sign
/// is fixed so its largest-magnitude entry is positive.
struct Pca2 {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;  // d x 2

  static Pca2 fit(const Eigen::MatrixXd& rows);
  Eigen::MatrixXd project(const Eigen::MatrixXd& rows) const;
};

}  // namespace lense
