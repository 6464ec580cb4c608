#pragma once

#include <Eigen/Dense>

namespace rmf {

/// Chart-coordinate vector of runtime dimension.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

}  // namespace rmf
