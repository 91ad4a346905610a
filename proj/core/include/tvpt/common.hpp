#pragma once

#include <Eigen/Core>

namespace tvpt {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Library version string, e.g. "0.1.0".
const char* version();

}  // namespace tvpt
