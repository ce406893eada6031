#pragma once

#include <Eigen/Core>

namespace onebit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
// Measurement matrices keep one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace onebit
