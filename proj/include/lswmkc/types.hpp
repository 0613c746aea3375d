#pragma once

#include <Eigen/Dense>

namespace lswmkc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace lswmkc
