#pragma once

#include <Eigen/Core>

namespace lass {

using Index = Eigen::Index;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Row-major so that each row (one point, one assignment vector) is contiguous.
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

}  // namespace lass
