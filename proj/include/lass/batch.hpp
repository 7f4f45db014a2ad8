#pragma once

// Row-wise projection of an N x D matrix onto the simplex. Every row goes
// through project_sort, so a row of the batch result is bitwise identical to
// the single-vector projection of that row.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "lass/errors.hpp"
#include "lass/projection.hpp"
#include "lass/types.hpp"

namespace lass {

namespace detail {

template <class Derived>
void validate_batch(const Eigen::MatrixBase<Derived>& Y,
                    const SimplexSpec<typename Derived::Scalar>& spec) {
  spec.validate();
  if (Y.rows() < 1 || Y.cols() < 1) {
    throw DimensionMismatch("batch projection needs a non-empty matrix, got " +
                            shape_string(Y.rows(), Y.cols()));
  }
  if (Y.cols() != spec.dimension) {
    throw DimensionMismatch("batch has " + std::to_string(Y.cols()) +
                            " columns but the simplex has dimension " +
                            std::to_string(spec.dimension));
  }
  for (Index n = 0; n < Y.rows(); ++n) {
    for (Index k = 0; k < Y.cols(); ++k) {
      if (!std::isfinite(static_cast<double>(Y(n, k)))) {
        throw NonFiniteInput("non-finite value in row " + std::to_string(n) + ", column " +
                                 std::to_string(k),
                             n, k);
      }
    }
  }
}

}  // namespace detail

template <class Derived>
std::vector<ProjectionReport<typename Derived::Scalar>> project_rows_report(
    const Eigen::MatrixBase<Derived>& Y, const SimplexSpec<typename Derived::Scalar>& spec) {
  using Scalar = typename Derived::Scalar;
  detail::validate_batch(Y, spec);
  std::vector<ProjectionReport<Scalar>> reports;
  reports.reserve(static_cast<std::size_t>(Y.rows()));
  for (Index n = 0; n < Y.rows(); ++n) {
    reports.push_back(project_sort(Y.row(n).transpose(), spec));
  }
  return reports;
}

template <class Derived>
Matrix<typename Derived::Scalar> project_rows(const Eigen::MatrixBase<Derived>& Y,
                                              const SimplexSpec<typename Derived::Scalar>& spec) {
  using Scalar = typename Derived::Scalar;
  detail::validate_batch(Y, spec);
  Matrix<Scalar> X(Y.rows(), Y.cols());
  for (Index n = 0; n < Y.rows(); ++n) {
    X.row(n) = project_sort(Y.row(n).transpose(), spec).x.transpose();
  }
  return X;
}

template <class Derived>
Matrix<typename Derived::Scalar> project_rows(const Eigen::MatrixBase<Derived>& Y) {
  return project_rows(Y, simplex<typename Derived::Scalar>(Y.cols()));
}

}  // namespace lass
