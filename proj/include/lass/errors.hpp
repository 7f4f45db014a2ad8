#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "lass/types.hpp"

namespace lass {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised for NaN/Inf input. `row` is set when the offending value sits in a
// batch (matrix row); `col` when the column is known too.
class NonFiniteInput : public Error {
 public:
  explicit NonFiniteInput(const std::string& what, std::optional<Index> row = {},
                          std::optional<Index> col = {})
      : Error(what), row_(row), col_(col) {}

  std::optional<Index> row() const { return row_; }
  std::optional<Index> col() const { return col_; }

 private:
  std::optional<Index> row_;
  std::optional<Index> col_;
};

// Out-of-sample query whose affinities to the training set sum to zero.
class ZeroAffinity : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <class A, class B>
void require_same_shape(const A& a, const B& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(where) + ": shape " +
                            shape_string(a.rows(), a.cols()) + " vs " +
                            shape_string(b.rows(), b.cols()));
  }
}

}  // namespace detail
}  // namespace lass
