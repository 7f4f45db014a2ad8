#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lass/errors.hpp"
#include "lass/types.hpp"

namespace lass {

// Symmetric nonnegative affinities W with zero diagonal, degrees d = W 1 and
// the unnormalised Laplacian L = diag(d) - W.
template <class Scalar>
struct AffinityGraph {
  Matrix<Scalar> W;
  Matrix<Scalar> L;
  Vector<Scalar> degree;

  Index size() const { return W.rows(); }
};

template <class Derived>
AffinityGraph<typename Derived::Scalar> graph_from_affinities(const Eigen::MatrixBase<Derived>& W) {
  using Scalar = typename Derived::Scalar;
  if (W.rows() != W.cols()) {
    throw DimensionMismatch("affinity matrix must be square, got " +
                            detail::shape_string(W.rows(), W.cols()));
  }
  const Index n = W.rows();
  for (Index i = 0; i < n; ++i) {
    if (W(i, i) != Scalar(0)) throw InvalidArgument("affinity matrix must have a zero diagonal");
    for (Index j = 0; j < n; ++j) {
      if (!std::isfinite(static_cast<double>(W(i, j))) || W(i, j) < Scalar(0)) {
        throw InvalidArgument("affinities must be finite and nonnegative");
      }
      if (W(i, j) != W(j, i)) throw InvalidArgument("affinity matrix must be symmetric");
    }
  }
  AffinityGraph<Scalar> graph;
  graph.W = W;
  graph.degree = graph.W.rowwise().sum();
  graph.L = -graph.W;
  graph.L.diagonal() += graph.degree;
  return graph;
}

template <class Derived>
Matrix<typename Derived::Scalar> squared_distances(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Index n = points.rows();
  Matrix<Scalar> dist(n, n);
  for (Index m = 0; m < n; ++m) {
    dist(m, m) = Scalar(0);
    for (Index k = m + 1; k < n; ++k) {
      const Scalar d = (points.row(m) - points.row(k)).squaredNorm();
      dist(m, k) = d;
      dist(k, m) = d;
    }
  }
  return dist;
}

// w_mn = exp(-||x_m - x_n||^2 / (2 bandwidth^2)) for m != n. With `knn`, an edge
// survives when either endpoint is among the other's knn nearest neighbours
// (distance ties broken by lower index).
template <class Derived>
AffinityGraph<typename Derived::Scalar> gaussian_affinities(
    const Eigen::MatrixBase<Derived>& points, typename Derived::Scalar bandwidth,
    std::optional<Index> knn = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  const Index n = points.rows();
  if (n < 2) throw InvalidArgument("graph construction needs at least 2 points");
  if (!(bandwidth > Scalar(0)) || !std::isfinite(static_cast<double>(bandwidth))) {
    throw InvalidArgument("bandwidth must be a finite positive number");
  }
  if (knn && (*knn < 1 || *knn >= n)) {
    throw InvalidArgument("knn must lie in [1, N-1] = [1, " + std::to_string(n - 1) + "], got " +
                          std::to_string(*knn));
  }
  if (!points.allFinite()) throw NonFiniteInput("dataset contains non-finite values");

  const Matrix<Scalar> dist = squared_distances(points);
  const Scalar denom = Scalar(2) * bandwidth * bandwidth;
  Matrix<Scalar> W(n, n);
  for (Index m = 0; m < n; ++m) {
    for (Index k = 0; k < n; ++k) W(m, k) = m == k ? Scalar(0) : std::exp(-dist(m, k) / denom);
  }

  if (knn) {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> keep =
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    std::vector<Index> order;
    for (Index m = 0; m < n; ++m) {
      order.resize(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), Index{0});
      order.erase(order.begin() + m);
      std::partial_sort(order.begin(), order.begin() + *knn, order.end(), [&](Index p, Index q) {
        return std::pair(dist(m, p), p) < std::pair(dist(m, q), q);
      });
      for (Index r = 0; r < *knn; ++r) {
        const Index nb = order[static_cast<std::size_t>(r)];
        keep(m, nb) = true;
        keep(nb, m) = true;
      }
    }
    W = keep.select(W, Scalar(0));
  }
  return graph_from_affinities(W);
}

// tr(Z^T L Z).
template <class DerivedL, class DerivedZ>
typename DerivedZ::Scalar laplacian_quadratic(const Eigen::MatrixBase<DerivedL>& L,
                                              const Eigen::MatrixBase<DerivedZ>& Z) {
  if (L.rows() != L.cols() || L.cols() != Z.rows()) {
    throw DimensionMismatch("laplacian_quadratic: L is " + detail::shape_string(L.rows(), L.cols()) +
                            ", Z is " + detail::shape_string(Z.rows(), Z.cols()));
  }
  return Z.cwiseProduct(L * Z).sum();
}

template <class Scalar, class DerivedZ>
Scalar laplacian_quadratic(const AffinityGraph<Scalar>& graph, const Eigen::MatrixBase<DerivedZ>& Z) {
  return laplacian_quadratic(graph.L, Z);
}

// 0.5 * sum_{m,n} w_mn ||z_m - z_n||^2, the pairwise form of tr(Z^T L Z).
template <class DerivedW, class DerivedZ>
typename DerivedZ::Scalar pairwise_smoothness(const Eigen::MatrixBase<DerivedW>& W,
                                              const Eigen::MatrixBase<DerivedZ>& Z) {
  using Scalar = typename DerivedZ::Scalar;
  if (W.rows() != W.cols() || W.cols() != Z.rows()) {
    throw DimensionMismatch("pairwise_smoothness: W is " + detail::shape_string(W.rows(), W.cols()) +
                            ", Z is " + detail::shape_string(Z.rows(), Z.cols()));
  }
  Scalar total = Scalar(0);
  for (Index m = 0; m < Z.rows(); ++m) {
    for (Index n = 0; n < Z.rows(); ++n) {
      if (W(m, n) != Scalar(0)) total += W(m, n) * (Z.row(m) - Z.row(n)).squaredNorm();
    }
  }
  return Scalar(0.5) * total;
}

}  // namespace lass
